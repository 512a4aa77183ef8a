/*
Copyright 2026 the pjpeg authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pjpeg/common.hpp"
#include "pjpeg/parser.hpp"
#include "pjpeg/thread_pool.hpp"

namespace pjpeg {

/// Batch-wide quantized coefficients, 64 per data unit (zig-zag order within
/// each unit), data units in MCU scan order.
struct CoefficientBuffer {
    std::vector<int16_t> values;
    uint64_t du_count = 0;
};

struct ImagePlanes {
    struct Plane {
        uint32_t width = 0;
        uint32_t height = 0;
        std::vector<uint8_t> samples;  // row-major

        uint8_t at(uint32_t x, uint32_t y) const { return samples[size_t(y) * width + x]; }
    };
    uint32_t width = 0;
    uint32_t height = 0;
    uint8_t h_max = 1;
    uint8_t v_max = 1;
    std::vector<Plane> planes;
};

/// Reverses DC difference coding in place: per component, DC values become
/// the inclusive prefix sum of the stored differences in data-unit scan
/// order. The first data unit of each chain is left as stored.
inline void dc_prefix_sum(CoefficientBuffer& buffer, const FrameInfo& frame,
                          unsigned workers = 1) {
    const auto& seq = frame.du_sequence;
    parallel_for(frame.components.size(), workers, [&](size_t comp) {
        int32_t acc = 0;
        bool first = true;
        for (uint64_t du = 0; du < buffer.du_count; ++du) {
            if (seq[du % seq.size()] != comp) continue;
            size_t idx = size_t(du) * 64;
            if (first) {
                acc = buffer.values[idx];
                first = false;
            } else {
                acc += buffer.values[idx];
                buffer.values[idx] = static_cast<int16_t>(acc);
            }
        }
    });
}

/// Moves the value at zig-zag index k to its raster position.
inline void dezigzag(std::span<const int16_t> block, std::span<int16_t> out) {
    for (int z = 0; z < 64; ++z) out[kZigzagToRaster[z]] = block[z];
}

/// out[i][j] = block[i][j] * Q[i][j] (both in raster order; the stored table
/// is zig-zag ordered and converted here).
inline void dequantize(std::span<const int16_t> block, const QuantTable& q,
                       std::span<int32_t> out) {
    for (int z = 0; z < 64; ++z) {
        int r = kZigzagToRaster[z];
        out[r] = int32_t(block[r]) * q.entries[kRasterToZigzag[r]];
    }
}

namespace detail {

struct IdctBasis {
    // basis[u][x] = C(u)/2 * cos((2x+1) u pi / 16)
    std::array<std::array<double, 8>, 8> basis{};
    IdctBasis() {
        for (int u = 0; u < 8; ++u) {
            double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
            for (int x = 0; x < 8; ++x)
                basis[u][x] = 0.5 * cu * std::cos((2 * x + 1) * u * M_PI / 16.0);
        }
    }
};

inline const IdctBasis& idct_basis() {
    static const IdctBasis b;
    return b;
}

}  // namespace detail

/// Separable 2-D inverse DCT (Type III, orthonormal scaling) without the
/// level shift. Matches the definitional double sum to double precision.
inline void idct_8x8_raw(std::span<const int32_t> block, std::span<double> out) {
    const auto& basis = detail::idct_basis().basis;
    // Columns: tmp[u][y] = sum_v basis[v][y] * F[u][v]
    double tmp[8][8];
    for (int u = 0; u < 8; ++u) {
        for (int y = 0; y < 8; ++y) {
            double s = 0;
            for (int v = 0; v < 8; ++v) s += basis[v][y] * block[u * 8 + v];
            tmp[u][y] = s;
        }
    }
    // Rows: out[x][y] = sum_u basis[u][x] * tmp[u][y]
    for (int x = 0; x < 8; ++x) {
        for (int y = 0; y < 8; ++y) {
            double s = 0;
            for (int u = 0; u < 8; ++u) s += basis[u][x] * tmp[u][y];
            out[x * 8 + y] = s;
        }
    }
}

/// Full IDCT of a dequantized block: inverse transform, +128 level shift,
/// rounding half away from zero, clamp to 0..255.
inline void idct_8x8(std::span<const int32_t> block, std::span<uint8_t> out) {
    std::array<double, 64> raw;
    idct_8x8_raw(block, raw);
    for (int i = 0; i < 64; ++i)
        out[i] = clamp_u8(static_cast<int>(std::lround(raw[i])) + 128);
}

/// Fused per-data-unit pass: inverse zig-zag, dequantization and IDCT in one
/// step over a coefficient buffer. Output is 64 samples per data unit.
inline std::vector<uint8_t> transform_blocks(const CoefficientBuffer& buffer,
                                             const FrameInfo& frame,
                                             const std::array<QuantTable, 4>& quant,
                                             unsigned workers = 1) {
    std::vector<uint8_t> samples(buffer.values.size());
    const auto& seq = frame.du_sequence;
    parallel_for(buffer.du_count, workers, [&](size_t du) {
        unsigned comp = seq[du % seq.size()];
        const QuantTable& q = quant[frame.components[comp].quant_table_id];
        std::array<int32_t, 64> deq;
        for (int z = 0; z < 64; ++z)
            deq[kZigzagToRaster[z]] = int32_t(buffer.values[du * 64 + z]) * q.entries[z];
        idct_8x8(deq, std::span<uint8_t>(samples).subspan(du * 64, 64));
    });
    return samples;
}

/// Reassembles per-component planes from the MCU-ordered sample blocks,
/// cropping MCU padding to each component's natural resolution.
inline ImagePlanes extract_planes(std::span<const uint8_t> blocks, const FrameInfo& frame,
                                  unsigned workers = 1) {
    ImagePlanes img;
    img.width = frame.width;
    img.height = frame.height;
    img.h_max = frame.h_max;
    img.v_max = frame.v_max;
    img.planes.resize(frame.components.size());
    for (size_t ci = 0; ci < frame.components.size(); ++ci) {
        auto& pl = img.planes[ci];
        pl.width = frame.comp_width(ci);
        pl.height = frame.comp_height(ci);
        pl.samples.assign(size_t(pl.width) * pl.height, 0);
    }
    // Offset of each slot's component-relative block index within the MCU.
    std::vector<uint32_t> slot_in_comp(frame.du_sequence.size(), 0);
    {
        std::array<uint32_t, 4> seen{};
        for (size_t s = 0; s < frame.du_sequence.size(); ++s)
            slot_in_comp[s] = seen[frame.du_sequence[s]]++;
    }

    uint64_t total_mcus = uint64_t(frame.mcus_x) * frame.mcus_y;
    parallel_for(total_mcus, workers, [&](size_t mcu) {
        uint32_t mx = static_cast<uint32_t>(mcu % frame.mcus_x);
        uint32_t my = static_cast<uint32_t>(mcu / frame.mcus_x);
        for (size_t s = 0; s < frame.du_sequence.size(); ++s) {
            unsigned ci = frame.du_sequence[s];
            const auto& c = frame.components[ci];
            auto& pl = img.planes[ci];
            uint32_t k = slot_in_comp[s];
            uint32_t bx = k % c.h_sampling;
            uint32_t by = k / c.h_sampling;
            uint32_t x0 = (mx * c.h_sampling + bx) * 8;
            uint32_t y0 = (my * c.v_sampling + by) * 8;
            const uint8_t* du = blocks.data() + (mcu * frame.data_units_per_mcu + s) * 64;
            for (uint32_t row = 0; row < 8; ++row) {
                uint32_t y = y0 + row;
                if (y >= pl.height) break;
                uint32_t cols = std::min<uint32_t>(8, pl.width > x0 ? pl.width - x0 : 0);
                for (uint32_t col = 0; col < cols; ++col)
                    pl.samples[size_t(y) * pl.width + x0 + col] = du[row * 8 + col];
            }
        }
    });
    return img;
}

}  // namespace pjpeg
