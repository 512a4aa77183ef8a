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

#include "pjpeg/bitstream.hpp"
#include "pjpeg/common.hpp"
#include "pjpeg/huffman.hpp"
#include "pjpeg/parallel_decode.hpp"
#include "pjpeg/parser.hpp"
#include "pjpeg/pipeline.hpp"
#include "pjpeg/transform.hpp"

namespace pjpeg::oracle {

/// Ground truth for differential tests: a single cursor walking the scan one
/// symbol at a time, with state snapshots at requested bit boundaries.
struct OracleTrace {
    // boundary_states[k] is the decoder state at the first symbol whose first
    // bit is >= boundaries[k]; boundary_valid[k] is false when no symbol
    // starts at or after that boundary (boundary inside trailing padding).
    std::vector<SyncState> boundary_states;
    std::vector<uint8_t> boundary_valid;
    CoefficientBuffer coeffs;  // entropy-stage output, zig-zag order per unit
    SyncState end_state;       // state after the final symbol
};

inline OracleTrace oracle_decode(const ParsedImage& img,
                                 std::span<const uint64_t> boundaries = {}) {
    std::vector<HuffmanTable> dc_tables(4), ac_tables(4);
    for (int i = 0; i < 4; ++i) {
        if (img.dc_tables[i].present) dc_tables[i] = build_table(img.dc_tables[i]);
        if (img.ac_tables[i].present) ac_tables[i] = build_table(img.ac_tables[i]);
    }
    const FrameInfo& frame = img.frame;
    const auto& du_seq = frame.du_sequence;
    uint64_t total_dus = frame.total_data_units();

    OracleTrace trace;
    trace.coeffs.du_count = total_dus;
    trace.coeffs.values.assign(total_dus * 64, 0);

    BitCursor cursor(img.segment);
    SyncState st{0, 0, 0, 0};
    size_t next_boundary = 0;
    uint64_t dus_done = 0;

    while (dus_done < total_dus) {
        uint64_t p = cursor.position();
        while (next_boundary < boundaries.size() && boundaries[next_boundary] <= p) {
            trace.boundary_states.push_back(st);
            trace.boundary_valid.push_back(1);
            ++next_boundary;
        }
        unsigned comp = du_seq[st.c];
        DecodedSymbol sym = decode_next_symbol(
            cursor, st.z, dc_tables[frame.components[comp].dc_table_id],
            ac_tables[frame.components[comp].ac_table_id]);
        if (sym.kind == DecodedSymbol::Kind::Coefficient)
            trace.coeffs.values[st.n + sym.run_length] = static_cast<int16_t>(sym.coefficient);
        st.p = cursor.position();
        st.n += sym.run_length + 1;
        st.z += sym.run_length + 1;
        if (st.z > 64)
            throw Error(Errc::InvalidCode, "zig-zag index overran the data unit");
        if (st.z == 64 || sym.kind == DecodedSymbol::Kind::EOB) {
            st.z = 0;
            st.c = static_cast<uint32_t>((st.c + 1) % du_seq.size());
            ++dus_done;
        }
    }
    trace.end_state = st;
    while (next_boundary < boundaries.size()) {
        trace.boundary_states.push_back(st);
        trace.boundary_valid.push_back(0);
        ++next_boundary;
    }
    return trace;
}

inline OracleTrace oracle_decode(std::span<const uint8_t> file_bytes,
                                 std::span<const uint64_t> boundaries = {}) {
    ParsedImage img = parse(file_bytes);
    return oracle_decode(img, boundaries);
}

// ---------------------------------------------------------------------------
// Minimal baseline encoder: exists to manufacture test vectors with known
// coefficients, not as a product surface.
// ---------------------------------------------------------------------------

enum class Sampling { S444, S422, S420, Gray };

namespace detail {

inline constexpr std::array<uint8_t, 64> kLumaQuant = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr std::array<uint8_t, 64> kChromaQuant = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

inline constexpr std::array<uint8_t, 16> kDcLumaCounts = {0, 1, 5, 1, 1, 1, 1, 1,
                                                         1, 0, 0, 0, 0, 0, 0, 0};
inline constexpr std::array<uint8_t, 12> kDcSymbols = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
inline constexpr std::array<uint8_t, 16> kDcChromaCounts = {0, 3, 1, 1, 1, 1, 1, 1,
                                                            1, 1, 1, 0, 0, 0, 0, 0};

inline constexpr std::array<uint8_t, 16> kAcLumaCounts = {0, 2, 1, 3, 3, 2, 4, 3,
                                                          5, 5, 4, 4, 0, 0, 1, 0x7d};
inline constexpr std::array<uint8_t, 162> kAcLumaSymbols = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51,
    0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1,
    0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18,
    0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57,
    0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92,
    0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
    0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8,
    0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2,
    0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

inline constexpr std::array<uint8_t, 16> kAcChromaCounts = {0, 2, 1, 2, 4, 4, 3, 4,
                                                            7, 5, 4, 4, 0, 1, 2, 0x77};
inline constexpr std::array<uint8_t, 162> kAcChromaSymbols = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07,
    0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09,
    0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25,
    0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38,
    0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56,
    0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74,
    0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5,
    0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba,
    0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6,
    0xd7, 0xd8, 0xd9, 0xda, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2,
    0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

inline std::array<uint16_t, 64> scaled_quant(const std::array<uint8_t, 64>& base,
                                             int quality) {
    quality = std::max(1, std::min(100, quality));
    int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<uint16_t, 64> q{};
    for (int i = 0; i < 64; ++i) {
        int v = (base[i] * scale + 50) / 100;
        q[i] = static_cast<uint16_t>(std::max(1, std::min(255, v)));
    }
    return q;
}

class BitWriter {
public:
    void put(uint32_t code, unsigned len) {
        for (unsigned i = len; i-- > 0;) {
            acc_ = (acc_ << 1) | ((code >> i) & 1);
            if (++fill_ == 8) flush_byte();
        }
    }
    // Pads the final partial byte with 1-bits (JPEG convention).
    std::vector<uint8_t> finish() {
        while (fill_ != 0) {
            acc_ = (acc_ << 1) | 1;
            if (++fill_ == 8) flush_byte();
        }
        return std::move(bytes_);
    }

private:
    void flush_byte() {
        bytes_.push_back(acc_);
        if (acc_ == 0xFF) bytes_.push_back(0x00);  // byte stuffing
        acc_ = 0;
        fill_ = 0;
    }
    std::vector<uint8_t> bytes_;
    uint8_t acc_ = 0;
    unsigned fill_ = 0;
};

struct EncoderTable {
    std::array<uint16_t, 256> code{};
    std::array<uint8_t, 256> length{};
};

inline EncoderTable make_encoder(const HuffmanTableSpec& spec) {
    HuffmanTable t = build_table(spec);
    EncoderTable e;
    for (const auto& c : t.codes) {
        e.code[c.symbol] = c.code;
        e.length[c.symbol] = c.length;
    }
    return e;
}

inline unsigned magnitude_category(int v) {
    unsigned m = static_cast<unsigned>(v < 0 ? -v : v);
    unsigned l = 0;
    while (m) {
        ++l;
        m >>= 1;
    }
    return l;
}

inline uint32_t magnitude_bits(int v, unsigned l) {
    return v >= 0 ? static_cast<uint32_t>(v)
                  : static_cast<uint32_t>(v + (1 << l) - 1);
}

inline void forward_dct_quant(const std::array<double, 64>& samples,
                              const std::array<uint16_t, 64>& quant_zz,
                              std::array<int16_t, 64>& out_zz) {
    const auto& basis = pjpeg::detail::idct_basis().basis;
    double tmp[8][8];  // tmp[u][x] = sum_y basis[u][y] * (s(y,x) - 128)
    for (int u = 0; u < 8; ++u)
        for (int x = 0; x < 8; ++x) {
            double s = 0;
            for (int y = 0; y < 8; ++y) s += basis[u][y] * (samples[y * 8 + x] - 128.0);
            tmp[u][x] = s;
        }
    std::array<double, 64> f{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0;
            for (int x = 0; x < 8; ++x) s += basis[v][x] * tmp[u][x];
            f[u * 8 + v] = s;
        }
    for (int z = 0; z < 64; ++z)
        out_zz[z] = static_cast<int16_t>(std::lround(f[kZigzagToRaster[z]] / quant_zz[z]));
}

struct Plane {
    uint32_t w = 0, h = 0;
    std::vector<double> v;
    double at(uint32_t x, uint32_t y) const {
        return v[size_t(std::min(y, h - 1)) * w + std::min(x, w - 1)];
    }
};

}  // namespace detail

/// Encodes an RGB or grayscale image as a baseline JPEG with standard tables
/// scaled by `quality` (1..100). When `coeffs_out` is given, it receives the
/// entropy-stage payload (differential DC plus zig-zag ACs, 64 per data unit)
/// for lossless round-trip checks.
inline std::vector<uint8_t> oracle_encode(const RgbImage& image, int quality,
                                          Sampling sampling,
                                          std::vector<int16_t>* coeffs_out = nullptr) {
    using namespace detail;
    const uint32_t W = image.width, H = image.height;
    bool gray = sampling == Sampling::Gray || image.channels == 1;

    // Color conversion to full-resolution YCbCr planes.
    std::vector<Plane> comps;
    {
        Plane y{W, H, std::vector<double>(size_t(W) * H)};
        Plane cb = y, cr = y;
        for (uint32_t r = 0; r < H; ++r)
            for (uint32_t c = 0; c < W; ++c) {
                size_t i = size_t(r) * W + c;
                double R, G, B;
                if (image.channels == 1) {
                    R = G = B = image.pixels[i];
                } else {
                    R = image.pixels[i * 3 + 0];
                    G = image.pixels[i * 3 + 1];
                    B = image.pixels[i * 3 + 2];
                }
                y.v[i] = 0.299 * R + 0.587 * G + 0.114 * B;
                cb.v[i] = 128.0 - 0.168736 * R - 0.331264 * G + 0.5 * B;
                cr.v[i] = 128.0 + 0.5 * R - 0.418688 * G - 0.081312 * B;
            }
        comps.push_back(std::move(y));
        if (!gray) {
            comps.push_back(std::move(cb));
            comps.push_back(std::move(cr));
        }
    }

    uint8_t yh = 1, yv = 1;
    if (!gray && sampling == Sampling::S422) yh = 2;
    if (!gray && sampling == Sampling::S420) yh = yv = 2;

    // Chroma subsampling by box average.
    if (!gray && (yh > 1 || yv > 1)) {
        for (size_t ci = 1; ci < comps.size(); ++ci) {
            Plane& p = comps[ci];
            uint32_t nw = (p.w + yh - 1) / yh, nh = (p.h + yv - 1) / yv;
            Plane out{nw, nh, std::vector<double>(size_t(nw) * nh)};
            for (uint32_t r = 0; r < nh; ++r)
                for (uint32_t c = 0; c < nw; ++c) {
                    double acc = 0;
                    for (uint32_t dy = 0; dy < yv; ++dy)
                        for (uint32_t dx = 0; dx < yh; ++dx)
                            acc += p.at(c * yh + dx, r * yv + dy);
                    out.v[size_t(r) * nw + c] = acc / (yh * yv);
                }
            p = std::move(out);
        }
    }

    auto luma_q = scaled_quant(kLumaQuant, quality);
    auto chroma_q = scaled_quant(kChromaQuant, quality);

    HuffmanTableSpec dc_l{{}, {kDcSymbols.begin(), kDcSymbols.end()},
                          HuffmanTableSpec::Class::DC, true};
    std::copy(kDcLumaCounts.begin(), kDcLumaCounts.end(), dc_l.counts.begin());
    HuffmanTableSpec dc_c = dc_l;
    std::copy(kDcChromaCounts.begin(), kDcChromaCounts.end(), dc_c.counts.begin());
    HuffmanTableSpec ac_l{{}, {kAcLumaSymbols.begin(), kAcLumaSymbols.end()},
                          HuffmanTableSpec::Class::AC, true};
    std::copy(kAcLumaCounts.begin(), kAcLumaCounts.end(), ac_l.counts.begin());
    HuffmanTableSpec ac_c{{}, {kAcChromaSymbols.begin(), kAcChromaSymbols.end()},
                          HuffmanTableSpec::Class::AC, true};
    std::copy(kAcChromaCounts.begin(), kAcChromaCounts.end(), ac_c.counts.begin());

    EncoderTable enc_dc[2] = {make_encoder(dc_l), make_encoder(dc_c)};
    EncoderTable enc_ac[2] = {make_encoder(ac_l), make_encoder(ac_c)};

    struct CompLayout {
        uint8_t h, v, tq;  // tq doubles as the DC/AC table class here
    };
    std::vector<CompLayout> layout;
    layout.push_back({yh, yv, 0});
    if (!gray) {
        layout.push_back({1, 1, 1});
        layout.push_back({1, 1, 1});
    }
    uint32_t mcu_w = 8u * yh, mcu_h = 8u * yv;
    uint32_t mcus_x = (W + mcu_w - 1) / mcu_w;
    uint32_t mcus_y = (H + mcu_h - 1) / mcu_h;

    BitWriter bw;
    std::vector<int> dc_pred(layout.size(), 0);
    std::array<int16_t, 64> zz;
    std::array<double, 64> block;
    for (uint32_t my = 0; my < mcus_y; ++my)
        for (uint32_t mx = 0; mx < mcus_x; ++mx)
            for (size_t ci = 0; ci < layout.size(); ++ci) {
                const auto& L = layout[ci];
                const Plane& p = comps[ci];
                const auto& q = L.tq == 0 ? luma_q : chroma_q;
                for (uint8_t by = 0; by < L.v; ++by)
                    for (uint8_t bx = 0; bx < L.h; ++bx) {
                        uint32_t x0 = (mx * L.h + bx) * 8;
                        uint32_t y0 = (my * L.v + by) * 8;
                        for (int r = 0; r < 8; ++r)
                            for (int c = 0; c < 8; ++c)
                                block[r * 8 + c] = p.at(x0 + c, y0 + r);
                        forward_dct_quant(block, q, zz);

                        int diff = zz[0] - dc_pred[ci];
                        dc_pred[ci] = zz[0];
                        if (coeffs_out) {
                            coeffs_out->push_back(static_cast<int16_t>(diff));
                            coeffs_out->insert(coeffs_out->end(), zz.begin() + 1, zz.end());
                        }
                        unsigned l = magnitude_category(diff);
                        const auto& edc = enc_dc[L.tq];
                        bw.put(edc.code[l], edc.length[l]);
                        if (l) bw.put(magnitude_bits(diff, l), l);

                        const auto& eac = enc_ac[L.tq];
                        int run = 0;
                        int last_nonzero = 0;
                        for (int z = 63; z >= 1; --z)
                            if (zz[z] != 0) {
                                last_nonzero = z;
                                break;
                            }
                        for (int z = 1; z <= last_nonzero; ++z) {
                            if (zz[z] == 0) {
                                ++run;
                                continue;
                            }
                            while (run >= 16) {
                                bw.put(eac.code[0xF0], eac.length[0xF0]);  // ZRL
                                run -= 16;
                            }
                            unsigned al = magnitude_category(zz[z]);
                            uint8_t sym = static_cast<uint8_t>((run << 4) | al);
                            bw.put(eac.code[sym], eac.length[sym]);
                            bw.put(magnitude_bits(zz[z], al), al);
                            run = 0;
                        }
                        if (last_nonzero < 63)
                            bw.put(eac.code[0x00], eac.length[0x00]);  // EOB
                    }
            }
    std::vector<uint8_t> scan = bw.finish();

    // Container.
    std::vector<uint8_t> out;
    auto put = [&out](std::initializer_list<int> bytes) {
        for (int b : bytes) out.push_back(static_cast<uint8_t>(b));
    };
    auto put16 = [&out](unsigned v) {
        out.push_back(static_cast<uint8_t>(v >> 8));
        out.push_back(static_cast<uint8_t>(v & 0xFF));
    };
    put({0xFF, 0xD8});  // SOI
    put({0xFF, 0xE0});  // APP0 / JFIF
    put16(16);
    put({'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0});

    auto emit_dqt = [&](uint8_t id, const std::array<uint16_t, 64>& q) {
        put({0xFF, 0xDB});
        put16(2 + 1 + 64);
        out.push_back(id);
        for (int i = 0; i < 64; ++i) out.push_back(static_cast<uint8_t>(q[i]));
    };
    emit_dqt(0, luma_q);
    if (!gray) emit_dqt(1, chroma_q);

    put({0xFF, 0xC0});  // SOF0
    put16(static_cast<unsigned>(8 + 3 * layout.size()));
    out.push_back(8);
    put16(H);
    put16(W);
    out.push_back(static_cast<uint8_t>(layout.size()));
    for (size_t ci = 0; ci < layout.size(); ++ci) {
        out.push_back(static_cast<uint8_t>(ci + 1));
        out.push_back(static_cast<uint8_t>((layout[ci].h << 4) | layout[ci].v));
        out.push_back(layout[ci].tq);
    }

    auto emit_dht = [&](uint8_t cls, uint8_t id, const HuffmanTableSpec& spec) {
        put({0xFF, 0xC4});
        put16(static_cast<unsigned>(2 + 1 + 16 + spec.symbols.size()));
        out.push_back(static_cast<uint8_t>((cls << 4) | id));
        for (int i = 0; i < 16; ++i) out.push_back(spec.counts[i]);
        out.insert(out.end(), spec.symbols.begin(), spec.symbols.end());
    };
    emit_dht(0, 0, dc_l);
    emit_dht(1, 0, ac_l);
    if (!gray) {
        emit_dht(0, 1, dc_c);
        emit_dht(1, 1, ac_c);
    }

    put({0xFF, 0xDA});  // SOS
    put16(static_cast<unsigned>(6 + 2 * layout.size()));
    out.push_back(static_cast<uint8_t>(layout.size()));
    for (size_t ci = 0; ci < layout.size(); ++ci) {
        out.push_back(static_cast<uint8_t>(ci + 1));
        out.push_back(static_cast<uint8_t>((layout[ci].tq << 4) | layout[ci].tq));
    }
    put({0, 63, 0});
    out.insert(out.end(), scan.begin(), scan.end());
    put({0xFF, 0xD9});  // EOI
    return out;
}

}  // namespace pjpeg::oracle
