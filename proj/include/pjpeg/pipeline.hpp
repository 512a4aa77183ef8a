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

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pjpeg/huffman.hpp"
#include "pjpeg/parallel_decode.hpp"
#include "pjpeg/parser.hpp"
#include "pjpeg/transform.hpp"

namespace pjpeg {

enum class OutputColorspace { YCbCrPlanes, RGBInterleaved, Grayscale };

struct DecodeConfig {
    uint64_t subsequence_bits = 1024;
    uint32_t sequence_length_b = 256;
    unsigned worker_count = 1;
    OutputColorspace output_colorspace = OutputColorspace::YCbCrPlanes;
};

/// Wall time per pipeline stage, milliseconds.
struct StageTimings {
    double parse = 0;
    double sync = 0;
    double write = 0;
    double dc = 0;
    double idct = 0;
    double extract = 0;

    double total() const { return parse + sync + write + dc + idct + extract; }
    StageTimings& operator+=(const StageTimings& o) {
        parse += o.parse;
        sync += o.sync;
        write += o.write;
        dc += o.dc;
        idct += o.idct;
        extract += o.extract;
        return *this;
    }
};

struct RgbImage {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<uint8_t> pixels;  // interleaved RGB, or single channel for grayscale
    unsigned channels = 3;
};

struct DecodeFailure {
    Errc code;
    std::string message;
};

struct DecodeSuccess {
    ImagePlanes planes;
    StageTimings timings;
    uint64_t compressed_bytes = 0;
};

using DecodeOutcome = std::variant<DecodeSuccess, DecodeFailure>;

namespace detail {

class StageClock {
public:
    StageClock() : t_(std::chrono::steady_clock::now()) {}
    double lap_ms() {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - t_).count();
        t_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point t_;
};

}  // namespace detail

/// Decodes one file to component planes, recording per-stage wall times.
inline DecodeSuccess decode_single(std::span<const uint8_t> file_bytes,
                                   const DecodeConfig& config) {
    detail::StageClock clock;
    DecodeSuccess res;
    res.compressed_bytes = file_bytes.size();

    ParsedImage img = parse(file_bytes);
    std::vector<HuffmanTable> dc_tables(4), ac_tables(4);
    for (int i = 0; i < 4; ++i) {
        if (img.dc_tables[i].present) dc_tables[i] = build_table(img.dc_tables[i]);
        if (img.ac_tables[i].present) ac_tables[i] = build_table(img.ac_tables[i]);
    }
    ScanContext ctx = make_scan_context(img, dc_tables, ac_tables);
    res.timings.parse = clock.lap_ms();

    PartitionConfig pconf{config.subsequence_bits, config.sequence_length_b};
    ScanPartition part = partition(img.segment, pconf);
    SyncInfoArray info;
    sync_intra_sequence(ctx, part, info, config.worker_count);
    sync_inter_sequence(ctx, part, info, config.worker_count);
    uint64_t expected = img.frame.total_data_units() * 64;
    std::vector<uint64_t> offs = offsets(info, expected);
    res.timings.sync = clock.lap_ms();

    CoefficientBuffer coeffs;
    coeffs.du_count = img.frame.total_data_units();
    coeffs.values.assign(expected, 0);
    write_output(ctx, part, info, offs, coeffs.values, config.worker_count);
    res.timings.write = clock.lap_ms();

    dc_prefix_sum(coeffs, img.frame, config.worker_count);
    res.timings.dc = clock.lap_ms();

    std::vector<uint8_t> blocks =
        transform_blocks(coeffs, img.frame, img.quant, config.worker_count);
    res.timings.idct = clock.lap_ms();

    res.planes = extract_planes(blocks, img.frame, config.worker_count);
    res.timings.extract = clock.lap_ms();
    return res;
}

/// Decodes a batch of files. Files are independent jobs: one file's failure
/// is reported in its slot and does not abort the rest.
inline std::vector<DecodeOutcome> decode_batch(
    const std::vector<std::vector<uint8_t>>& files, const DecodeConfig& config) {
    std::vector<DecodeOutcome> out(files.size(), DecodeFailure{Errc::IoError, "not decoded"});
    DecodeConfig per_file = config;
    unsigned batch_workers = config.worker_count;
    // Two-level split: files across workers, subsequences within a file by a
    // single worker when the batch itself is large enough to keep all busy.
    if (files.size() >= batch_workers) per_file.worker_count = 1;
    parallel_for(files.size(), batch_workers, [&](size_t i) {
        try {
            out[i] = decode_single(files[i], per_file);
        } catch (const Error& e) {
            out[i] = DecodeFailure{e.code(), e.what()};
        }
    });
    return out;
}

/// Chroma upsampling by sample replication plus JFIF YCbCr -> RGB. A single
/// component passes through as grayscale.
inline RgbImage upsample_and_convert(const ImagePlanes& planes) {
    RgbImage img;
    img.width = planes.width;
    img.height = planes.height;
    if (planes.planes.size() == 1) {
        img.channels = 1;
        img.pixels = planes.planes[0].samples;
        img.pixels.resize(size_t(img.width) * img.height);
        return img;
    }
    img.channels = 3;
    img.pixels.resize(size_t(img.width) * img.height * 3);
    const auto& py = planes.planes[0];
    const auto& pcb = planes.planes[1];
    const auto& pcr = planes.planes[2];
    auto sample = [](const ImagePlanes::Plane& p, uint32_t x, uint32_t y,
                     uint32_t full_w, uint32_t full_h) {
        uint32_t sx = std::min<uint32_t>(uint64_t(x) * p.width / full_w, p.width - 1);
        uint32_t sy = std::min<uint32_t>(uint64_t(y) * p.height / full_h, p.height - 1);
        return int(p.at(sx, sy));
    };
    for (uint32_t y = 0; y < img.height; ++y) {
        for (uint32_t x = 0; x < img.width; ++x) {
            int Y = py.at(x, y);
            int Cb = sample(pcb, x, y, img.width, img.height) - 128;
            int Cr = sample(pcr, x, y, img.width, img.height) - 128;
            size_t o = (size_t(y) * img.width + x) * 3;
            img.pixels[o + 0] = clamp_u8(int(std::lround(Y + 1.402 * Cr)));
            img.pixels[o + 1] =
                clamp_u8(int(std::lround(Y - 0.344136 * Cb - 0.714136 * Cr)));
            img.pixels[o + 2] = clamp_u8(int(std::lround(Y + 1.772 * Cb)));
        }
    }
    return img;
}

/// FNV-1a over plane contents; used for determinism checks and reports.
inline uint64_t planes_checksum(const ImagePlanes& planes) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(planes.width);
    mix(planes.height);
    for (const auto& p : planes.planes)
        for (uint8_t s : p.samples) mix(s);
    return h;
}

}  // namespace pjpeg
