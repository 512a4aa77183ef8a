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

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "pjpeg/pjpeg.hpp"

namespace testutil {

// A 32-bit worked example used across the entropy-stage tests. One grayscale
// data unit; hand-decoded symbol starts are 0, 4, 9, 14, 17, 22, 25, 30 and
// the coefficient sequence is -2, -3, 2, -1, 0, -1, 1, 0, 1, then zeros.
inline const std::vector<uint8_t> kExampleScan = {0x98, 0x49, 0x59, 0xDC};

inline pjpeg::HuffmanTableSpec example_dc_spec() {
    pjpeg::HuffmanTableSpec s;
    s.cls = pjpeg::HuffmanTableSpec::Class::DC;
    s.counts[0] = 1;  // "0"  -> category 0
    s.counts[1] = 1;  // "10" -> category 2
    s.symbols = {0x00, 0x02};
    s.present = true;
    return s;
}

inline pjpeg::HuffmanTableSpec example_ac_spec() {
    pjpeg::HuffmanTableSpec s;
    s.cls = pjpeg::HuffmanTableSpec::Class::AC;
    s.counts[1] = 2;  // "00" -> EOB, "01" -> (0,1)
    s.counts[2] = 1;  // "100" -> (0,2)
    s.counts[3] = 2;  // "1010" -> (2,1), "1011" -> (1,1)
    s.symbols = {0x00, 0x01, 0x02, 0x21, 0x11};
    s.present = true;
    return s;
}

inline pjpeg::FrameInfo gray_frame_8x8() {
    pjpeg::FrameInfo f;
    f.width = 8;
    f.height = 8;
    pjpeg::ComponentSpec c;
    c.id = 1;
    f.components.push_back(c);
    f.mcu_width = 8;
    f.mcu_height = 8;
    f.mcus_x = 1;
    f.mcus_y = 1;
    f.data_units_per_mcu = 1;
    f.du_sequence = {0};
    return f;
}

// Owns everything the ScanContext points into; heap-allocated so the interior
// pointers stay valid.
struct OwnedContext {
    pjpeg::ParsedImage img;
    std::vector<pjpeg::HuffmanTable> dc = std::vector<pjpeg::HuffmanTable>(4);
    std::vector<pjpeg::HuffmanTable> ac = std::vector<pjpeg::HuffmanTable>(4);
    pjpeg::ScanContext ctx;
};

inline std::unique_ptr<OwnedContext> make_context(const std::vector<uint8_t>& file) {
    auto o = std::make_unique<OwnedContext>();
    o->img = pjpeg::parse(file);
    for (int i = 0; i < 4; ++i) {
        if (o->img.dc_tables[i].present) o->dc[i] = pjpeg::build_table(o->img.dc_tables[i]);
        if (o->img.ac_tables[i].present) o->ac[i] = pjpeg::build_table(o->img.ac_tables[i]);
    }
    o->ctx = pjpeg::make_scan_context(o->img, o->dc, o->ac);
    return o;
}

inline std::unique_ptr<OwnedContext> example_context() {
    auto o = std::make_unique<OwnedContext>();
    o->img.frame = gray_frame_8x8();
    o->img.segment = pjpeg::unstuff(kExampleScan);
    o->img.quant[0].entries.fill(1);
    o->img.quant[0].present = true;
    o->img.dc_tables[0] = example_dc_spec();
    o->img.ac_tables[0] = example_ac_spec();
    o->dc[0] = pjpeg::build_table(o->img.dc_tables[0]);
    o->ac[0] = pjpeg::build_table(o->img.ac_tables[0]);
    o->ctx = pjpeg::make_scan_context(o->img, o->dc, o->ac);
    return o;
}

// Smooth synthetic content (gradients, low-frequency waves, light noise) so
// encoded scans look like photographs rather than pathological patterns.
inline pjpeg::RgbImage make_test_image(uint32_t w, uint32_t h, uint32_t seed,
                                       unsigned channels = 3) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 6.28318530717958647692);
    std::uniform_real_distribution<double> freq(0.5, 4.0);
    std::uniform_int_distribution<int> noise(-6, 6);
    double px = phase(rng), py = phase(rng), fx = freq(rng), fy = freq(rng);
    double gx = phase(rng), gy = phase(rng);

    pjpeg::RgbImage img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.pixels.resize(size_t(w) * h * channels);
    for (uint32_t y = 0; y < h; ++y)
        for (uint32_t x = 0; x < w; ++x) {
            double u = double(x) / w, v = double(y) / h;
            double base = 128 + 70 * std::sin(fx * 6.2832 * u + px) *
                                    std::cos(fy * 6.2832 * v + py);
            double grad = 40 * (u * std::cos(gx) + v * std::sin(gy));
            for (unsigned c = 0; c < channels; ++c) {
                double chan = base + grad + 25.0 * std::sin((c + 1) * (u + v) * 6.2832) +
                              noise(rng);
                size_t i = (size_t(y) * w + x) * channels + c;
                img.pixels[i] = pjpeg::clamp_u8(int(std::lround(chan)));
            }
        }
    return img;
}

}  // namespace testutil
