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

#include <fstream>
#include <string>
#include <vector>

#include "pjpeg/common.hpp"
#include "pjpeg/pipeline.hpp"

namespace pjpeg {

/// Serializes an RgbImage as binary PPM (P6) or, for one channel, PGM (P5).
inline std::vector<uint8_t> to_pnm(const RgbImage& img) {
    std::string header = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) +
                         " " + std::to_string(img.height) + "\n255\n";
    std::vector<uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

inline void write_pnm(const std::string& path, const RgbImage& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot open " + path + " for writing");
    auto bytes = to_pnm(img);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(Errc::IoError, "short write to " + path);
}

}  // namespace pjpeg
