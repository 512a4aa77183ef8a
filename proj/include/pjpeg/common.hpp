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
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pjpeg {

enum class Errc {
    MalformedStuffing,
    EmptyScan,
    OutOfBits,
    UnsupportedFeature,
    MalformedHeader,
    MissingTable,
    OversubscribedCode,
    InvalidCode,
    ConsistencyFailure,
    EmptyCorpus,
    IoError,
};

inline const char* errc_name(Errc e) {
    switch (e) {
        case Errc::MalformedStuffing: return "MalformedStuffing";
        case Errc::EmptyScan: return "EmptyScan";
        case Errc::OutOfBits: return "OutOfBits";
        case Errc::UnsupportedFeature: return "UnsupportedFeature";
        case Errc::MalformedHeader: return "MalformedHeader";
        case Errc::MissingTable: return "MissingTable";
        case Errc::OversubscribedCode: return "OversubscribedCode";
        case Errc::InvalidCode: return "InvalidCode";
        case Errc::ConsistencyFailure: return "ConsistencyFailure";
        case Errc::EmptyCorpus: return "EmptyCorpus";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

// Zig-zag index -> raster index within an 8x8 block.
inline constexpr std::array<uint8_t, 64> kZigzagToRaster = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

inline constexpr std::array<uint8_t, 64> make_raster_to_zigzag() {
    std::array<uint8_t, 64> inv{};
    for (int z = 0; z < 64; ++z) inv[kZigzagToRaster[z]] = static_cast<uint8_t>(z);
    return inv;
}

inline constexpr std::array<uint8_t, 64> kRasterToZigzag = make_raster_to_zigzag();

inline uint8_t clamp_u8(int v) {
    if (v < 0) return 0;
    if (v > 255) return 255;
    return static_cast<uint8_t>(v);
}

}  // namespace pjpeg
