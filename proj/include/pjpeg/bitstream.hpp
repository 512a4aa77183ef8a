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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pjpeg/common.hpp"

namespace pjpeg {

/// Entropy-coded scan with byte stuffing removed. Bit positions used by the
/// decoder always refer to this uniform, marker-free bit space.
struct EntropySegment {
    std::vector<uint8_t> data;
    uint64_t bit_length = 0;
    // Offsets into `data` after which a stuffed 0x00 was removed from the
    // original scan. Diagnostics and round-trip only.
    std::vector<size_t> stuffing_map;

    // MSB-first bit at absolute position `pos`.
    bool bit(uint64_t pos) const {
        return (data[pos >> 3] >> (7 - (pos & 7))) & 1;
    }

    // Next `k` bits starting at `pos`, MSB-first, zero-padded past the end.
    // `k` <= 16. Callers check availability against bit_length themselves.
    uint32_t peek(uint64_t pos, unsigned k) const {
        uint32_t v = 0;
        const uint64_t limit = bit_length;
        for (unsigned i = 0; i < k; ++i) {
            uint64_t p = pos + i;
            v = (v << 1) | (p < limit ? (bit(p) ? 1u : 0u) : 0u);
        }
        return v;
    }
};

/// Removes JPEG byte stuffing (0xFF 0x00 -> 0xFF) from a raw scan.
inline EntropySegment unstuff(std::span<const uint8_t> scan_bytes) {
    if (scan_bytes.empty()) throw Error(Errc::EmptyScan, "entropy-coded segment is empty");
    EntropySegment seg;
    seg.data.reserve(scan_bytes.size());
    for (size_t i = 0; i < scan_bytes.size(); ++i) {
        uint8_t b = scan_bytes[i];
        seg.data.push_back(b);
        if (b == 0xFF) {
            if (i + 1 >= scan_bytes.size())
                throw Error(Errc::MalformedStuffing, "scan ends with bare 0xFF");
            uint8_t next = scan_bytes[i + 1];
            if (next != 0x00)
                throw Error(Errc::MalformedStuffing,
                            "0xFF followed by 0x" + std::to_string(next) + " inside scan");
            seg.stuffing_map.push_back(seg.data.size() - 1);
            ++i;  // skip the stuffed zero
        }
    }
    seg.bit_length = uint64_t(seg.data.size()) * 8;
    return seg;
}

/// Re-inserts stuffing bytes; inverse of unstuff (round-trip check).
inline std::vector<uint8_t> restuff(const EntropySegment& seg) {
    std::vector<uint8_t> out;
    out.reserve(seg.data.size() + seg.stuffing_map.size());
    size_t next_stuff = 0;
    for (size_t i = 0; i < seg.data.size(); ++i) {
        out.push_back(seg.data[i]);
        if (next_stuff < seg.stuffing_map.size() && seg.stuffing_map[next_stuff] == i) {
            out.push_back(0x00);
            ++next_stuff;
        }
    }
    return out;
}

/// Bit-granular reader over an EntropySegment. Each worker owns its cursor;
/// the segment itself is immutable and shared.
class BitCursor {
public:
    explicit BitCursor(const EntropySegment& seg, uint64_t position = 0)
        : seg_(&seg), pos_(position) {}

    uint64_t position() const { return pos_; }
    void seek(uint64_t position) { pos_ = position; }
    uint64_t remaining() const {
        return pos_ >= seg_->bit_length ? 0 : seg_->bit_length - pos_;
    }

    // Reads the next k (0..16) bits MSB-first and advances.
    uint32_t read_bits(unsigned k) {
        if (k == 0) return 0;
        if (pos_ + k > seg_->bit_length)
            throw Error(Errc::OutOfBits, "read past end of entropy segment");
        uint32_t v = seg_->peek(pos_, k);
        pos_ += k;
        return v;
    }

    uint32_t peek_bits(unsigned k) const { return seg_->peek(pos_, k); }

    const EntropySegment& segment() const { return *seg_; }

private:
    const EntropySegment* seg_;
    uint64_t pos_;
};

}  // namespace pjpeg
