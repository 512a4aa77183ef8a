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
#include <span>
#include <string>
#include <vector>

#include "pjpeg/bitstream.hpp"
#include "pjpeg/common.hpp"

namespace pjpeg {

namespace markers {
inline constexpr uint8_t SOI = 0xD8;
inline constexpr uint8_t EOI = 0xD9;
inline constexpr uint8_t SOS = 0xDA;
inline constexpr uint8_t DQT = 0xDB;
inline constexpr uint8_t DNL = 0xDC;
inline constexpr uint8_t DRI = 0xDD;
inline constexpr uint8_t DHT = 0xC4;
inline constexpr uint8_t SOF0 = 0xC0;
inline constexpr uint8_t COM = 0xFE;
inline bool is_app(uint8_t m) { return m >= 0xE0 && m <= 0xEF; }
inline bool is_rst(uint8_t m) { return m >= 0xD0 && m <= 0xD7; }
inline bool is_sof(uint8_t m) {
    return (m >= 0xC0 && m <= 0xCF) && m != 0xC4 && m != 0xC8 && m != 0xCC;
}
}  // namespace markers

struct ComponentSpec {
    uint8_t id = 0;
    uint8_t h_sampling = 1;
    uint8_t v_sampling = 1;
    uint8_t quant_table_id = 0;
    uint8_t dc_table_id = 0;
    uint8_t ac_table_id = 0;
};

struct FrameInfo {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<ComponentSpec> components;
    uint32_t mcu_width = 8;
    uint32_t mcu_height = 8;
    uint32_t mcus_x = 0;
    uint32_t mcus_y = 0;
    uint32_t data_units_per_mcu = 0;
    uint8_t h_max = 1;
    uint8_t v_max = 1;
    // Component index of each data unit within one MCU, in scan order
    // (e.g. {0,0,0,0,1,2} for 4:2:0).
    std::vector<uint8_t> du_sequence;

    uint64_t total_data_units() const {
        return uint64_t(mcus_x) * mcus_y * data_units_per_mcu;
    }
    // Data units of one component contributed by each MCU.
    uint32_t dus_per_mcu(size_t comp) const {
        return uint32_t(components[comp].h_sampling) * components[comp].v_sampling;
    }
    // Component plane dimensions at its natural (subsampled) resolution.
    uint32_t comp_width(size_t comp) const {
        return (width * components[comp].h_sampling + h_max - 1) / h_max;
    }
    uint32_t comp_height(size_t comp) const {
        return (height * components[comp].v_sampling + v_max - 1) / v_max;
    }
};

struct QuantTable {
    std::array<uint16_t, 64> entries{};  // zig-zag order
    bool present = false;
};

struct HuffmanTableSpec {
    enum class Class { DC, AC };
    std::array<uint8_t, 16> counts{};  // codewords of length 1..16
    std::vector<uint8_t> symbols;
    Class cls = Class::DC;
    bool present = false;
};

struct ParsedImage {
    FrameInfo frame;
    std::array<QuantTable, 4> quant;
    std::array<HuffmanTableSpec, 4> dc_tables;
    std::array<HuffmanTableSpec, 4> ac_tables;
    EntropySegment segment;
};

namespace detail {

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> buf) : buf_(buf) {}

    uint8_t u8() {
        if (pos_ >= buf_.size()) throw Error(Errc::MalformedHeader, "truncated file");
        return buf_[pos_++];
    }
    uint16_t u16() {
        uint16_t hi = u8();
        return static_cast<uint16_t>((hi << 8) | u8());
    }
    std::span<const uint8_t> take(size_t n) {
        if (pos_ + n > buf_.size()) throw Error(Errc::MalformedHeader, "truncated segment");
        auto s = buf_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    void skip(size_t n) { take(n); }
    size_t pos() const { return pos_; }
    size_t size() const { return buf_.size(); }
    bool eof() const { return pos_ >= buf_.size(); }
    std::span<const uint8_t> rest() const { return buf_.subspan(pos_); }

private:
    std::span<const uint8_t> buf_;
    size_t pos_ = 0;
};

inline void parse_dqt(ByteReader& r, uint16_t len, std::array<QuantTable, 4>& quant) {
    ByteReader seg(r.take(len));
    while (!seg.eof()) {
        uint8_t pq_tq = seg.u8();
        uint8_t precision = pq_tq >> 4;
        uint8_t id = pq_tq & 0x0F;
        if (id > 3) throw Error(Errc::MalformedHeader, "quant table id > 3");
        if (precision > 1) throw Error(Errc::MalformedHeader, "bad quant precision");
        QuantTable& q = quant[id];
        for (int i = 0; i < 64; ++i)
            q.entries[i] = precision ? seg.u16() : seg.u8();
        for (int i = 0; i < 64; ++i)
            if (q.entries[i] == 0) throw Error(Errc::MalformedHeader, "zero quantizer entry");
        q.present = true;
    }
}

inline void parse_dht(ByteReader& r, uint16_t len, std::array<HuffmanTableSpec, 4>& dc,
                      std::array<HuffmanTableSpec, 4>& ac) {
    ByteReader seg(r.take(len));
    while (!seg.eof()) {
        uint8_t tc_th = seg.u8();
        uint8_t cls = tc_th >> 4;
        uint8_t id = tc_th & 0x0F;
        if (cls > 1) throw Error(Errc::UnsupportedFeature, "huffman table class > 1");
        if (id > 3) throw Error(Errc::MalformedHeader, "huffman table id > 3");
        HuffmanTableSpec spec;
        spec.cls = cls ? HuffmanTableSpec::Class::AC : HuffmanTableSpec::Class::DC;
        size_t total = 0;
        for (int i = 0; i < 16; ++i) {
            spec.counts[i] = seg.u8();
            total += spec.counts[i];
        }
        if (total > 256) throw Error(Errc::MalformedHeader, "more than 256 huffman symbols");
        auto syms = seg.take(total);
        spec.symbols.assign(syms.begin(), syms.end());
        spec.present = true;
        (cls ? ac : dc)[id] = spec;
    }
}

inline FrameInfo parse_sof0(ByteReader& r, uint16_t len) {
    ByteReader seg(r.take(len));
    uint8_t precision = seg.u8();
    if (precision != 8) throw Error(Errc::UnsupportedFeature, "only 8-bit precision supported");
    FrameInfo f;
    f.height = seg.u16();
    f.width = seg.u16();
    if (f.width == 0) throw Error(Errc::MalformedHeader, "zero width");
    if (f.height == 0) throw Error(Errc::UnsupportedFeature, "DNL-deferred height not supported");
    uint8_t ncomp = seg.u8();
    if (ncomp < 1 || ncomp > 3)
        throw Error(Errc::UnsupportedFeature, "component count " + std::to_string(ncomp));
    for (int i = 0; i < ncomp; ++i) {
        ComponentSpec c;
        c.id = seg.u8();
        uint8_t hv = seg.u8();
        c.h_sampling = hv >> 4;
        c.v_sampling = hv & 0x0F;
        c.quant_table_id = seg.u8();
        if (c.quant_table_id > 3) throw Error(Errc::MalformedHeader, "quant table id > 3");
        if (c.h_sampling < 1 || c.h_sampling > 2 || c.v_sampling < 1 || c.v_sampling > 2)
            throw Error(Errc::UnsupportedFeature, "sampling factors outside {1,2}");
        f.components.push_back(c);
    }
    if (ncomp == 1) {
        // Single-component scans are never interleaved; sampling is moot.
        f.components[0].h_sampling = 1;
        f.components[0].v_sampling = 1;
    } else {
        const auto& y = f.components[0];
        for (int i = 1; i < ncomp; ++i)
            if (f.components[i].h_sampling != 1 || f.components[i].v_sampling != 1)
                throw Error(Errc::UnsupportedFeature, "subsampled layout must be on chroma only");
        bool ok = (y.h_sampling == 1 && y.v_sampling == 1) ||   // 4:4:4
                  (y.h_sampling == 2 && y.v_sampling == 1) ||   // 4:2:2
                  (y.h_sampling == 2 && y.v_sampling == 2);     // 4:2:0
        if (!ok) throw Error(Errc::UnsupportedFeature, "unsupported sampling layout");
    }
    for (const auto& c : f.components) {
        f.h_max = std::max(f.h_max, c.h_sampling);
        f.v_max = std::max(f.v_max, c.v_sampling);
    }
    f.mcu_width = 8u * f.h_max;
    f.mcu_height = 8u * f.v_max;
    f.mcus_x = (f.width + f.mcu_width - 1) / f.mcu_width;
    f.mcus_y = (f.height + f.mcu_height - 1) / f.mcu_height;
    for (size_t ci = 0; ci < f.components.size(); ++ci) {
        const auto& c = f.components[ci];
        for (int k = 0; k < c.h_sampling * c.v_sampling; ++k)
            f.du_sequence.push_back(static_cast<uint8_t>(ci));
    }
    f.data_units_per_mcu = static_cast<uint32_t>(f.du_sequence.size());
    return f;
}

// Entropy-coded bytes from the current position up to (not including) the
// next marker. RSTn inside the scan is rejected up front by DRI handling,
// and again here in case a stream embeds them without DRI.
inline std::span<const uint8_t> extract_scan(ByteReader& r) {
    auto rest = r.rest();
    size_t i = 0;
    while (i < rest.size()) {
        if (rest[i] == 0xFF) {
            if (i + 1 >= rest.size()) break;
            uint8_t next = rest[i + 1];
            if (next == 0x00) {
                i += 2;
                continue;
            }
            if (markers::is_rst(next))
                throw Error(Errc::UnsupportedFeature, "restart markers in scan");
            break;  // terminating marker
        }
        ++i;
    }
    auto scan = rest.subspan(0, i);
    r.skip(i);
    return scan;
}

}  // namespace detail

/// Parses a baseline JPEG file into frame info, tables and the unstuffed
/// entropy-coded segment of its single scan.
inline ParsedImage parse(std::span<const uint8_t> file_bytes) {
    detail::ByteReader r(file_bytes);
    if (r.u8() != 0xFF || r.u8() != markers::SOI)
        throw Error(Errc::MalformedHeader, "missing SOI marker");

    ParsedImage img;
    bool have_frame = false;

    while (true) {
        uint8_t b = r.u8();
        if (b != 0xFF) throw Error(Errc::MalformedHeader, "expected marker prefix 0xFF");
        uint8_t m = r.u8();
        while (m == 0xFF) m = r.u8();  // fill bytes

        if (m == markers::EOI) throw Error(Errc::MalformedHeader, "EOI before SOS");
        if (markers::is_rst(m)) throw Error(Errc::MalformedHeader, "stray RST marker");

        if (markers::is_sof(m) && m != markers::SOF0)
            throw Error(Errc::UnsupportedFeature,
                        "SOF" + std::to_string(m - 0xC0) + " (only baseline SOF0 supported)");

        uint16_t len = r.u16();
        if (len < 2) throw Error(Errc::MalformedHeader, "segment length < 2");
        len = static_cast<uint16_t>(len - 2);

        if (markers::is_app(m) || m == markers::COM) {
            r.skip(len);
        } else if (m == markers::DQT) {
            detail::parse_dqt(r, len, img.quant);
        } else if (m == markers::DHT) {
            detail::parse_dht(r, len, img.dc_tables, img.ac_tables);
        } else if (m == markers::SOF0) {
            if (have_frame) throw Error(Errc::MalformedHeader, "multiple SOF segments");
            img.frame = detail::parse_sof0(r, len);
            have_frame = true;
        } else if (m == markers::DRI) {
            detail::ByteReader seg(r.take(len));
            if (seg.u16() != 0)
                throw Error(Errc::UnsupportedFeature, "restart interval (DRI) not supported");
        } else if (m == markers::DNL) {
            throw Error(Errc::UnsupportedFeature, "DNL segment not supported");
        } else if (m == markers::SOS) {
            if (!have_frame) throw Error(Errc::MalformedHeader, "SOS before SOF");
            detail::ByteReader seg(r.take(len));
            uint8_t ns = seg.u8();
            if (ns != img.frame.components.size())
                throw Error(Errc::UnsupportedFeature, "scan component subset not supported");
            for (int i = 0; i < ns; ++i) {
                uint8_t cs = seg.u8();
                uint8_t td_ta = seg.u8();
                bool found = false;
                for (auto& c : img.frame.components) {
                    if (c.id == cs) {
                        c.dc_table_id = td_ta >> 4;
                        c.ac_table_id = td_ta & 0x0F;
                        if (c.dc_table_id > 3 || c.ac_table_id > 3)
                            throw Error(Errc::MalformedHeader, "huffman table id > 3 in SOS");
                        found = true;
                        break;
                    }
                }
                if (!found) throw Error(Errc::MalformedHeader, "SOS references unknown component");
            }
            uint8_t ss = seg.u8();
            uint8_t se = seg.u8();
            uint8_t ah_al = seg.u8();
            if (ss != 0 || se != 63 || ah_al != 0)
                throw Error(Errc::UnsupportedFeature, "non-baseline spectral selection");
            for (const auto& c : img.frame.components) {
                if (!img.quant[c.quant_table_id].present)
                    throw Error(Errc::MissingTable, "undefined quant table");
                if (!img.dc_tables[c.dc_table_id].present)
                    throw Error(Errc::MissingTable, "undefined DC huffman table");
                if (!img.ac_tables[c.ac_table_id].present)
                    throw Error(Errc::MissingTable, "undefined AC huffman table");
            }
            img.segment = unstuff(detail::extract_scan(r));
            return img;
        } else {
            throw Error(Errc::MalformedHeader,
                        "unexpected marker 0x" + std::to_string(m));
        }
    }
}

}  // namespace pjpeg
