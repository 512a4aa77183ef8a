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

#include <cstdint>
#include <vector>

#include "pjpeg/bitstream.hpp"
#include "pjpeg/common.hpp"
#include "pjpeg/parser.hpp"

namespace pjpeg {

/// Canonical Huffman decoding table. Decoding is a single probe of a flat
/// lookup indexed by the next max_code_length bits.
struct HuffmanTable {
    struct Entry {
        uint8_t symbol = 0;
        uint8_t length = 0;  // 0 marks an invalid prefix
    };
    struct Code {
        uint8_t symbol = 0;
        uint16_t code = 0;
        uint8_t length = 0;
    };

    unsigned max_code_length = 0;
    std::vector<Entry> lut;     // size 1 << max_code_length
    std::vector<Code> codes;    // canonical assignment, for encoding in tests
    HuffmanTableSpec::Class cls = HuffmanTableSpec::Class::DC;

    bool encode(uint8_t symbol, uint16_t& code, uint8_t& length) const {
        for (const auto& c : codes) {
            if (c.symbol == symbol) {
                code = c.code;
                length = c.length;
                return true;
            }
        }
        return false;
    }
};

/// Builds the canonical decoding table from a DHT spec (Annex C assignment:
/// increasing length, then symbol order).
inline HuffmanTable build_table(const HuffmanTableSpec& spec) {
    HuffmanTable t;
    t.cls = spec.cls;
    uint32_t code = 0;
    size_t sym_index = 0;
    for (unsigned len = 1; len <= 16; ++len) {
        uint32_t n = spec.counts[len - 1];
        if (code + n > (1u << len))
            throw Error(Errc::OversubscribedCode, "code space oversubscribed at length " +
                                                      std::to_string(len));
        for (uint32_t k = 0; k < n; ++k) {
            if (sym_index >= spec.symbols.size())
                throw Error(Errc::MalformedHeader, "huffman counts exceed symbol list");
            t.codes.push_back({spec.symbols[sym_index++], static_cast<uint16_t>(code),
                               static_cast<uint8_t>(len)});
            ++code;
            t.max_code_length = len;
        }
        code <<= 1;
    }
    if (sym_index != spec.symbols.size())
        throw Error(Errc::MalformedHeader, "huffman symbol list exceeds counts");
    if (t.max_code_length == 0)
        throw Error(Errc::MalformedHeader, "empty huffman table");

    t.lut.assign(size_t(1) << t.max_code_length, {});
    for (const auto& c : t.codes) {
        unsigned shift = t.max_code_length - c.length;
        size_t first = size_t(c.code) << shift;
        size_t count = size_t(1) << shift;
        for (size_t i = 0; i < count; ++i) t.lut[first + i] = {c.symbol, c.length};
    }
    return t;
}

/// Maps l magnitude bits to the signed coefficient they encode
/// (ones' complement style: values >= 2^(l-1) are positive).
inline int32_t extend(uint32_t bits, unsigned l) {
    if (l == 0) return 0;
    if (bits >= (1u << (l - 1))) return static_cast<int32_t>(bits);
    return static_cast<int32_t>(bits) - static_cast<int32_t>((1u << l) - 1);
}

struct DecodedSymbol {
    enum class Kind { Coefficient, EOB, ZRL };
    Kind kind = Kind::Coefficient;
    unsigned bits_consumed = 0;  // codeword + magnitude bits
    int32_t coefficient = 0;     // meaningful for Kind::Coefficient only
    unsigned run_length = 0;     // zeros preceding the coefficient / run semantics
};

namespace detail {

inline uint8_t decode_codeword(BitCursor& cursor, const HuffmanTable& table,
                               unsigned& code_len) {
    uint64_t avail = cursor.remaining();
    if (avail == 0) throw Error(Errc::OutOfBits, "no bits left for codeword");
    uint32_t window = cursor.peek_bits(table.max_code_length);
    const auto& e = table.lut[window];
    if (e.length == 0) {
        // Zero padding near the segment end can only fail to match, never
        // match falsely, so a miss with a short window means truncation.
        if (avail < table.max_code_length)
            throw Error(Errc::OutOfBits, "codeword truncated at segment end");
        throw Error(Errc::InvalidCode, "bit pattern matches no codeword");
    }
    if (e.length > avail) throw Error(Errc::OutOfBits, "codeword truncated at segment end");
    cursor.seek(cursor.position() + e.length);
    code_len = e.length;
    return e.symbol;
}

}  // namespace detail

/// Decodes one JPEG syntax element (codeword plus magnitude bits). Uses the
/// DC table at zig-zag index 0, the AC table otherwise. EOB reports a
/// run_length of 63 - z.
inline DecodedSymbol decode_next_symbol(BitCursor& cursor, unsigned z,
                                        const HuffmanTable& dc, const HuffmanTable& ac) {
    DecodedSymbol out;
    unsigned code_len = 0;
    if (z == 0) {
        uint8_t sym = detail::decode_codeword(cursor, dc, code_len);
        unsigned l = sym;
        if (l > 11) throw Error(Errc::InvalidCode, "DC magnitude category > 11");
        if (cursor.remaining() < l) throw Error(Errc::OutOfBits, "DC magnitude truncated");
        out.kind = DecodedSymbol::Kind::Coefficient;
        out.coefficient = extend(cursor.read_bits(l), l);
        out.run_length = 0;
        out.bits_consumed = code_len + l;
        return out;
    }
    uint8_t sym = detail::decode_codeword(cursor, ac, code_len);
    unsigned r = sym >> 4;
    unsigned l = sym & 0x0F;
    if (l == 0) {
        if (r == 0) {
            out.kind = DecodedSymbol::Kind::EOB;
            out.run_length = 63 - z;
        } else if (r == 15) {
            out.kind = DecodedSymbol::Kind::ZRL;
            out.run_length = 15;
        } else {
            throw Error(Errc::InvalidCode, "AC symbol with l=0 and r not in {0,15}");
        }
        out.bits_consumed = code_len;
        return out;
    }
    if (l > 10) throw Error(Errc::InvalidCode, "AC magnitude category > 10");
    if (cursor.remaining() < l) throw Error(Errc::OutOfBits, "AC magnitude truncated");
    out.kind = DecodedSymbol::Kind::Coefficient;
    out.coefficient = extend(cursor.read_bits(l), l);
    out.run_length = r;
    out.bits_consumed = code_len + l;
    return out;
}

}  // namespace pjpeg
