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

#include <functional>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pjpeg/huffman.hpp"

using namespace pjpeg;

namespace {

Errc error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::IoError;
}

EntropySegment segment_from_bits(const std::vector<int>& bits) {
    std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= uint8_t(0x80 >> (i % 8));
    EntropySegment seg;
    seg.data = bytes;
    seg.bit_length = bits.size();
    return seg;
}

}  // namespace

TEST_CASE("canonical code assignment follows increasing length then list order") {
    HuffmanTableSpec spec;
    spec.cls = HuffmanTableSpec::Class::DC;
    spec.counts[0] = 1;
    spec.counts[1] = 1;
    spec.symbols = {0x0A, 0x0B};
    HuffmanTable t = build_table(spec);
    REQUIRE(t.codes.size() == 2);
    CHECK(t.codes[0].symbol == 0x0A);
    CHECK(t.codes[0].code == 0b0);
    CHECK(t.codes[0].length == 1);
    CHECK(t.codes[1].symbol == 0x0B);
    CHECK(t.codes[1].code == 0b10);
    CHECK(t.codes[1].length == 2);
    CHECK(t.max_code_length == 2);
}

TEST_CASE("worked example tables get the expected codewords") {
    HuffmanTable dc = build_table(testutil::example_dc_spec());
    HuffmanTable ac = build_table(testutil::example_ac_spec());
    uint16_t code;
    uint8_t len;
    REQUIRE(dc.encode(0x02, code, len));
    CHECK(code == 0b10);
    CHECK(len == 2);
    REQUIRE(ac.encode(0x00, code, len));
    CHECK(code == 0b00);
    CHECK(len == 2);
    REQUIRE(ac.encode(0x02, code, len));
    CHECK(code == 0b100);
    CHECK(len == 3);
    REQUIRE(ac.encode(0x11, code, len));
    CHECK(code == 0b1011);
    CHECK(len == 4);
}

TEST_CASE("oversubscribed counts are rejected") {
    HuffmanTableSpec spec;
    spec.counts[0] = 3;  // three codes of length 1
    spec.symbols = {1, 2, 3};
    CHECK(error_code([&] { build_table(spec); }) == Errc::OversubscribedCode);

    HuffmanTableSpec deep;
    deep.counts[0] = 2;
    deep.counts[1] = 1;  // no length-2 space left after two length-1 codes
    deep.symbols = {1, 2, 3};
    CHECK(error_code([&] { build_table(deep); }) == Errc::OversubscribedCode);
}

TEST_CASE("extend maps magnitude bits to signed values") {
    CHECK(extend(0, 0) == 0);
    CHECK(extend(0b0, 1) == -1);
    CHECK(extend(0b1, 1) == 1);
    CHECK(extend(0b00, 2) == -3);
    CHECK(extend(0b01, 2) == -2);
    CHECK(extend(0b10, 2) == 2);
    CHECK(extend(0b11, 2) == 3);
    CHECK(extend(0, 10) == -1023);
    CHECK(extend(1023, 10) == 1023);
}

TEST_CASE("worked example decodes symbol by symbol") {
    auto o = testutil::example_context();
    const HuffmanTable& dc = o->dc[0];
    const HuffmanTable& ac = o->ac[0];
    BitCursor cur(o->img.segment);

    struct Expect {
        uint64_t start;
        int32_t coeff;
        unsigned run;
        DecodedSymbol::Kind kind;
    };
    const Expect expected[] = {
        {0, -2, 0, DecodedSymbol::Kind::Coefficient},
        {4, -3, 0, DecodedSymbol::Kind::Coefficient},
        {9, 2, 0, DecodedSymbol::Kind::Coefficient},
        {14, -1, 0, DecodedSymbol::Kind::Coefficient},
        {17, -1, 1, DecodedSymbol::Kind::Coefficient},
        {22, 1, 0, DecodedSymbol::Kind::Coefficient},
        {25, 1, 1, DecodedSymbol::Kind::Coefficient},
        {30, 0, 54, DecodedSymbol::Kind::EOB},
    };
    unsigned z = 0;
    for (const auto& e : expected) {
        REQUIRE(cur.position() == e.start);
        DecodedSymbol s = decode_next_symbol(cur, z, dc, ac);
        CHECK(s.kind == e.kind);
        CHECK(s.run_length == e.run);
        if (s.kind == DecodedSymbol::Kind::Coefficient) CHECK(s.coefficient == e.coeff);
        z += s.run_length + 1;
    }
    CHECK(cur.position() == 32);
    CHECK(z == 64);
}

TEST_CASE("EOB run length depends on the zig-zag index") {
    HuffmanTable ac = build_table(testutil::example_ac_spec());
    HuffmanTable dc = build_table(testutil::example_dc_spec());
    EntropySegment seg = segment_from_bits({0, 0});
    for (unsigned z : {1u, 10u, 63u}) {
        BitCursor cur(seg);
        DecodedSymbol s = decode_next_symbol(cur, z, dc, ac);
        CHECK(s.kind == DecodedSymbol::Kind::EOB);
        CHECK(s.run_length == 63 - z);
    }
}

TEST_CASE("ZRL decodes as a 15-zero run") {
    HuffmanTableSpec spec;
    spec.cls = HuffmanTableSpec::Class::AC;
    spec.counts[0] = 1;
    spec.symbols = {0xF0};
    HuffmanTable ac = build_table(spec);
    HuffmanTable dc = build_table(testutil::example_dc_spec());
    EntropySegment seg = segment_from_bits({0});
    BitCursor cur(seg);
    DecodedSymbol s = decode_next_symbol(cur, 5, dc, ac);
    CHECK(s.kind == DecodedSymbol::Kind::ZRL);
    CHECK(s.run_length == 15);
    CHECK(s.bits_consumed == 1);
}

TEST_CASE("prefixes matching no codeword raise InvalidCode") {
    auto o = testutil::example_context();
    EntropySegment seg = segment_from_bits({1, 1, 0, 0, 0});
    // "11" misses the DC table ("0", "10").
    CHECK(error_code([&] {
              BitCursor c(seg);
              decode_next_symbol(c, 0, o->dc[0], o->ac[0]);
          }) == Errc::InvalidCode);
    // "1100" misses the AC table too.
    CHECK(error_code([&] {
              BitCursor c(seg);
              decode_next_symbol(c, 3, o->dc[0], o->ac[0]);
          }) == Errc::InvalidCode);
}

TEST_CASE("truncated codewords and magnitudes raise OutOfBits") {
    auto o = testutil::example_context();
    // "10" needs two magnitude bits; only the codeword fits.
    EntropySegment seg = segment_from_bits({1, 0});
    CHECK(error_code([&] {
              BitCursor c(seg);
              decode_next_symbol(c, 0, o->dc[0], o->ac[0]);
          }) == Errc::OutOfBits);
    // A lone "1" is a strict prefix of longer codes.
    EntropySegment one = segment_from_bits({1});
    CHECK(error_code([&] {
              BitCursor c(one);
              decode_next_symbol(c, 0, o->dc[0], o->ac[0]);
          }) == Errc::OutOfBits);
    EntropySegment empty;
    empty.bit_length = 0;
    CHECK(error_code([&] {
              BitCursor c(empty);
              decode_next_symbol(c, 0, o->dc[0], o->ac[0]);
          }) == Errc::OutOfBits);
}

TEST_CASE("random tables round-trip encode and decode") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        // Draw a random feasible canonical code: walk lengths 1..16 consuming
        // at most the remaining code space at each level.
        HuffmanTableSpec spec;
        spec.cls = HuffmanTableSpec::Class::AC;
        uint32_t code = 0;
        int remaining = std::uniform_int_distribution<int>(1, 40)(rng);
        uint8_t next_symbol = 0;
        for (unsigned len = 1; len <= 16 && remaining > 0; ++len) {
            uint32_t space = (1u << len) - code;
            uint32_t take = std::uniform_int_distribution<uint32_t>(
                0, std::min<uint32_t>(space, remaining))(rng);
            if (len == 16) take = std::min<uint32_t>(space, remaining);
            spec.counts[len - 1] = static_cast<uint8_t>(take);
            for (uint32_t k = 0; k < take; ++k) spec.symbols.push_back(next_symbol++);
            remaining -= int(take);
            code = (code + take) << 1;
        }
        if (spec.symbols.empty()) continue;
        HuffmanTable t = build_table(spec);

        // Concatenate every symbol's codeword and decode them back in order.
        std::vector<int> bits;
        for (const auto& c : t.codes)
            for (int i = c.length - 1; i >= 0; --i) bits.push_back((c.code >> i) & 1);
        EntropySegment seg = segment_from_bits(bits);
        BitCursor cur(seg);
        for (const auto& c : t.codes) {
            unsigned len = 0;
            uint8_t sym = pjpeg::detail::decode_codeword(cur, t, len);
            REQUIRE(sym == c.symbol);
            REQUIRE(len == c.length);
        }
        REQUIRE(cur.position() == bits.size());
    }
}
