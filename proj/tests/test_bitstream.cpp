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

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pjpeg/bitstream.hpp"

using namespace pjpeg;

TEST_CASE("unstuff removes stuffed zeros and records their positions") {
    std::vector<uint8_t> scan = {0x12, 0xFF, 0x00, 0x34, 0xFF, 0x00};
    EntropySegment seg = unstuff(scan);
    REQUIRE(seg.data == std::vector<uint8_t>{0x12, 0xFF, 0x34, 0xFF});
    REQUIRE(seg.bit_length == 32);
    REQUIRE(seg.stuffing_map == std::vector<size_t>{1, 3});
}

TEST_CASE("unstuff rejects malformed scans") {
    auto code = [](const std::vector<uint8_t>& scan) {
        try {
            unstuff(scan);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::IoError;
    };
    CHECK(code({}) == Errc::EmptyScan);
    CHECK(code({0x11, 0xFF}) == Errc::MalformedStuffing);
    CHECK(code({0xFF, 0xD9}) == Errc::MalformedStuffing);
    CHECK(code({0xFF, 0x01, 0x00}) == Errc::MalformedStuffing);
}

TEST_CASE("restuff is the inverse of unstuff") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(1, 200);
    for (int trial = 0; trial < 50; ++trial) {
        // Generate a valid stuffed scan directly.
        std::vector<uint8_t> scan;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            uint8_t b = static_cast<uint8_t>(byte(rng));
            scan.push_back(b);
            if (b == 0xFF) scan.push_back(0x00);
        }
        EntropySegment seg = unstuff(scan);
        REQUIRE(restuff(seg) == scan);
    }
}

TEST_CASE("segment peek pads with zeros past the end") {
    EntropySegment seg = unstuff(std::vector<uint8_t>{0xF0});
    CHECK(seg.peek(4, 8) == 0x00);
    CHECK(seg.peek(0, 16) == 0xF000);
    CHECK(seg.peek(100, 4) == 0);
}

TEST_CASE("cursor reads MSB-first") {
    EntropySegment seg = unstuff(testutil::kExampleScan);
    BitCursor cur(seg);
    CHECK(cur.read_bits(4) == 0x9);  // leading 1001
    CHECK(cur.position() == 4);
    CHECK(cur.read_bits(5) == 0x10);  // 10000
    CHECK(cur.read_bits(0) == 0);
    CHECK(cur.position() == 9);
    CHECK(cur.remaining() == 23);
}

TEST_CASE("cursor read is equivalent to any split of k") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<uint8_t> raw(32);
    for (auto& b : raw) b = static_cast<uint8_t>(byte(rng) & 0x7F);  // no 0xFF
    EntropySegment seg = unstuff(raw);

    std::uniform_int_distribution<int> kdist(0, 16);
    std::uniform_int_distribution<int> pdist(0, int(seg.bit_length) - 17);
    for (int trial = 0; trial < 200; ++trial) {
        unsigned k = kdist(rng);
        unsigned k1 = std::uniform_int_distribution<unsigned>(0, k)(rng);
        uint64_t p = pdist(rng);
        BitCursor a(seg, p), b(seg, p);
        uint32_t whole = a.read_bits(k);
        uint32_t hi = b.read_bits(k1);
        uint32_t lo = b.read_bits(k - k1);
        REQUIRE(whole == ((hi << (k - k1)) | lo));
        REQUIRE(a.position() == b.position());
    }
}

TEST_CASE("cursor refuses reads past the end") {
    EntropySegment seg = unstuff(std::vector<uint8_t>{0xAB});
    BitCursor cur(seg, 0);
    cur.read_bits(6);
    CHECK_THROWS_MATCHES(cur.read_bits(3), Error, Catch::Matchers::Predicate<Error>([](
                             const Error& e) { return e.code() == Errc::OutOfBits; }));
    CHECK(cur.read_bits(2) == 0x3);  // the last two bits are still readable
}
