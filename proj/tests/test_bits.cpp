#include "mramrng/bits.hpp"
#include "mramrng/errors.hpp"

#include <doctest.h>

#include <random>

using namespace mramrng;

TEST_CASE("string round trip keeps exact length") {
    const std::string s = "1011001110001111000011111";
    const auto b = BitStream::from_string(s);
    CHECK(b.size() == s.size());
    CHECK(b.to_string() == s);
    CHECK(b.count_ones() == 15);
    CHECK_THROWS_AS(BitStream::from_string("10x1"), InvalidInput);
}

TEST_CASE("append_bits and extract agree across word boundaries") {
    std::mt19937_64 rng(5);
    BitStream b;
    std::vector<std::pair<std::uint64_t, unsigned>> chunks;
    for (int i = 0; i < 500; ++i) {
        const unsigned count = 1 + static_cast<unsigned>(rng() % 64);
        const std::uint64_t v = count == 64 ? rng() : rng() & ((std::uint64_t{1} << count) - 1);
        chunks.emplace_back(v, count);
        b.append_bits(v, count);
    }
    std::size_t pos = 0;
    for (const auto& [v, count] : chunks) {
        REQUIRE(b.extract(pos, count) == v);
        pos += count;
    }
    CHECK(pos == b.size());
}

TEST_CASE("pad bits stay zero") {
    BitStream b(70, true);
    b.truncate(65);
    CHECK(b.count_ones() == 65);
    CHECK(b.words()[1] == 1u);
    BitStream c(65, true);
    CHECK(b == c);
}

TEST_CASE("slice, append and xor") {
    const auto a = BitStream::from_string("110010101111000010101");
    CHECK(a.slice(3, 6).to_string() == "010101");
    auto c = a.slice(0, 10);
    c.append(a.slice(10, 11));
    CHECK(c == a);
    CHECK((a ^ a).count_ones() == 0);
    CHECK_THROWS_AS(a.slice(20, 5), InvalidInput);
    CHECK_THROWS_AS(a ^ a.slice(0, 3), InvalidInput);
    CHECK_THROWS_AS(a.at(21), InvalidInput);
}
