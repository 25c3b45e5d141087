#include <gtest/gtest.h>

#include <bitset>
#include <set>
#include <string>

#include "tlc/bitcore.hpp"
#include "tlc/errors.hpp"

using namespace tlc;

namespace {

std::string gamma_oracle(std::uint64_t v) {
    std::string bin;
    for (std::uint64_t t = v; t; t >>= 1) bin.insert(bin.begin(), char('0' + (t & 1)));
    return std::string(bin.size() - 1, '0') + bin;
}

// Schoolbook polynomial product over GF(2) followed by long division, one bit at a time.
std::uint32_t gf_mul_oracle(std::uint32_t a, std::uint32_t b, std::uint32_t mod, unsigned w) {
    std::vector<int> prod(2 * w, 0);
    for (unsigned i = 0; i < w; ++i)
        for (unsigned j = 0; j < w; ++j) prod[i + j] ^= ((a >> i) & 1) & ((b >> j) & 1);
    for (int d = 2 * static_cast<int>(w) - 2; d >= static_cast<int>(w); --d) {
        if (!prod[d]) continue;
        for (unsigned i = 0; i <= w; ++i)
            if ((mod >> i) & 1) prod[d - static_cast<int>(w) + static_cast<int>(i)] ^= 1;
    }
    std::uint32_t r = 0;
    for (unsigned i = 0; i < w; ++i) r |= static_cast<std::uint32_t>(prod[i]) << i;
    return r;
}

}  // namespace

TEST(Gamma, SmallValues) {
    EXPECT_EQ(gamma_encode(1).to_string(), "1");
    EXPECT_EQ(gamma_encode(2).to_string(), "010");
    EXPECT_EQ(gamma_encode(4).to_string(), "00100");
    EXPECT_THROW(gamma_encode(0), DomainError);
}

TEST(Gamma, MatchesStringOracleAndRoundTrips) {
    for (std::uint64_t v = 1; v <= 4096; ++v) {
        auto g = gamma_encode(v);
        ASSERT_EQ(g.to_string(), gamma_oracle(v));
        ASSERT_EQ(gamma_length(v), g.size());
        auto [d, pos] = gamma_decode(g);
        ASSERT_EQ(d, v);
        ASSERT_EQ(pos, g.size());
    }
    for (std::uint64_t v : {std::uint64_t{1} << 40, ~std::uint64_t{0}}) EXPECT_EQ(gamma_decode(gamma_encode(v)).first, v);
}

TEST(Gamma, PrefixFreeUpTo4096) {
    std::set<std::string> codes;
    for (std::uint64_t v = 1; v <= 4096; ++v) codes.insert(gamma_encode(v).to_string());
    // In sorted order a prefix sorts immediately before some string that extends it.
    for (auto it = codes.begin(); std::next(it) != codes.end(); ++it) {
        const auto& nx = *std::next(it);
        ASSERT_FALSE(nx.compare(0, it->size(), *it) == 0) << *it << " prefixes " << nx;
    }
}

TEST(Gamma, DecodeRejectsTruncation) {
    EXPECT_THROW(gamma_decode(BitString::from_string("000")), FormatError);
    EXPECT_THROW(gamma_decode(BitString::from_string("0010")), FormatError);
}

TEST(BitString, HexRoundTripAndOrdering) {
    SplitMix64 rng(3);
    for (int i = 0; i < 300; ++i) {
        auto b = rng.bits(rng.below(200));
        ASSERT_EQ(BitString::from_hex(b.to_hex()), b);
        ASSERT_EQ(BitString::from_string(b.to_string()), b);
    }
    EXPECT_EQ(BitString::from_string("1011").to_hex(), "4:b");
    EXPECT_EQ(BitString::from_string("101").to_hex(), "3:a");
    EXPECT_THROW(BitString::from_hex("3:b"), FormatError);
    EXPECT_LT(BitString::from_string("11"), BitString::from_string("000"));
    EXPECT_LT(BitString::from_string("01"), BitString::from_string("10"));
}

TEST(BitString, AppendSubstrAndHashAgree) {
    SplitMix64 rng(9);
    for (int i = 0; i < 300; ++i) {
        auto a = rng.bits(rng.below(150));
        auto b = rng.bits(rng.below(150));
        auto c = a + b;
        ASSERT_EQ(c.to_string(), a.to_string() + b.to_string());
        ASSERT_EQ(c.substr(a.size(), b.size()), b);
        ASSERT_EQ(c.substr(0, a.size()), a);
    }
    for (std::uint64_t v = 0; v < 256; ++v) ASSERT_EQ(uint_bits_hash(v, 8), BitString::from_uint(v, 8).hash());
    EXPECT_NE(BitString::from_string("0").hash(), BitString::from_string("00").hash());
}

TEST(PackCode, Layout) {
    auto c = pack_code(1, 1, BitString::from_string("0"), 8);
    EXPECT_EQ(c.to_string(), "10100100");
    EXPECT_THROW(pack_code(1, 1, BitString(8), 8), CapacityExceeded);
    EXPECT_THROW(unpack_code(BitString(8)), FormatError);
}

TEST(PackCode, RoundTripAndExactLength) {
    SplitMix64 rng(11);
    for (int i = 0; i < 500; ++i) {
        unsigned e = 1 + static_cast<unsigned>(rng.below(20));
        std::uint64_t k = rng.below(1000);
        auto payload = rng.bits(rng.below(100));
        std::size_t m = code_header_bits(e, k) + payload.size() + 1 + rng.below(20);
        auto code = pack_code(e, k, payload, m);
        ASSERT_EQ(code.size(), m);
        ASSERT_EQ(unpack_code(code), (CodeFields{e, k, payload}));
    }
}

TEST(Gf2, MatVec) {
    EXPECT_EQ(gf2_matvec({BitString::from_string("1100")}, BitString::from_string("1010")).to_string(), "1");
    SplitMix64 rng(5);
    for (std::size_t n : {1, 7, 64, 65, 130}) {
        std::vector<BitString> id;
        for (std::size_t i = 0; i < n; ++i) {
            BitString r(n);
            r.set(i, true);
            id.push_back(r);
        }
        auto x = rng.bits(n);
        EXPECT_EQ(gf2_matvec(id, x), x);
        std::vector<BitString> rows{rng.bits(n), rng.bits(n), rng.bits(n)};
        EXPECT_EQ(gf2_matvec(rows, BitString(n)), BitString(3));
    }
    EXPECT_THROW(gf2_matvec({BitString(3)}, BitString(4)), DimensionError);
}

TEST(Gf2w, FieldAxiomsExhaustiveW4) {
    GF2w f(4);
    for (std::uint32_t a = 0; a < 16; ++a) {
        for (std::uint32_t b = 0; b < 16; ++b) {
            ASSERT_EQ(f.mul(a, b), gf_mul_oracle(a, b, 0x13, 4));
            for (std::uint32_t c = 0; c < 16; ++c) ASSERT_EQ(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        }
        if (a) {
            ASSERT_EQ(f.mul(a, f.inv(a)), 1U);
        }
    }
}

TEST(Gf2w, RandomizedW8) {
    GF2w f(8);
    EXPECT_EQ(f.modulus(), 0x11BU);
    SplitMix64 rng(17);
    for (int i = 0; i < 10000; ++i) {
        auto a = static_cast<std::uint32_t>(rng.below(256));
        auto b = static_cast<std::uint32_t>(rng.below(256));
        auto c = static_cast<std::uint32_t>(rng.below(256));
        ASSERT_EQ(f.mul(a, b), gf_mul_oracle(a, b, 0x11B, 8));
        ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        ASSERT_EQ(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        if (a) {
            ASSERT_EQ(f.mul(a, f.inv(a)), 1U);
        }
    }
    // The AES field: 0x53 and 0xCA are inverses.
    EXPECT_EQ(f.inv(0x53), 0xCAU);
}

TEST(LinePoint, Instances) {
    for (std::uint32_t x = 0; x < 16; ++x) {
        EXPECT_EQ(line_point_from(4, 1, 0, x).v.value, x);
        EXPECT_EQ(line_point_from(4, 0, 0, x).v.value, 0U);
    }
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto lp = line_point_instance(8, Seed{s});
        ASSERT_EQ(lp.v.value, gf_mul_oracle(lp.a.value, lp.u.value, 0x11B, 8) ^ lp.b.value);
        ASSERT_EQ(lp.line_bits().size(), 16U);
        ASSERT_EQ(lp.point_bits().to_uint(), (lp.u.value << 8) | lp.v.value);
    }
}

TEST(SplitMix64, ReferenceOutputs) {
    // Reference values of the SplitMix64 generator seeded with 0.
    SplitMix64 rng(0);
    EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
    EXPECT_EQ(derive_seed(5, 0), mix64(5 ^ mix64(1)));
}

TEST(SplitMix64, BelowIsUniformChiSquare) {
    SplitMix64 rng(21);
    const int bins = 10, draws = 100000;
    std::vector<int> cnt(bins);
    for (int i = 0; i < draws; ++i) ++cnt[rng.below(bins)];
    double chi = 0, expct = double(draws) / bins;
    for (int c : cnt) chi += (c - expct) * (c - expct) / expct;
    EXPECT_LT(chi, 27.88);  // chi-square 9 dof, p = 0.001
}
