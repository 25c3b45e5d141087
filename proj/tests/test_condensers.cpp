#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "tlc/analysis.hpp"
#include "tlc/condensers.hpp"
#include "tlc/errors.hpp"

using namespace tlc;

namespace {

Distribution random_distribution(SplitMix64& rng, std::size_t n) {
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform01() < 0.2 ? 0 : rng.uniform01();
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (s == 0) {
        w[0] = 1;
        s = 1;
    }
    for (auto& v : w) v /= s;
    return {w};
}

// Worst (1/K')-excess of f over all K-subsets of [2^n], computed independently of verify_condenser.
double brute_worst_excess(const CondenserTable& f, std::uint64_t K, std::uint64_t Kp) {
    double worst = 0;
    std::uint64_t N = f.domain();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
        if (static_cast<std::uint64_t>(__builtin_popcountll(mask)) != K) continue;
        std::vector<double> p(f.Y, 0);
        for (std::uint64_t x = 0; x < N; ++x)
            if ((mask >> x) & 1)
                for (std::uint32_t d = 0; d < f.D; ++d) p[f(x, d)] += 1.0 / double(K * f.D);
        double e = 0;
        for (double q : p) e += std::max(0.0, q - 1.0 / double(Kp));
        worst = std::max(worst, e);
    }
    return worst;
}

}  // namespace

TEST(Excess, Examples) {
    EXPECT_NEAR(excess(Distribution::uniform(4), 0.25), 0, 1e-12);
    EXPECT_NEAR(excess({{0.5, 0.3, 0.2}}, 0.25), 0.30, 1e-12);
    EXPECT_NEAR(excess({{1, 0, 0}}, 1.0 / 8), 7.0 / 8, 1e-12);
    EXPECT_THROW(excess({{0.5, 0.6}}, 0.1), DomainError);
}

TEST(Excess, MonotoneAndEndpoints) {
    SplitMix64 rng(2);
    for (int i = 0; i < 200; ++i) {
        auto P = random_distribution(rng, 1 + rng.below(8));
        EXPECT_NEAR(excess(P, 0), 1, 1e-9);
        EXPECT_NEAR(excess(P, 1), 0, 1e-9);
        double prev = 1;
        for (double g = 0; g <= 1; g += 0.05) {
            double e = excess(P, g);
            ASSERT_LE(e, prev + 1e-12);
            prev = e;
        }
    }
}

TEST(Excess, PostProcessingNeverDecreases) {
    SplitMix64 rng(3);
    for (int i = 0; i < 300; ++i) {
        std::size_t n = 2 + rng.below(7), m = 1 + rng.below(n);
        auto P = random_distribution(rng, n);
        Distribution Q{std::vector<double>(m, 0)};
        for (std::size_t y = 0; y < n; ++y) Q.probs[rng.below(m)] += P.probs[y];
        double g = rng.uniform01();
        ASSERT_GE(excess(Q, g) + 1e-12, excess(P, g));
    }
}

TEST(Verify, IdentityAndConstant) {
    auto id = CondenserTable::identity(4);
    for (std::uint64_t K = 1; K <= 4; ++K) EXPECT_TRUE(verify_conductor(id, K, 0).verified);
    auto c = CondenserTable::constant(3, 2, 4);
    auto cert = verify_condenser(c, 2, 2, 0.4);
    EXPECT_FALSE(cert.verified);
    EXPECT_NEAR(cert.worst_excess, 0.5, 1e-12);
    ASSERT_TRUE(cert.worst_set);
    EXPECT_EQ(cert.worst_set->size(), 2U);
    EXPECT_FALSE(verify_conductor(c, 2, 0.49).verified);
    EXPECT_TRUE(verify_conductor(c, 2, 0.5).verified);
}

TEST(Verify, ExhaustiveMatchesBruteForce) {
    SplitMix64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        CondenserTable f{3, static_cast<std::uint32_t>(1 + rng.below(4)), 1 + rng.below(8), {}};
        for (std::uint64_t i = 0; i < f.domain() * f.D; ++i) f.table.push_back(static_cast<std::uint32_t>(rng.below(f.Y)));
        for (std::uint64_t K = 1; K <= 8; ++K) {
            for (std::uint64_t Kp = 1; Kp <= K; ++Kp) {
                auto cert = verify_condenser(f, K, Kp, 1);
                ASSERT_EQ(cert.mode, CertMode::Exact);
                ASSERT_NEAR(cert.worst_excess, brute_worst_excess(f, K, Kp), 1e-9);
            }
        }
    }
}

TEST(Verify, ScaleGuard) {
    auto id = CondenserTable::identity(10);
    VerifyOptions opt;
    opt.mode = VerifyOptions::Mode::Exhaustive;
    EXPECT_THROW(verify_condenser(id, 8, 8, 0.1, opt), ScaleError);
    opt.mode = VerifyOptions::Mode::Auto;
    auto cert = verify_condenser(id, 8, 8, 0.1, opt);
    EXPECT_EQ(cert.mode, CertMode::Sampled);
    EXPECT_TRUE(cert.verified);
}

TEST(RandomCondenser, DegreeAndRangeArithmetic) {
    EXPECT_EQ(conductor_degree(4, 0.5), 24U);
    auto f = random_condenser(4, 4, 0.5, Seed{1});
    EXPECT_EQ(f.D, 24U);
    EXPECT_EQ(f.Y, 16U);
    EXPECT_LE(double(f.D), 4 * 4 / 0.5);
    EXPECT_TRUE(verify_conductor(f, 4, 0.5).verified);
    // Identity when 4 Kmax > 2^n.
    auto g = random_condenser(4, 8, 0.5, Seed{1});
    EXPECT_EQ(g.D, 1U);
    for (std::uint64_t x = 0; x < 16; ++x) EXPECT_EQ(g(x, 0), x);
    Conductor lazy(4, 4, 0.5, 9);
    EXPECT_EQ(lazy.kind(), Conductor::Kind::Random);
    EXPECT_EQ(Conductor(4, 8, 0.5, 9).kind(), Conductor::Kind::Identity);
    EXPECT_EQ(Conductor(10, 2, 0.25, 9).kind(), Conductor::Kind::UniformRange);
}

TEST(RandomCondenser, LazyMatchesTable) {
    Conductor c(6, 4, 0.25, 77);
    auto t = c.to_table();
    std::vector<std::uint64_t> img;
    for (std::uint64_t x = 0; x < 64; ++x) {
        c.images_u64(x, img);
        ASSERT_EQ(img.size(), c.D());
        for (std::uint64_t d = 0; d < c.D(); ++d) {
            ASSERT_EQ(img[d], t(x, static_cast<std::uint32_t>(d)));
            ASSERT_EQ(c.eval(BitString::from_uint(x, 6), d), img[d]);
        }
    }
}

TEST(SearchConductor, SmallCases) {
    auto id = search_conductor(3, 3, 0.1);
    ASSERT_TRUE(id);
    EXPECT_TRUE(verify_conductor(*id, 8, 0.1).verified);
    auto f = search_conductor(3, 1, 0.5);
    ASSERT_TRUE(f);
    EXPECT_LE(f->D, 18U);
    EXPECT_TRUE(verify_conductor(*f, 2, 0.5).verified);
    auto rep = degree_lb_check(*f, 2, 0.5);
    EXPECT_TRUE(rep.satisfied);
}

TEST(Compose, IdentityProductIsInjective) {
    auto id = CondenserTable::identity(3);
    auto p = compose_condensers(id, id, 8);
    EXPECT_EQ(p.D, 1U);
    EXPECT_EQ(p.Y, 64U);
    EXPECT_TRUE(verify_conductor(p, 8, 0).verified);
    EXPECT_THROW(compose_condensers(id, CondenserTable::constant(3, 1, 2), 4), DomainError);
}

TEST(Compose, ErrorsAddOnExhaustiveSets) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        auto S = random_condenser(4, 2, 0.5, Seed{10 + s});
        auto T = random_condenser(4, 4, 0.5, Seed{20 + s});
        ASSERT_TRUE(verify_conductor(S, 2, 0.5).verified);
        ASSERT_TRUE(verify_conductor(T, 4, 0.5).verified);
        auto P = compose_condensers(S, T, 4);
        for (std::uint64_t K = 1; K <= 4; ++K) {
            auto cert = verify_condenser(P, K, K, 1.0);
            ASSERT_EQ(cert.mode, CertMode::Exact);
            ASSERT_LE(cert.worst_excess, 0.5 + 0.5 + 1e-9);
            ASSERT_LE(cert.worst_excess, verify_condenser(T, K, K, 1.0).worst_excess + 1e-9);
        }
    }
}

TEST(Compose, ScheduleGrowth) {
    for (std::uint64_t k = 3; k < 400; ++k) {
        auto s = composition_schedule(k);
        ASSERT_EQ(s.front(), 2U);
        ASSERT_EQ(s.back(), k);
        for (std::size_t i = 1; i + 1 < s.size(); ++i) ASSERT_GE(2 * s[i], 3 * s[i - 1]);
    }
}

TEST(MinEntropy, Examples) {
    EXPECT_TRUE(minentropy_close_check(Distribution::uniform(4), 4, 0));
    Distribution half{{0.5, 0.5, 0, 0}};
    EXPECT_NEAR(excess(half, 0.25), 0.5, 1e-12);
    EXPECT_TRUE(minentropy_close_check(half, 4, 0.5));
    EXPECT_FALSE(minentropy_close_check(half, 4, 0.49));
    EXPECT_THROW(minentropy_close_check(Distribution::uniform(3), 4, 0.1), DomainError);
}

TEST(MinEntropy, TrimConstructionWitness) {
    // The trimmed distribution is a (log K)-source at distance exactly equal to the excess, and no
    // (log K)-source is closer, so the excess criterion and the witness agree.
    SplitMix64 rng(6);
    for (int i = 0; i < 200; ++i) {
        std::size_t n = 1 + rng.below(6);
        std::uint64_t K = 1 + rng.below(n);
        auto P = random_distribution(rng, n);
        auto Q = trim_to_source(P, K);
        Q.validate();
        for (double q : Q.probs) ASSERT_LE(q, 1.0 / double(K) + 1e-9);
        ASSERT_GE(min_entropy(Q), std::log2(double(K)) - 1e-9);
        double ex = excess(P, 1.0 / double(K));
        ASSERT_NEAR(statistical_distance(P, Q), ex, 1e-9);
        double eps = rng.uniform01() * 0.5;
        ASSERT_EQ(minentropy_close_check(P, K, eps), statistical_distance(P, Q) <= eps + 1e-9);
    }
}

TEST(Table, SerializationRoundTrip) {
    auto f = random_condenser(4, 4, 0.5, Seed{3});
    std::stringstream ss;
    write_table(ss, f);
    auto g = read_table(ss);
    EXPECT_EQ(g.n, f.n);
    EXPECT_EQ(g.D, f.D);
    EXPECT_EQ(g.Y, f.Y);
    EXPECT_EQ(g.table, f.table);
    std::stringstream bad("CND1 2 1 4\n0 1 2\n");
    EXPECT_THROW(read_table(bad), FormatError);
    std::stringstream range("CND1 1 1 2\n0 2\n");
    EXPECT_THROW(read_table(range), FormatError);
}
