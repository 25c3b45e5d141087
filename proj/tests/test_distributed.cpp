#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tlc/condensers.hpp"
#include "tlc/distributed.hpp"
#include "tlc/errors.hpp"

using namespace tlc;

namespace {

struct Entry {
    BitString prog;
    BitString cond;
    BitString out;
};

// Random conditional toy decompressor over l-tuples of `width`-bit strings, recorded so that
// complexities can be recomputed from the raw table.
struct RecordedToy {
    std::size_t ell;
    std::vector<Tuple> tuples;
    std::vector<Entry> entries;
    ToyDecompressor D;

    std::optional<std::size_t> complexity(const Tuple& x, CoordSet J) const {
        // Encoding of x_J written out by hand: gamma(j) gamma(|x_j|+1) x_j for j ascending.
        auto enc = [&](CoordSet S) {
            std::string s;
            for (std::size_t j = 0; j < ell; ++j) {
                if (!((S >> j) & 1U)) continue;
                auto g = [](std::uint64_t v) {
                    std::string b;
                    for (auto t = v; t; t >>= 1) b.insert(b.begin(), char('0' + (t & 1)));
                    return std::string(b.size() - 1, '0') + b;
                };
                s += g(j + 1) + g(x[j].size() + 1) + x[j].to_string();
            }
            return s;
        };
        std::string out = enc(J), cond = enc(((1U << ell) - 1) & ~J);
        std::optional<std::size_t> best;
        for (const auto& e : entries) {
            if (e.out.to_string() == out && e.cond.to_string() == cond && (!best || e.prog.size() < *best))
                best = e.prog.size();
        }
        return best;
    }
};

RecordedToy random_recorded(SplitMix64& rng, std::size_t ell, unsigned width, std::size_t count) {
    RecordedToy r;
    r.ell = ell;
    std::set<std::string> seen;
    while (r.tuples.size() < count) {
        Tuple t;
        std::string key;
        for (std::size_t j = 0; j < ell; ++j) {
            t.push_back(rng.bits(width));
            key += t.back().to_string();
        }
        if (seen.insert(key).second) r.tuples.push_back(t);
    }
    CoordSet full = (1U << ell) - 1;
    for (const auto& t : r.tuples) {
        for (CoordSet J = 1; J <= full; ++J) {
            // One to three random programs per (x_J, x_rest); some constraints are left unreachable.
            if (rng.below(8) == 0) continue;
            for (std::size_t c = 1 + rng.below(3); c > 0; --c) {
                Entry e{rng.bits(rng.below(9)), encode_set(t, full & ~J), encode_set(t, J)};
                if (r.D.run(e.prog, e.cond)) continue;
                r.D.add(e.prog, e.cond, e.out);
                r.entries.push_back(e);
            }
        }
    }
    return r;
}

Tuple pair(std::uint64_t a, std::uint64_t b, std::size_t width = 3) {
    return {BitString::from_uint(a, width), BitString::from_uint(b, width)};
}

MultiDecodeOptions probabilistic(std::uint64_t seed) {
    MultiDecodeOptions o;
    o.mode = MultiDecodeOptions::Mode::Probabilistic;
    o.seed = Seed{seed};
    return o;
}

}  // namespace

TEST(EncodeSet, RoundTripAndEmpty) {
    SplitMix64 rng(1);
    for (int i = 0; i < 300; ++i) {
        std::size_t ell = 1 + rng.below(5);
        Tuple x;
        for (std::size_t j = 0; j < ell; ++j) x.push_back(rng.bits(rng.below(12)));
        auto J = static_cast<CoordSet>(rng.below(std::uint64_t{1} << ell));
        auto d = decode_set(encode_set(x, J), ell);
        ASSERT_EQ(d.J, J);
        for (std::size_t j = 0; j < ell; ++j) ASSERT_EQ(d.coords[j], (J >> j) & 1U ? x[j] : BitString{});
    }
    EXPECT_EQ(encode_set(pair(1, 2), 0), BitString{});
    EXPECT_EQ(full_set(3), 7U);
    EXPECT_THROW(full_set(21), ScaleError);
}

TEST(EncodeSet, RejectsMalformed) {
    auto x = pair(5, 6);
    auto swapped = encode_set(x, 2U) + encode_set(x, 1U);
    EXPECT_THROW(decode_set(swapped, 2), FormatError);
    EXPECT_THROW(decode_set(encode_set(x, 2U), 1), FormatError);
    auto enc = encode_set(x, 1U);
    EXPECT_THROW(decode_set(enc.substr(0, enc.size() - 1), 2), FormatError);
}

TEST(SwCheck, SingleSenderIsPlainComplexity) {
    ToyDecompressor D;
    auto x = BitString::from_string("1011");
    D.add(BitString::from_string("010"), BitString{}, encode_set({x}, 1U));
    EXPECT_TRUE(sw_check(D, {x}, {4}));
    EXPECT_FALSE(sw_check(D, {x}, {3}));
    EXPECT_FALSE(sw_check(D, {BitString::from_string("0")}, {100}));
    EXPECT_THROW(sw_check(D, {x}, {4, 4}), DimensionError);
    EXPECT_THROW(sw_check(D, Tuple(21, x), std::vector<std::int64_t>(21, 1)), ScaleError);
}

TEST(SwCheck, LinePointBudgets) {
    LinePointDecompressor D(8);
    SplitMix64 rng(2);
    for (int i = 0; i < 20; ++i) {
        auto lp = line_point_instance(8, Seed{rng.next()});
        auto x = D.tuple(lp.a.value, lp.b.value, lp.u.value);
        EXPECT_EQ(set_complexity(D, x, 3U), std::optional<std::size_t>(24));
        EXPECT_EQ(set_complexity(D, x, 1U), std::optional<std::size_t>(8));
        EXPECT_EQ(set_complexity(D, x, 2U), std::optional<std::size_t>(8));
        EXPECT_TRUE(sw_check(D, x, {13, 13}));
        EXPECT_FALSE(sw_check(D, x, {7, 13}));
        EXPECT_FALSE(sw_check(D, x, {12, 12}));
    }
    // A non-incident pair is not an output.
    auto x = D.tuple(1, 2, 3);
    x[1] = BitString::from_uint(x[1].to_uint() ^ 1, 16);
    EXPECT_FALSE(sw_check(D, x, {100, 100}));
}

TEST(SwCheck, AgreesWithTableOracle) {
    SplitMix64 rng(3);
    for (int rep = 0; rep < 6; ++rep) {
        std::size_t ell = 1 + rep % 3;
        auto R = random_recorded(rng, ell, 4, 12);
        CoordSet full = (1U << ell) - 1;
        for (const auto& x : R.tuples) {
            for (CoordSet J = 1; J <= full; ++J) ASSERT_EQ(set_complexity(R.D, x, J), R.complexity(x, J));
            for (int t = 0; t < 20; ++t) {
                std::vector<std::int64_t> k;
                for (std::size_t j = 0; j < ell; ++j) k.push_back(static_cast<std::int64_t>(rng.below(10)));
                bool expect = true;
                for (CoordSet J = 1; J <= full; ++J) {
                    std::int64_t budget = 0;
                    for (std::size_t j = 0; j < ell; ++j) budget += (J >> j) & 1U ? k[j] : 0;
                    auto c = R.complexity(x, J);
                    expect = expect && c && static_cast<std::int64_t>(*c) < budget;
                }
                ASSERT_EQ(sw_check(R.D, x, k), expect);
            }
        }
    }
}

TEST(SmallSlices, Examples) {
    std::vector<Tuple> cube{pair(0, 0), pair(0, 1), pair(1, 0), pair(1, 1)};
    EXPECT_TRUE(small_slices_check(cube, {2, 2}).verified);
    auto bad = small_slices_check(cube, {2, 1});
    EXPECT_FALSE(bad.verified);
    ASSERT_TRUE(bad.witness);
    std::vector<Tuple> diag;
    for (std::uint64_t i = 0; i < 6; ++i) diag.push_back(pair(i, i));
    EXPECT_TRUE(small_slices_check(diag, {1, 6}).verified);
    EXPECT_FALSE(small_slices_check(diag, {1, 5}).verified);
    EXPECT_TRUE(small_slices_check({}, {1, 1}).verified);
}

TEST(SmallSlices, ConstraintSetsHaveExponentialSlices) {
    SplitMix64 rng(4);
    for (int rep = 0; rep < 8; ++rep) {
        std::size_t ell = 2 + rep % 2;
        auto R = random_recorded(rng, ell, 3, 40);
        for (int t = 0; t < 10; ++t) {
            std::vector<std::int64_t> k;
            std::vector<double> K;
            for (std::size_t j = 0; j < ell; ++j) {
                k.push_back(static_cast<std::int64_t>(1 + rng.below(6)));
                K.push_back(std::ldexp(1.0, static_cast<int>(k.back())));
            }
            std::vector<Tuple> S;
            for (const auto& x : R.tuples)
                if (sw_check(R.D, x, k)) S.push_back(x);
            ASSERT_TRUE(small_slices_check(S, K).verified);
        }
    }
}

TEST(SwSuspects, GatedSubsetOfFullOutputs) {
    LinePointDecompressor D(3);
    auto all = sw_suspects(D, 2, std::nullopt);
    EXPECT_EQ(all.size(), 512U);
    EXPECT_EQ(all.front(), D.tuple(0, 0, 0));
    EXPECT_EQ(sw_suspects(D, 2, std::vector<std::int64_t>{6, 6}).size(), 512U);
    EXPECT_TRUE(sw_suspects(D, 2, std::vector<std::int64_t>{3, 6}).empty());
}

TEST(Tree, ChildCountsAndDeterminism) {
    auto t = build_tree(2, {2, 2}, 0.5, Seed{1});
    EXPECT_EQ(t.children(), (std::vector<std::uint64_t>{8, 8}));
    EXPECT_EQ(build_tree(3, {1, 2, 3}, 0.4, Seed{1}).children(), (std::vector<std::uint64_t>{8, 15, 23}));
    auto u = build_tree(2, {2, 2}, 0.5, Seed{1});
    SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Tuple x{rng.bits(6), rng.bits(6)};
        ASSERT_EQ(t.leaf_path(x), u.leaf_path(x));
    }
    EXPECT_THROW(build_tree(2, {2}, 0.5, Seed{1}), DimensionError);
    EXPECT_THROW(build_tree(1, {1}, 0, Seed{1}), DomainError);
}

TEST(Tree, ChildIndexUniformChiSquare) {
    auto t = build_tree(2, {2, 2}, 0.5, Seed{6});
    std::vector<int> cnt(8);
    SplitMix64 rng(6);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++cnt[t.child_index(1, t.root_key(), rng.next())];
    double chi = 0, ex = draws / 8.0;
    for (int c : cnt) chi += (c - ex) * (c - ex) / ex;
    EXPECT_LT(chi, 24.32);  // chi-square 7 dof, p = 0.001
}

TEST(Percolate, OnePebblePerNode) {
    auto t = build_tree(2, {1, 1}, 1, Seed{7});
    EXPECT_EQ(t.children(), (std::vector<std::uint64_t>{2, 2}));
    EXPECT_TRUE(percolate(t, pair(0, 0), 0));
    std::size_t placed = 1;
    for (std::uint64_t i = 1; i < 8; ++i) placed += percolate(t, pair(i, i), static_cast<std::uint32_t>(i)).has_value();
    EXPECT_EQ(placed, t.pebble_count());
    EXPECT_LE(placed, 4U);
    EXPECT_THROW(t.place(t.leaf_path(pair(0, 0)), 9), BoundViolation);
}

TEST(Percolate, CollisionProbabilityOfDisjointPair) {
    // Tuples differing in every coordinate share a leaf with probability prod_j 1/children_j.
    const int seeds = 40000;
    int same = 0;
    for (int s = 0; s < seeds; ++s) {
        auto t = build_tree(2, {1, 2}, 0.5, Seed{static_cast<std::uint64_t>(s)});
        same += t.leaf_path(pair(1, 2)) == t.leaf_path(pair(5, 6));
    }
    double p = 1.0 / (4 * 8), sigma = std::sqrt(p * (1 - p) / seeds);
    EXPECT_NEAR(double(same) / seeds, p, 4 * sigma);
}

TEST(Percolate, BlockingRateWithinBound) {
    // S = [4] x [4] has (4, 4)-small slices; the last element fed is the most exposed.
    const double eps = 0.25;
    const int trials = 4000;
    std::vector<Tuple> S;
    for (std::uint64_t a = 0; a < 4; ++a)
        for (std::uint64_t b = 0; b < 4; ++b) S.push_back(pair(a, b));
    ASSERT_TRUE(small_slices_check(S, {4, 4}).verified);
    int blocked = 0;
    for (int s = 0; s < trials; ++s) {
        auto t = build_tree(2, {4, 4}, eps, Seed{static_cast<std::uint64_t>(s)});
        for (std::size_t i = 0; i + 1 < S.size(); ++i) percolate(t, S[i], static_cast<std::uint32_t>(i));
        blocked += !percolate(t, S.back(), 99);
    }
    EXPECT_LE(double(blocked) / trials, eps * std::exp(1.0));
}

TEST(TreeDecoder, SingleSenderMatchesFilteredStream) {
    SplitMix64 rng(8);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 8;
        std::vector<Tuple> S;
        std::set<BitString> seen;
        while (S.size() < 24) {
            auto b = rng.bits(n);
            if (seen.insert(b).second) S.push_back({b});
        }
        auto target = S[rng.below(S.size())][0];
        Code y = compress(target, EpsilonExp{2}, min_length_for(2, n, 6), Seed{rng.next()});
        auto tree = build_tree(1, {16}, 0.25, Seed{rng.next()});
        TreeDecoder dec(tree, code_inverses({y}));
        for (const auto& x : S) dec.feed(x);
        // Oracle: only the first arrival at each leaf reaches the root inverse.
        DecodeSession g(y, false);
        std::set<NodePath> used;
        for (const auto& x : S)
            if (used.insert(tree.leaf_path(x)).second) g.feed(x[0]);
        ASSERT_EQ(dec.answer().has_value(), g.answer().has_value());
        if (g.answer()) {
            ASSERT_EQ((*dec.answer())[0], *g.answer());
        }
        ASSERT_EQ(dec.blocked(), S.size() - used.size());
    }
}

TEST(TreeDecoder, CommitmentIsMonotoneAndEventsImplySuccess) {
    LinePointDecompressor D(3);
    auto S = sw_suspects(D, 2, std::nullopt);
    const unsigned e = 3;
    auto m = line_point_target(3, e);
    SplitMix64 rng(9);
    int committed = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const auto& x = S[rng.below(S.size())];
        std::vector<Code> y{compress(x[0], EpsilonExp{e}, m, Seed{rng.next()}),
                            compress(x[1], EpsilonExp{e}, m, Seed{rng.next()})};
        std::vector<std::uint64_t> kappa{y[0].fields().k, y[1].fields().k};
        TreeDecoder dec(build_tree(2, slice_bounds(kappa, 0.125), 0.125, Seed{rng.next()}), code_inverses(y));
        std::optional<Tuple> first;
        for (const auto& z : S) {
            dec.feed(z);
            if (first) {
                ASSERT_EQ(dec.answer(), first);
            } else if (dec.committed()) {
                first = dec.answer();
            }
        }
        committed += first.has_value();
        if (dec.events(x).success()) {
            ASSERT_EQ(dec.answer(), std::optional<Tuple>(x));
        }
    }
    EXPECT_GT(committed, 0);
}

TEST(LinePointFast, MatchesTreeDecoder) {
    for (unsigned w : {4U, 5U}) {
        LinePointDecompressor D(w);
        const unsigned e = 3;
        auto m = line_point_target(w, e);
        auto all = sw_suspects(D, 2, std::nullopt);
        SplitMix64 rng(10 + w);
        for (int rep = 0; rep < 12; ++rep) {
            auto lp = line_point_instance(w, Seed{rng.next()});
            auto x = D.tuple(lp.a.value, lp.b.value, lp.u.value);
            // Shorter point codes make some trees commit elsewhere or not at all.
            std::size_t mB = rep % 3 == 0 ? m - 4 : m;
            std::vector<Code> y{compress(x[0], EpsilonExp{e}, m, Seed{rng.next()}),
                                compress(x[1], EpsilonExp{e}, mB, Seed{rng.next()})};
            std::vector<std::uint64_t> kappa{y[0].fields().k, y[1].fields().k};
            Seed ts{rng.next()};
            TreeDecoder dec(build_tree(2, slice_bounds(kappa, 0.125), 0.125, ts), code_inverses(y));
            for (const auto& z : all) dec.feed(z);
            auto fast = line_point_decode_fast(D, y[0], y[1], ts, false);
            ASSERT_EQ(fast.answer, dec.answer()) << "w=" << w << " rep=" << rep;
            ASSERT_LE(fast.nodes_simulated, dec.tree().children()[0]);
        }
    }
}

TEST(LinePointFast, GateFollowsConstraints) {
    LinePointDecompressor D(4);
    const unsigned e = 3;
    auto m = line_point_target(4, e);
    auto x = D.tuple(3, 5, 7);
    Code yA = compress(x[0], EpsilonExp{e}, m, Seed{1}), yB = compress(x[1], EpsilonExp{e}, m, Seed{2});
    EXPECT_TRUE(line_point_decode_fast(D, yA, yB, Seed{3}).gate_passed);
    // Largest line code whose budget kappa - log(l/eps) stays below w.
    std::size_t ms = min_length_for(e, 8, 0);
    while (choose_k(e, 8, ms + 1) && *choose_k(e, 8, ms + 1) < 8) ++ms;
    ASSERT_LT(*choose_k(e, 8, ms), 8U);
    Code small = compress(x[0], EpsilonExp{e}, ms, Seed{1});
    auto r = line_point_decode_fast(D, small, yB, Seed{3});
    EXPECT_FALSE(r.gate_passed);
    EXPECT_FALSE(r.answer);
}

TEST(LinePoint, TargetLeavesDecoderBudget) {
    for (unsigned w : {4U, 6U, 8U}) {
        for (unsigned e : {2U, 3U, 4U}) {
            auto m = line_point_target(w, e);
            auto c = static_cast<std::int64_t>(log_ell_over_eps(2, EpsilonExp{e}.value()));
            ASSERT_GE(static_cast<std::int64_t>(*choose_k(e, 2 * w, m)) - c, 3 * w / 2 + 1);
            auto prev = choose_k(e, 2 * w, m - 1);
            ASSERT_TRUE(!prev || static_cast<std::int64_t>(*prev) - c < 3 * w / 2 + 1);
        }
    }
    EXPECT_EQ(log_ell_over_eps(2, 0.125), 4U);
    EXPECT_EQ(log_ell_over_eps(3, 0.125), 5U);
    EXPECT_EQ(log_ell_over_eps(1, 1), 0U);
}

TEST(LinePoint, ProbabilisticSuccessBound) {
    LinePointDecompressor D(6);
    const unsigned e = 3;
    auto m = line_point_target(6, e);
    const int trials = 300;
    int ok = 0, met = 0;
    for (int t = 0; t < trials; ++t) {
        auto tr = line_point_trial(D, e, m, m, Seed{static_cast<std::uint64_t>(t)}, probabilistic(0));
        ok += tr.success;
        met += tr.constraints_met;
    }
    EXPECT_EQ(met, trials);
    double bound = 1 - (std::exp(1.0) + 2) * 0.125;
    double sigma = std::sqrt(bound * (1 - bound) / trials);
    EXPECT_GE(double(ok) / trials, bound - 2 * sigma);
}

TEST(Plurality, TieBreakAndNotFound) {
    auto a = std::optional<Tuple>(pair(1, 1)), b = std::optional<Tuple>(pair(2, 2));
    std::optional<Tuple> none;
    EXPECT_EQ(plurality({a, b, b}), b);
    EXPECT_EQ(plurality({a, b}), a);
    EXPECT_EQ(plurality({b, a, a, b}), b);
    EXPECT_EQ(plurality({none, none, a}), none);
    EXPECT_EQ(plurality({none, a, a}), a);
    EXPECT_EQ(plurality({}), none);
}

TEST(DecodeMulti, MajorityOnRandomInstance) {
    auto inst = random_sw_instance(3, 4, 24, 2, EpsilonExp{5}, Seed{11});
    MultiDecodeOptions opt;
    opt.trials = 5;
    int ok = 0, total = 0;
    for (std::size_t i = 0; i < inst.tuples.size(); ++i) {
        const auto& x = inst.tuples[i];
        ASSERT_TRUE(sw_check(inst.D, x, sw_budget(inst, x)));
        opt.seed = Seed{100 + i};
        for (std::uint64_t s = 0; s < 4; ++s) {
            ok += simulate_sw(inst, x, Seed{1000 * i + s}, opt) == std::optional<Tuple>(x);
            ++total;
        }
    }
    double bound = 1 - 8 * 3 / 32.0;
    EXPECT_GE(double(ok) / total, bound);
}

TEST(DecodeMulti, SingleSenderDecodes) {
    auto inst = random_sw_instance(1, 6, 20, 2, EpsilonExp{3}, Seed{12});
    int ok = 0;
    for (std::size_t i = 0; i < inst.tuples.size(); ++i)
        ok += simulate_sw(inst, inst.tuples[i], Seed{i}, probabilistic(i)) == std::optional<Tuple>(inst.tuples[i]);
    EXPECT_GE(ok, 12);
}

TEST(TwoSource, PartitionProperty) {
    SplitMix64 rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        std::uint64_t K1 = 1 + rng.below(4), K2 = 1 + rng.below(4);
        std::vector<Pair> S;
        std::map<std::uint64_t, std::uint64_t> rows, cols;
        std::set<Pair> seen;
        for (int tries = 0; tries < 200 && S.size() < K1 * K2; ++tries) {
            Pair p{rng.below(8), rng.below(8)};
            if (seen.count(p) || rows[p.first] >= K2 || cols[p.second] >= K1) continue;
            seen.insert(p);
            ++rows[p.first];
            ++cols[p.second];
            S.push_back(p);
        }
        auto parts = two_source_partition(S, K2);
        ASSERT_EQ(parts.size(), K2);
        std::size_t total = 0;
        for (const auto& R : parts) {
            ASSERT_LE(R.size(), K1);
            std::set<std::uint64_t> left;
            for (const auto& p : R) ASSERT_TRUE(left.insert(p.first).second);
            total += R.size();
        }
        ASSERT_EQ(total, S.size());
    }
}

TEST(TwoSource, SingletonAndPreconditions) {
    auto id = CondenserTable::identity(3);
    auto g = first_match_inverse(id);
    EXPECT_EQ(two_source_invert(g, g, {{3, 5}}, 1, 1, 3, 5), std::optional<Pair>(Pair{3, 5}));
    EXPECT_EQ(two_source_invert(g, g, {{3, 5}}, 1, 1, 4, 5), std::nullopt);
    EXPECT_THROW(two_source_invert(g, g, {{1, 1}, {1, 2}}, 2, 1, 1, 1), DomainError);
    EXPECT_THROW(two_source_invert(g, g, {{1, 1}, {2, 1}}, 1, 2, 1, 1), DomainError);
    EXPECT_THROW(two_source_invert(g, g, {{1, 1}, {2, 2}, {3, 3}}, 1, 2, 1, 1), DomainError);
}

TEST(TwoSource, FailureWithinThreeEpsExhaustive) {
    SplitMix64 rng(14);
    const std::uint64_t K1 = 2, K2 = 2;
    double worst = 0;
    for (int rep = 0; rep < 30; ++rep) {
        auto table = [&] {
            CondenserTable F{3, 4, 48, {}};
            for (std::uint64_t i = 0; i < 8 * 4; ++i) F.table.push_back(static_cast<std::uint32_t>(rng.below(48)));
            return F;
        };
        auto F1 = table(), F2 = table();
        double e1 = first_match_error(F1, K1), e2 = first_match_error(F2, K2);
        std::vector<Pair> S;
        std::map<std::uint64_t, std::uint64_t> rows, cols;
        while (S.size() < K1 * K2) {
            Pair p{rng.below(8), rng.below(8)};
            if (std::find(S.begin(), S.end(), p) != S.end() || rows[p.first] >= K2 || cols[p.second] >= K1) continue;
            ++rows[p.first];
            ++cols[p.second];
            S.push_back(p);
        }
        double fail = two_source_failure(F1, F2, S, K1, K2);
        ASSERT_LE(fail, 2 * e1 + e2 + 1e-12);
        ASSERT_LE(fail, 3 * std::max(e1, e2) + 1e-12);
        worst = std::max(worst, fail);
    }
    EXPECT_GT(worst, 0);
}

TEST(TwoSource, FirstMatchErrorExamples) {
    EXPECT_EQ(first_match_error(CondenserTable::identity(3), 8), 0);
    EXPECT_EQ(first_match_error(CondenserTable::constant(3, 1, 2), 2), 1);
    EXPECT_EQ(first_match_error(CondenserTable::constant(3, 1, 2), 1), 0);
}

TEST(Instance, RoundTripAndErrors) {
    auto inst = random_sw_instance(2, 4, 10, 2, EpsilonExp{3}, Seed{15});
    std::stringstream ss;
    write_instance(ss, inst);
    auto back = read_instance(ss);
    EXPECT_EQ(back.ell, inst.ell);
    EXPECT_EQ(back.eps.e, inst.eps.e);
    EXPECT_EQ(back.targets, inst.targets);
    EXPECT_EQ(back.tuples, inst.tuples);
    EXPECT_EQ(back.D.size(), inst.D.size());
    for (const auto& x : inst.tuples)
        for (CoordSet J = 1; J <= 3; ++J) ASSERT_EQ(set_complexity(back.D, x, J), set_complexity(inst.D, x, J));
    std::stringstream bad1("SW2 1 3\n10\n");
    EXPECT_THROW(read_instance(bad1), FormatError);
    std::stringstream bad2("SW1 2 3\n10\n4:a\n");
    EXPECT_THROW(read_instance(bad2), FormatError);
    std::stringstream dup("SW1 1 3\n10\n4:a\n4:a\n");
    EXPECT_THROW(read_instance(dup), FormatError);
}

TEST(Instance, RandomInstanceInvariants) {
    for (std::size_t ell : {1U, 2U, 3U}) {
        auto inst = random_sw_instance(ell, 4, 16, 3, EpsilonExp{4}, Seed{16 + ell});
        inst.validate();
        EXPECT_EQ(inst.tuples.size(), 16U);
        for (const auto& x : inst.tuples) {
            auto k = sw_budget(inst, x);
            ASSERT_TRUE(sw_check(inst.D, x, k));
        }
    }
    EXPECT_THROW(random_sw_instance(1, 2, 5, 0, EpsilonExp{2}, Seed{1}), DomainError);
    SwInstance tiny = random_sw_instance(1, 4, 4, 0, EpsilonExp{2}, Seed{1});
    tiny.targets = {3};
    EXPECT_THROW(sw_budget(tiny, tiny.tuples[0]), CapacityExceeded);
}
