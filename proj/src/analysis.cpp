#include "tlc/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "tlc/errors.hpp"
#include "tlc/hashing.hpp"

namespace tlc {

namespace {

constexpr double kSlack = 1e-9;

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
    return buf;
}

}  // namespace

std::optional<double> overhead_lb(std::uint64_t n, double eps) {
    if (n == 0 || !(eps > 0)) return std::nullopt;
    if (eps > 0.25 + kSlack || eps < std::exp2(-static_cast<double>(n) / 4) - kSlack) return std::nullopt;
    double t = std::log2(static_cast<double>(n) / eps);
    return t - std::log2(t) - 8;
}

BoundReport overhead_lb_check(std::uint64_t n, double eps, double delta) {
    BoundReport r;
    r.formula = "overhead";
    r.inputs = fmt("n=%g eps=%g", static_cast<double>(n), eps);
    r.observed = delta;
    auto b = overhead_lb(n, eps);
    r.applicable = b.has_value();
    r.bound = b.value_or(0);
    r.satisfied = !r.applicable || delta >= r.bound - kSlack;
    return r;
}

BoundReport randomness_lb_check(double n, double r, double eps, double delta) {
    BoundReport rep;
    rep.formula = "randomness";
    rep.inputs = fmt("n=%g r=%g eps=%g delta=%g", n, r, eps, delta);
    rep.applicable = eps > 0 && eps <= 0.5 + kSlack && delta + 4 > 0;
    rep.observed = std::ceil(eps * std::exp2(r + 1) - kSlack);
    rep.bound = rep.applicable ? (n - r - std::log2(2 / eps)) / (delta + 4) : 0;
    rep.satisfied = !rep.applicable || rep.observed >= rep.bound - kSlack;
    return rep;
}

bool randomness_lb_holds(std::int64_t n, std::int64_t r, unsigned e, std::int64_t delta) {
    if (e == 0) throw DomainError("randomness_lb_holds: eps = 1 is outside eps <= 1/2");
    if (delta + 4 <= 0) throw DomainError("randomness_lb_holds: delta + 4 must be positive");
    if (r < 0 || r > 60) throw DomainError("randomness_lb_holds: r out of range");
    // ceil(2^{r+1-e}) is 1 when e > r + 1.
    std::int64_t lhs = static_cast<std::int64_t>(e) >= r + 1 ? 1 : (std::int64_t{1} << (r + 1 - static_cast<std::int64_t>(e)));
    std::int64_t num = n - r - 1 - static_cast<std::int64_t>(e);
    return lhs * (delta + 4) >= num;
}

std::int64_t randomness_lb_min_delta(std::int64_t n, std::int64_t r, unsigned e) {
    std::int64_t d = -3;
    while (!randomness_lb_holds(n, r, e, d)) ++d;
    return d;
}

BoundReport degree_lb(double X, double D, double Y, double K, double eps) {
    BoundReport r;
    r.formula = "degree";
    r.inputs = fmt("#X=%g D=%g #Y=%g K=%g eps=%g", X, D, Y, K, eps);
    r.applicable = eps > 0 && eps <= 0.5 + kSlack && Y >= 2 * K - kSlack && 2 * K >= 4 * D / eps - kSlack;
    r.observed = std::ceil(2 * eps * D - kSlack);
    r.bound = r.applicable ? std::log2(X / K) / (3 + std::log2(Y / K)) : 0;
    r.satisfied = !r.applicable || r.observed >= r.bound - kSlack;
    return r;
}

BoundReport degree_lb_check(const CondenserTable& f, std::uint64_t K, double eps) {
    return degree_lb(static_cast<double>(f.domain()), f.D, static_cast<double>(f.Y), static_cast<double>(K), eps);
}

double fingerprint_random_bits(const FingerprintLayout& layout) {
    double bits = 0;
    if (layout.kind != Conductor::Kind::Identity) bits += std::ceil(std::log2(static_cast<double>(layout.D)) - kSlack);
    const auto& pool = prime_pool(layout.s);
    double pool_bits = pool.enumerated() ? std::ceil(std::log2(static_cast<double>(pool.primes().size())) - kSlack)
                                         : static_cast<double>(pool.bits());
    return bits + pool_bits;
}

double hoeffding(double mu, double nu) {
    if (!(mu > 0) || !(nu > mu)) throw DomainError("hoeffding: requires nu > mu > 0");
    return std::pow(mu / nu, nu);
}

double chernoff_tail(double mu, double nu) {
    if (!(mu > 0) || !(nu > mu)) throw DomainError("chernoff_tail: requires nu > mu > 0");
    return std::exp(nu * std::log(mu / nu) + nu - mu);
}

// ---------------------------------------------------------------------------

Distribution sampler_round(const Distribution& mu, unsigned d, unsigned b) {
    mu.validate();
    if (d + b > 52) throw ScaleError("sampler_round: d + b > 52");
    std::size_t support = static_cast<std::size_t>(std::count_if(mu.probs.begin(), mu.probs.end(), [](double p) { return p > 0; }));
    const std::uint64_t D = std::uint64_t{1} << d;
    if (support > D) throw DomainError("sampler_round: support larger than 2^d");
    const std::uint64_t units = std::uint64_t{1} << (d + b);
    const std::size_t n = mu.probs.size();
    std::vector<std::uint64_t> nu(n, 0);

    if (b == 0) {
        std::vector<double> kept(n, 0);
        double Z = 0;
        for (std::size_t y = 0; y < n; ++y) {
            if (mu.probs[y] >= 1.0 / (2.0 * static_cast<double>(D)) - kSlack * 1e-3) {
                kept[y] = mu.probs[y];
                Z += kept[y];
            }
        }
        std::vector<double> frac(n, 0);
        std::uint64_t sum = 0;
        for (std::size_t y = 0; y < n; ++y) {
            if (kept[y] == 0) continue;
            double t = kept[y] / Z * static_cast<double>(units);
            double fl = std::floor(t + 1e-9);
            nu[y] = static_cast<std::uint64_t>(fl);
            frac[y] = std::max(0.0, t - fl);
            sum += nu[y];
        }
        std::vector<std::size_t> order;
        for (std::size_t y = 0; y < n; ++y) {
            if (kept[y] > 0) order.push_back(y);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return frac[a] > frac[c]; });
        for (std::size_t i = 0; sum < units; ++i) {
            if (i >= order.size()) throw BoundViolation("sampler_round: rounding cannot reach total mass 1");
            ++nu[order[i]];
            ++sum;
        }
        if (sum != units) throw BoundViolation("sampler_round: rounded mass exceeds 1");
    } else {
        const double amp = 1 + 3 * std::ldexp(1.0, -static_cast<int>(b));
        std::uint64_t sum = 0;
        for (std::size_t y = 0; y < n; ++y) {
            nu[y] = static_cast<std::uint64_t>(std::floor(amp * mu.probs[y] * static_cast<double>(units) + 1e-9));
            sum += nu[y];
        }
        if (sum < units) throw BoundViolation("sampler_round: caps sum below 1");
        while (sum > units) {
            std::size_t best = n;
            double best_gap = 0;
            for (std::size_t y = 0; y < n; ++y) {
                double gap = static_cast<double>(nu[y]) / static_cast<double>(units) - mu.probs[y];
                if (nu[y] > 0 && (best == n || gap > best_gap)) {
                    best = y;
                    best_gap = gap;
                }
            }
            --nu[best];
            --sum;
        }
    }

    Distribution out;
    out.probs.resize(n);
    const double amp = 1 + 3 * std::ldexp(1.0, -static_cast<int>(b));
    for (std::size_t y = 0; y < n; ++y) {
        out.probs[y] = std::ldexp(static_cast<double>(nu[y]), -static_cast<int>(d + b));
        if (out.probs[y] > amp * mu.probs[y] + kSlack) throw BoundViolation("sampler_round: amplification above 1 + 3 2^-b");
    }
    return out;
}

std::uint64_t sampler_draw(const Distribution& nu, unsigned bits, std::uint64_t i) {
    if (bits > 52) throw ScaleError("sampler_draw: bits > 52");
    if (i >> bits) throw DomainError("sampler_draw: i outside [2^bits]");
    double t = std::ldexp(static_cast<double>(i), -static_cast<int>(bits));
    double cum = 0;
    std::optional<std::uint64_t> pick;
    for (std::size_t y = 0; y < nu.probs.size(); ++y) {
        if (nu.probs[y] <= 0) continue;
        if (cum <= t + 1e-12) pick = y;
        cum += nu.probs[y];
    }
    if (!pick) throw DomainError("sampler_draw: empty support");
    return *pick;
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> trimmed_support(const CondenserTable& F, std::uint64_t x, double eps) {
    std::vector<std::uint64_t> count(F.Y, 0);
    for (std::uint32_t d = 0; d < F.D; ++d) ++count[F(x, d)];
    std::vector<std::uint64_t> out;
    for (std::uint64_t y = 0; y < F.Y; ++y) {
        if (count[y]) out.push_back(y);
    }
    std::stable_sort(out.begin(), out.end(), [&](std::uint64_t a, std::uint64_t b) { return count[a] < count[b]; });
    auto budget = static_cast<std::uint64_t>(std::floor(eps * F.D + 1e-9));
    std::size_t removed = 0;
    std::uint64_t mass = 0;
    while (removed < out.size() && mass + count[out[removed]] <= budget) mass += count[out[removed++]];
    std::vector<std::uint64_t> kept(out.begin() + static_cast<std::ptrdiff_t>(removed), out.end());
    std::sort(kept.begin(), kept.end());
    return kept;
}

ReducedFunction reduce_randomness(const CondenserTable& F, std::uint64_t K, std::uint64_t M, double eps) {
    F.validate();
    if (eps > 0.25 + kSlack) throw DomainError("reduce_randomness: eps must be <= 1/4");
    if (K == 0 || F.Y > M || M < K) throw DomainError("reduce_randomness: requires 1 <= K <= M and F.Y <= M");
    ReducedFunction R;
    R.d = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(M) / static_cast<double>(K)) - kSlack));
    R.random_bits = R.d + 3;
    if (R.random_bits > 24) throw ScaleError("reduce_randomness: more than 2^24 seeds");
    const std::uint64_t X = F.domain();
    const auto seeds = std::uint32_t{1} << R.random_bits;
    R.table.n = F.n;
    R.table.D = seeds;
    R.table.Y = F.Y + K;
    R.table.table.assign(X * seeds, 0);
    const double limit = static_cast<double>(M) / static_cast<double>(K);
    for (std::uint64_t x = 0; x < X; ++x) {
        auto P = trimmed_support(F, x, eps);
        if (static_cast<double>(P.size()) > limit + kSlack) {
            if (R.heavy.size() + 1 >= K) throw DomainError("reduce_randomness: K or more heavy inputs");
            R.heavy.push_back(x);
            for (std::uint32_t i = 0; i < seeds; ++i)
                R.table.table[x * seeds + i] = static_cast<std::uint32_t>(F.Y + R.heavy.size() - 1);
            continue;
        }
        std::vector<std::uint64_t> count(F.Y, 0);
        for (std::uint32_t dd = 0; dd < F.D; ++dd) ++count[F(x, dd)];
        Distribution mu;
        mu.probs.assign(F.Y, 0);
        double Z = 0;
        for (auto y : P) Z += static_cast<double>(count[y]);
        for (auto y : P) mu.probs[y] = static_cast<double>(count[y]) / Z;
        Distribution nu = sampler_round(mu, R.d, 3);
        for (std::uint32_t i = 0; i < seeds; ++i)
            R.table.table[x * seeds + i] = static_cast<std::uint32_t>(sampler_draw(nu, R.random_bits, i));
    }
    if (R.heavy.size() >= K) throw DomainError("reduce_randomness: K or more heavy inputs");
    return R;
}

double first_match_failure(const CondenserTable& F, const std::vector<std::uint64_t>& S) {
    double worst = 0;
    for (auto x : S) {
        std::uint32_t miss = 0;
        for (std::uint32_t d = 0; d < F.D; ++d) {
            std::uint32_t y = F(x, d);
            for (auto z : S) {
                bool hit = false;
                for (std::uint32_t e = 0; e < F.D && !hit; ++e) hit = F(z, e) == y;
                if (hit) {
                    miss += z != x;
                    break;
                }
            }
        }
        worst = std::max(worst, static_cast<double>(miss) / F.D);
    }
    return worst;
}

double reduced_failure(const CondenserTable& F, const ReducedFunction& R, const std::vector<std::uint64_t>& S) {
    double worst = 0;
    for (auto x : S) {
        std::uint32_t miss = 0;
        for (std::uint32_t i = 0; i < R.table.D; ++i) {
            std::uint32_t y = R.table(x, i);
            std::optional<std::uint64_t> g;
            if (y >= F.Y) {
                g = R.heavy.at(y - F.Y);
            } else {
                for (auto z : S) {
                    bool hit = false;
                    for (std::uint32_t e = 0; e < F.D && !hit; ++e) hit = F(z, e) == y;
                    if (hit) {
                        g = z;
                        break;
                    }
                }
            }
            miss += g != x;
        }
        worst = std::max(worst, static_cast<double>(miss) / R.table.D);
    }
    return worst;
}

// ---------------------------------------------------------------------------

BlockingWitness blocking_set(const std::vector<std::vector<std::uint64_t>>& family, std::uint64_t Y, std::uint64_t K) {
    const double X = static_cast<double>(family.size());
    const double Kd = static_cast<double>(K);
    if (!(static_cast<double>(Y) < std::min(Kd * Kd / 4, X - Kd / 2)))
        throw DomainError("blocking_set: requires #Y < min(K^2/4, #X - K/2)");
    for (const auto& Fx : family) {
        for (auto y : Fx) {
            if (y >= Y) throw DomainError("blocking_set: element outside [Y]");
        }
    }
    std::vector<std::vector<std::uint64_t>> owners(Y);
    std::vector<std::set<std::uint64_t>> sets(family.size());
    for (std::uint64_t x = 0; x < family.size(); ++x) {
        sets[x] = std::set<std::uint64_t>(family[x].begin(), family[x].end());
        for (auto y : sets[x]) owners[y].push_back(x);
    }
    auto other_owner = [&](std::uint64_t y, std::uint64_t x) -> std::optional<std::uint64_t> {
        for (auto z : owners[y]) {
            if (z != x) return z;
        }
        return std::nullopt;
    };
    std::vector<std::uint64_t> covered;
    for (std::uint64_t x = 0; x < family.size(); ++x) {
        if (std::all_of(sets[x].begin(), sets[x].end(), [&](std::uint64_t y) { return other_owner(y, x).has_value(); }))
            covered.push_back(x);
    }
    auto cover = [&](std::uint64_t x, std::set<std::uint64_t> S, const std::set<std::uint64_t>& skip) {
        for (auto y : sets[x]) {
            if (!skip.count(y)) S.insert(*other_owner(y, x));
        }
        S.erase(x);
        return BlockingWitness{x, std::vector<std::uint64_t>(S.begin(), S.end())};
    };
    for (auto x : covered) {
        if (sets[x].size() < K) return cover(x, {}, {});
    }
    std::set<std::uint64_t> S, Yset;
    for (auto x : covered) {
        std::size_t grow = 0;
        for (auto y : sets[x]) grow += !Yset.count(y);
        if (2 * grow >= K) {
            S.insert(x);
            Yset.insert(sets[x].begin(), sets[x].end());
            continue;
        }
        auto w = cover(x, S, Yset);
        if (w.S.size() >= K) throw BoundViolation("blocking_set: witness with K or more elements");
        return w;
    }
    throw BoundViolation("blocking_set: ran out of covered elements");
}

bool blocking_witness_holds(const std::vector<std::vector<std::uint64_t>>& family, const BlockingWitness& w) {
    std::set<std::uint64_t> uni;
    for (auto z : w.S) {
        if (z == w.x) continue;
        uni.insert(family.at(z).begin(), family.at(z).end());
    }
    return std::all_of(family.at(w.x).begin(), family.at(w.x).end(), [&](std::uint64_t y) { return uni.count(y) > 0; });
}

std::string format_reports(const std::vector<BoundReport>& reports) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-11s %-44s %12s %12s  %s\n", "formula", "inputs", "bound", "observed", "verdict");
    os << line;
    for (const auto& r : reports) {
        const char* verdict = !r.applicable ? "n/a" : (r.satisfied ? "ok" : "VIOLATED");
        std::snprintf(line, sizeof line, "%-11s %-44s %12.4f %12.4f  %s\n", r.formula.c_str(), r.inputs.c_str(), r.bound,
                      r.observed, verdict);
        os << line;
    }
    return os.str();
}

Proportion proportion(std::uint64_t hits, std::uint64_t trials, double z) {
    if (hits > trials) throw DomainError("proportion: hits > trials");
    Proportion p;
    p.hits = hits;
    p.trials = trials;
    if (trials == 0) return p;
    double n = static_cast<double>(trials);
    p.rate = static_cast<double>(hits) / n;
    p.sigma = std::sqrt(p.rate * (1 - p.rate) / n);
    double z2 = z * z;
    double centre = (p.rate + z2 / (2 * n)) / (1 + z2 / n);
    double half = z / (1 + z2 / n) * std::sqrt(p.rate * (1 - p.rate) / n + z2 / (4 * n * n));
    p.lo = std::max(0.0, centre - half);
    p.hi = std::min(1.0, centre + half);
    return p;
}

}  // namespace tlc
