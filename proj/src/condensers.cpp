#include "tlc/condensers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "tlc/errors.hpp"

namespace tlc {

Distribution Distribution::uniform(std::size_t n) {
    if (n == 0) throw DomainError("Distribution::uniform: empty domain");
    return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Distribution Distribution::from_counts(const std::vector<std::uint64_t>& counts) {
    double total = 0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total <= 0) throw DomainError("Distribution::from_counts: zero total");
    Distribution P;
    P.probs.reserve(counts.size());
    for (auto c : counts) P.probs.push_back(static_cast<double>(c) / total);
    return P;
}

void Distribution::validate() const {
    double s = 0;
    for (double p : probs) {
        if (!(p >= 0)) throw DomainError("Distribution: negative or NaN probability");
        s += p;
    }
    if (std::abs(s - 1.0) > kProbTolerance) throw DomainError("Distribution: probabilities do not sum to 1");
}

double excess(const Distribution& P, double gamma) {
    if (!(gamma >= 0 && gamma <= 1)) throw DomainError("excess: gamma must be in [0, 1]");
    P.validate();
    double e = 0;
    for (double p : P.probs) e += std::max(0.0, p - gamma);
    return e;
}

double statistical_distance(const Distribution& P, const Distribution& Q) {
    std::size_t n = std::max(P.probs.size(), Q.probs.size());
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = i < P.probs.size() ? P.probs[i] : 0.0;
        double q = i < Q.probs.size() ? Q.probs[i] : 0.0;
        s += std::abs(p - q);
    }
    return s / 2;
}

double min_entropy(const Distribution& P) {
    double m = 0;
    for (double p : P.probs) m = std::max(m, p);
    if (m <= 0) throw DomainError("min_entropy: empty distribution");
    return -std::log2(m);
}

// ---------------------------------------------------------------------------

CondenserTable CondenserTable::identity(unsigned n) {
    if (n > 31) throw ScaleError("CondenserTable::identity: n > 31");
    CondenserTable f{n, 1, std::uint64_t{1} << n, {}};
    f.table.resize(f.domain());
    std::iota(f.table.begin(), f.table.end(), 0U);
    return f;
}

CondenserTable CondenserTable::constant(unsigned n, std::uint32_t D, std::uint64_t Y, std::uint32_t value) {
    if (value >= Y) throw DomainError("CondenserTable::constant: value >= Y");
    CondenserTable f{n, D, Y, {}};
    f.table.assign(f.domain() * D, value);
    return f;
}

void CondenserTable::validate() const {
    if (n > 31) throw ScaleError("CondenserTable: n > 31");
    if (D == 0 || Y == 0) throw DomainError("CondenserTable: D and Y must be positive");
    if (table.size() != domain() * D) throw DimensionError("CondenserTable: table size != 2^n * D");
    for (auto v : table) {
        if (v >= Y) throw DomainError("CondenserTable: value outside [Y]");
    }
}

Distribution output_distribution(const CondenserTable& f, const std::vector<std::uint64_t>& S) {
    if (S.empty()) throw DomainError("output_distribution: empty set");
    std::vector<std::uint64_t> counts(f.Y, 0);
    for (auto x : S) {
        if (x >= f.domain()) throw DomainError("output_distribution: element outside [2^n]");
        for (std::uint32_t d = 0; d < f.D; ++d) ++counts[f(x, d)];
    }
    return Distribution::from_counts(counts);
}

double binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    double r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

bool exhaustive_admissible(unsigned n, std::uint64_t K, double limit) {
    if (n > 31) return false;
    std::uint64_t N = std::uint64_t{1} << n;
    return (N <= 24 || K <= 3) && binomial(N, K) <= limit;
}

namespace {

// Counts-based excess of f(U_S) at gamma = 1/Kp, with a reusable scratch buffer.
class ExcessEvaluator {
public:
    explicit ExcessEvaluator(const CondenserTable& f) : f_(f), counts_(f.Y, 0) {}

    double operator()(const std::uint64_t* S, std::size_t K, std::uint64_t Kp) {
        touched_.clear();
        for (std::size_t i = 0; i < K; ++i) {
            for (std::uint32_t d = 0; d < f_.D; ++d) {
                auto y = f_(S[i], d);
                if (counts_[y]++ == 0) touched_.push_back(y);
            }
        }
        double total = static_cast<double>(K) * f_.D;
        double gamma = 1.0 / static_cast<double>(Kp);
        double e = 0;
        for (auto y : touched_) {
            e += std::max(0.0, counts_[y] / total - gamma);
            counts_[y] = 0;
        }
        return e;
    }

private:
    const CondenserTable& f_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> touched_;
};

void record(CondenserCert& cert, double e, const std::uint64_t* S, std::size_t K, std::uint64_t Kp) {
    ++cert.sets_checked;
    if (cert.sets_checked == 1 || e > cert.worst_excess) {
        cert.worst_excess = e;
        cert.worst_set = std::vector<std::uint64_t>(S, S + K);
        cert.Kp = Kp;
    }
}

}  // namespace

CondenserCert verify_condenser(const CondenserTable& f, std::uint64_t K, std::uint64_t Kp, double eps,
                               const VerifyOptions& opt) {
    if (K == 0 || Kp == 0) throw DomainError("verify_condenser: K, K' >= 1 required");
    if (f.n > 31) throw ScaleError("verify_condenser: n > 31");
    std::uint64_t N = f.domain();
    if (K > N) throw DomainError("verify_condenser: K exceeds the domain");

    bool admissible = exhaustive_admissible(f.n, K, opt.exhaustive_limit);
    bool exhaustive = opt.mode == VerifyOptions::Mode::Exhaustive ||
                      (opt.mode == VerifyOptions::Mode::Auto && admissible);
    if (opt.mode == VerifyOptions::Mode::Exhaustive && !admissible)
        throw ScaleError("verify_condenser: exhaustive enumeration beyond the admissible scale");

    CondenserCert cert;
    cert.K = K;
    cert.Kp = Kp;
    cert.eps = eps;
    cert.mode = exhaustive ? CertMode::Exact : CertMode::Sampled;
    ExcessEvaluator ev(f);
    std::vector<std::uint64_t> S(K);

    if (exhaustive) {
        std::iota(S.begin(), S.end(), std::uint64_t{0});
        for (;;) {
            record(cert, ev(S.data(), K, Kp), S.data(), K, Kp);
            std::size_t i = K;
            while (i > 0 && S[i - 1] == N - K + (i - 1)) --i;
            if (i == 0) break;
            ++S[i - 1];
            for (std::size_t j = i; j < K; ++j) S[j] = S[j - 1] + 1;
        }
    } else {
        if (N > (std::uint64_t{1} << 26)) throw ScaleError("verify_condenser: sampled domain too large");
        SplitMix64 rng(derive_seed(opt.seed, K * 1000003ULL + Kp));
        std::vector<std::uint64_t> perm(N);
        std::iota(perm.begin(), perm.end(), std::uint64_t{0});
        for (std::uint64_t t = 0; t < opt.trials; ++t) {
            for (std::uint64_t i = 0; i < K; ++i) std::swap(perm[i], perm[i + rng.below(N - i)]);
            std::copy(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(K), S.begin());
            std::sort(S.begin(), S.end());
            record(cert, ev(S.data(), K, Kp), S.data(), K, Kp);
        }
    }
    cert.verified = cert.worst_excess <= eps + kProbTolerance;
    if (cert.verified) cert.worst_set.reset();
    return cert;
}

CondenserCert verify_conductor(const CondenserTable& f, std::uint64_t K, double eps, const VerifyOptions& opt) {
    if (K == 0) throw DomainError("verify_conductor: K >= 1 required");
    CondenserCert out;
    out.K = K;
    out.eps = eps;
    out.verified = true;
    bool first = true;
    for (std::uint64_t Kp = 1; Kp <= K; ++Kp) {
        auto c = verify_condenser(f, Kp, Kp, eps, opt);
        out.sets_checked += c.sets_checked;
        if (c.mode == CertMode::Sampled) out.mode = CertMode::Sampled;
        if (first || c.worst_excess > out.worst_excess) {
            out.worst_excess = c.worst_excess;
            out.Kp = Kp;
            out.worst_set = c.worst_set;
            first = false;
        }
        if (!c.verified) out.verified = false;
    }
    if (out.verified) out.worst_set.reset();
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t conductor_degree(std::uint64_t n, double eps) {
    if (!(eps > 0 && eps <= 1)) throw DomainError("conductor_degree: eps must be in (0, 1]");
    return static_cast<std::uint64_t>(std::ceil(3.0 * static_cast<double>(n) / eps - 1e-9));
}

Conductor::Conductor(std::uint64_t n, std::uint64_t Kmax, double eps, std::uint64_t seed)
    : n_(n), Kmax_(Kmax), eps_(eps), seed_(seed) {
    if (!(eps > 0 && eps <= 1)) throw DomainError("Conductor: eps must be in (0, 1]");
    if (Kmax == 0 || !std::has_single_bit(Kmax)) throw DomainError("Conductor: Kmax must be a power of two");
    if (Kmax > (std::uint64_t{1} << 61)) throw ScaleError("Conductor: Kmax beyond 2^61");
    std::uint64_t k = static_cast<std::uint64_t>(std::countr_zero(Kmax));
    if (k + 2 > n) {
        kind_ = Kind::Identity;
        D_ = 1;
        Y_ = n < 64 ? (std::uint64_t{1} << n) : 0;
        return;
    }
    Y_ = 4 * Kmax;
    if (static_cast<double>(Kmax) <= 1.0 / eps) {
        kind_ = Kind::UniformRange;
        auto lg = static_cast<unsigned>(std::ceil(std::log2(1.0 / eps) - 1e-12));
        range_ = std::min<std::uint64_t>(Y_, std::uint64_t{1} << lg);
        D_ = range_;
        return;
    }
    kind_ = Kind::Random;
    D_ = conductor_degree(n, eps);
}

std::uint64_t Conductor::body_bits() const {
    if (kind_ == Kind::Identity) return n_;
    return static_cast<std::uint64_t>(std::countr_zero(Y_));
}

std::uint64_t Conductor::keyed(std::uint64_t xhash, std::uint64_t d) const {
    std::uint64_t h = mix64(xhash ^ mix64(d + 0x2545f4914f6cdd1dULL));
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(h) * Y_) >> 64);
}

namespace {

std::uint64_t seeded_hash(std::uint64_t seed, std::uint64_t bitstring_hash) {
    return hash_combine(mix64(seed ^ 0x6a09e667f3bcc909ULL), bitstring_hash);
}

}  // namespace

std::uint64_t Conductor::eval(const BitString& x, std::uint64_t d) const {
    if (x.size() != n_) throw DimensionError("Conductor::eval: |x| != n");
    if (d >= D_) throw DomainError("Conductor::eval: seed outside [D]");
    switch (kind_) {
        case Kind::Identity:
            if (n_ > 64) throw ScaleError("Conductor::eval: identity output wider than 64 bits");
            return x.to_uint();
        case Kind::UniformRange:
            return d;
        case Kind::Random:
            break;
    }
    return keyed(seeded_hash(seed_, x.hash()), d);
}

std::uint64_t Conductor::eval_u64(std::uint64_t x, std::uint64_t d) const {
    if (n_ > 64) throw ScaleError("Conductor::eval_u64: n > 64");
    if (d >= D_) throw DomainError("Conductor::eval_u64: seed outside [D]");
    switch (kind_) {
        case Kind::Identity:
            return x;
        case Kind::UniformRange:
            return d;
        case Kind::Random:
            break;
    }
    return keyed(seeded_hash(seed_, uint_bits_hash(x, n_)), d);
}

void Conductor::images(const BitString& x, std::vector<std::uint64_t>& out) const {
    if (x.size() != n_) throw DimensionError("Conductor::images: |x| != n");
    out.resize(D_);
    if (kind_ == Kind::Identity) {
        if (n_ > 64) throw ScaleError("Conductor::images: identity output wider than 64 bits");
        out[0] = x.to_uint();
        return;
    }
    if (kind_ == Kind::UniformRange) {
        std::iota(out.begin(), out.end(), std::uint64_t{0});
        return;
    }
    std::uint64_t xh = seeded_hash(seed_, x.hash());
    for (std::uint64_t d = 0; d < D_; ++d) out[d] = keyed(xh, d);
}

void Conductor::images_u64(std::uint64_t x, std::vector<std::uint64_t>& out) const {
    if (n_ > 64) throw ScaleError("Conductor::images_u64: n > 64");
    out.resize(D_);
    if (kind_ == Kind::Identity) {
        out[0] = x;
        return;
    }
    if (kind_ == Kind::UniformRange) {
        std::iota(out.begin(), out.end(), std::uint64_t{0});
        return;
    }
    std::uint64_t xh = seeded_hash(seed_, uint_bits_hash(x, n_));
    for (std::uint64_t d = 0; d < D_; ++d) out[d] = keyed(xh, d);
}

CondenserTable Conductor::to_table() const {
    if (n_ > 24) throw ScaleError("Conductor::to_table: n > 24");
    if (D_ > (std::uint64_t{1} << 20) || Y_ > (std::uint64_t{1} << 32))
        throw ScaleError("Conductor::to_table: table too large");
    CondenserTable f;
    f.n = static_cast<unsigned>(n_);
    f.D = static_cast<std::uint32_t>(D_);
    f.Y = Y_;
    f.table.resize(f.domain() * f.D);
    std::vector<std::uint64_t> img;
    for (std::uint64_t x = 0; x < f.domain(); ++x) {
        images_u64(x, img);
        for (std::uint32_t d = 0; d < f.D; ++d) f.table[x * f.D + d] = static_cast<std::uint32_t>(img[d]);
    }
    return f;
}

CondenserTable random_condenser(unsigned n, std::uint64_t Kmax, double eps, Seed seed) {
    bool verifiable = true;
    for (std::uint64_t K = 1; K <= Kmax && verifiable; ++K) verifiable = exhaustive_admissible(n, K, 2e6);
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        std::uint64_t s = attempt == 0 ? seed.value : derive_seed(seed.value, attempt);
        auto f = Conductor(n, Kmax, eps, s).to_table();
        if (!verifiable) return f;
        if (verify_conductor(f, Kmax, eps).verified) return f;
    }
    throw std::runtime_error("random_condenser: no verified conductor in 64 attempts");
}

std::optional<CondenserTable> search_conductor(unsigned n, unsigned k, double eps, std::optional<std::uint64_t> Y,
                                               std::uint64_t restarts, std::uint64_t seed) {
    if (n > 4) throw ScaleError("search_conductor: 2^n <= 16 required");
    std::uint64_t K = std::uint64_t{1} << k;
    std::uint64_t N = std::uint64_t{1} << n;
    if (K > N) throw DomainError("search_conductor: 2^k exceeds the domain");
    std::uint64_t y = Y.value_or(std::min<std::uint64_t>(16, 4 * K));
    if (y == 0 || y > 16) throw ScaleError("search_conductor: Y must be in [1, 16]");

    auto passes = [&](const CondenserTable& f) { return verify_conductor(f, K, eps).verified; };
    SplitMix64 rng(seed);
    for (std::uint32_t D = 1; D <= 8; ++D) {
        CondenserTable f{n, D, y, std::vector<std::uint32_t>(N * D)};
        for (std::uint64_t step = 0; step < y; ++step) {
            for (std::uint64_t x = 0; x < N; ++x)
                for (std::uint32_t d = 0; d < D; ++d) f.table[x * D + d] = static_cast<std::uint32_t>((x + d * step) % y);
            if (passes(f)) return f;
            for (std::uint64_t x = 0; x < N; ++x)
                for (std::uint32_t d = 0; d < D; ++d) f.table[x * D + d] = static_cast<std::uint32_t>((x ^ (d * step)) % y);
            if (passes(f)) return f;
        }
        for (std::uint64_t r = 0; r < restarts; ++r) {
            for (auto& v : f.table) v = static_cast<std::uint32_t>(rng.below(y));
            if (passes(f)) return f;
        }
    }
    return std::nullopt;
}

CondenserTable compose_condensers(const CondenserTable& S, const CondenserTable& T, std::uint64_t Kprime) {
    if (S.n != T.n) throw DimensionError("compose_condensers: input lengths differ");
    if (T.Y < Kprime) throw DomainError("compose_condensers: #Y_T < K'");
    std::uint64_t D = std::uint64_t{S.D} * T.D;
    std::uint64_t Y = S.Y * T.Y;
    if (D > 0xffffffffULL || Y > 0xffffffffULL) throw ScaleError("compose_condensers: product too large");
    CondenserTable f{S.n, static_cast<std::uint32_t>(D), Y, std::vector<std::uint32_t>(S.domain() * D)};
    for (std::uint64_t x = 0; x < S.domain(); ++x)
        for (std::uint32_t d1 = 0; d1 < S.D; ++d1)
            for (std::uint32_t d2 = 0; d2 < T.D; ++d2)
                f.table[x * D + d1 * T.D + d2] = static_cast<std::uint32_t>(S(x, d1) * T.Y + T(x, d2));
    return f;
}

std::vector<std::uint64_t> composition_schedule(std::uint64_t k) {
    if (k <= 2) return {k};
    std::vector<std::uint64_t> out{2};
    std::uint64_t t = 2;
    while (t < k) {
        std::uint64_t next = t + (t + 1) / 2;
        if (next >= k) {
            out.push_back(k);
            break;
        }
        if (2 * next < 3 * t) throw BoundViolation("composition_schedule: growth below 3/2");
        out.push_back(next);
        t = next;
    }
    return out;
}

bool minentropy_close_check(const Distribution& P, std::uint64_t K, double eps) {
    if (K == 0) throw DomainError("minentropy_close_check: K >= 1 required");
    if (P.probs.size() < K) throw DomainError("minentropy_close_check: domain smaller than K");
    P.validate();
    return excess(P, 1.0 / static_cast<double>(K)) <= eps + kProbTolerance;
}

Distribution trim_to_source(const Distribution& P, std::uint64_t K) {
    if (K == 0) throw DomainError("trim_to_source: K >= 1 required");
    if (P.probs.size() < K) throw DomainError("trim_to_source: domain smaller than K");
    double cap = 1.0 / static_cast<double>(K);
    Distribution Q = P;
    double removed = 0;
    for (double& p : Q.probs) {
        if (p > cap) {
            removed += p - cap;
            p = cap;
        }
    }
    for (double& p : Q.probs) {
        if (removed <= 0) break;
        double room = cap - p;
        if (room <= 0) continue;
        double add = std::min(room, removed);
        p += add;
        removed -= add;
    }
    return Q;
}

void write_table(std::ostream& os, const CondenserTable& f) {
    os << "CND1 " << f.n << ' ' << f.D << ' ' << f.Y << '\n';
    for (std::uint64_t x = 0; x < f.domain(); ++x) {
        for (std::uint32_t d = 0; d < f.D; ++d) os << (d ? " " : "") << f(x, d);
        os << '\n';
    }
}

CondenserTable read_table(std::istream& is) {
    std::string magic;
    CondenserTable f;
    if (!(is >> magic) || magic != "CND1") throw FormatError("read_table: missing CND1 header");
    if (!(is >> f.n >> f.D >> f.Y)) throw FormatError("read_table: malformed header");
    if (f.n > 24) throw ScaleError("read_table: n > 24");
    f.table.resize(f.domain() * f.D);
    for (auto& v : f.table) {
        if (!(is >> v)) throw FormatError("read_table: truncated table");
    }
    try {
        f.validate();
    } catch (const std::exception& e) {
        throw FormatError(std::string("read_table: ") + e.what());
    }
    return f;
}

}  // namespace tlc
