#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tlc/bitcore.hpp"

namespace tlc {

inline constexpr double kProbTolerance = 1e-9;

struct Distribution {
    std::vector<double> probs;  // outcome i has probability probs[i]; zero entries count toward the domain

    static Distribution uniform(std::size_t n);
    static Distribution from_counts(const std::vector<std::uint64_t>& counts);
    void validate() const;  // DomainError unless probs >= 0 and sum within 1e-9 of 1
};

// sum_y max{0, P(y) - gamma}
double excess(const Distribution& P, double gamma);
double statistical_distance(const Distribution& P, const Distribution& Q);

// Finite two-argument function f: [2^n] x [D] -> [Y], stored x-major.
struct CondenserTable {
    unsigned n = 0;
    std::uint32_t D = 1;
    std::uint64_t Y = 1;
    std::vector<std::uint32_t> table;

    std::uint64_t domain() const { return std::uint64_t{1} << n; }
    std::uint32_t operator()(std::uint64_t x, std::uint32_t d) const { return table[x * D + d]; }

    static CondenserTable identity(unsigned n);
    static CondenserTable constant(unsigned n, std::uint32_t D, std::uint64_t Y, std::uint32_t value = 0);
    void validate() const;
};

// Distribution of f(U_S, U_D).
Distribution output_distribution(const CondenserTable& f, const std::vector<std::uint64_t>& S);

enum class CertMode { Exact, Sampled };

struct CondenserCert {
    std::uint64_t K = 0;
    std::uint64_t Kp = 0;  // for conductor certificates: the K' attaining worst_excess
    double eps = 0;
    bool verified = false;
    double worst_excess = 0;
    std::optional<std::vector<std::uint64_t>> worst_set;  // present when not verified
    CertMode mode = CertMode::Exact;
    std::uint64_t sets_checked = 0;
};

struct VerifyOptions {
    enum class Mode { Auto, Exhaustive, Sampled };
    Mode mode = Mode::Auto;
    std::uint64_t trials = 2000;  // sampled sets per K'
    std::uint64_t seed = 1;
    double exhaustive_limit = 2e7;  // max number of sets enumerated per K'
};

double binomial(std::uint64_t n, std::uint64_t k);
// Exhaustive enumeration is admitted when (2^n <= 24 or K <= 3) and C(2^n, K) <= limit.
bool exhaustive_admissible(unsigned n, std::uint64_t K, double limit);

CondenserCert verify_condenser(const CondenserTable& f, std::uint64_t K, std::uint64_t Kp, double eps,
                               const VerifyOptions& opt = {});
// (K, eps)-conductor: a (K', K', eps)-condenser for every K' <= K.
CondenserCert verify_conductor(const CondenserTable& f, std::uint64_t K, double eps, const VerifyOptions& opt = {});

// ---------------------------------------------------------------------------
// Random conductor [2^n] -> [4 Kmax] with D = ceil(3n/eps) seeds and two degenerate
// branches: identity when 4 Kmax > 2^n, and a uniform output on a fixed range
// when Kmax <= 1/eps. Table values are modelled by a keyed hash so the function
// can be evaluated lazily for any n.
class Conductor {
public:
    enum class Kind { Identity, UniformRange, Random };

    Conductor(std::uint64_t n, std::uint64_t Kmax, double eps, std::uint64_t seed);

    Kind kind() const { return kind_; }
    std::uint64_t n() const { return n_; }
    std::uint64_t Kmax() const { return Kmax_; }
    double eps() const { return eps_; }
    std::uint64_t D() const { return D_; }
    std::uint64_t Y() const { return Y_; }  // 0 for identity with n >= 64
    std::uint64_t seed() const { return seed_; }
    // Output symbol width in bits (n for identity, log2(4 Kmax) otherwise).
    std::uint64_t body_bits() const;

    std::uint64_t eval(const BitString& x, std::uint64_t d) const;
    std::uint64_t eval_u64(std::uint64_t x, std::uint64_t d) const;
    // All D outputs of x.
    void images(const BitString& x, std::vector<std::uint64_t>& out) const;
    void images_u64(std::uint64_t x, std::vector<std::uint64_t>& out) const;
    CondenserTable to_table() const;

private:
    std::uint64_t keyed(std::uint64_t xhash, std::uint64_t d) const;

    Kind kind_;
    std::uint64_t n_, Kmax_;
    double eps_;
    std::uint64_t D_ = 1, Y_ = 0, range_ = 0, seed_;
};

std::uint64_t conductor_degree(std::uint64_t n, double eps);  // ceil(3n/eps)

// Materialized random conductor; at exhaustively verifiable scale it is verified as a
// (Kmax, eps)-conductor and regenerated from a derived seed until verification passes.
CondenserTable random_condenser(unsigned n, std::uint64_t Kmax, double eps, Seed seed);

// Smallest-degree table (D <= 8, Y <= 16, 2^n <= 16) passing verify_conductor(2^k, eps).
// Y defaults to min(16, 4 * 2^k). nullopt signals NotFound.
std::optional<CondenserTable> search_conductor(unsigned n, unsigned k, double eps,
                                               std::optional<std::uint64_t> Y = std::nullopt,
                                               std::uint64_t restarts = 400, std::uint64_t seed = 7);

// x -> (S(x), T(x)) on seed pairs; requires #Y_T >= Kprime.
CondenserTable compose_condensers(const CondenserTable& S, const CondenserTable& T, std::uint64_t Kprime);

// Output bit sizes of the iterated composition reaching k output bits from a 2-bit base.
std::vector<std::uint64_t> composition_schedule(std::uint64_t k);

// (1/K)-excess <= eps; the distribution's domain must have at least K outcomes.
bool minentropy_close_check(const Distribution& P, std::uint64_t K, double eps);
// Trim every probability to 1/K and redistribute the removed mass below the cap.
Distribution trim_to_source(const Distribution& P, std::uint64_t K);
double min_entropy(const Distribution& P);

// "CND1 n D Y" followed by D * 2^n integers, x-major.
void write_table(std::ostream& os, const CondenserTable& f);
CondenserTable read_table(std::istream& is);

}  // namespace tlc
