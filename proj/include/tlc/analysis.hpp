#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlc/bitcore.hpp"
#include "tlc/condensers.hpp"
#include "tlc/invertible.hpp"

namespace tlc {

// A lower-bound formula evaluated at concrete parameters. When the formula's hypotheses do not
// hold the report is not applicable and counts as satisfied.
struct BoundReport {
    std::string formula;
    std::string inputs;
    double bound = 0;     // the value the observed quantity must reach
    double observed = 0;
    bool applicable = true;
    bool satisfied = true;
};

// log(n/eps) - log log(n/eps) - 8, defined for 2^{-n/4} <= eps <= 1/4.
std::optional<double> overhead_lb(std::uint64_t n, double eps);
BoundReport overhead_lb_check(std::uint64_t n, double eps, double delta);

// ceil(eps 2^{r+1}) >= (n - r - log(2/eps)) / (delta + 4), for eps <= 1/2. Reported with
// bound = RHS and observed = LHS.
BoundReport randomness_lb_check(double n, double r, double eps, double delta);
// The same inequality in exact integer arithmetic for eps = 2^-e.
bool randomness_lb_holds(std::int64_t n, std::int64_t r, unsigned e, std::int64_t delta);
// Smallest delta >= -3 for which the exact inequality holds.
std::int64_t randomness_lb_min_delta(std::int64_t n, std::int64_t r, unsigned e);

// ceil(2 eps D) >= log(#X/K) / (3 + log(#Y/K)) under #Y >= 2K >= 4D/eps and eps <= 1/2.
BoundReport degree_lb(double X, double D, double Y, double K, double eps);
BoundReport degree_lb_check(const CondenserTable& f, std::uint64_t K, double eps);

// Random bits used by one evaluation of the fingerprint with this layout (seed index and prime).
double fingerprint_random_bits(const FingerprintLayout& layout);

// (mu/nu)^nu, for nu > mu > 0. Not a tail bound on its own: sums of [0,1] variables can exceed it.
double hoeffding(double mu, double nu);
// (mu/nu)^nu e^(nu - mu) >= Pr[Z >= nu] for Z a sum of independent [0,1] variables with mean mu.
double chernoff_tail(double mu, double nu);

// Rounds mu to a distribution with values in multiples of 2^-(d+b) and nu(y) <= (1 + 3 2^-b) mu(y).
// b = 0: values below 1/(2D) are dropped, the rest renormalized and rounded, larger fractional
// parts rounded up first. b > 0: each value is capped at the largest multiple not exceeding
// (1 + 3 2^-b) mu(y), then units are taken back from the outcomes most above mu until the sum is 1.
Distribution sampler_round(const Distribution& mu, unsigned d, unsigned b);
// Outcome for the random integer i in [2^bits]: the largest y in the support of nu with
// sum_{y' < y} nu(y') <= i / 2^bits.
std::uint64_t sampler_draw(const Distribution& nu, unsigned bits, std::uint64_t i);

struct ReducedFunction {
    CondenserTable table;               // values F.Y .. F.Y + K - 1 are the reserved outputs
    std::vector<std::uint64_t> heavy;   // inputs with #P_x > M/K, in index order
    unsigned random_bits = 0;           // ceil(log(M/K)) + 3
    unsigned d = 0;
};
// P_x is the support of F(x, .) minus a largest set of measure <= eps, removed smallest
// probability first with ties broken by the smaller output.
std::vector<std::uint64_t> trimmed_support(const CondenserTable& F, std::uint64_t x, double eps);
// Randomness reduction for F with at most M values; DomainError when eps > 1/4, F.Y > M, or
// F has K or more heavy inputs (then F is not (K, eps)-invertible).
ReducedFunction reduce_randomness(const CondenserTable& F, std::uint64_t K, std::uint64_t M, double eps);
// Pr_i[g'_S(F'(x, i)) != x] maximized over x in S, where g' answers the reserved values with
// their heavy input and otherwise uses the first-match inverse of F.
double reduced_failure(const CondenserTable& F, const ReducedFunction& R, const std::vector<std::uint64_t>& S);
// max over x in S of Pr_d[first element of S whose image set holds F(x, d) != x].
double first_match_failure(const CondenserTable& F, const std::vector<std::uint64_t>& S);

struct BlockingWitness {
    std::uint64_t x = 0;
    std::vector<std::uint64_t> S;  // x is not in S
};
// family[x] is F_x, a subset of [Y]. DomainError unless Y < min(K^2/4, #X - K/2).
BlockingWitness blocking_set(const std::vector<std::vector<std::uint64_t>>& family, std::uint64_t Y, std::uint64_t K);
bool blocking_witness_holds(const std::vector<std::vector<std::uint64_t>>& family, const BlockingWitness& w);

// Empirical rate of a binomial experiment with its standard error and the Wilson interval at z sigmas.
struct Proportion {
    std::uint64_t hits = 0, trials = 0;
    double rate = 0, sigma = 0, lo = 0, hi = 1;
};
Proportion proportion(std::uint64_t hits, std::uint64_t trials, double z = 2);

// Fixed-column table: formula, inputs, bound, observed, verdict.
std::string format_reports(const std::vector<BoundReport>& reports);

}  // namespace tlc
