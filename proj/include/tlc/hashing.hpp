#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tlc/bitcore.hpp"

namespace tlc {

// ---------------------------------------------------------------------------
// Subset-parity fingerprints F_rho(x) = R x over GF(2). The random matrix R is
// the concatenation rho = rho_1 ++ ... ++ rho_m of m segments of |x| bits.
BitString subset_parity_rho(const BitString& rho, const BitString& x, std::size_t m);
// rho expanded from the seed by SplitMix64.
BitString subset_parity(const BitString& x, Seed seed, long m);
BitString expand_rho(Seed seed, std::size_t n, std::size_t m);
// First element of S with the same fingerprint (shared-randomness inverse).
std::optional<std::size_t> subset_parity_invert(const std::vector<BitString>& S, const BitString& fp,
                                                const BitString& rho, std::size_t m);
// m = ceil(log2(K / eps)).
std::size_t subset_parity_length(double K, double eps);

// ---------------------------------------------------------------------------
// Primes.
bool is_prime_u64(std::uint64_t n);  // deterministic Miller-Rabin for 64-bit inputs
std::vector<std::uint64_t> sieve_primes_below(std::uint64_t limit);

// s = ceil(log2(K * n / eps)), at least 1.
unsigned prime_pool_s(double K, std::uint64_t n, double eps);
// Bit size bound s + ceil(log2 s) + 1 of the primes in the pool.
unsigned prime_pool_bits(unsigned s);

// All primes of bit size <= prime_pool_bits(s). Enumerated by a sieve when s <= 20;
// above that the pool is implicit and sampled by rejection with Miller-Rabin.
class PrimePool {
public:
    explicit PrimePool(unsigned s);
    unsigned s() const { return s_; }
    unsigned bits() const { return bits_; }
    bool enumerated() const { return !primes_.empty(); }
    const std::vector<std::uint64_t>& primes() const { return primes_; }  // empty unless enumerated
    // Pool size; exact when enumerated, otherwise a lower bound (2^s, the guaranteed size).
    double size_lower_bound() const;
    std::uint64_t sample(SplitMix64& rng) const;

private:
    unsigned s_;
    unsigned bits_;
    std::vector<std::uint64_t> primes_;
};

// Shared, lazily built pools (sieving is done once per s).
const PrimePool& prime_pool(unsigned s);

std::uint64_t sample_prime(EpsilonExp eps, std::uint64_t K, std::uint64_t n, Seed seed);
std::uint64_t sample_prime(double eps, double K, std::uint64_t n, SplitMix64& rng);

struct PrimeHash {
    std::uint64_t p = 0;
    std::uint64_t residue = 0;
    friend bool operator==(const PrimeHash&, const PrimeHash&) = default;
};

// Integer value of x (MSB-first) modulo p.
std::uint64_t bits_mod(const BitString& x, std::uint64_t p);

PrimeHash prime_hash(const BitString& x, EpsilonExp eps, std::uint64_t K, Seed seed);
PrimeHash prime_hash(const BitString& x, double eps, double K, SplitMix64& rng);
// First element of S (arrival order) congruent to h.residue mod h.p; nullopt = NotFound.
std::optional<std::size_t> prime_hash_invert(const std::vector<BitString>& S, const PrimeHash& h);
// Bit length of the (p, residue) pair written in fixed width: 2 * prime_pool_bits(s).
std::size_t prime_hash_bits(unsigned s);

}  // namespace tlc
