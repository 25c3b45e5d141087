#include "tlc/hashing.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "tlc/errors.hpp"

namespace tlc {

BitString subset_parity_rho(const BitString& rho, const BitString& x, std::size_t m) {
    std::size_t n = x.size();
    if (rho.size() != m * n) throw DimensionError("subset_parity: rho must have m*|x| bits");
    std::vector<BitString> rows;
    rows.reserve(m);
    for (std::size_t i = 0; i < m; ++i) rows.push_back(rho.substr(i * n, n));
    return gf2_matvec(rows, x);
}

BitString expand_rho(Seed seed, std::size_t n, std::size_t m) {
    SplitMix64 rng(seed.value);
    return rng.bits(n * m);
}

BitString subset_parity(const BitString& x, Seed seed, long m) {
    if (m < 0) throw DomainError("subset_parity: m < 0");
    auto mm = static_cast<std::size_t>(m);
    return subset_parity_rho(expand_rho(seed, x.size(), mm), x, mm);
}

std::optional<std::size_t> subset_parity_invert(const std::vector<BitString>& S, const BitString& fp,
                                                const BitString& rho, std::size_t m) {
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i].size() * m != rho.size()) continue;
        if (subset_parity_rho(rho, S[i], m) == fp) return i;
    }
    return std::nullopt;
}

std::size_t subset_parity_length(double K, double eps) {
    return static_cast<std::size_t>(std::ceil(std::log2(K / eps) - 1e-12));
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<__uint128_t>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    static const std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto p : small) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (auto a : small) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<std::uint64_t> sieve_primes_below(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit <= 2) return out;
    std::vector<bool> composite(limit, false);
    for (std::uint64_t i = 2; i < limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j < limit; j += i) composite[j] = true;
    }
    return out;
}

unsigned prime_pool_s(double K, std::uint64_t n, double eps) {
    double v = std::log2(K * static_cast<double>(std::max<std::uint64_t>(n, 1)) / eps);
    auto s = static_cast<long>(std::ceil(v - 1e-12));
    return static_cast<unsigned>(std::max<long>(s, 1));
}

unsigned prime_pool_bits(unsigned s) {
    unsigned lg = s <= 1 ? 0 : static_cast<unsigned>(std::bit_width(static_cast<unsigned>(s - 1)));
    return s + lg + 1;
}

PrimePool::PrimePool(unsigned s) : s_(s), bits_(prime_pool_bits(s)) {
    if (s == 0) throw DomainError("PrimePool: s >= 1 required");
    if (bits_ > 62) throw ScaleError("PrimePool: primes beyond 62 bits");
    if (s <= 20) {
        primes_ = sieve_primes_below(std::uint64_t{1} << bits_);
        if (primes_.size() < (std::uint64_t{1} << s)) throw std::logic_error("PrimePool: fewer than 2^s primes");
    }
}

double PrimePool::size_lower_bound() const {
    return enumerated() ? static_cast<double>(primes_.size()) : std::ldexp(1.0, static_cast<int>(s_));
}

std::uint64_t PrimePool::sample(SplitMix64& rng) const {
    if (enumerated()) return primes_[rng.below(primes_.size())];
    std::uint64_t limit = std::uint64_t{1} << bits_;
    for (;;) {
        std::uint64_t c = rng.below(limit);
        if (is_prime_u64(c)) return c;
    }
}

const PrimePool& prime_pool(unsigned s) {
    static std::mutex mu;
    static std::map<unsigned, std::unique_ptr<PrimePool>> pools;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = pools[s];
    if (!slot) slot = std::make_unique<PrimePool>(s);
    return *slot;
}

std::uint64_t sample_prime(double eps, double K, std::uint64_t n, SplitMix64& rng) {
    if (K < 1 || n < 1) throw DomainError("sample_prime: K, n >= 1 required");
    return prime_pool(prime_pool_s(K, n, eps)).sample(rng);
}

std::uint64_t sample_prime(EpsilonExp eps, std::uint64_t K, std::uint64_t n, Seed seed) {
    SplitMix64 rng(seed.value);
    return sample_prime(eps.value(), static_cast<double>(K), n, rng);
}

std::uint64_t bits_mod(const BitString& x, std::uint64_t p) {
    if (p == 0) throw DomainError("bits_mod: p = 0");
    std::uint64_t r = 0;
    const auto& w = x.words();
    std::size_t full = x.size() / 64;
    std::uint64_t base = powmod(2, 64, p);
    for (std::size_t i = 0; i < full; ++i) r = (mulmod(r, base, p) + w[i] % p) % p;
    std::size_t rest = x.size() % 64;
    if (rest) {
        std::uint64_t chunk = w[full] >> (64 - rest);
        r = (mulmod(r, powmod(2, rest, p), p) + chunk % p) % p;
    }
    return r;
}

PrimeHash prime_hash(const BitString& x, double eps, double K, SplitMix64& rng) {
    std::uint64_t p = sample_prime(eps, K, x.size(), rng);
    return {p, bits_mod(x, p)};
}

PrimeHash prime_hash(const BitString& x, EpsilonExp eps, std::uint64_t K, Seed seed) {
    SplitMix64 rng(seed.value);
    return prime_hash(x, eps.value(), static_cast<double>(K), rng);
}

std::optional<std::size_t> prime_hash_invert(const std::vector<BitString>& S, const PrimeHash& h) {
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (bits_mod(S[i], h.p) == h.residue) return i;
    }
    return std::nullopt;
}

std::size_t prime_hash_bits(unsigned s) { return 2 * static_cast<std::size_t>(prime_pool_bits(s)); }

}  // namespace tlc
