#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tlc/bitcore.hpp"
#include "tlc/invertible.hpp"

namespace tlc {

// Description length; nullopt is Infinite (x is not an output).
using Complexity = std::optional<std::size_t>;

class Decompressor {
public:
    virtual ~Decompressor() = default;
    virtual Complexity complexity(const BitString& x, const std::optional<BitString>& cond = std::nullopt) const = 0;
    // Distinct outputs x with C(x | cond) < k, restricted to |x| = n when given, ordered by their
    // shortest program (length, then lexicographic). Stops early when sink returns false.
    virtual void enumerate(std::size_t k, std::optional<std::size_t> n, const std::optional<BitString>& cond,
                           const std::function<bool(const BitString&)>& sink) const = 0;
};

// Finite table of programs (optionally paired with a condition) to outputs.
class ToyDecompressor : public Decompressor {
public:
    void add(const BitString& program, const BitString& output);
    void add(const BitString& program, const std::optional<BitString>& cond, const BitString& output);
    std::optional<BitString> run(const BitString& program, const std::optional<BitString>& cond = std::nullopt) const;
    std::size_t size() const { return count_; }

    Complexity complexity(const BitString& x, const std::optional<BitString>& cond = std::nullopt) const override;
    void enumerate(std::size_t k, std::optional<std::size_t> n, const std::optional<BitString>& cond,
                   const std::function<bool(const BitString&)>& sink) const override;

    // Lines "P <program> [<condition>] -> <output>", bit strings in "<nbits>:<hex>" form.
    void write(std::ostream& os) const;
    static ToyDecompressor read(std::istream& is);

private:
    using Programs = std::map<BitString, BitString>;  // shortlex program order
    std::map<std::optional<BitString>, Programs> table_;
    std::map<std::optional<BitString>, std::unordered_map<BitString, std::size_t, BitStringHash>> best_;
    std::size_t count_ = 0;
};

std::vector<BitString> enumerate_suspects(const Decompressor& D, std::size_t k, std::optional<std::size_t> n = std::nullopt,
                                          const std::optional<BitString>& cond = std::nullopt);

// Exact-length code: gamma(e) ++ gamma(k+1) ++ fingerprint ++ "1" ++ "0"*.
struct Code {
    BitString bits;
    std::size_t m() const { return bits.size(); }
    CodeFields fields() const { return unpack_code(bits); }
};

// "TLC1 m" line, then ceil(m/8) raw bytes, big-endian bit order, zero padded.
void write_code(std::ostream& os, const Code& code);
Code read_code(std::istream& is);

// The fingerprint inside a code with eps = 2^-e runs at eps/4, so its 3(eps/4) error stays below eps.
double fingerprint_eps(unsigned e);
// Largest k whose packed triple fits in exactly m bits; nullopt when none fits.
std::optional<std::uint64_t> choose_k(unsigned e, std::uint64_t n, std::size_t m);
// Delta = m - k + 1: success is required for C_D(x) <= m - Delta, i.e. C_D(x) < k.
std::size_t overhead_delta(unsigned e, std::uint64_t n, std::size_t m);
// Smallest m with choose_k(e, n, m) >= k.
std::size_t min_length_for(unsigned e, std::uint64_t n, std::uint64_t k);

Code compress(const BitString& x, EpsilonExp eps, std::size_t m, Seed seed);
// Fingerprint carried by a code.
Fingerprint code_fingerprint(const Code& code);

// Monotone online inverse g(S, y) for a fixed y: elements of S arrive one at a time and
// the answer, once set, never changes.
class OnlineInverse {
public:
    virtual ~OnlineInverse() = default;
    virtual void feed(const BitString& x) = 0;
    virtual const std::optional<BitString>& answer() const = 0;
    bool committed() const { return answer().has_value(); }
};

// Online decompressor state for one code: suspects are fed in order and the first match commits.
class DecodeSession : public OnlineInverse {
public:
    explicit DecodeSession(const Code& code, std::optional<bool> dense = std::nullopt);
    DecodeSession(const Fingerprint& fp, std::uint64_t k, std::optional<bool> dense = std::nullopt);
    void feed(const BitString& x) override;
    const std::optional<BitString>& answer() const override { return answer_; }
    std::uint64_t k() const { return k_; }
    std::uint64_t n() const { return fp_.layout.n; }

private:
    std::uint64_t k_;
    Fingerprint fp_;
    FingerprintInverter inv_;
    std::optional<BitString> answer_;
    std::size_t scanned_ = 0;
};

std::optional<BitString> decompress_online(const Decompressor& D, const Code& code,
                                           const std::optional<BitString>& cond = std::nullopt);

// Inverter over {x : C_D(x | cond) < k, |x| = n}, reusable across codes with the same (e, k, n).
FingerprintInverter build_inverter(const Decompressor& D, unsigned e, std::uint64_t k, std::uint64_t n,
                                   const std::optional<BitString>& cond = std::nullopt);
std::optional<BitString> decode_with(const FingerprintInverter& inv, const Code& code);

// Decompressor with uniform randomness over a finite set: outcomes[p][r] is the output on randomness r.
struct ProbabilisticDecompressor {
    std::map<BitString, std::vector<std::optional<BitString>>> outcomes;
};
// D_maj(p) is the value with probability > 1/2, undefined otherwise.
ToyDecompressor majority_decompressor(const ProbabilisticDecompressor& P);

}  // namespace tlc
