#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tlc {

// Arbitrary-length bit sequence. Bit 0 is the first (most significant) bit;
// storage is packed MSB-first into 64-bit words with zeroed tail bits.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n, bool value = false);

    static BitString from_string(std::string_view bits);             // "0110"
    static BitString from_uint(std::uint64_t v, std::size_t width);  // MSB-first, width <= 64
    // "<nbits>:<hex>" with hex digits carrying the bits MSB-first, zero-padded at the end.
    static BitString from_hex(std::string_view text);

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }
    bool get(std::size_t i) const { return (words_[i >> 6] >> (63 - (i & 63))) & 1U; }
    bool operator[](std::size_t i) const { return get(i); }
    void set(std::size_t i, bool b);
    void push_back(bool b);
    void append(const BitString& other);
    void append_uint(std::uint64_t v, std::size_t width);
    BitString substr(std::size_t pos, std::size_t len) const;

    // Integer value of the bits read MSB-first; requires size() <= 64.
    std::uint64_t to_uint() const;
    std::string to_string() const;
    std::string to_hex() const;

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::uint64_t hash() const;

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }
    // Shortlex: shorter strings first, then lexicographic.
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

BitString operator+(BitString a, const BitString& b);

// BitString::from_uint(v, width).hash() without building the string.
std::uint64_t uint_bits_hash(std::uint64_t v, std::size_t width);

struct BitStringHash {
    std::size_t operator()(const BitString& b) const { return static_cast<std::size_t>(b.hash()); }
};

// epsilon = 2^-e.
struct EpsilonExp {
    unsigned e = 1;
    double value() const;
};

struct Seed {
    std::uint64_t value = 0;
    unsigned bit_budget = 64;
};

// ---------------------------------------------------------------------------
// Deterministic pseudo-random source: SplitMix64.
//   state <- state + 0x9e3779b97f4a7c15
//   z <- state; z <- (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//   z <- (z ^ (z >> 27)) * 0x94d049bb133111eb; output z ^ (z >> 31)
// mix64 is the output function applied to a single word.
std::uint64_t mix64(std::uint64_t z);
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);
// Per-trial or per-purpose seed: mix64(seed ^ mix64(index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}
    std::uint64_t next();
    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
    // Uniform in [0, n) by rejection; n >= 1.
    std::uint64_t below(std::uint64_t n);
    double uniform01();
    bool bit() { return next() >> 63; }
    BitString bits(std::size_t n);

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Elias gamma code of v >= 1: floor(log2 v) zeros followed by v in binary.
BitString gamma_encode(std::uint64_t v);
std::size_t gamma_length(std::uint64_t v);
// Decodes a gamma code starting at bit `pos`; returns (value, position after code).
std::pair<std::uint64_t, std::size_t> gamma_decode(const BitString& bits, std::size_t pos = 0);

// Exact-length code layout: gamma(e) ++ gamma(k+1) ++ payload ++ "1" ++ "0"*.
// k is shifted by one so that k = 0 is representable.
struct CodeFields {
    unsigned e = 1;
    std::uint64_t k = 0;
    BitString payload;
    friend bool operator==(const CodeFields&, const CodeFields&) = default;
};
std::size_t code_header_bits(unsigned e, std::uint64_t k);
BitString pack_code(unsigned e, std::uint64_t k, const BitString& payload, std::size_t m);
CodeFields unpack_code(const BitString& code);

// ---------------------------------------------------------------------------
// GF(2) matrix-vector product: bit i = <rows[i], x> mod 2.
BitString gf2_matvec(const std::vector<BitString>& rows, const BitString& x);

// GF(2^w) with a fixed irreducible modulus per w (w = 4: x^4+x+1, w = 8: x^8+x^4+x^3+x+1).
class GF2w {
public:
    explicit GF2w(unsigned w);
    unsigned degree() const { return w_; }
    std::uint32_t modulus() const { return mod_; }
    std::uint32_t size() const { return 1U << w_; }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return a ^ b; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
    std::uint32_t inv(std::uint32_t a) const;  // a != 0

    static std::uint32_t default_modulus(unsigned w);

private:
    unsigned w_;
    std::uint32_t mod_;
};

struct FieldElement {
    unsigned w = 0;
    std::uint32_t value = 0;
    friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

// A line y = a*x + b and a point (u, v) on it.
struct LinePoint {
    FieldElement a, b, u, v;
    BitString line_bits() const;   // a ++ b
    BitString point_bits() const;  // u ++ v
};

LinePoint line_point_instance(unsigned w, Seed seed);
LinePoint line_point_from(unsigned w, std::uint32_t a, std::uint32_t b, std::uint32_t u);

}  // namespace tlc

template <>
struct std::hash<tlc::BitString> {
    std::size_t operator()(const tlc::BitString& b) const noexcept { return static_cast<std::size_t>(b.hash()); }
};
