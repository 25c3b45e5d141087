#include "tlc/bitcore.hpp"

#include <bit>
#include <cmath>

#include "tlc/errors.hpp"

namespace tlc {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BitString::BitString(std::size_t n, bool value) : n_(n), words_(word_count(n), value ? ~std::uint64_t{0} : 0) {
    if (value && (n & 63)) words_.back() &= ~std::uint64_t{0} << (64 - (n & 63));
}

BitString BitString::from_string(std::string_view bits) {
    BitString b;
    for (char c : bits) {
        if (c == '0' || c == '1') {
            b.push_back(c == '1');
        } else if (c != ' ') {
            throw FormatError("bitstring: unexpected character");
        }
    }
    return b;
}

BitString BitString::from_uint(std::uint64_t v, std::size_t width) {
    if (width > 64) throw DomainError("from_uint: width > 64");
    if (width < 64 && (v >> width) != 0) throw DomainError("from_uint: value does not fit width");
    BitString b;
    b.append_uint(v, width);
    return b;
}

BitString BitString::from_hex(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) throw FormatError("hex bits: missing ':'");
    std::size_t n = 0;
    for (char c : text.substr(0, colon)) {
        if (c < '0' || c > '9') throw FormatError("hex bits: bad length");
        n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    auto hex = text.substr(colon + 1);
    if (hex.size() != (n + 3) / 4) throw FormatError("hex bits: digit count does not match length");
    BitString b;
    for (std::size_t i = 0; i < hex.size(); ++i) {
        int v = hex_value(hex[i]);
        if (v < 0) throw FormatError("hex bits: bad digit");
        for (int j = 3; j >= 0; --j) {
            std::size_t pos = i * 4 + static_cast<std::size_t>(3 - j);
            bool bit = (v >> j) & 1;
            if (pos < n) {
                b.push_back(bit);
            } else if (bit) {
                throw FormatError("hex bits: nonzero padding");
            }
        }
    }
    return b;
}

void BitString::set(std::size_t i, bool b) {
    std::uint64_t mask = std::uint64_t{1} << (63 - (i & 63));
    if (b) {
        words_[i >> 6] |= mask;
    } else {
        words_[i >> 6] &= ~mask;
    }
}

void BitString::push_back(bool b) {
    if ((n_ & 63) == 0) words_.push_back(0);
    ++n_;
    if (b) set(n_ - 1, true);
}

void BitString::append(const BitString& other) {
    if ((n_ & 63) == 0) {
        words_.insert(words_.end(), other.words_.begin(), other.words_.end());
        n_ += other.n_;
        return;
    }
    for (std::size_t w = 0; w < other.words_.size(); ++w) {
        std::size_t take = std::min<std::size_t>(64, other.n_ - w * 64);
        append_uint(take == 64 ? other.words_[w] : other.words_[w] >> (64 - take), take);
    }
}

void BitString::append_uint(std::uint64_t v, std::size_t width) {
    if (width == 0) return;
    std::size_t off = n_ & 63;
    std::uint64_t aligned = width == 64 ? v : v << (64 - width);
    if (off == 0) {
        words_.push_back(aligned);
    } else {
        words_.back() |= aligned >> off;
        if (off + width > 64) words_.push_back(aligned << (64 - off));
    }
    n_ += width;
}

BitString BitString::substr(std::size_t pos, std::size_t len) const {
    if (pos > n_ || len > n_ - pos) throw std::out_of_range("BitString::substr");
    BitString out;
    out.words_.reserve(word_count(len));
    std::size_t i = 0;
    while (i < len) {
        std::size_t p = pos + i;
        std::size_t off = p & 63;
        std::size_t take = std::min<std::size_t>({64 - off, len - i, 64});
        std::uint64_t chunk = (words_[p >> 6] << off) >> (64 - take);
        out.append_uint(chunk, take);
        i += take;
    }
    return out;
}

std::uint64_t BitString::to_uint() const {
    if (n_ > 64) throw DomainError("to_uint: more than 64 bits");
    if (n_ == 0) return 0;
    return words_[0] >> (64 - n_);
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) s.push_back(get(i) ? '1' : '0');
    return s;
}

std::string BitString::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s = std::to_string(n_) + ":";
    for (std::size_t i = 0; i < n_; i += 4) {
        int v = 0;
        for (std::size_t j = 0; j < 4; ++j) v = (v << 1) | (i + j < n_ && get(i + j) ? 1 : 0);
        s.push_back(digits[v]);
    }
    return s;
}

std::uint64_t BitString::hash() const {
    std::uint64_t h = mix64(n_ + 0x51ed270b2717e0a5ULL);
    for (auto w : words_) h = hash_combine(h, w);
    return h;
}

std::uint64_t uint_bits_hash(std::uint64_t v, std::size_t width) {
    std::uint64_t h = mix64(width + 0x51ed270b2717e0a5ULL);
    if (width > 0) h = hash_combine(h, v << (64 - width));
    return h;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (a.n_ != b.n_) return a.n_ <=> b.n_;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        if (a.words_[i] != b.words_[i]) return a.words_[i] <=> b.words_[i];
    }
    return std::strong_ordering::equal;
}

BitString operator+(BitString a, const BitString& b) {
    a.append(b);
    return a;
}

double EpsilonExp::value() const { return std::ldexp(1.0, -static_cast<int>(e)); }

// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return mix64(seed ^ mix64(index + 1)); }

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
    if (n == 0) throw DomainError("below(0)");
    if ((n & (n - 1)) == 0) return next() & (n - 1);
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        std::uint64_t r = next();
        if (r < limit) return r % n;
    }
}

double SplitMix64::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

BitString SplitMix64::bits(std::size_t n) {
    BitString b;
    while (n >= 64) {
        b.append_uint(next(), 64);
        n -= 64;
    }
    if (n) b.append_uint(next() >> (64 - n), n);
    return b;
}

// ---------------------------------------------------------------------------

std::size_t gamma_length(std::uint64_t v) {
    if (v == 0) throw DomainError("gamma code of 0");
    return 2 * static_cast<std::size_t>(std::bit_width(v)) - 1;
}

BitString gamma_encode(std::uint64_t v) {
    if (v == 0) throw DomainError("gamma code of 0");
    std::size_t w = static_cast<std::size_t>(std::bit_width(v));
    BitString b(w - 1);
    b.append_uint(v, w);
    return b;
}

std::pair<std::uint64_t, std::size_t> gamma_decode(const BitString& bits, std::size_t pos) {
    std::size_t zeros = 0;
    while (pos + zeros < bits.size() && !bits.get(pos + zeros)) ++zeros;
    if (zeros >= 64 || pos + 2 * zeros + 1 > bits.size()) throw FormatError("gamma_decode: truncated code");
    std::uint64_t v = bits.substr(pos + zeros, zeros + 1).to_uint();
    return {v, pos + 2 * zeros + 1};
}

std::size_t code_header_bits(unsigned e, std::uint64_t k) { return gamma_length(e) + gamma_length(k + 1); }

BitString pack_code(unsigned e, std::uint64_t k, const BitString& payload, std::size_t m) {
    if (e == 0) throw DomainError("pack_code: e must be >= 1");
    std::size_t need = code_header_bits(e, k) + payload.size() + 1;
    if (need > m) throw CapacityExceeded("pack_code: " + std::to_string(need) + " bits needed, m = " + std::to_string(m));
    BitString out = gamma_encode(e);
    out.append(gamma_encode(k + 1));
    out.append(payload);
    out.push_back(true);
    out.append(BitString(m - need));
    return out;
}

CodeFields unpack_code(const BitString& code) {
    std::size_t end = code.size();
    while (end > 0 && !code.get(end - 1)) --end;
    if (end == 0) throw FormatError("unpack_code: no terminator bit");
    --end;
    BitString body = code.substr(0, end);
    auto [e, p1] = gamma_decode(body, 0);
    auto [k1, p2] = gamma_decode(body, p1);
    CodeFields f;
    f.e = static_cast<unsigned>(e);
    f.k = k1 - 1;
    f.payload = body.substr(p2, body.size() - p2);
    return f;
}

// ---------------------------------------------------------------------------

BitString gf2_matvec(const std::vector<BitString>& rows, const BitString& x) {
    BitString out;
    for (const auto& r : rows) {
        if (r.size() != x.size()) throw DimensionError("gf2_matvec: row length differs from |x|");
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < r.words().size(); ++w) acc ^= r.words()[w] & x.words()[w];
        out.push_back(std::popcount(acc) & 1);
    }
    return out;
}

std::uint32_t GF2w::default_modulus(unsigned w) {
    switch (w) {
        case 2: return 0x7;      // x^2+x+1
        case 3: return 0xB;      // x^3+x+1
        case 4: return 0x13;     // x^4+x+1
        case 5: return 0x25;     // x^5+x^2+1
        case 6: return 0x43;     // x^6+x+1
        case 7: return 0x83;     // x^7+x+1
        case 8: return 0x11B;    // x^8+x^4+x^3+x+1
        case 9: return 0x211;    // x^9+x^4+1
        case 10: return 0x409;   // x^10+x^3+1
        case 11: return 0x805;   // x^11+x^2+1
        case 12: return 0x1053;  // x^12+x^6+x^4+x+1
        default: throw DomainError("GF2w: unsupported degree");
    }
}

GF2w::GF2w(unsigned w) : w_(w), mod_(default_modulus(w)) {}

std::uint32_t GF2w::mul(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & (1U << w_)) a ^= mod_;
    }
    return r;
}

std::uint32_t GF2w::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::uint32_t GF2w::inv(std::uint32_t a) const {
    if (a == 0) throw DomainError("GF2w: inverse of zero");
    return pow(a, size() - 2);
}

BitString LinePoint::line_bits() const {
    BitString s = BitString::from_uint(a.value, a.w);
    s.append_uint(b.value, b.w);
    return s;
}

BitString LinePoint::point_bits() const {
    BitString s = BitString::from_uint(u.value, u.w);
    s.append_uint(v.value, v.w);
    return s;
}

LinePoint line_point_from(unsigned w, std::uint32_t a, std::uint32_t b, std::uint32_t u) {
    GF2w f(w);
    std::uint32_t v = f.add(f.mul(a, u), b);
    return LinePoint{{w, a}, {w, b}, {w, u}, {w, v}};
}

LinePoint line_point_instance(unsigned w, Seed seed) {
    if (w < 2) throw DomainError("line_point_instance: w >= 2 required");
    SplitMix64 rng(seed.value);
    std::uint32_t n = 1U << w;
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n));
    auto u = static_cast<std::uint32_t>(rng.below(n));
    return line_point_from(w, a, b, u);
}

}  // namespace tlc
