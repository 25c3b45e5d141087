#include "tlc/compressor.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "tlc/errors.hpp"

namespace tlc {

void ToyDecompressor::add(const BitString& program, const BitString& output) { add(program, std::nullopt, output); }

void ToyDecompressor::add(const BitString& program, const std::optional<BitString>& cond, const BitString& output) {
    auto& progs = table_[cond];
    if (!progs.emplace(program, output).second) throw DomainError("ToyDecompressor: duplicate program");
    ++count_;
    auto& best = best_[cond];
    auto it = best.find(output);
    if (it == best.end()) {
        best.emplace(output, program.size());
    } else if (program.size() < it->second) {
        it->second = program.size();
    }
}

std::optional<BitString> ToyDecompressor::run(const BitString& program, const std::optional<BitString>& cond) const {
    auto t = table_.find(cond);
    if (t == table_.end()) return std::nullopt;
    auto it = t->second.find(program);
    if (it == t->second.end()) return std::nullopt;
    return it->second;
}

Complexity ToyDecompressor::complexity(const BitString& x, const std::optional<BitString>& cond) const {
    auto b = best_.find(cond);
    if (b == best_.end()) return std::nullopt;
    auto it = b->second.find(x);
    if (it == b->second.end()) return std::nullopt;
    return it->second;
}

void ToyDecompressor::enumerate(std::size_t k, std::optional<std::size_t> n, const std::optional<BitString>& cond,
                                const std::function<bool(const BitString&)>& sink) const {
    auto t = table_.find(cond);
    if (t == table_.end()) return;
    std::unordered_set<BitString, BitStringHash> seen;
    for (const auto& [prog, out] : t->second) {
        if (prog.size() >= k) break;
        if (n && out.size() != *n) continue;
        if (!seen.insert(out).second) continue;
        if (!sink(out)) return;
    }
}

void ToyDecompressor::write(std::ostream& os) const {
    for (const auto& [cond, progs] : table_) {
        for (const auto& [p, out] : progs) {
            os << "P " << p.to_hex();
            if (cond) os << ' ' << cond->to_hex();
            os << " -> " << out.to_hex() << '\n';
        }
    }
}

ToyDecompressor ToyDecompressor::read(std::istream& is) {
    ToyDecompressor D;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        auto bad = [&] { return FormatError("decompressor line " + std::to_string(lineno) + ": expected P <prog> [<cond>] -> <out>"); };
        if (tok.size() < 4 || tok[0] != "P") throw bad();
        if (tok.size() == 4 && tok[2] == "->") {
            D.add(BitString::from_hex(tok[1]), BitString::from_hex(tok[3]));
        } else if (tok.size() == 5 && tok[3] == "->") {
            D.add(BitString::from_hex(tok[1]), BitString::from_hex(tok[2]), BitString::from_hex(tok[4]));
        } else {
            throw bad();
        }
    }
    return D;
}

std::vector<BitString> enumerate_suspects(const Decompressor& D, std::size_t k, std::optional<std::size_t> n,
                                          const std::optional<BitString>& cond) {
    std::vector<BitString> out;
    D.enumerate(k, n, cond, [&](const BitString& x) {
        out.push_back(x);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------

void write_code(std::ostream& os, const Code& code) {
    os << "TLC1 " << code.m() << '\n';
    std::size_t m = code.m();
    for (std::size_t i = 0; i < m; i += 8) {
        unsigned byte = 0;
        for (std::size_t j = 0; j < 8; ++j) byte = (byte << 1) | (i + j < m && code.bits[i + j] ? 1U : 0U);
        os.put(static_cast<char>(byte));
    }
}

Code read_code(std::istream& is) {
    std::string magic;
    std::size_t m = 0;
    if (!(is >> magic) || magic != "TLC1") throw FormatError("code: missing TLC1 header");
    if (!(is >> m)) throw FormatError("code: missing length");
    if (is.get() != '\n') throw FormatError("code: header must end with a newline");
    Code c;
    c.bits = BitString(m);
    for (std::size_t i = 0; i < m; i += 8) {
        int byte = is.get();
        if (byte == std::char_traits<char>::eof()) throw FormatError("code: truncated payload");
        for (std::size_t j = 0; j < 8; ++j) {
            bool bit = (byte >> (7 - j)) & 1;
            if (i + j < m) {
                c.bits.set(i + j, bit);
            } else if (bit) {
                throw FormatError("code: nonzero padding");
            }
        }
    }
    return c;
}

double fingerprint_eps(unsigned e) { return EpsilonExp{e + 2}.value(); }

namespace {

bool fits(unsigned e, std::uint64_t n, std::uint64_t k, std::size_t m) {
    if (k + 2 <= n && k > 61) return false;
    std::size_t need = code_header_bits(e, k) + fingerprint_length(n, k, fingerprint_eps(e)) + 1;
    return need <= m;
}

}  // namespace

std::optional<std::uint64_t> choose_k(unsigned e, std::uint64_t n, std::size_t m) {
    for (std::uint64_t k = m + 1; k-- > 0;) {
        if (fits(e, n, k, m)) return k;
    }
    return std::nullopt;
}

std::size_t overhead_delta(unsigned e, std::uint64_t n, std::size_t m) {
    auto k = choose_k(e, n, m);
    if (!k) throw CapacityExceeded("overhead_delta: no k fits in m bits");
    return m - *k + 1;
}

std::size_t min_length_for(unsigned e, std::uint64_t n, std::uint64_t k) {
    std::size_t m = code_header_bits(e, k) + 1;
    while (!fits(e, n, k, m)) ++m;
    return m;
}

Code compress(const BitString& x, EpsilonExp eps, std::size_t m, Seed seed) {
    auto k = choose_k(eps.e, x.size(), m);
    if (!k) throw CapacityExceeded("compress: m = " + std::to_string(m) + " cannot hold the header and a k = 0 fingerprint");
    auto fp = fingerprint_F(x, fingerprint_eps(eps.e), *k, seed);
    return {pack_code(eps.e, *k, fp.to_bits(), m)};
}

Fingerprint code_fingerprint(const Code& code) {
    auto f = code.fields();
    return Fingerprint::from_bits(f.payload, f.k, fingerprint_eps(f.e));
}

DecodeSession::DecodeSession(const Code& code, std::optional<bool> dense)
    : DecodeSession(code_fingerprint(code), code.fields().k, dense) {}

DecodeSession::DecodeSession(const Fingerprint& fp, std::uint64_t k, std::optional<bool> dense)
    : k_(k), fp_(fp), inv_(fp_.layout, dense) {}

void DecodeSession::feed(const BitString& x) {
    if (answer_ || x.size() != fp_.layout.n || fp_.tag.p == 0) return;
    inv_.push(x);
    if (const auto* st = inv_.list_state()) {
        const auto& cands = st->candidates(fp_.body.to_uint());
        // Candidate lists only grow at the end, so only the new tail needs a tag check.
        for (; scanned_ < cands.size(); ++scanned_) {
            const auto& c = inv_.element(cands[scanned_]);
            if (bits_mod(c, fp_.tag.p) == fp_.tag.residue) {
                answer_ = c;
                return;
            }
        }
    } else if (x == fp_.body) {
        answer_ = inv_.query(fp_);
    }
}

std::optional<BitString> decompress_online(const Decompressor& D, const Code& code, const std::optional<BitString>& cond) {
    DecodeSession s(code);
    D.enumerate(s.k(), s.n(), cond, [&](const BitString& x) {
        s.feed(x);
        return !s.committed();
    });
    return s.answer();
}

FingerprintInverter build_inverter(const Decompressor& D, unsigned e, std::uint64_t k, std::uint64_t n,
                                   const std::optional<BitString>& cond) {
    FingerprintInverter inv(fingerprint_layout(n, k, fingerprint_eps(e)));
    D.enumerate(k, n, cond, [&](const BitString& x) {
        inv.push(x);
        return true;
    });
    return inv;
}

std::optional<BitString> decode_with(const FingerprintInverter& inv, const Code& code) {
    auto fp = code_fingerprint(code);
    if (fp.layout.n != inv.layout().n || fp.layout.k != inv.layout().k || fp.layout.eps != inv.layout().eps)
        throw DomainError("decode_with: inverter layout does not match the code");
    return inv.query(fp);
}

ToyDecompressor majority_decompressor(const ProbabilisticDecompressor& P) {
    ToyDecompressor D;
    for (const auto& [prog, outs] : P.outcomes) {
        if (outs.empty()) continue;
        std::unordered_map<BitString, std::size_t, BitStringHash> cnt;
        for (const auto& o : outs) {
            if (o) ++cnt[*o];
        }
        for (const auto& [v, c] : cnt) {
            if (2 * c > outs.size()) {
                D.add(prog, v);
                break;
            }
        }
    }
    return D;
}

}  // namespace tlc
