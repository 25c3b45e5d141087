#include "tlc/invertible.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include "tlc/errors.hpp"

namespace tlc {

namespace mp = boost::multiprecision;

void BoundStats::reset() {
    invocations = 0;
    depth_violations = 0;
    length_violations = 0;
    reject_violations = 0;
    max_depth = 0;
    max_list = 0;
}

BoundStats& bound_stats() {
    static BoundStats stats;
    return stats;
}

unsigned log2_2m(std::uint64_t M) {
    if (M == 0) throw DomainError("log2_2m: M >= 1 required");
    return static_cast<unsigned>(std::bit_width(M));
}

namespace {

void atomic_max(std::atomic<std::uint64_t>& a, std::uint64_t v) {
    std::uint64_t cur = a.load();
    while (v > cur && !a.compare_exchange_weak(cur, v)) {
    }
}

double log2_2m_d(double M) { return std::floor(std::log2(2 * M) + 1e-12); }

using Rows = std::vector<std::vector<std::uint64_t>>;
using Pos = std::vector<std::uint32_t>;

struct LevelOut {
    Pos G;  // G(S, y) when a query symbol is given
    Pos R;
    std::vector<std::uint64_t> misses;  // per element of S, seeds d with x not in G(S, f(x,d))
};

// One application of G and R to the sub-stream S (positions into rows, arrival order).
LevelOut eval_level(const Rows& rows, const Pos& S, double cap, std::optional<std::uint64_t> y, double eps) {
    LevelOut out;
    out.misses.reserve(S.size());
    std::unordered_map<std::uint64_t, std::uint64_t> cnt;
    std::vector<std::uint64_t> distinct;
    std::vector<char> acc;
    for (auto p : S) {
        const auto& img = rows[p];
        distinct.assign(img.begin(), img.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        acc.assign(distinct.size(), 0);
        bool inG = false;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            auto r = cnt[distinct[i]]++;
            acc[i] = static_cast<double>(r) < cap;
            if (y && distinct[i] == *y && acc[i]) inG = true;
        }
        if (inG) out.G.push_back(p);
        std::uint64_t miss = 0;
        for (auto v : img) {
            auto it = std::lower_bound(distinct.begin(), distinct.end(), v);
            if (!acc[static_cast<std::size_t>(it - distinct.begin())]) ++miss;
        }
        out.misses.push_back(miss);
        if (static_cast<double>(miss) > 2 * eps * static_cast<double>(img.size()) + 1e-9) out.R.push_back(p);
    }
    return out;
}

Rows table_rows(const CondenserTable& f, const Stream& S) {
    Rows rows;
    rows.reserve(S.size());
    std::unordered_set<std::uint64_t> seen;
    for (auto x : S) {
        if (x >= f.domain()) throw DomainError("stream element outside [2^n]");
        if (!seen.insert(x).second) throw DomainError("stream elements must be distinct");
        std::vector<std::uint64_t> r(f.D);
        for (std::uint32_t d = 0; d < f.D; ++d) r[d] = f(x, d);
        rows.push_back(std::move(r));
    }
    return rows;
}

Pos iota_pos(std::size_t n) {
    Pos p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
    return p;
}

Stream to_stream(const Stream& S, const Pos& p) {
    Stream out;
    out.reserve(p.size());
    for (auto i : p) out.push_back(S[i]);
    return out;
}

struct PruneCore {
    Pos list;
    unsigned depth = 0;
};

PruneCore prune_core(const Rows& rows, std::uint64_t D, std::uint64_t y, double eps, std::uint64_t M) {
    PruneCore out;
    Pos cur = iota_pos(rows.size());
    while (!cur.empty()) {
        ++out.depth;
        auto lv = eval_level(rows, cur, static_cast<double>(D), y, eps);
        out.list.insert(out.list.end(), lv.G.begin(), lv.G.end());
        if (lv.R.size() >= cur.size()) break;
        cur = std::move(lv.R);
    }
    auto& st = bound_stats();
    ++st.invocations;
    atomic_max(st.max_depth, out.depth);
    atomic_max(st.max_list, out.list.size());
    if (rows.size() <= M) {
        unsigned lim = log2_2m(M);
        if (out.depth > lim) {
            ++st.depth_violations;
            throw BoundViolation("prune_Gprime: recursion depth exceeds log2(2M)");
        }
        if (out.list.size() > D * lim) {
            ++st.length_violations;
            throw BoundViolation("prune_Gprime: list length exceeds 2^r log2(2M)");
        }
    }
    return out;
}

struct LargeCore {
    Pos selected, rejected;
    unsigned rounds = 0;
};

LargeCore pruning_large_core(const Rows& rows, std::uint64_t D, std::uint64_t y, double a, double b, double M,
                             double eps) {
    LargeCore out;
    Pos cur = iota_pos(rows.size());
    auto bparts = static_cast<std::uint64_t>(std::min(b, 1e18));
    if (static_cast<double>(cur.size()) > b * M) throw DomainError("pruning_large: |S| exceeds bM");
    for (;;) {
        ++out.rounds;
        std::uint64_t parts = std::min<std::uint64_t>(bparts, std::max<std::size_t>(cur.size(), 1));
        std::vector<Pos> part(parts);
        for (std::size_t i = 0; i < cur.size(); ++i) part[i % parts].push_back(cur[i]);
        std::vector<char> sel(rows.size(), 0), rej(rows.size(), 0);
        for (auto& P : part) {
            if (P.empty()) continue;
            auto lv = eval_level(rows, P, a * static_cast<double>(D), y, eps);
            for (auto p : lv.G) sel[p] = 1;
            for (auto p : lv.R) rej[p] = 1;
        }
        Pos rec;
        for (auto p : cur) {
            if (sel[p]) out.selected.push_back(p);
            if (rej[p]) rec.push_back(p);
        }
        if (2 * static_cast<double>(rec.size()) <= M || rec.size() >= cur.size()) {
            out.rejected = std::move(rec);
            break;
        }
        cur = std::move(rec);
    }
    auto& st = bound_stats();
    ++st.invocations;
    atomic_max(st.max_depth, out.rounds);
    atomic_max(st.max_list, out.selected.size());
    double lim = log2_2m_d(b);
    if (out.rounds > lim) {
        ++st.depth_violations;
        throw BoundViolation("pruning_large: more than log2(2b) rounds");
    }
    if (static_cast<double>(out.selected.size()) > a * b * static_cast<double>(D) * lim) {
        ++st.length_violations;
        throw BoundViolation("pruning_large: selected list exceeds ab 2^r log2(2b)");
    }
    if (2 * static_cast<double>(out.rejected.size()) > M) {
        ++st.reject_violations;
        throw BoundViolation("pruning_large: more than M/2 rejections");
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Stream list_invert_G(const CondenserTable& f, const Stream& S, std::uint32_t y, std::uint64_t a) {
    auto rows = table_rows(f, S);
    auto lv = eval_level(rows, iota_pos(S.size()), static_cast<double>(a) * f.D, y, 0.5);
    return to_stream(S, lv.G);
}

Stream rejects_R(const CondenserTable& f, const Stream& S, std::uint64_t a, double eps, bool certified) {
    auto rows = table_rows(f, S);
    auto lv = eval_level(rows, iota_pos(S.size()), static_cast<double>(a) * f.D, std::nullopt, eps);
    if (certified && 2 * lv.R.size() > S.size()) {
        ++bound_stats().reject_violations;
        throw BoundViolation("rejects_R: more than |S|/2 rejections for a certified condenser");
    }
    return to_stream(S, lv.R);
}

double miss_probability(const CondenserTable& f, const Stream& S, std::uint64_t x, std::uint64_t a) {
    auto rows = table_rows(f, S);
    auto lv = eval_level(rows, iota_pos(S.size()), static_cast<double>(a) * f.D, std::nullopt, 0.5);
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i] == x) return static_cast<double>(lv.misses[i]) / f.D;
    }
    throw DomainError("miss_probability: x not in S");
}

PruneResult prune_Gprime(const CondenserTable& f, const Stream& S, std::uint32_t y, double eps, std::uint64_t M) {
    auto rows = table_rows(f, S);
    auto core = prune_core(rows, f.D, y, eps, M);
    return {to_stream(S, core.list), core.depth};
}

double prune_miss_probability(const CondenserTable& f, const Stream& S, std::uint64_t x, double eps, std::uint64_t M) {
    auto rows = table_rows(f, S);
    auto it = std::find(S.begin(), S.end(), x);
    if (it == S.end()) throw DomainError("prune_miss_probability: x not in S");
    auto xi = static_cast<std::uint32_t>(it - S.begin());
    std::uint64_t miss = 0;
    for (std::uint32_t d = 0; d < f.D; ++d) {
        auto core = prune_core(rows, f.D, f(x, d), eps, M);
        if (std::find(core.list.begin(), core.list.end(), xi) == core.list.end()) ++miss;
    }
    return static_cast<double>(miss) / f.D;
}

PruningLargeResult pruning_large(const CondenserTable& f, const Stream& S, std::uint32_t y, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t M, double eps) {
    if (a == 0 || b == 0 || M == 0) throw DomainError("pruning_large: a, b, M >= 1 required");
    auto rows = table_rows(f, S);
    auto core = pruning_large_core(rows, f.D, y, static_cast<double>(a), static_cast<double>(b),
                                   static_cast<double>(M), eps);
    return {to_stream(S, core.selected), to_stream(S, core.rejected), core.rounds};
}

// ---------------------------------------------------------------------------

ListInverseState::ListInverseState(std::uint64_t D, std::uint64_t Y, std::uint64_t cap, double eps, std::uint64_t M,
                                   std::optional<bool> dense)
    : D_(D), Y_(Y), cap_(cap), M_(M), eps_(eps), dense_(dense.value_or(Y <= (std::uint64_t{1} << 16))) {
    if (D == 0 || cap == 0 || M == 0) throw DomainError("ListInverseState: D, cap, M >= 1 required");
    if (dense_ && (Y == 0 || Y > (std::uint64_t{1} << 24))) dense_ = false;
    if (dense_) cand_dense_.resize(Y);
}

std::uint32_t& ListInverseState::count(Level& L, std::uint64_t y) {
    if (dense_) {
        if (L.dense.empty()) L.dense.assign(Y_, 0);
        return L.dense[y];
    }
    return L.sparse[y];
}

std::vector<std::uint32_t>& ListInverseState::cand_slot(std::uint64_t y) {
    return dense_ ? cand_dense_[y] : cand_sparse_[y];
}

const std::vector<std::uint32_t>& ListInverseState::candidates(std::uint64_t y) const {
    static const std::vector<std::uint32_t> empty;
    if (dense_) return y < Y_ ? cand_dense_[y] : empty;
    auto it = cand_sparse_.find(y);
    return it == cand_sparse_.end() ? empty : it->second;
}

std::uint32_t ListInverseState::push(const std::vector<std::uint64_t>& images) {
    if (images.size() != D_) throw DimensionError("ListInverseState::push: expected D images");
    if (dense_) {
        for (auto y : images) {
            if (y >= Y_) throw DomainError("ListInverseState::push: image outside [Y]");
        }
    }
    auto idx = static_cast<std::uint32_t>(level_of_.size());
    level_of_.push_back(0);
    distinct_.assign(images.begin(), images.end());
    std::sort(distinct_.begin(), distinct_.end());
    distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
    std::vector<char> acc(distinct_.size());
    unsigned L = 0;
    for (;; ++L) {
        if (L == levels_.size()) levels_.emplace_back();
        Level& lv = levels_[L];
        for (std::size_t i = 0; i < distinct_.size(); ++i) {
            auto& c = count(lv, distinct_[i]);
            acc[i] = c < cap_;
            ++c;
            if (acc[i]) {
                auto& slot = cand_slot(distinct_[i]);
                if (slot.empty() || slot.back() != idx) slot.push_back(idx);
            }
        }
        ++lv.size;
        std::uint64_t bad = 0;
        for (auto y : images) {
            auto it = std::lower_bound(distinct_.begin(), distinct_.end(), y);
            if (!acc[static_cast<std::size_t>(it - distinct_.begin())]) ++bad;
        }
        if (static_cast<double>(bad) <= 2 * eps_ * static_cast<double>(D_) + 1e-9) break;
    }
    level_of_[idx] = L;

    auto& st = bound_stats();
    ++st.invocations;
    atomic_max(st.max_depth, levels_.size());
    if (size() <= M_) {
        unsigned lim = log2_2m(M_);
        if (levels_.size() > lim) {
            ++st.depth_violations;
            throw BoundViolation("ListInverseState: recursion depth exceeds log2(2M)");
        }
        for (auto y : distinct_) {
            auto len = cand_slot(y).size();
            atomic_max(st.max_list, len);
            if (len > cap_ * lim) {
                ++st.length_violations;
                throw BoundViolation("ListInverseState: candidate list exceeds 2^r log2(2M)");
            }
        }
        for (std::size_t i = 1; i < levels_.size(); ++i) {
            if (2 * levels_[i].size > levels_[i - 1].size) {
                ++st.reject_violations;
                break;
            }
        }
    }
    return idx;
}

// ---------------------------------------------------------------------------

std::size_t FingerprintLayout::total_bits() const {
    return gamma_length(n + 1) + gamma_length(body_bits + 1) + body_bits + 2 * gamma_length(tag_bits) + 2 * tag_bits;
}

std::string FingerprintLayout::describe() const {
    static const char* kinds[] = {"identity", "uniform-range", "random"};
    std::ostringstream os;
    os << "gamma(n+1=" << n + 1 << ") ++ gamma(bw+1=" << body_bits + 1 << ") ++ body[" << body_bits
       << "] ++ gamma(B=" << tag_bits << ") ++ p[" << tag_bits << "] ++ gamma(B) ++ residue[" << tag_bits
       << "]; conductor=" << kinds[static_cast<int>(kind)] << " D=" << D << " list_capacity=" << list_capacity
       << " s=" << s << " eps=" << eps << " total=" << total_bits();
    return os.str();
}

FingerprintLayout fingerprint_layout(std::uint64_t n, std::uint64_t k, double eps, std::uint64_t conductor_seed) {
    if (!(eps > 0 && eps <= 1)) throw DomainError("fingerprint_layout: eps must be in (0, 1]");
    FingerprintLayout L;
    L.n = n;
    L.k = k;
    L.eps = eps;
    L.conductor_seed = conductor_seed;
    if (k + 2 > n) {
        L.kind = Conductor::Kind::Identity;
        L.D = 1;
        L.body_bits = n;
    } else {
        if (k > 61) throw ScaleError("fingerprint_layout: k > 61 below the identity branch");
        Conductor c(n, std::uint64_t{1} << k, eps, conductor_seed);
        L.kind = c.kind();
        L.D = c.D();
        L.body_bits = c.body_bits();
    }
    L.list_capacity = L.D * (k + 1);
    L.s = prime_pool_s(static_cast<double>(L.list_capacity), n, eps);
    L.tag_bits = prime_pool_bits(L.s);
    return L;
}

std::size_t fingerprint_length(std::uint64_t n, std::uint64_t k, double eps) {
    return fingerprint_layout(n, k, eps).total_bits();
}

BitString Fingerprint::to_bits() const {
    BitString out = gamma_encode(layout.n + 1);
    out.append(gamma_encode(layout.body_bits + 1));
    out.append(body);
    out.append(gamma_encode(layout.tag_bits));
    out.append_uint(tag.p, layout.tag_bits);
    out.append(gamma_encode(layout.tag_bits));
    out.append_uint(tag.residue, layout.tag_bits);
    return out;
}

Fingerprint Fingerprint::from_bits(const BitString& bits, std::uint64_t k, double eps, std::uint64_t conductor_seed) {
    try {
        auto [n1, p1] = gamma_decode(bits, 0);
        auto [bw1, p2] = gamma_decode(bits, p1);
        Fingerprint fp;
        fp.layout = fingerprint_layout(n1 - 1, k, eps, conductor_seed);
        if (bw1 - 1 != fp.layout.body_bits) throw FormatError("fingerprint: body width does not match layout");
        if (p2 + fp.layout.body_bits > bits.size()) throw FormatError("fingerprint: truncated body");
        fp.body = bits.substr(p2, fp.layout.body_bits);
        std::size_t pos = p2 + fp.layout.body_bits;
        unsigned B = fp.layout.tag_bits;
        auto [b1, p3] = gamma_decode(bits, pos);
        if (b1 != B || p3 + B > bits.size()) throw FormatError("fingerprint: bad prime field");
        fp.tag.p = bits.substr(p3, B).to_uint();
        auto [b2, p4] = gamma_decode(bits, p3 + B);
        if (b2 != B || p4 + B != bits.size()) throw FormatError("fingerprint: bad residue field");
        fp.tag.residue = bits.substr(p4, B).to_uint();
        return fp;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("fingerprint: ") + e.what());
    }
}

Fingerprint fingerprint_F(const BitString& x, double eps, std::uint64_t k, Seed seed) {
    Fingerprint fp;
    fp.layout = fingerprint_layout(x.size(), k, eps);
    SplitMix64 rng(seed.value);
    if (fp.layout.kind == Conductor::Kind::Identity) {
        fp.body = x;
    } else {
        Conductor c(x.size(), std::uint64_t{1} << k, eps, fp.layout.conductor_seed);
        std::uint64_t d = rng.below(c.D());
        fp.body = BitString::from_uint(c.eval(x, d), fp.layout.body_bits);
    }
    fp.tag.p = prime_pool(fp.layout.s).sample(rng);
    fp.tag.residue = bits_mod(x, fp.tag.p);
    return fp;
}

Fingerprint fingerprint_F(const BitString& x, EpsilonExp eps, std::uint64_t k, Seed seed) {
    return fingerprint_F(x, eps.value(), k, seed);
}

FingerprintInverter::FingerprintInverter(const FingerprintLayout& layout, std::optional<bool> dense) : layout_(layout) {
    if (layout_.kind != Conductor::Kind::Identity) {
        cond_.emplace(layout_.n, std::uint64_t{1} << layout_.k, layout_.eps, layout_.conductor_seed);
        state_.emplace(cond_->D(), cond_->Y(), cond_->D(), layout_.eps, std::uint64_t{1} << layout_.k, dense);
    }
}

void FingerprintInverter::push(const BitString& x) {
    if (x.size() != layout_.n) return;
    auto idx = static_cast<std::uint32_t>(elems_.size());
    if (!ident_.emplace(x, idx).second) return;
    elems_.push_back(x);
    if (state_) {
        cond_->images(x, scratch_);
        state_->push(scratch_);
    }
}

std::optional<BitString> FingerprintInverter::query(const BitString& body, const PrimeHash& tag) const {
    if (body.size() != layout_.body_bits || tag.p == 0) return std::nullopt;
    if (!state_) {
        auto it = ident_.find(body);
        if (it == ident_.end() || bits_mod(body, tag.p) != tag.residue) return std::nullopt;
        return body;
    }
    for (auto idx : state_->candidates(body.to_uint())) {
        if (bits_mod(elems_[idx], tag.p) == tag.residue) return elems_[idx];
    }
    return std::nullopt;
}

std::optional<BitString> invert_full(const std::vector<BitString>& S, const Fingerprint& fp) {
    FingerprintInverter inv(fp.layout);
    for (const auto& x : S) inv.push(x);
    return inv.query(fp);
}

// ---------------------------------------------------------------------------

namespace {

mp::cpp_int to_big(const BitString& x) {
    mp::cpp_int v = 0;
    for (auto w : x.words()) {
        v <<= 64;
        v |= w;
    }
    std::size_t pad = x.words().size() * 64 - x.size();
    return v >> pad;
}

BitString from_big(const mp::cpp_int& v, std::size_t width) {
    BitString out(width);
    for (std::size_t i = 0; i < width; ++i) out.set(width - 1 - i, mp::bit_test(v, static_cast<unsigned>(i)));
    return out;
}

mp::cpp_int sample_wide_prime(unsigned bits, SplitMix64& rng) {
    for (;;) {
        BitString cand = rng.bits(bits);
        mp::cpp_int c = to_big(cand);
        if (c < 2) continue;
        if (c <= 3 || mp::miller_rabin_test(c, 25)) return c;
    }
}

std::size_t recursion_tag_bits_total(unsigned B) { return 2 * gamma_length(B) + 2 * static_cast<std::size_t>(B); }

}  // namespace

std::size_t RecursionSchedule::total_bits() const {
    if (identity) return gamma_length(n + 1) + n;
    std::size_t t = gamma_length(n + 1);
    for (const auto& L : levels) t += L.kappa;
    return t + recursion_tag_bits_total(tag_bits);
}

RecursionSchedule recursion_schedule(std::uint64_t n, std::uint64_t k, double eps, std::uint64_t b) {
    if (!(eps > 0 && eps <= 1)) throw DomainError("recursion_schedule: eps must be in (0, 1]");
    if (b == 0) throw DomainError("recursion_schedule: b >= 1 required");
    RecursionSchedule sch;
    sch.n = n;
    sch.k = k;
    sch.b = b;
    sch.eps_total = eps;
    if (k >= n) {
        sch.identity = true;
        sch.final_k = k;
        sch.eps_level = eps;
        return sch;
    }
    std::uint64_t cur = k;
    while (cur >= 100 * b) {
        std::uint64_t kappa = (cur + 2) / 3;
        std::uint64_t next = 2 * kappa + b;
        if (6 * next > 5 * cur) throw BoundViolation("recursion_schedule: k' exceeds 5k/6");
        sch.levels.push_back({cur, kappa, 0});
        cur = next;
    }
    sch.final_k = cur;
    sch.eps_level = eps / static_cast<double>(2 * sch.levels.size() + 1);
    for (auto& L : sch.levels) L.D = conductor_degree(n, sch.eps_level);
    sch.tag_s = prime_pool_s(std::ldexp(1.0, static_cast<int>(cur)), n, sch.eps_level);
    sch.tag_bits = prime_pool_bits(sch.tag_s);
    return sch;
}

std::uint64_t default_recursion_b(std::uint64_t n, std::uint64_t k, double eps) {
    auto b_for = [n](double e) {
        double D = static_cast<double>(conductor_degree(n, e));
        return static_cast<std::uint64_t>(std::ceil(std::log2(D) + std::log2(static_cast<double>(n) + 2) - 1e-12));
    };
    std::uint64_t b = b_for(eps);
    for (int it = 0; it < 16; ++it) {
        auto sch = recursion_schedule(n, k, eps, b);
        std::uint64_t nb = b_for(sch.eps_level);
        if (nb <= b) return b;
        b = nb;
    }
    return b;
}

std::uint64_t recursion_condenser(const BitString& x, std::uint64_t level, std::uint64_t kappa, std::uint64_t d) {
    if (kappa > 64) throw ScaleError("recursion_condenser: kappa > 64");
    if (kappa == 0) return 0;
    std::uint64_t h = hash_combine(mix64(kPublicConductorSeed ^ mix64(level + 0x1000)), x.hash());
    h = mix64(h ^ mix64(d + 0x2545f4914f6cdd1dULL));
    return kappa == 64 ? h : h >> (64 - kappa);
}

RecursionFingerprint condenser_recursion_F(const BitString& x, double eps, std::uint64_t k, Seed seed,
                                           std::uint64_t b) {
    RecursionFingerprint fp;
    fp.schedule = recursion_schedule(x.size(), k, eps, b);
    if (fp.schedule.identity) {
        fp.identity_body = x;
        return fp;
    }
    SplitMix64 rng(seed.value);
    for (std::size_t i = 0; i < fp.schedule.levels.size(); ++i) {
        const auto& L = fp.schedule.levels[i];
        fp.outputs.push_back(recursion_condenser(x, i, L.kappa, rng.below(L.D)));
    }
    unsigned B = fp.schedule.tag_bits;
    mp::cpp_int p;
    if (B <= 62) {
        p = prime_pool(fp.schedule.tag_s).sample(rng);
    } else {
        p = sample_wide_prime(B, rng);
    }
    fp.tag_p = from_big(p, B);
    fp.tag_residue = from_big(to_big(x) % p, B);
    return fp;
}

RecursionFingerprint condenser_recursion_F(const BitString& x, EpsilonExp eps, std::uint64_t k, Seed seed) {
    return condenser_recursion_F(x, eps.value(), k, seed, default_recursion_b(x.size(), k, eps.value()));
}

BitString RecursionFingerprint::to_bits() const {
    BitString out = gamma_encode(schedule.n + 1);
    if (schedule.identity) return out + identity_body;
    for (std::size_t i = 0; i < outputs.size(); ++i) out.append_uint(outputs[i], schedule.levels[i].kappa);
    out.append(gamma_encode(schedule.tag_bits));
    out.append(tag_p);
    out.append(gamma_encode(schedule.tag_bits));
    out.append(tag_residue);
    return out;
}

std::optional<BitString> invert_recursion(const std::vector<BitString>& S, const RecursionFingerprint& fp) {
    const auto& sch = fp.schedule;
    std::vector<BitString> cur;
    std::unordered_set<BitString, BitStringHash> seen;
    for (const auto& x : S) {
        if (x.size() == sch.n && seen.insert(x).second) cur.push_back(x);
    }
    if (sch.identity) {
        if (seen.count(fp.identity_body)) return fp.identity_body;
        return std::nullopt;
    }
    for (std::size_t i = 0; i < sch.levels.size(); ++i) {
        const auto& L = sch.levels[i];
        Rows rows(cur.size());
        for (std::size_t j = 0; j < cur.size(); ++j) {
            rows[j].resize(L.D);
            for (std::uint64_t d = 0; d < L.D; ++d) rows[j][d] = recursion_condenser(cur[j], i, L.kappa, d);
        }
        double Kp = std::ldexp(1.0, static_cast<int>(L.kappa));
        auto core = pruning_large_core(rows, L.D, fp.outputs[i], Kp, Kp, Kp * Kp, sch.eps_level);
        std::vector<BitString> next;
        std::vector<char> taken(cur.size(), 0);
        for (auto p : core.selected) {
            if (!taken[p]) next.push_back(cur[p]), taken[p] = 1;
        }
        for (auto p : core.rejected) {
            if (!taken[p]) next.push_back(cur[p]), taken[p] = 1;
        }
        cur = std::move(next);
    }
    mp::cpp_int p = to_big(fp.tag_p);
    mp::cpp_int r = to_big(fp.tag_residue);
    if (p == 0) return std::nullopt;
    for (const auto& x : cur) {
        if (to_big(x) % p == r) return x;
    }
    return std::nullopt;
}

}  // namespace tlc
