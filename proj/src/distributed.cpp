#include "tlc/distributed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "tlc/errors.hpp"

namespace tlc {

std::size_t TupleHash::operator()(const Tuple& t) const {
    std::uint64_t h = mix64(t.size() + 0x7b3f1c0d9e2a4f61ULL);
    for (const auto& x : t) h = hash_combine(h, x.hash());
    return static_cast<std::size_t>(h);
}

CoordSet full_set(std::size_t ell) {
    if (ell > kMaxSenders) throw ScaleError("full_set: more than 20 senders");
    return static_cast<CoordSet>((std::uint64_t{1} << ell) - 1);
}

BitString encode_set(const Tuple& x, CoordSet J) {
    BitString out;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!((J >> j) & 1U)) continue;
        out.append(gamma_encode(j + 1));
        out.append(gamma_encode(x[j].size() + 1));
        out.append(x[j]);
    }
    return out;
}

DecodedSet decode_set(const BitString& bits, std::size_t ell) {
    DecodedSet d;
    d.coords.resize(ell);
    std::size_t pos = 0, prev = 0;
    while (pos < bits.size()) {
        auto [j, p1] = gamma_decode(bits, pos);
        if (j <= prev || j > ell) throw FormatError("decode_set: coordinate index out of order or range");
        auto [len1, p2] = gamma_decode(bits, p1);
        std::size_t len = len1 - 1;
        if (p2 + len > bits.size()) throw FormatError("decode_set: truncated coordinate");
        d.coords[j - 1] = bits.substr(p2, len);
        d.J |= CoordSet{1} << (j - 1);
        prev = j;
        pos = p2 + len;
    }
    return d;
}

Complexity set_complexity(const Decompressor& D, const Tuple& x, CoordSet J) {
    CoordSet rest = full_set(x.size()) & ~J;
    return D.complexity(encode_set(x, J), encode_set(x, rest));
}

bool sw_check(const Decompressor& D, const Tuple& x, const std::vector<std::int64_t>& k) {
    std::size_t ell = x.size();
    if (ell > kMaxSenders) throw ScaleError("sw_check: more than 20 senders");
    if (k.size() != ell) throw DimensionError("sw_check: |k| != l");
    CoordSet full = full_set(ell);
    for (CoordSet J = 1; J <= full && J != 0; ++J) {
        std::int64_t budget = 0;
        for (std::size_t j = 0; j < ell; ++j) {
            if ((J >> j) & 1U) budget += k[j];
        }
        auto c = set_complexity(D, x, J);
        if (!c || static_cast<std::int64_t>(*c) >= budget) return false;
    }
    return true;
}

SliceCert small_slices_check(const std::vector<Tuple>& S, const std::vector<double>& K) {
    SliceCert cert;
    cert.K = K;
    if (S.empty()) return cert;
    std::size_t ell = K.size();
    for (const auto& x : S) {
        if (x.size() != ell) throw DimensionError("small_slices_check: tuple size != |K|");
    }
    CoordSet full = full_set(ell);
    for (std::uint64_t J = 0; J <= full; ++J) {
        double bound = 1;
        for (std::size_t j = 0; j < ell; ++j) {
            if (!((J >> j) & 1U)) bound *= K[j];
        }
        std::unordered_map<BitString, std::size_t, BitStringHash> count;
        for (const auto& x : S) ++count[encode_set(x, static_cast<CoordSet>(J))];
        for (std::size_t i = 0; i < S.size(); ++i) {
            if (static_cast<double>(count[encode_set(S[i], static_cast<CoordSet>(J))]) > bound + 1e-9) {
                cert.verified = false;
                cert.witness = {i, static_cast<CoordSet>(J)};
                return cert;
            }
        }
    }
    return cert;
}

std::vector<Tuple> sw_suspects(const Decompressor& D, std::size_t ell,
                               const std::optional<std::vector<std::int64_t>>& gate) {
    std::vector<Tuple> out;
    CoordSet full = full_set(ell);
    D.enumerate(std::numeric_limits<std::size_t>::max(), std::nullopt, BitString{}, [&](const BitString& s) {
        DecodedSet d;
        try {
            d = decode_set(s, ell);
        } catch (const FormatError&) {
            return true;
        }
        if (d.J != full) return true;
        if (gate && !sw_check(D, d.coords, *gate)) return true;
        out.push_back(std::move(d.coords));
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------

LinePointDecompressor::LinePointDecompressor(unsigned w) : w_(w), field_(w) {
    if (w < 2 || w > 10) throw DomainError("LinePointDecompressor: w must be in [2, 10]");
}

Tuple LinePointDecompressor::tuple(std::uint32_t a, std::uint32_t b, std::uint32_t u) const {
    std::uint32_t v = field_.mul(a, u) ^ b;
    BitString line = BitString::from_uint(a, w_);
    line.append_uint(b, w_);
    BitString point = BitString::from_uint(u, w_);
    point.append_uint(v, w_);
    return {line, point};
}

bool LinePointDecompressor::incident(std::uint64_t line, std::uint64_t point) const {
    std::uint32_t mask = (1U << w_) - 1;
    auto a = static_cast<std::uint32_t>(line >> w_), b = static_cast<std::uint32_t>(line) & mask;
    auto u = static_cast<std::uint32_t>(point >> w_), v = static_cast<std::uint32_t>(point) & mask;
    return (field_.mul(a, u) ^ b) == v;
}

Complexity LinePointDecompressor::complexity(const BitString& x, const std::optional<BitString>& cond) const {
    DecodedSet dx, dc;
    try {
        dx = decode_set(x, 2);
        dc = decode_set(cond.value_or(BitString{}), 2);
    } catch (const FormatError&) {
        return std::nullopt;
    }
    if ((dx.J & dc.J) != 0 || (dx.J | dc.J) != 3U) return std::nullopt;
    const BitString& line = dx.J & 1U ? dx.coords[0] : dc.coords[0];
    const BitString& point = dx.J & 2U ? dx.coords[1] : dc.coords[1];
    if (line.size() != 2 * w_ || point.size() != 2 * w_) return std::nullopt;
    if (!incident(line.to_uint(), point.to_uint())) return std::nullopt;
    return dx.J == 3U ? 3 * w_ : w_;
}

void LinePointDecompressor::enumerate(std::size_t k, std::optional<std::size_t> n, const std::optional<BitString>& cond,
                                      const std::function<bool(const BitString&)>& sink) const {
    DecodedSet dc;
    try {
        dc = decode_set(cond.value_or(BitString{}), 2);
    } catch (const FormatError&) {
        return;
    }
    std::uint32_t N = 1U << w_;
    auto emit = [&](const Tuple& t, CoordSet J) {
        BitString s = encode_set(t, J);
        if (n && s.size() != *n) return true;
        return sink(s);
    };
    if (dc.J == 0) {
        if (3 * w_ >= k) return;
        for (std::uint32_t a = 0; a < N; ++a)
            for (std::uint32_t b = 0; b < N; ++b)
                for (std::uint32_t u = 0; u < N; ++u)
                    if (!emit(tuple(a, b, u), 3U)) return;
        return;
    }
    if (w_ >= k) return;
    if (dc.J == 2U && dc.coords[1].size() == 2 * w_) {
        std::uint64_t p = dc.coords[1].to_uint();
        auto u = static_cast<std::uint32_t>(p >> w_), v = static_cast<std::uint32_t>(p & (N - 1));
        for (std::uint32_t a = 0; a < N; ++a)
            if (!emit(tuple(a, field_.mul(a, u) ^ v, u), 1U)) return;
    } else if (dc.J == 1U && dc.coords[0].size() == 2 * w_) {
        std::uint64_t l = dc.coords[0].to_uint();
        auto a = static_cast<std::uint32_t>(l >> w_), b = static_cast<std::uint32_t>(l & (N - 1));
        for (std::uint32_t u = 0; u < N; ++u)
            if (!emit(tuple(a, b, u), 2U)) return;
    }
}

// ---------------------------------------------------------------------------

std::size_t NodePathHash::operator()(const NodePath& p) const {
    std::uint64_t h = mix64(p.size() + 0x3c6ef372fe94f82bULL);
    for (auto i : p) h = hash_combine(h, i);
    return static_cast<std::size_t>(h);
}

std::uint64_t DecodeTree::root_key() const { return mix64(seed_ ^ 0x9b05688c2b3e6c1fULL); }

std::uint64_t DecodeTree::child_key(std::uint64_t parent_key, std::uint64_t index) const {
    return hash_combine(parent_key ^ 0xa4093822299f31d0ULL, index);
}

std::uint64_t DecodeTree::child_index(std::size_t depth, std::uint64_t parent_key, std::uint64_t elem_hash) const {
    std::uint64_t h = mix64(hash_combine(parent_key, elem_hash));
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(h) * children_[depth - 1]) >> 64);
}

NodePath DecodeTree::leaf_path(const Tuple& x) const {
    if (x.size() != ell()) throw DimensionError("DecodeTree: tuple size != l");
    NodePath path;
    path.reserve(ell());
    std::uint64_t key = root_key();
    for (std::size_t j = 0; j < ell(); ++j) {
        std::uint64_t idx = child_index(j + 1, key, x[j].hash());
        path.push_back(idx);
        key = child_key(key, idx);
    }
    return path;
}

std::optional<std::uint32_t> DecodeTree::pebble(const NodePath& node) const {
    auto it = pebbles_.find(node);
    if (it == pebbles_.end()) return std::nullopt;
    return it->second;
}

void DecodeTree::place(const NodePath& node, std::uint32_t id) {
    if (!pebbles_.emplace(node, id).second) throw BoundViolation("DecodeTree: second pebble on a node");
}

DecodeTree build_tree(std::size_t ell, const std::vector<double>& K, double eps, Seed seed) {
    if (ell == 0 || ell > kMaxSenders) throw DomainError("build_tree: l must be in [1, 20]");
    if (K.size() != ell) throw DimensionError("build_tree: |K| != l");
    if (!(eps > 0 && eps <= 1)) throw DomainError("build_tree: eps must be in (0, 1]");
    DecodeTree t;
    t.K_ = K;
    t.eps_ = eps;
    t.seed_ = seed.value;
    for (double Kj : K) {
        double c = std::ceil(static_cast<double>(ell) / eps * Kj - 1e-9);
        if (!(c >= 1) || c > 9e18) throw DomainError("build_tree: child count out of range");
        t.children_.push_back(static_cast<std::uint64_t>(c));
    }
    return t;
}

std::optional<NodePath> percolate(DecodeTree& tree, const Tuple& x, std::uint32_t id) {
    NodePath leaf = tree.leaf_path(x);
    if (tree.pebble(leaf)) return std::nullopt;
    tree.place(leaf, id);
    return leaf;
}

InverseFactory code_inverses(const std::vector<Code>& y) {
    auto fps = std::make_shared<std::vector<std::pair<Fingerprint, std::uint64_t>>>();
    for (const auto& c : y) fps->emplace_back(code_fingerprint(c), c.fields().k);
    return [fps](std::size_t coord) -> std::unique_ptr<OnlineInverse> {
        const auto& [fp, k] = fps->at(coord);
        return std::make_unique<DecodeSession>(fp, k, false);
    };
}

bool TreeEvents::success() const {
    return e0 && std::all_of(e.begin(), e.end(), [](bool b) { return b; });
}

TreeDecoder::TreeDecoder(DecodeTree tree, InverseFactory make) : tree_(std::move(tree)), make_(std::move(make)) {}

TreeDecoder::Internal& TreeDecoder::internal(const NodePath& node) {
    auto it = internals_.find(node);
    if (it != internals_.end()) return it->second;
    Internal in;
    in.g = make_(node.size());
    return internals_.emplace(node, std::move(in)).first->second;
}

void TreeDecoder::feed(const Tuple& x) {
    if (x.size() != tree_.ell()) throw DimensionError("TreeDecoder::feed: tuple size != l");
    if (ids_.count(x)) return;
    auto id = static_cast<std::uint32_t>(tuples_.size());
    tuples_.push_back(x);
    ids_.emplace(x, id);
    auto leaf = percolate(tree_, x, id);
    if (!leaf) {
        ++blocked_;
        return;
    }
    NodePath node = std::move(*leaf);
    std::uint32_t cur = id;
    while (!node.empty()) {
        std::size_t j = node.size();
        std::uint64_t idx = node.back();
        node.pop_back();
        Internal& P = internal(node);
        const BitString& xj = tuples_[cur][j - 1];
        if (!P.child_of.emplace(xj, idx).second) throw BoundViolation("TreeDecoder: siblings share a coordinate");
        if (P.child_of.size() > tree_.children()[j - 1]) throw BoundViolation("TreeDecoder: sibling set over capacity");
        if (P.g->committed()) return;
        P.g->feed(xj);
        if (!P.g->committed()) return;
        auto w = P.child_of.find(*P.g->answer());
        if (w == P.child_of.end()) throw BoundViolation("TreeDecoder: inverse answered outside its set");
        NodePath child = node;
        child.push_back(w->second);
        auto winner = tree_.pebble(child);
        if (!winner) throw BoundViolation("TreeDecoder: winning child holds no pebble");
        tree_.place(node, *winner);
        cur = *winner;
    }
    answer_ = tuples_[cur];
}

TreeEvents TreeDecoder::events(const Tuple& target) const {
    TreeEvents ev;
    ev.e.assign(tree_.ell(), false);
    NodePath path = tree_.leaf_path(target);
    auto it = ids_.find(target);
    if (it != ids_.end()) {
        auto p = tree_.pebble(path);
        ev.e0 = p && *p == it->second;
    }
    for (std::size_t j = 1; j <= tree_.ell(); ++j) {
        NodePath parent(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(j - 1));
        auto in = internals_.find(parent);
        ev.e[j - 1] = in != internals_.end() && in->second.g->answer() && *in->second.g->answer() == target[j - 1];
    }
    return ev;
}

// ---------------------------------------------------------------------------

unsigned log_ell_over_eps(std::size_t ell, double eps) {
    double v = static_cast<double>(ell) / eps;
    unsigned c = 0;
    while (std::ldexp(1.0, static_cast<int>(c)) < v * (1 - 1e-12)) ++c;
    return c;
}

std::vector<double> slice_bounds(const std::vector<std::uint64_t>& kappa, double eps) {
    int c = static_cast<int>(log_ell_over_eps(kappa.size(), eps));
    std::vector<double> K;
    for (auto k : kappa) K.push_back(std::ldexp(1.0, static_cast<int>(k) - c));
    return K;
}

MultiDecodeSession::MultiDecodeSession(std::size_t ell, const std::vector<double>& K, double eps,
                                       const InverseFactory& make, const MultiDecodeOptions& opt) {
    unsigned trials = opt.mode == MultiDecodeOptions::Mode::Probabilistic ? 1 : opt.trials;
    if (trials == 0) throw DomainError("MultiDecodeSession: trials must be >= 1");
    trees_.reserve(trials);
    for (unsigned t = 0; t < trials; ++t)
        trees_.emplace_back(build_tree(ell, K, eps, Seed{derive_seed(opt.seed.value, t)}), make);
}

void MultiDecodeSession::feed(const Tuple& x) {
    for (auto& t : trees_) t.feed(x);
}

std::optional<Tuple> plurality(const std::vector<std::optional<Tuple>>& votes) {
    std::vector<std::pair<std::size_t, unsigned>> tally;  // (index of first occurrence, count)
    for (std::size_t i = 0; i < votes.size(); ++i) {
        auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& t) { return votes[t.first] == votes[i]; });
        if (it == tally.end()) {
            tally.emplace_back(i, 1);
        } else {
            ++it->second;
        }
    }
    std::optional<Tuple> best;
    unsigned best_n = 0;
    for (const auto& [i, n] : tally) {
        if (n > best_n) {
            best = votes[i];
            best_n = n;
        }
    }
    return best;
}

std::optional<Tuple> MultiDecodeSession::answer() const {
    std::vector<std::optional<Tuple>> votes;
    for (const auto& t : trees_) votes.push_back(t.answer());
    return plurality(votes);
}

namespace {

struct CodeParams {
    double eps;
    std::vector<std::uint64_t> kappa;
};

CodeParams code_params(const std::vector<Code>& y) {
    if (y.empty()) throw DomainError("decode_multi: no codes");
    CodeParams p;
    unsigned e = y[0].fields().e;
    for (const auto& c : y) {
        auto f = c.fields();
        if (f.e != e) throw DomainError("decode_multi: codes use different error exponents");
        p.kappa.push_back(f.k);
    }
    p.eps = EpsilonExp{e}.value();
    return p;
}

std::vector<std::int64_t> gate_of(const CodeParams& p) {
    auto c = static_cast<std::int64_t>(log_ell_over_eps(p.kappa.size(), p.eps));
    std::vector<std::int64_t> g;
    for (auto k : p.kappa) g.push_back(static_cast<std::int64_t>(k) - c);
    return g;
}

}  // namespace

std::optional<Tuple> decode_multi(const std::vector<Tuple>& S, const std::vector<Code>& y,
                                  const MultiDecodeOptions& opt) {
    auto p = code_params(y);
    MultiDecodeSession s(y.size(), slice_bounds(p.kappa, p.eps), p.eps, code_inverses(y), opt);
    for (const auto& x : S) s.feed(x);
    return s.answer();
}

std::optional<Tuple> decode_multi(const Decompressor& D, const std::vector<Code>& y, const MultiDecodeOptions& opt) {
    auto p = code_params(y);
    return decode_multi(sw_suspects(D, y.size(), gate_of(p)), y, opt);
}

LinePointFastResult line_point_decode_fast(const LinePointDecompressor& D, const Code& y_line, const Code& y_point,
                                           Seed tree_seed, bool gated) {
    LinePointFastResult res;
    auto p = code_params({y_line, y_point});
    if (gated && !sw_check(D, D.tuple(0, 0, 0), gate_of(p))) return res;
    res.gate_passed = true;

    const unsigned w = D.w();
    const std::uint64_t N = std::uint64_t{1} << w, NN = N * N;
    const std::size_t nb = 2 * w;
    DecodeTree tree = build_tree(2, slice_bounds(p.kappa, p.eps), p.eps, tree_seed);
    Fingerprint fpA = code_fingerprint(y_line), fpB = code_fingerprint(y_point);
    const std::uint64_t root = tree.root_key();

    std::vector<std::uint64_t> c1(NN);
    for (std::uint64_t L = 0; L < NN; ++L) c1[L] = tree.child_index(1, root, uint_bits_hash(L, nb));

    // Depth-1 nodes whose winner can make the root commit.
    std::unordered_set<std::uint64_t> relevant;
    if (fpA.layout.kind == Conductor::Kind::Identity) {
        if (fpA.body.size() == nb) relevant.insert(c1[fpA.body.to_uint()]);
    } else if (fpB.tag.p != 0) {
        std::vector<std::uint64_t> q2;
        if (fpB.layout.kind == Conductor::Kind::Identity) {
            if (fpB.body.size() == nb) q2.push_back(fpB.body.to_uint());
        } else {
            Conductor cond(fpB.layout.n, std::uint64_t{1} << fpB.layout.k, fpB.layout.eps, fpB.layout.conductor_seed);
            std::uint64_t body = fpB.body.to_uint();
            std::vector<std::uint64_t> img;
            for (std::uint64_t P = 0; P < NN; ++P) {
                if (P % fpB.tag.p != fpB.tag.residue) continue;
                cond.images_u64(P, img);
                if (std::find(img.begin(), img.end(), body) != img.end()) q2.push_back(P);
            }
        }
        for (auto P : q2) {
            auto u = static_cast<std::uint32_t>(P >> w), v = static_cast<std::uint32_t>(P & (N - 1));
            for (std::uint32_t a = 0; a < N; ++a) {
                std::uint64_t L = (std::uint64_t{a} << w) | (D.field().mul(a, u) ^ v);
                relevant.insert(c1[L]);
            }
        }
    }
    std::map<std::uint64_t, std::vector<std::uint64_t>> lines_of;
    for (std::uint64_t L = 0; L < NN; ++L) {
        if (relevant.count(c1[L])) lines_of[c1[L]].push_back(L);
    }
    res.nodes_simulated = lines_of.size();

    struct Winner {
        std::uint64_t arrival, line, point;
    };
    std::vector<Winner> winners;
    for (const auto& [node, lines] : lines_of) {
        std::uint64_t key = tree.child_key(root, node);
        std::unordered_set<std::uint64_t> occupied;
        std::unordered_map<std::uint64_t, std::uint64_t> line_at;
        DecodeSession g(fpB, p.kappa[1], false);
        bool done = false;
        for (auto L : lines) {
            auto a = static_cast<std::uint32_t>(L >> w), b = static_cast<std::uint32_t>(L & (N - 1));
            for (std::uint32_t u = 0; u < N && !done; ++u) {
                std::uint64_t P = (std::uint64_t{u} << w) | (D.field().mul(a, u) ^ b);
                if (!occupied.insert(tree.child_index(2, key, uint_bits_hash(P, nb))).second) continue;
                line_at[P] = L;
                g.feed(BitString::from_uint(P, nb));
                if (g.committed()) {
                    std::uint64_t Pw = g.answer()->to_uint();
                    winners.push_back({L * N + u, line_at.at(Pw), Pw});
                    done = true;
                }
            }
            if (done) break;
        }
    }
    std::sort(winners.begin(), winners.end(), [](const Winner& a, const Winner& b) { return a.arrival < b.arrival; });
    DecodeSession g1(fpA, p.kappa[0], false);
    for (const auto& win : winners) {
        g1.feed(BitString::from_uint(win.line, nb));
        if (!g1.committed()) continue;
        std::uint64_t L = g1.answer()->to_uint();
        for (const auto& cand : winners) {
            if (cand.line == L) res.answer = Tuple{BitString::from_uint(cand.line, nb), BitString::from_uint(cand.point, nb)};
        }
        break;
    }
    return res;
}

std::optional<Tuple> line_point_decode(const LinePointDecompressor& D, const Code& y_line, const Code& y_point,
                                       const MultiDecodeOptions& opt) {
    unsigned trials = opt.mode == MultiDecodeOptions::Mode::Probabilistic ? 1 : opt.trials;
    if (trials == 0) throw DomainError("line_point_decode: trials must be >= 1");
    std::vector<std::optional<Tuple>> votes;
    for (unsigned t = 0; t < trials; ++t)
        votes.push_back(line_point_decode_fast(D, y_line, y_point, Seed{derive_seed(opt.seed.value, t)}).answer);
    return plurality(votes);
}

std::size_t line_point_target(unsigned w, unsigned e) {
    auto c = log_ell_over_eps(2, EpsilonExp{e}.value());
    return min_length_for(e, 2 * w, 3 * w / 2 + c + 1);
}

LinePointTrial line_point_trial(const LinePointDecompressor& D, unsigned e, std::size_t m_line, std::size_t m_point,
                                Seed seed, const MultiDecodeOptions& opt) {
    LinePointTrial tr;
    LinePoint lp = line_point_instance(D.w(), Seed{derive_seed(seed.value, 0)});
    tr.x = D.tuple(lp.a.value, lp.b.value, lp.u.value);
    EpsilonExp eps{e};
    Code yA = compress(tr.x[0], eps, m_line, Seed{derive_seed(seed.value, 1)});
    Code yB = compress(tr.x[1], eps, m_point, Seed{derive_seed(seed.value, 2)});
    auto c = static_cast<std::int64_t>(log_ell_over_eps(2, eps.value()));
    std::vector<std::int64_t> k{static_cast<std::int64_t>(yA.fields().k) - c, static_cast<std::int64_t>(yB.fields().k) - c};
    tr.constraints_met = sw_check(D, tr.x, k);
    MultiDecodeOptions o = opt;
    o.seed = Seed{derive_seed(seed.value, 3)};
    tr.success = line_point_decode(D, yA, yB, o) == std::optional<Tuple>(tr.x);
    return tr;
}

// ---------------------------------------------------------------------------

SetInverse first_match_inverse(const CondenserTable& F) {
    auto f = std::make_shared<CondenserTable>(F);
    return [f](const std::vector<std::uint64_t>& S, std::uint64_t y) -> std::optional<std::uint64_t> {
        for (auto x : S) {
            for (std::uint32_t d = 0; d < f->D; ++d) {
                if ((*f)(x, d) == y) return x;
            }
        }
        return std::nullopt;
    };
}

double first_match_error(const CondenserTable& F, std::uint64_t K) {
    std::uint64_t X = F.domain();
    if (K <= 1 || X <= 1) return 0;
    std::uint64_t r = std::min<std::uint64_t>(K - 1, X - 1);
    if (static_cast<double>(X) * binomial(X - 1, r) > 2e6) throw ScaleError("first_match_error: too many sets");
    std::size_t words = static_cast<std::size_t>((F.Y + 63) / 64);
    std::vector<std::vector<std::uint64_t>> img(X, std::vector<std::uint64_t>(words, 0));
    for (std::uint64_t x = 0; x < X; ++x) {
        for (std::uint32_t d = 0; d < F.D; ++d) img[x][F(x, d) / 64] |= std::uint64_t{1} << (F(x, d) % 64);
    }
    double worst = 0;
    std::vector<std::uint64_t> others, idx(r), uni(words);
    for (std::uint64_t x = 0; x < X; ++x) {
        others.clear();
        for (std::uint64_t z = 0; z < X; ++z) {
            if (z != x) others.push_back(z);
        }
        for (std::uint64_t i = 0; i < r; ++i) idx[i] = i;
        while (true) {
            std::fill(uni.begin(), uni.end(), 0);
            for (auto i : idx) {
                for (std::size_t w = 0; w < words; ++w) uni[w] |= img[others[i]][w];
            }
            std::uint32_t hit = 0;
            for (std::uint32_t d = 0; d < F.D; ++d) hit += (uni[F(x, d) / 64] >> (F(x, d) % 64)) & 1U;
            worst = std::max(worst, static_cast<double>(hit) / F.D);
            std::int64_t i = static_cast<std::int64_t>(r) - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == others.size() - r + static_cast<std::uint64_t>(i)) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (auto t = static_cast<std::size_t>(i) + 1; t < r; ++t) idx[t] = idx[t - 1] + 1;
        }
    }
    return worst;
}

namespace {

void check_two_source(const std::vector<Pair>& S, std::uint64_t K1, std::uint64_t K2) {
    if (static_cast<double>(S.size()) > static_cast<double>(K1) * static_cast<double>(K2))
        throw DomainError("two_source: #S > K1 K2");
    std::map<std::uint64_t, std::uint64_t> rows, cols;
    std::map<Pair, int> seen;
    for (const auto& pr : S) {
        if (seen[pr]++) throw DomainError("two_source: duplicate pair");
        if (++rows[pr.first] > K2) throw DomainError("two_source: more than K2 pairs share x_1");
        if (++cols[pr.second] > K1) throw DomainError("two_source: more than K1 pairs share x_2");
    }
}

}  // namespace

std::vector<std::vector<Pair>> two_source_partition(const std::vector<Pair>& S, std::uint64_t K2) {
    if (K2 == 0) throw DomainError("two_source_partition: K2 = 0");
    std::vector<std::uint64_t> order;
    std::map<std::uint64_t, std::vector<Pair>> rows;
    for (const auto& pr : S) {
        auto& r = rows[pr.first];
        if (r.empty()) order.push_back(pr.first);
        r.push_back(pr);
    }
    std::vector<std::vector<Pair>> parts(K2);
    std::vector<std::size_t> idx(K2);
    for (auto x1 : order) {
        const auto& r = rows[x1];
        if (r.size() > K2) throw DomainError("two_source_partition: more than K2 pairs share x_1");
        for (std::size_t i = 0; i < K2; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return parts[a].size() < parts[b].size(); });
        for (std::size_t i = 0; i < r.size(); ++i) parts[idx[i]].push_back(r[i]);
    }
    return parts;
}

std::optional<Pair> two_source_invert(const SetInverse& g1, const SetInverse& g2, const std::vector<Pair>& S,
                                      std::uint64_t K1, std::uint64_t K2, std::uint64_t y1, std::uint64_t y2) {
    check_two_source(S, K1, K2);
    auto parts = two_source_partition(S, K2);
    std::map<Pair, std::size_t> part_of;
    std::vector<std::optional<std::uint64_t>> g_part(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::vector<std::uint64_t> proj;
        for (const auto& pr : parts[i]) {
            part_of[pr] = i;
            proj.push_back(pr.first);
        }
        g_part[i] = g1(proj, y1);
    }
    std::map<std::uint64_t, std::vector<std::uint64_t>> col;
    for (const auto& pr : S) col[pr.second].push_back(pr.first);
    std::map<std::uint64_t, std::optional<std::uint64_t>> g_col;
    for (const auto& [x2, xs] : col) g_col[x2] = g1(xs, y1);

    std::vector<Pair> T;
    std::vector<std::uint64_t> T2;
    for (const auto& pr : S) {
        if (g_part[part_of[pr]] == pr.first && g_col[pr.second] == pr.first) {
            T.push_back(pr);
            T2.push_back(pr.second);
        }
    }
    if (T2.size() > K2) throw BoundViolation("two_source_invert: #T_2 > K2");
    auto x2 = g2(T2, y2);
    if (!x2) return std::nullopt;
    for (const auto& pr : T) {
        if (pr.second == *x2) return pr;
    }
    return std::nullopt;
}

double two_source_failure(const CondenserTable& F1, const CondenserTable& F2, const std::vector<Pair>& S,
                          std::uint64_t K1, std::uint64_t K2) {
    auto g1 = first_match_inverse(F1), g2 = first_match_inverse(F2);
    double worst = 0;
    for (const auto& pr : S) {
        std::uint64_t miss = 0;
        for (std::uint32_t d1 = 0; d1 < F1.D; ++d1) {
            for (std::uint32_t d2 = 0; d2 < F2.D; ++d2) {
                auto r = two_source_invert(g1, g2, S, K1, K2, F1(pr.first, d1), F2(pr.second, d2));
                if (r != pr) ++miss;
            }
        }
        worst = std::max(worst, static_cast<double>(miss) / (static_cast<double>(F1.D) * F2.D));
    }
    return worst;
}

// ---------------------------------------------------------------------------

void SwInstance::validate() const {
    if (ell == 0 || ell > kMaxSenders) throw DomainError("SwInstance: l must be in [1, 20]");
    if (targets.size() != ell) throw DimensionError("SwInstance: |targets| != l");
    std::unordered_set<Tuple, TupleHash> seen;
    for (const auto& t : tuples) {
        if (t.size() != ell) throw DimensionError("SwInstance: tuple size != l");
        if (!seen.insert(t).second) throw DomainError("SwInstance: duplicate tuple");
    }
}

void write_instance(std::ostream& os, const SwInstance& inst) {
    inst.validate();
    os << "SW1 " << inst.ell << ' ' << inst.eps.e << '\n';
    for (std::size_t j = 0; j < inst.ell; ++j) os << (j ? " " : "") << inst.targets[j];
    os << '\n';
    for (const auto& t : inst.tuples) {
        for (std::size_t j = 0; j < t.size(); ++j) os << (j ? " " : "") << t[j].to_hex();
        os << '\n';
    }
    inst.D.write(os);
}

SwInstance read_instance(std::istream& is) {
    SwInstance inst;
    std::string line, magic;
    auto next = [&]() {
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };
    if (!next()) throw FormatError("instance: missing SW1 header");
    std::istringstream hs(line);
    if (!(hs >> magic >> inst.ell >> inst.eps.e) || magic != "SW1") throw FormatError("instance: bad SW1 header");
    if (inst.ell == 0 || inst.ell > kMaxSenders) throw FormatError("instance: l out of range");
    if (!next()) throw FormatError("instance: missing target line");
    std::istringstream ts(line);
    for (std::size_t m; ts >> m;) inst.targets.push_back(m);
    if (inst.targets.size() != inst.ell) throw FormatError("instance: expected l targets");
    std::stringstream dlines;
    while (next()) {
        if (line.rfind("P ", 0) == 0) {
            dlines << line << '\n';
            continue;
        }
        std::istringstream ls(line);
        Tuple t;
        for (std::string tok; ls >> tok;) t.push_back(BitString::from_hex(tok));
        if (t.size() != inst.ell) throw FormatError("instance: tuple line with wrong arity");
        inst.tuples.push_back(std::move(t));
    }
    inst.D = ToyDecompressor::read(dlines);
    try {
        inst.validate();
    } catch (const std::exception& e) {
        throw FormatError(std::string("instance: ") + e.what());
    }
    return inst;
}

std::vector<std::int64_t> sw_budget(const SwInstance& inst, const Tuple& x) {
    if (x.size() != inst.ell) throw DimensionError("sw_budget: tuple size != l");
    auto c = static_cast<std::int64_t>(log_ell_over_eps(inst.ell, inst.eps.value()));
    std::vector<std::int64_t> k;
    for (std::size_t j = 0; j < inst.ell; ++j) {
        auto kappa = choose_k(inst.eps.e, x[j].size(), inst.targets[j]);
        if (!kappa) throw CapacityExceeded("sw_budget: target too small for the code header");
        k.push_back(static_cast<std::int64_t>(*kappa) - c);
    }
    return k;
}

std::optional<Tuple> simulate_sw(const SwInstance& inst, const Tuple& x, Seed seed, const MultiDecodeOptions& opt) {
    if (x.size() != inst.ell) throw DimensionError("simulate_sw: tuple size != l");
    std::vector<Code> y;
    for (std::size_t j = 0; j < inst.ell; ++j)
        y.push_back(compress(x[j], inst.eps, inst.targets[j], Seed{derive_seed(seed.value, j)}));
    return decode_multi(inst.D, y, opt);
}

SwInstance random_sw_instance(std::size_t ell, unsigned width, std::size_t count, unsigned extra, EpsilonExp eps,
                              Seed seed) {
    if (ell == 0 || ell > kMaxSenders) throw DomainError("random_sw_instance: l must be in [1, 20]");
    if (width == 0 || width > 16) throw DomainError("random_sw_instance: width must be in [1, 16]");
    if (static_cast<double>(count) > std::ldexp(1.0, static_cast<int>(ell * width)))
        throw DomainError("random_sw_instance: more tuples than the universe holds");
    SplitMix64 rng(seed.value);
    SwInstance inst;
    inst.ell = ell;
    inst.eps = eps;
    std::unordered_set<Tuple, TupleHash> seen;
    while (inst.tuples.size() < count) {
        Tuple t;
        for (std::size_t j = 0; j < ell; ++j) t.push_back(rng.bits(width));
        if (seen.insert(t).second) inst.tuples.push_back(std::move(t));
    }
    CoordSet full = full_set(ell);
    for (CoordSet J = 1; J <= full; ++J) {
        std::map<BitString, std::vector<BitString>> groups;
        for (const auto& t : inst.tuples) groups[encode_set(t, full & ~J)].push_back(encode_set(t, J));
        for (const auto& [cond, outs] : groups) {
            auto wbits = static_cast<std::size_t>(std::bit_width(outs.size() - 1));
            for (std::size_t i = 0; i < outs.size(); ++i) {
                BitString prog = BitString::from_uint(i, wbits);
                prog.append(rng.bits(rng.below(extra + 1)));
                inst.D.add(prog, cond, outs[i]);
            }
        }
        if (J == full) break;
    }
    // Smallest uniform budget under which every tuple meets the constraints, one bit of slack,
    // and room for the log(l/eps) term of the decoder.
    std::int64_t t = 1;
    while (true) {
        std::vector<std::int64_t> k(ell, t);
        if (std::all_of(inst.tuples.begin(), inst.tuples.end(), [&](const Tuple& x) { return sw_check(inst.D, x, k); }))
            break;
        ++t;
    }
    std::uint64_t kappa = static_cast<std::uint64_t>(t) + 1 + log_ell_over_eps(ell, eps.value());
    for (std::size_t j = 0; j < ell; ++j) inst.targets.push_back(min_length_for(eps.e, width, kappa));
    return inst;
}

}  // namespace tlc
