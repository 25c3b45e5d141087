#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tlc/bitcore.hpp"
#include "tlc/compressor.hpp"
#include "tlc/condensers.hpp"

namespace tlc {

using Tuple = std::vector<BitString>;

struct TupleHash {
    std::size_t operator()(const Tuple& t) const;
};

// Coordinate subsets J of [l] are bit masks; bit j-1 stands for coordinate j.
using CoordSet = std::uint32_t;
inline constexpr std::size_t kMaxSenders = 20;

CoordSet full_set(std::size_t ell);
// The set {(j, x_j) : j in J}: gamma(j) ++ gamma(|x_j|+1) ++ x_j for j ascending.
// The empty set encodes to the empty string.
BitString encode_set(const Tuple& x, CoordSet J);
struct DecodedSet {
    CoordSet J = 0;
    Tuple coords;  // size l, entries outside J are empty
};
// FormatError on malformed input or indices outside [1, l].
DecodedSet decode_set(const BitString& bits, std::size_t ell);

// C_D(x_J | x_{[l] \ J}), with the condition encoded as a set (empty string for J = [l]).
Complexity set_complexity(const Decompressor& D, const Tuple& x, CoordSet J);

// C_D(x_J | x_rest) < sum_{j in J} k_j for every nonempty J. ScaleError when l > 20.
bool sw_check(const Decompressor& D, const Tuple& x, const std::vector<std::int64_t>& k);

struct SliceCert {
    std::vector<double> K;
    bool verified = true;
    std::optional<std::pair<std::size_t, CoordSet>> witness;  // (index into S, J)
};
// #{z in S : z_J = x_J} <= prod_{j not in J} K_j for every x in S and every J.
SliceCert small_slices_check(const std::vector<Tuple>& S, const std::vector<double>& K);

// Full-set outputs of D (condition = empty set), decoded into l-tuples, in enumeration order,
// keeping only tuples for which `gate` satisfies the Slepian-Wolf constraints (when given).
std::vector<Tuple> sw_suspects(const Decompressor& D, std::size_t ell,
                               const std::optional<std::vector<std::int64_t>>& gate);

// ---------------------------------------------------------------------------
// Line and point over GF(2^w): coordinate 1 is the line a ++ b, coordinate 2 the point u ++ v.
// Programs: (a, b, u) for the pair, a for the line given the point, u for the point given the line.
class LinePointDecompressor : public Decompressor {
public:
    explicit LinePointDecompressor(unsigned w);
    unsigned w() const { return w_; }
    const GF2w& field() const { return field_; }
    Tuple tuple(std::uint32_t a, std::uint32_t b, std::uint32_t u) const;

    Complexity complexity(const BitString& x, const std::optional<BitString>& cond = std::nullopt) const override;
    void enumerate(std::size_t k, std::optional<std::size_t> n, const std::optional<BitString>& cond,
                   const std::function<bool(const BitString&)>& sink) const override;

private:
    bool incident(std::uint64_t line, std::uint64_t point) const;
    unsigned w_;
    GF2w field_;
};

// ---------------------------------------------------------------------------
// Random decode tree, materialized lazily. Depth-j nodes have children[j-1] children and the
// child of a node holding x_j is chosen by a keyed hash of (seed, node path, x_j).
using NodePath = std::vector<std::uint64_t>;

struct NodePathHash {
    std::size_t operator()(const NodePath& p) const;
};

class DecodeTree {
public:
    std::size_t ell() const { return children_.size(); }
    const std::vector<std::uint64_t>& children() const { return children_; }
    const std::vector<double>& K() const { return K_; }
    double eps() const { return eps_; }
    std::uint64_t seed() const { return seed_; }

    std::uint64_t root_key() const;
    std::uint64_t child_key(std::uint64_t parent_key, std::uint64_t index) const;
    // depth in [1, l]; elem_hash is BitString::hash() of the coordinate.
    std::uint64_t child_index(std::size_t depth, std::uint64_t parent_key, std::uint64_t elem_hash) const;
    NodePath leaf_path(const Tuple& x) const;

    // Pebble bookkeeping; place() throws BoundViolation if the node already holds one.
    std::optional<std::uint32_t> pebble(const NodePath& node) const;
    void place(const NodePath& node, std::uint32_t id);
    std::size_t pebble_count() const { return pebbles_.size(); }

private:
    friend DecodeTree build_tree(std::size_t ell, const std::vector<double>& K, double eps, Seed seed);
    std::vector<std::uint64_t> children_;
    std::vector<double> K_;
    double eps_ = 0;
    std::uint64_t seed_ = 0;
    std::unordered_map<NodePath, std::uint32_t, NodePathHash> pebbles_;
};

// ceil((l/eps) K_j) children at depth j.
DecodeTree build_tree(std::size_t ell, const std::vector<double>& K, double eps, Seed seed);
// Leaf reached by x, or nullopt (Blocked) when that leaf already holds a pebble; places the pebble.
std::optional<NodePath> percolate(DecodeTree& tree, const Tuple& x, std::uint32_t id);

// Factory for the per-node inverse g_j (coordinate index j-1).
using InverseFactory = std::function<std::unique_ptr<OnlineInverse>(std::size_t coord)>;
InverseFactory code_inverses(const std::vector<Code>& y);

struct TreeEvents {
    bool e0 = false;           // placed on a leaf
    std::vector<bool> e;       // e[j-1]: g_j on the siblings of its depth-j ancestor returns x_j
    bool success() const;
};

// Online multi-source inverse: percolation, then bubble-up through the per-node inverses.
class TreeDecoder {
public:
    TreeDecoder(DecodeTree tree, InverseFactory make);

    void feed(const Tuple& x);
    bool committed() const { return answer_.has_value(); }
    const std::optional<Tuple>& answer() const { return answer_; }
    std::size_t size() const { return tuples_.size(); }
    std::size_t blocked() const { return blocked_; }
    const DecodeTree& tree() const { return tree_; }
    // Events of the correctness argument for a fixed tuple, after the stream fed so far.
    TreeEvents events(const Tuple& target) const;

private:
    struct Internal {
        std::unique_ptr<OnlineInverse> g;
        std::unordered_map<BitString, std::uint64_t, BitStringHash> child_of;  // sibling coordinate -> child index
    };
    Internal& internal(const NodePath& node);

    DecodeTree tree_;
    InverseFactory make_;
    std::vector<Tuple> tuples_;
    std::unordered_map<Tuple, std::uint32_t, TupleHash> ids_;
    std::unordered_map<NodePath, Internal, NodePathHash> internals_;
    std::optional<Tuple> answer_;
    std::size_t blocked_ = 0;
};

// ---------------------------------------------------------------------------
struct MultiDecodeOptions {
    enum class Mode { Probabilistic, Majority };
    Mode mode = Mode::Majority;
    unsigned trials = 15;
    Seed seed{};
};

// ceil(log2(l / eps)).
unsigned log_ell_over_eps(std::size_t ell, double eps);
// Slice bound used for a code with parameter kappa: 2^(kappa - ceil(log2(l/eps))).
std::vector<double> slice_bounds(const std::vector<std::uint64_t>& kappa, double eps);

// Plurality over `trials` trees (first-seen tie-break, NotFound counts as a vote) or a single tree.
class MultiDecodeSession {
public:
    MultiDecodeSession(std::size_t ell, const std::vector<double>& K, double eps, const InverseFactory& make,
                       const MultiDecodeOptions& opt);
    void feed(const Tuple& x);
    std::optional<Tuple> answer() const;
    const std::vector<TreeDecoder>& trees() const { return trees_; }

private:
    std::vector<TreeDecoder> trees_;
};

// Decoder for codes y_1..y_l of one error exponent: S is the stream of suspects, K_j and the
// inverses come from the codes' kappa_j.
std::optional<Tuple> decode_multi(const std::vector<Tuple>& S, const std::vector<Code>& y,
                                  const MultiDecodeOptions& opt = {});
// Same, with S = sw_suspects(D, l, kappa_j - ceil(log2(l/eps))).
std::optional<Tuple> decode_multi(const Decompressor& D, const std::vector<Code>& y,
                                  const MultiDecodeOptions& opt = {});

// Exact single-tree decoding of a line-point pair that only simulates nodes able to commit.
// Matches TreeDecoder fed with sw_suspects in program order (all incident pairs when !gated).
struct LinePointFastResult {
    std::optional<Tuple> answer;
    bool gate_passed = false;
    std::size_t nodes_simulated = 0;
};
LinePointFastResult line_point_decode_fast(const LinePointDecompressor& D, const Code& y_line, const Code& y_point,
                                           Seed tree_seed, bool gated = true);
// Plurality over the same tree seeds as MultiDecodeSession, each tree decoded by the fast path.
std::optional<Tuple> line_point_decode(const LinePointDecompressor& D, const Code& y_line, const Code& y_point,
                                       const MultiDecodeOptions& opt = {});

// Most frequent value, NotFound included; ties go to the value seen first.
std::optional<Tuple> plurality(const std::vector<std::optional<Tuple>>& votes);

// Smallest target m whose code leaves m - Delta >= 3w/2 + ceil(log2(2/eps)) for a 2w-bit coordinate.
std::size_t line_point_target(unsigned w, unsigned e);
struct LinePointTrial {
    Tuple x;
    bool success = false;
    bool constraints_met = false;  // the budgets kappa_j - log(l/eps) meet the constraints for x
};
// Random incident pair, both coordinates compressed to their targets, decoded.
LinePointTrial line_point_trial(const LinePointDecompressor& D, unsigned e, std::size_t m_line, std::size_t m_point,
                                Seed seed, const MultiDecodeOptions& opt);

// ---------------------------------------------------------------------------
// Two functions with a deterministic partition (two-source product inverse).
using Pair = std::pair<std::uint64_t, std::uint64_t>;
using SetInverse = std::function<std::optional<std::uint64_t>(const std::vector<std::uint64_t>& S, std::uint64_t y)>;

// g(S, y) = first x in S whose image set contains y.
SetInverse first_match_inverse(const CondenserTable& F);
// max over x and Z of size K - 1 of Pr_d[F(x, d) in images(Z)]: the error of first_match_inverse
// on sets of size K. Exhaustive over Z; ScaleError above 2e6 sets.
double first_match_error(const CondenserTable& F, std::uint64_t K);

// Parts R_1..R_K2 of S: each x_1 sends its pairs to distinct parts of smallest size.
std::vector<std::vector<Pair>> two_source_partition(const std::vector<Pair>& S, std::uint64_t K2);
// DomainError unless #S <= K1 K2, rows (fixed x_1) <= K2 and columns (fixed x_2) <= K1.
std::optional<Pair> two_source_invert(const SetInverse& g1, const SetInverse& g2, const std::vector<Pair>& S,
                                      std::uint64_t K1, std::uint64_t K2, std::uint64_t y1, std::uint64_t y2);
// Pr over both seeds that two_source_invert with first-match inverses misses x, maximized over x in S.
double two_source_failure(const CondenserTable& F1, const CondenserTable& F2, const std::vector<Pair>& S,
                          std::uint64_t K1, std::uint64_t K2);

// ---------------------------------------------------------------------------
struct SwInstance {
    std::size_t ell = 1;
    std::vector<Tuple> tuples;
    ToyDecompressor D;
    std::vector<std::size_t> targets;
    EpsilonExp eps{};
    void validate() const;
};

// "SW1 ell eps_exp", a line of l targets, tuple lines of l hex strings, then D in its "P ..." form.
void write_instance(std::ostream& os, const SwInstance& inst);
SwInstance read_instance(std::istream& is);

// Per-sender budgets kappa_j - ceil(log2(l/eps)) of x's codes at the instance targets; x is within
// reach of the decoder when sw_check(D, x, budget) holds.
std::vector<std::int64_t> sw_budget(const SwInstance& inst, const Tuple& x);

// Compress every coordinate of x to its target with seeds derived from `seed`, then decode.
std::optional<Tuple> simulate_sw(const SwInstance& inst, const Tuple& x, Seed seed, const MultiDecodeOptions& opt);

// Random instance over `width`-bit coordinates: `count` distinct tuples and, for each J and each
// condition value, programs made of an index of ceil(log2 group) bits plus up to `extra` random bits.
SwInstance random_sw_instance(std::size_t ell, unsigned width, std::size_t count, unsigned extra, EpsilonExp eps,
                              Seed seed);

}  // namespace tlc
