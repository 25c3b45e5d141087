#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlc/bitcore.hpp"
#include "tlc/condensers.hpp"
#include "tlc/hashing.hpp"

namespace tlc {

// Suspect stream over [2^n] for the table-based operations; order is arrival order.
using Stream = std::vector<std::uint64_t>;

// Counters shared by every list-inversion in the process. A violation is also thrown as BoundViolation.
struct BoundStats {
    std::atomic<std::uint64_t> invocations{0};
    std::atomic<std::uint64_t> depth_violations{0};
    std::atomic<std::uint64_t> length_violations{0};
    std::atomic<std::uint64_t> reject_violations{0};
    std::atomic<std::uint64_t> max_depth{0};
    std::atomic<std::uint64_t> max_list{0};
    void reset();
    std::uint64_t violations() const { return depth_violations + length_violations + reject_violations; }
};
BoundStats& bound_stats();

// floor(log2(2M)) for M >= 1.
unsigned log2_2m(std::uint64_t M);

// ---------------------------------------------------------------------------
// Offline operations on a table f with seed space [D]; capacity a*D per output.

// First a*D elements of S (arrival order) with y among their images.
Stream list_invert_G(const CondenserTable& f, const Stream& S, std::uint32_t y, std::uint64_t a);
// Elements x with Pr_d[x not in G(S, f(x,d))] > 2 eps. When `certified` is set the
// rejection count must be at most |S|/2, otherwise BoundViolation.
Stream rejects_R(const CondenserTable& f, const Stream& S, std::uint64_t a, double eps, bool certified = false);
// Pr_d[x not in G(S, f(x,d))], computed by enumerating all seeds.
double miss_probability(const CondenserTable& f, const Stream& S, std::uint64_t x, std::uint64_t a);

struct PruneResult {
    Stream list;  // G(S,y) ++ G(R(S),y) ++ G(R(R(S)),y) ++ ...
    unsigned depth = 0;
};
// a = 1 recursion for an (M, eps)-conductor; asserts depth <= log2(2M) and |list| <= D*log2(2M).
PruneResult prune_Gprime(const CondenserTable& f, const Stream& S, std::uint32_t y, double eps, std::uint64_t M);
// Pr_d[x not in G'(S, f(x,d))].
double prune_miss_probability(const CondenserTable& f, const Stream& S, std::uint64_t x, double eps, std::uint64_t M);

struct PruningLargeResult {
    Stream selected;
    Stream rejected;
    unsigned rounds = 0;
};
// Round-robin partition into b parts of at most M, G/R per part, recursion on the rejects while
// they exceed M/2. Asserts rounds <= log2(2b), |selected| <= a*b*D*log2(2b), |rejected| <= M/2.
PruningLargeResult pruning_large(const CondenserTable& f, const Stream& S, std::uint32_t y, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t M, double eps);

// ---------------------------------------------------------------------------
// Online list inverse with rejections. Elements arrive with their D images. An element
// is placed on level 0; it is rejected from a level when more than a 2 eps fraction of
// its seeds land on outputs that already hold `cap` earlier elements of that level, and
// then moves to the next level. Candidates for y are kept in discovery order, so the
// lists only grow by appending.
class ListInverseState {
public:
    // M: the declared capacity (stream size) for which the structural bounds are asserted.
    // Output counters are dense arrays when `dense` (default: Y <= 2^16), hash maps otherwise.
    ListInverseState(std::uint64_t D, std::uint64_t Y, std::uint64_t cap, double eps, std::uint64_t M,
                     std::optional<bool> dense = std::nullopt);

    std::uint32_t push(const std::vector<std::uint64_t>& images);
    const std::vector<std::uint32_t>& candidates(std::uint64_t y) const;

    std::size_t size() const { return level_of_.size(); }
    unsigned depth() const { return static_cast<unsigned>(levels_.size()); }
    std::size_t level_size(unsigned i) const { return levels_[i].size; }
    unsigned level_of(std::uint32_t idx) const { return level_of_[idx]; }
    std::uint64_t degree() const { return D_; }
    std::uint64_t cap() const { return cap_; }
    std::uint64_t capacity() const { return M_; }

private:
    struct Level {
        std::vector<std::uint32_t> dense;
        std::unordered_map<std::uint64_t, std::uint32_t> sparse;
        std::size_t size = 0;
    };
    std::uint32_t& count(Level& L, std::uint64_t y);
    std::vector<std::uint32_t>& cand_slot(std::uint64_t y);

    std::uint64_t D_, Y_, cap_, M_;
    double eps_;
    bool dense_;
    std::vector<Level> levels_;
    std::vector<std::vector<std::uint32_t>> cand_dense_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cand_sparse_;
    std::vector<unsigned> level_of_;
    std::vector<std::uint64_t> distinct_;
};

// ---------------------------------------------------------------------------
// Conductor fingerprint x -> (F(x), H_{eps,s}(x)).
// Wire layout: gamma(n+1) ++ gamma(bw+1) ++ body[bw] ++ gamma(B) ++ p[B] ++ gamma(B) ++ residue[B],
// with bw the conductor output width and B the fixed prime width of the tag pool.
inline constexpr std::uint64_t kPublicConductorSeed = 0x243f6a8885a308d3ULL;

struct FingerprintLayout {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    double eps = 0;  // error parameter of the conductor and of the tag
    Conductor::Kind kind = Conductor::Kind::Identity;
    std::uint64_t D = 1;
    std::uint64_t body_bits = 0;
    std::uint64_t list_capacity = 0;  // s = D * log2(2K)
    unsigned s = 0;                   // prime pool parameter
    unsigned tag_bits = 0;            // B
    std::uint64_t conductor_seed = kPublicConductorSeed;

    std::size_t total_bits() const;
    std::string describe() const;
};

FingerprintLayout fingerprint_layout(std::uint64_t n, std::uint64_t k, double eps,
                                     std::uint64_t conductor_seed = kPublicConductorSeed);
std::size_t fingerprint_length(std::uint64_t n, std::uint64_t k, double eps);

struct Fingerprint {
    FingerprintLayout layout;
    BitString body;
    PrimeHash tag;

    BitString to_bits() const;
    // Parses the wire form; k and eps are not on the wire and must be supplied.
    static Fingerprint from_bits(const BitString& bits, std::uint64_t k, double eps,
                                 std::uint64_t conductor_seed = kPublicConductorSeed);
};

Fingerprint fingerprint_F(const BitString& x, EpsilonExp eps, std::uint64_t k, Seed seed);
Fingerprint fingerprint_F(const BitString& x, double eps, std::uint64_t k, Seed seed);

// Online inverse for all fingerprints sharing a layout. Elements of other lengths are ignored.
class FingerprintInverter {
public:
    explicit FingerprintInverter(const FingerprintLayout& layout, std::optional<bool> dense = std::nullopt);

    void push(const BitString& x);
    // First candidate (discovery order) for the body whose tag matches.
    std::optional<BitString> query(const BitString& body, const PrimeHash& tag) const;
    std::optional<BitString> query(const Fingerprint& fp) const { return query(fp.body, fp.tag); }
    std::size_t size() const { return elems_.size(); }
    const BitString& element(std::uint32_t idx) const { return elems_[idx]; }
    const FingerprintLayout& layout() const { return layout_; }
    const ListInverseState* list_state() const { return state_ ? &*state_ : nullptr; }

private:
    FingerprintLayout layout_;
    std::optional<Conductor> cond_;
    std::optional<ListInverseState> state_;
    std::vector<BitString> elems_;
    std::unordered_map<BitString, std::uint32_t, BitStringHash> ident_;
    std::vector<std::uint64_t> scratch_;
};

std::optional<BitString> invert_full(const std::vector<BitString>& S, const Fingerprint& fp);

// ---------------------------------------------------------------------------
// Condenser recursion: condensers 2^{2 kappa} -> 2^kappa with kappa = ceil(k/3), followed by the
// construction for k' = 2 kappa + b, until k < 100 b, where prime hashing finishes.
struct RecursionLevel {
    std::uint64_t k = 0;
    std::uint64_t kappa = 0;
    std::uint64_t D = 0;
};

struct RecursionSchedule {
    std::uint64_t n = 0, k = 0, b = 0;
    bool identity = false;
    std::vector<RecursionLevel> levels;
    std::uint64_t final_k = 0;
    double eps_total = 0;
    double eps_level = 0;  // eps_total / (2d + 1)
    unsigned tag_s = 0;
    unsigned tag_bits = 0;  // prime width; may exceed 64 bits
    std::size_t total_bits() const;
};

// Smallest b with 2^b >= D log2(4K) for all K <= 2^n, where D is the level degree at the
// per-level error; iterated because the level count depends on b.
std::uint64_t default_recursion_b(std::uint64_t n, std::uint64_t k, double eps);
RecursionSchedule recursion_schedule(std::uint64_t n, std::uint64_t k, double eps, std::uint64_t b);

struct RecursionFingerprint {
    RecursionSchedule schedule;
    BitString identity_body;              // identity branch only
    std::vector<std::uint64_t> outputs;   // one condenser output per level
    BitString tag_p;                      // prime, tag_bits wide
    BitString tag_residue;                // x mod p, tag_bits wide
    BitString to_bits() const;
};

RecursionFingerprint condenser_recursion_F(const BitString& x, EpsilonExp eps, std::uint64_t k, Seed seed);
RecursionFingerprint condenser_recursion_F(const BitString& x, double eps, std::uint64_t k, Seed seed,
                                           std::uint64_t b);
// Level condenser of the recursion: [2^n] x [D] -> [2^kappa].
std::uint64_t recursion_condenser(const BitString& x, std::uint64_t level, std::uint64_t kappa, std::uint64_t d);
std::optional<BitString> invert_recursion(const std::vector<BitString>& S, const RecursionFingerprint& fp);

}  // namespace tlc
