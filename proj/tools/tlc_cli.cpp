#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/uuid/detail/sha1.hpp>

#include "tlc/analysis.hpp"
#include "tlc/compressor.hpp"
#include "tlc/condensers.hpp"
#include "tlc/distributed.hpp"
#include "tlc/errors.hpp"

using namespace tlc;

namespace {

// Exit codes: 0 done (whatever the statistical outcome), 1 usage or format error, 2 capacity.
constexpr int kExitFormat = 1;
constexpr int kExitCapacity = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Object id of a blob holding `content`, as git computes it.
std::string git_blob_sha1(const std::string& content) {
    boost::uuids::detail::sha1 h;
    std::string header = "blob " + std::to_string(content.size());
    h.process_bytes(header.data(), header.size() + 1);  // includes the terminating NUL
    h.process_bytes(content.data(), content.size());
    boost::uuids::detail::sha1::digest_type d;
    h.get_digest(d);
    char buf[41];
    for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", static_cast<unsigned>(d[i]));
    return buf;
}

BitString bytes_to_bits(const std::string& bytes) {
    BitString b;
    for (unsigned char c : bytes) b.append_uint(c, 8);
    return b;
}

std::string bits_to_bytes(const BitString& b) {
    std::string out;
    for (std::size_t i = 0; i < b.size(); i += 8) out.push_back(static_cast<char>(b.substr(i, 8).to_uint()));
    return out;
}

// Runs body(t) for t in [0, trials) on `threads` workers; results are indexed by t so the
// outcome does not depend on scheduling.
template <class F>
void parallel_trials(std::uint64_t trials, unsigned threads, F body) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(trials, 1))));
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t t; (t = next++) < trials;) body(t);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

MultiDecodeOptions::Mode parse_mode(const std::string& s) {
    return s == "probabilistic" ? MultiDecodeOptions::Mode::Probabilistic : MultiDecodeOptions::Mode::Majority;
}

// ---------------------------------------------------------------------------

struct CompressArgs {
    std::string input, bits, output;
    std::size_t m = 0;
    unsigned e = 3;
    std::uint64_t seed = 1;
};

int cmd_compress(const CompressArgs& a) {
    BitString x;
    if (!a.bits.empty()) {
        x = a.bits.find(':') != std::string::npos ? BitString::from_hex(a.bits) : BitString::from_string(a.bits);
    } else {
        x = bytes_to_bits(slurp(a.input));
    }
    EpsilonExp eps{a.e};
    Code code;
    try {
        code = compress(x, eps, a.m, Seed{a.seed});
    } catch (const CapacityExceeded& ex) {
        std::cerr << "compress: " << ex.what() << '\n';
        return kExitCapacity;
    }
    auto f = code.fields();
    std::cout << "n\t" << x.size() << "\nm\t" << code.m() << "\nk\t" << f.k << "\ndelta\t" << overhead_delta(a.e, x.size(), a.m)
              << "\nlayout\t" << fingerprint_layout(x.size(), f.k, fingerprint_eps(a.e)).describe() << '\n';
    if (!a.output.empty()) {
        std::ofstream out(a.output, std::ios::binary);
        write_code(out, code);
    } else {
        std::cout << "code\t" << code.bits.to_hex() << '\n';
    }
    return 0;
}

struct DecompressArgs {
    std::string code, decompressor, condition, output, format = "hex";
    std::uint64_t seed = 1;
};

int cmd_decompress(const DecompressArgs& a) {
    std::ifstream cin_(a.code, std::ios::binary);
    if (!cin_) throw FormatError("cannot open " + a.code);
    Code code = read_code(cin_);
    std::ifstream din(a.decompressor);
    if (!din) throw FormatError("cannot open " + a.decompressor);
    ToyDecompressor D = ToyDecompressor::read(din);
    std::optional<BitString> cond;
    if (!a.condition.empty()) cond = BitString::from_hex(a.condition);
    auto x = decompress_online(D, code, cond);
    if (!x) {
        std::cout << "result\tnot-found\n";
        return 0;
    }
    std::cout << "result\tfound\nn\t" << x->size() << '\n';
    if (a.output.empty()) {
        std::cout << "x\t" << x->to_hex() << '\n';
    } else if (a.format == "raw") {
        if (x->size() % 8 != 0) throw FormatError("decompress: raw output needs a whole number of bytes");
        std::ofstream out(a.output, std::ios::binary);
        out << bits_to_bytes(*x);
    } else {
        std::ofstream out(a.output);
        out << x->to_hex() << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string scenario = "line-point";
    std::vector<unsigned> w{8};
    std::vector<unsigned> eps_exp{3};
    std::size_t ell = 3;
    unsigned width = 4;
    std::size_t count = 24;
    unsigned extra = 2;
    std::uint64_t trials = 2000;
    std::string mode = "majority";
    unsigned majority_trials = 15;
    std::string instance;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output;

    void validate() const {
        if (trials == 0) throw FormatError("simulate-sw: trials must be >= 1");
        if (eps_exp.empty()) throw FormatError("simulate-sw: empty eps-exp grid");
        if (scenario == "line-point" && w.empty()) throw FormatError("simulate-sw: empty w grid");
        if (scenario == "instance" && instance.empty()) throw FormatError("simulate-sw: --instance is required");
    }
    std::string describe() const {
        std::ostringstream os;
        os << "# tlc simulate-sw\n# scenario=" << scenario << "\n# seed=" << seed << "\n# trials=" << trials
           << "\n# mode=" << mode << "\n# majority_trials=" << majority_trials << "\n# eps_exp=";
        for (std::size_t i = 0; i < eps_exp.size(); ++i) os << (i ? "," : "") << eps_exp[i];
        if (scenario == "line-point") {
            os << "\n# w=";
            for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
        } else if (scenario == "random") {
            os << "\n# ell=" << ell << "\n# width=" << width << "\n# count=" << count << "\n# extra=" << extra;
        } else {
            os << "\n# instance=" << instance;
        }
        os << '\n';
        return os.str();
    }
};

struct Cell {
    std::string label;
    std::size_t ell = 0;
    unsigned e = 0;
    std::string targets;
    std::uint64_t feasible = 0;
    std::uint64_t hits = 0;
};

std::string join_targets(const std::vector<std::size_t>& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s;
}

// Trials pick tuples round-robin; only tuples within the decoder's reach count toward success.
Cell run_instance(const SwInstance& inst, const std::string& label, const ExperimentConfig& cfg,
                  const MultiDecodeOptions& base) {
    Cell c{label, inst.ell, inst.eps.e, join_targets(inst.targets), 0, 0};
    if (inst.tuples.empty()) return c;
    std::vector<char> reach(inst.tuples.size());
    for (std::size_t i = 0; i < inst.tuples.size(); ++i)
        reach[i] = sw_check(inst.D, inst.tuples[i], sw_budget(inst, inst.tuples[i]));
    std::vector<char> ok(cfg.trials), in(cfg.trials);
    parallel_trials(cfg.trials, cfg.threads, [&](std::uint64_t t) {
        std::size_t i = t % inst.tuples.size();
        if (!reach[i]) return;
        in[t] = 1;
        MultiDecodeOptions o = base;
        o.seed = Seed{derive_seed(cfg.seed ^ 0x5f0d, t)};
        ok[t] = simulate_sw(inst, inst.tuples[i], Seed{derive_seed(cfg.seed, t)}, o) == std::optional<Tuple>(inst.tuples[i]);
    });
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        c.feasible += in[t];
        c.hits += ok[t];
    }
    return c;
}

int cmd_simulate_sw(const ExperimentConfig& cfg) {
    cfg.validate();
    MultiDecodeOptions base;
    base.mode = parse_mode(cfg.mode);
    base.trials = cfg.majority_trials;

    std::string content = cfg.describe();
    if (cfg.scenario == "instance") content += slurp(cfg.instance);

    std::vector<Cell> cells;
    if (cfg.scenario == "line-point") {
        for (unsigned w : cfg.w) {
            LinePointDecompressor D(w);
            for (unsigned e : cfg.eps_exp) {
                std::size_t m = line_point_target(w, e);
                Cell c{"line-point w=" + std::to_string(w), 2, e, join_targets({m, m}), 0, 0};
                std::vector<char> ok(cfg.trials), in(cfg.trials);
                parallel_trials(cfg.trials, cfg.threads, [&](std::uint64_t t) {
                    auto tr = line_point_trial(D, e, m, m, Seed{derive_seed(cfg.seed, t)}, base);
                    in[t] = tr.constraints_met;
                    ok[t] = tr.constraints_met && tr.success;
                });
                for (std::uint64_t t = 0; t < cfg.trials; ++t) {
                    c.feasible += in[t];
                    c.hits += ok[t];
                }
                cells.push_back(c);
            }
        }
    } else if (cfg.scenario == "random") {
        for (unsigned e : cfg.eps_exp) {
            auto inst = random_sw_instance(cfg.ell, cfg.width, cfg.count, cfg.extra, EpsilonExp{e},
                                           Seed{derive_seed(cfg.seed, 0x1000 + e)});
            cells.push_back(run_instance(inst, "random l=" + std::to_string(cfg.ell), cfg, base));
        }
    } else if (cfg.scenario == "instance") {
        std::ifstream in(cfg.instance);
        auto inst = read_instance(in);
        for (unsigned e : cfg.eps_exp) {
            inst.eps = EpsilonExp{e};
            cells.push_back(run_instance(inst, "instance", cfg, base));
        }
    } else {
        throw FormatError("simulate-sw: unknown scenario " + cfg.scenario);
    }

    std::ostringstream tsv;
    tsv << cfg.describe() << "# input_sha1=" << git_blob_sha1(content) << '\n';
    tsv << "cell\tell\teps_exp\ttargets\ttrials\tfeasible\tsuccesses\trate\tci_lo\tci_hi\tbound\tmeets_bound\tflag\n";
    for (const auto& c : cells) {
        double eps = EpsilonExp{c.e}.value();
        double bound = 1 - 8.0 * static_cast<double>(c.ell) * eps;
        auto p = proportion(c.hits, c.feasible);
        bool feasible = c.feasible > 0;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s\t%zu\t%u\t%s\t%llu\t%llu\t%llu\t%.4f\t%.4f\t%.4f\t%.4f\t%s\t%s\n",
                      c.label.c_str(), c.ell, c.e, c.targets.c_str(), static_cast<unsigned long long>(cfg.trials),
                      static_cast<unsigned long long>(c.feasible), static_cast<unsigned long long>(c.hits), p.rate,
                      p.lo, p.hi, bound, feasible ? (p.rate + 2 * p.sigma >= bound ? "yes" : "no") : "n/a",
                      feasible ? "ok" : "infeasible");
        tsv << buf;
    }
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        out << tsv.str();
    }
    std::cout << tsv.str();
    for (const auto& c : cells) {
        auto p = proportion(c.hits, c.feasible);
        if (c.feasible == 0) {
            std::cerr << c.label << " eps=2^-" << c.e << ": no trial meets the constraints\n";
        } else {
            std::cerr << c.label << " eps=2^-" << c.e << ": " << c.hits << "/" << c.feasible << " decoded (" << p.rate
                      << ", bound " << 1 - 8.0 * static_cast<double>(c.ell) * EpsilonExp{c.e}.value() << ")\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string table, mode = "auto";
    std::uint64_t K = 2, Kp = 0, trials = 2000, seed = 1;
    double eps = 0.25;
    bool conductor = false;
};

int cmd_verify(const VerifyArgs& a) {
    std::ifstream in(a.table);
    if (!in) throw FormatError("cannot open " + a.table);
    auto f = read_table(in);
    VerifyOptions opt;
    opt.mode = a.mode == "exhaustive" ? VerifyOptions::Mode::Exhaustive
               : a.mode == "sampled"  ? VerifyOptions::Mode::Sampled
                                      : VerifyOptions::Mode::Auto;
    opt.trials = a.trials;
    opt.seed = a.seed;
    auto cert = a.conductor ? verify_conductor(f, a.K, a.eps, opt) : verify_condenser(f, a.K, a.Kp ? a.Kp : a.K, a.eps, opt);
    std::cout << "kind\t" << (a.conductor ? "conductor" : "condenser") << "\nK\t" << cert.K << "\nK'\t" << cert.Kp
              << "\neps\t" << cert.eps << "\nmode\t" << (cert.mode == CertMode::Exact ? "exact" : "sampled")
              << "\nsets_checked\t" << cert.sets_checked << "\nworst_excess\t" << cert.worst_excess << "\nverified\t"
              << (cert.verified ? "yes" : "no") << '\n';
    if (cert.worst_set) {
        std::cout << "witness";
        for (auto x : *cert.worst_set) std::cout << '\t' << x;
        std::cout << '\n';
    }
    return 0;
}

struct SearchArgs {
    unsigned n = 3, k = 1;
    double eps = 0.5;
    std::uint64_t Y = 0, restarts = 400, seed = 7;
    std::string output;
};

int cmd_search(const SearchArgs& a) {
    auto f = search_conductor(a.n, a.k, a.eps, a.Y ? std::optional<std::uint64_t>(a.Y) : std::nullopt, a.restarts, a.seed);
    if (!f) {
        std::cout << "result\tnot-found\n";
        return 0;
    }
    std::cout << "result\tfound\nD\t" << f->D << "\nY\t" << f->Y << '\n';
    if (!a.output.empty()) {
        std::ofstream out(a.output);
        write_table(out, *f);
    } else {
        write_table(std::cout, *f);
    }
    return 0;
}

struct BoundsArgs {
    std::uint64_t n = 64;
    unsigned e = 3;
    std::vector<std::size_t> m;
    std::string table;
    std::uint64_t K = 0, seed = 1;
    double eps = 0.25;
};

int cmd_bounds(const BoundsArgs& a) {
    std::vector<BoundReport> reports;
    double eps = EpsilonExp{a.e}.value();
    std::vector<std::size_t> ms = a.m;
    if (ms.empty()) ms.push_back(min_length_for(a.e, a.n, a.n / 2));
    for (auto m : ms) {
        auto k = choose_k(a.e, a.n, m);
        if (!k) {
            std::cerr << "bounds: m = " << m << " holds no code\n";
            continue;
        }
        double delta = static_cast<double>(m - *k + 1);
        auto layout = fingerprint_layout(a.n, *k, fingerprint_eps(a.e));
        reports.push_back(overhead_lb_check(a.n, eps, delta));
        reports.push_back(randomness_lb_check(static_cast<double>(a.n), fingerprint_random_bits(layout), eps, delta));
    }
    if (!a.table.empty()) {
        std::ifstream in(a.table);
        if (!in) throw FormatError("cannot open " + a.table);
        auto f = read_table(in);
        reports.push_back(degree_lb_check(f, a.K ? a.K : 2, a.eps));
    }
    std::cout << format_reports(reports);
    return 0;
}

struct DemoArgs {
    unsigned w = 4, e = 3;
    std::uint64_t seed = 1;
    std::string mode = "majority";
    unsigned majority_trials = 15;
};

int cmd_demo(const DemoArgs& a) {
    LinePointDecompressor D(a.w);
    auto lp = line_point_instance(a.w, Seed{a.seed});
    Tuple x = D.tuple(lp.a.value, lp.b.value, lp.u.value);
    std::size_t m = line_point_target(a.w, a.e);
    EpsilonExp eps{a.e};
    Code y1 = compress(x[0], eps, m, Seed{derive_seed(a.seed, 1)});
    Code y2 = compress(x[1], eps, m, Seed{derive_seed(a.seed, 2)});
    MultiDecodeOptions opt;
    opt.mode = parse_mode(a.mode);
    opt.trials = a.majority_trials;
    opt.seed = Seed{derive_seed(a.seed, 3)};
    auto got = line_point_decode(D, y1, y2, opt);
    std::cout << "field\tGF(2^" << a.w << ")\nline\ty = " << lp.a.value << "*x + " << lp.b.value << "\npoint\t(" << lp.u.value
              << ", " << lp.v.value << ")\nsender1\t" << x[0].to_hex() << " -> " << y1.m() << " bits (k=" << y1.fields().k
              << ")\nsender2\t" << x[1].to_hex() << " -> " << y2.m() << " bits (k=" << y2.fields().k << ")\n";
    if (got) {
        std::cout << "decoded\t" << (*got)[0].to_hex() << ' ' << (*got)[1].to_hex() << '\t' << (*got == x ? "correct" : "wrong")
                  << '\n';
    } else {
        std::cout << "decoded\tnot-found\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Short-code compression toolkit"};
    app.require_subcommand(1);

    CompressArgs ca;
    auto* c = app.add_subcommand("compress", "Compress a string to exactly m bits");
    auto* in_opt = c->add_option("--input", ca.input, "File whose bytes form the string");
    c->add_option("--bits", ca.bits, "String as 0/1 digits or <nbits>:<hex>")->excludes(in_opt);
    c->add_option("--target-m", ca.m, "Code length in bits")->required();
    c->add_option("--eps-exp", ca.e, "Error 2^-e")->check(CLI::Range(1U, 60U));
    c->add_option("--seed", ca.seed);
    c->add_option("--output", ca.output, "Code file");

    DecompressArgs da;
    auto* d = app.add_subcommand("decompress", "Decode a code relative to a toy decompressor");
    d->add_option("--code", da.code)->required();
    d->add_option("--decompressor", da.decompressor)->required();
    d->add_option("--condition", da.condition, "Condition as <nbits>:<hex>");
    d->add_option("--output", da.output);
    d->add_option("--format", da.format)->check(CLI::IsMember({"hex", "raw"}));
    d->add_option("--seed", da.seed);

    ExperimentConfig cfg;
    auto* s = app.add_subcommand("simulate-sw", "Monte-Carlo distributed compression");
    s->add_option("--scenario", cfg.scenario)->check(CLI::IsMember({"line-point", "random", "instance"}));
    s->add_option("--w", cfg.w)->delimiter(',');
    s->add_option("--eps-exp", cfg.eps_exp)->delimiter(',');
    s->add_option("--ell", cfg.ell);
    s->add_option("--width", cfg.width);
    s->add_option("--count", cfg.count);
    s->add_option("--extra", cfg.extra);
    s->add_option("--trials", cfg.trials);
    s->add_option("--mode", cfg.mode)->check(CLI::IsMember({"majority", "probabilistic"}));
    s->add_option("--majority-trials", cfg.majority_trials);
    s->add_option("--instance", cfg.instance);
    s->add_option("--threads", cfg.threads);
    s->add_option("--seed", cfg.seed);
    s->add_option("--output", cfg.output, "TSV report");

    VerifyArgs va;
    auto* v = app.add_subcommand("verify-condenser", "Certify a condenser table");
    v->add_option("--table", va.table)->required();
    v->add_option("--K", va.K);
    v->add_option("--Kp", va.Kp);
    v->add_option("--eps", va.eps);
    v->add_option("--mode", va.mode)->check(CLI::IsMember({"auto", "exhaustive", "sampled"}));
    v->add_option("--trials", va.trials);
    v->add_flag("--conductor", va.conductor);
    v->add_option("--seed", va.seed);

    SearchArgs sa;
    auto* q = app.add_subcommand("search-conductor", "Search for a small-degree conductor");
    q->add_option("--n", sa.n);
    q->add_option("--k", sa.k);
    q->add_option("--eps", sa.eps);
    q->add_option("--Y", sa.Y);
    q->add_option("--restarts", sa.restarts);
    q->add_option("--seed", sa.seed);
    q->add_option("--output", sa.output);

    BoundsArgs ba;
    auto* b = app.add_subcommand("bounds", "Evaluate the lower bounds on the compressor and a table");
    b->add_option("--n", ba.n);
    b->add_option("--eps-exp", ba.e);
    b->add_option("--m", ba.m)->delimiter(',');
    b->add_option("--table", ba.table);
    b->add_option("--K", ba.K);
    b->add_option("--eps", ba.eps, "Error for the table bound");
    b->add_option("--seed", ba.seed);

    DemoArgs dm;
    auto* l = app.add_subcommand("demo-line-point", "Compress a line and a point separately and decode both");
    l->add_option("--w", dm.w)->check(CLI::Range(2U, 10U));
    l->add_option("--eps-exp", dm.e);
    l->add_option("--mode", dm.mode)->check(CLI::IsMember({"majority", "probabilistic"}));
    l->add_option("--majority-trials", dm.majority_trials);
    l->add_option("--seed", dm.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c) {
            if (ca.input.empty() && ca.bits.empty()) throw FormatError("compress: --input or --bits is required");
            return cmd_compress(ca);
        }
        if (*d) return cmd_decompress(da);
        if (*s) return cmd_simulate_sw(cfg);
        if (*v) return cmd_verify(va);
        if (*q) return cmd_search(sa);
        if (*b) return cmd_bounds(ba);
        if (*l) return cmd_demo(dm);
    } catch (const CapacityExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    }
    return 0;
}
