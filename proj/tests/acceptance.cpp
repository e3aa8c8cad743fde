// Acceptance gate: ten numbered checks, one [PASS]/[FAIL] line each.
// Run with no arguments for the full gate or with check numbers to
// select a subset; the exit code is the number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "raf/raf.hpp"

using namespace raf;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

struct Named {
    const char* name;
    SocialGraph (*build)();
    NodeId s, t;
};

// The five hand-analyzed instances used throughout the gate.
const Named kTiny[] = {
    {"line", oracle::line_graph, 0, 3},
    {"augmented", oracle::augmented_graph, 0, 3},
    {"diamond", oracle::diamond_graph, 0, 3},
    {"double-diamond", oracle::double_diamond_graph, 0, 4},
    {"pendant", oracle::pendant_graph, 0, 3},
};

std::vector<NodeId> random_subset(const std::vector<NodeId>& pool, std::mt19937_64& rng) {
    std::vector<NodeId> out;
    for (NodeId v : pool)
        if (uniform01(rng) < 0.5) out.push_back(v);
    return out;
}

// 1. Both Monte Carlo estimators agree with exact enumeration within
//    4 standard errors on random tiny instances.
Outcome check_oracle_equivalence() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(202);
    const std::uint64_t samples = 10'000;
    std::uint64_t seed = 50'000;
    double worst = 0.0;
    std::size_t checks = 0;
    for (int i = 0; i < 50; ++i) {
        std::size_t n = 4 + static_cast<std::size_t>(bounded(rng, 3));
        auto [g, st] = oracle::random_tiny_instance(n, rng);
        Instance inst(g, st.first, st.second);
        for (int j = 0; j < 5; ++j) {
            std::vector<NodeId> I = random_subset(inst.candidates, rng);
            double ex = exact_f(inst, I).mean;
            double se = std::sqrt(ex * (1.0 - ex) / static_cast<double>(samples));
            FEstimate th = estimate_f_thresholds(inst, I, samples, ++seed);
            FEstimate tr = estimate_f_traces(inst, I, samples, ++seed);
            for (double got : {th.mean, tr.mean}) {
                ++checks;
                double dev = std::abs(got - ex);
                if (se == 0.0) {
                    if (dev != 0.0) return {false, "degenerate f mismatch at exact " + fmt(ex)};
                    continue;
                }
                worst = std::max(worst, dev / se);
            }
        }
    }
    double elapsed = seconds_since(t0);
    bool pass = worst <= 4.0 && elapsed < 60.0;
    return {pass, std::to_string(checks) + " comparisons, worst deviation " + fmt(worst) +
                      " se, " + fmt(elapsed) + " s"};
}

// 2. Exhaustively over all realizations and all invitation subsets,
//    realization-side success equals (type-1 and trace contained in I).
Outcome check_trace_containment() {
    std::uint64_t violations = 0, checks = 0;
    auto sweep = [&](const Instance& inst) {
        const auto& cand = inst.candidates;
        enumerate_realizations(inst, [&](const FullRealization& sel, double p) {
            if (p == 0.0) return;
            BackwardTrace tr = trace_of(inst, sel);
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << cand.size()); ++mask) {
                std::vector<NodeId> I;
                for (std::size_t b = 0; b < cand.size(); ++b)
                    if (mask & (std::uint64_t(1) << b)) I.push_back(cand[b]);
                std::vector<char> in(inst.graph.n, 0);
                for (NodeId v : I) in[v] = 1;
                bool contained = tr.type_one();
                for (NodeId v : tr.nodes)
                    if (!in[v]) { contained = false; break; }
                bool success = forward_process2(inst, sel, I).first;
                ++checks;
                if (success != contained) ++violations;
            }
        });
    };
    for (const Named& d : kTiny) {
        oracle::Fixture fx(d.build(), d.s, d.t);
        sweep(fx.inst);
    }
    {
        oracle::Fixture fx(oracle::line5_graph(), 0, 4);
        sweep(fx.inst);
    }
    std::mt19937_64 rng(77);
    for (int i = 0; i < 5; ++i) {
        auto [g, st] = oracle::random_tiny_instance(5, rng);
        Instance inst(g, st.first, st.second);
        sweep(inst);
    }
    return {violations == 0 && checks > 0,
            std::to_string(checks) + " realization/invitation pairs, " +
                std::to_string(violations) + " violations"};
}

// 3. Hand-derived exact acceptance probabilities.
Outcome check_hand_exact_values() {
    double worst = 0.0;
    auto gap = [&worst](const Instance& inst, std::vector<NodeId> I, double want) {
        worst = std::max(worst, std::abs(exact_f(inst, I).mean - want));
    };
    {
        oracle::Fixture fx(oracle::line_graph(), 0, 3);
        gap(fx.inst, {2, 3}, 0.5);
        gap(fx.inst, {3}, 0.0);
    }
    {
        oracle::Fixture fx(oracle::augmented_graph(), 0, 3);
        gap(fx.inst, {3}, 0.5);
        gap(fx.inst, {3, 2}, 0.75);
    }
    {
        oracle::Fixture fx(oracle::diamond_graph(), 0, 3);
        gap(fx.inst, fx.inst.candidates, 1.0);
    }
    return {worst <= 1e-12, "max deviation " + fmt(worst)};
}

// 4. The stopping rule hits its advertised relative error with its
//    advertised confidence, at the expected sample cost.
Outcome check_stopping_rule() {
    oracle::Fixture fx(oracle::line_graph(), 0, 3);
    const double eps0 = 0.3, n_big = 10.0, p_true = 0.5;
    const int runs = 200;
    std::uint64_t upsilon = stopping_rule_upsilon(eps0, n_big);
    std::uint64_t hits = 0;
    double sample_sum = 0.0;
    for (int i = 0; i < runs; ++i) {
        PmaxEstimate est =
            stopping_rule_estimate(fx.inst, eps0, n_big, 0, stream_seed(4242, i));
        if (std::abs(est.p_star - p_true) <= eps0 * p_true) ++hits;
        sample_sum += static_cast<double>(est.total_samples);
    }
    double lower = oracle::wilson_lower(hits, runs);
    double mean_samples = sample_sum / runs;
    double expect = static_cast<double>(upsilon) / p_true;
    bool pass = lower >= 1.0 - 1.0 / n_big && mean_samples <= 1.5 * expect &&
                mean_samples >= expect / 1.5;
    return {pass, std::to_string(hits) + "/200 within 30%, 95% lower bound " + fmt(lower) +
                      ", mean samples " + fmt(mean_samples) + " vs " + fmt(expect)};
}

// 5. Every solver run covers at least the demanded number of type-1
//    traces, verified by an independent recount of the retained batch.
Outcome check_feasibility_recount() {
    std::uint64_t runs = 0, violations = 0, traces = 0;
    auto audit = [&](const Instance& inst, const RafSolution& sol) {
        ++runs;
        std::vector<char> in(inst.graph.n, 0);
        for (NodeId v : sol.invitation) in[v] = 1;
        std::uint64_t covered = 0;
        for (const BackwardTrace& tr : sol.batch->traces) {
            ++traces;
            if (!tr.type_one()) continue;
            bool inside = true;
            for (NodeId v : tr.nodes)
                if (!in[v]) { inside = false; break; }
            if (inside) ++covered;
        }
        if (covered != sol.covered || covered < sol.batch_summary.p) ++violations;
    };
    for (const Named& d : kTiny) {
        oracle::Fixture fx(d.build(), d.s, d.t);
        for (double alpha : {0.3, 0.5, 0.8}) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                RafOptions opt;
                opt.l_override = 500;
                opt.eval_samples = 50;
                opt.seed = seed;
                opt.keep_batch = true;
                audit(fx.inst, raf::raf(fx.inst, alpha, alpha / 10.0, 10.0, opt));
            }
        }
    }
    std::mt19937_64 rng(505);
    for (int i = 0; i < 10; ++i) {
        std::size_t n = 5 + static_cast<std::size_t>(bounded(rng, 2));
        auto [g, st] = oracle::random_tiny_instance(n, rng);
        Instance inst(g, st.first, st.second);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            RafOptions opt;
            opt.l_override = 300;
            opt.eval_samples = 50;
            opt.seed = seed;
            opt.keep_batch = true;
            try {
                audit(inst, raf::raf(inst, 0.4, 0.04, 10.0, opt));
            } catch (const PmaxTooSmallError&) {
            } catch (const InvalidParameterError&) {
            }
        }
    }
    for (std::uint64_t seed : {1, 2}) {
        oracle::Fixture fx(oracle::augmented_graph(), 0, 3);
        RafOptions opt; // derived l*
        opt.eval_samples = 50;
        opt.seed = seed;
        opt.keep_batch = true;
        audit(fx.inst, raf::raf(fx.inst, 0.9, 0.05, 100.0, opt));
    }
    return {violations == 0 && runs >= 150,
            std::to_string(runs) + " runs, " + std::to_string(traces) +
                " traces recounted, " + std::to_string(violations) + " violations"};
}

// 6. Quality and size guarantees hold with the advertised probability:
//    exact f(I*) >= (alpha-eps) p_max and |I*| <= 2 sqrt(ones) |I_alpha|
//    in at least 80% of seeded runs per instance and alpha.
Outcome check_quality_and_size() {
    const int runs = 200;
    int min_quality = runs, min_size = runs;
    std::string worst_combo = "-";
    for (const Named& d : kTiny) {
        oracle::Fixture fx(d.build(), d.s, d.t);
        double pmax = exact_f(fx.inst, fx.inst.candidates).mean;
        for (double alpha : {0.3, 0.7}) {
            double eps = alpha / 10.0;
            std::size_t i_alpha = oracle::brute_force_i_alpha(fx.inst, alpha, pmax).size();
            int q_ok = 0, s_ok = 0;
            for (int seed = 1; seed <= runs; ++seed) {
                RafOptions opt; // derived l*
                opt.eval_samples = 50;
                opt.seed = static_cast<std::uint64_t>(seed);
                RafSolution sol = raf::raf(fx.inst, alpha, eps, 10.0, opt);
                double f_star = exact_f(fx.inst, sol.invitation).mean;
                if (f_star >= (alpha - eps) * pmax - 1e-12) ++q_ok;
                double bound = 2.0 * std::sqrt(static_cast<double>(sol.batch_summary.ones)) *
                               static_cast<double>(i_alpha);
                if (static_cast<double>(sol.invitation.size()) <= bound + 1e-9) ++s_ok;
            }
            if (q_ok < min_quality || s_ok < min_size)
                worst_combo = std::string(d.name) + " alpha=" + fmt(alpha);
            min_quality = std::min(min_quality, q_ok);
            min_size = std::min(min_size, s_ok);
        }
    }
    bool pass = min_quality >= runs * 8 / 10 && min_size >= runs * 8 / 10;
    return {pass, "min quality " + std::to_string(min_quality) + "/200, min size " +
                      std::to_string(min_size) + "/200 (worst: " + worst_combo + ")"};
}

// 7. The exact candidate region attains p_max and is minimal: dropping
//    any one of its nodes strictly lowers the acceptance probability.
Outcome check_vmax_minimality() {
    std::size_t instances = 0;
    double min_gap = 1.0, max_err = 0.0;
    auto probe = [&](const Instance& inst) {
        ++instances;
        std::vector<NodeId> vmax = compute_vmax(inst, VmaxMode::Exact);
        double pmax = exact_f(inst, inst.candidates).mean;
        max_err = std::max(max_err, std::abs(exact_f(inst, vmax).mean - pmax));
        for (NodeId u : vmax) {
            std::vector<NodeId> rest;
            for (NodeId v : vmax)
                if (v != u) rest.push_back(v);
            min_gap = std::min(min_gap, pmax - exact_f(inst, rest).mean);
        }
    };
    for (const Named& d : kTiny) {
        oracle::Fixture fx(d.build(), d.s, d.t);
        probe(fx.inst);
    }
    {
        oracle::Fixture fx(oracle::line5_graph(), 0, 4);
        probe(fx.inst);
    }
    {
        oracle::Fixture fx(oracle::star_chain_graph(), 0, 3);
        probe(fx.inst);
    }
    std::mt19937_64 rng(606);
    for (int i = 0; i < 10; ++i) {
        std::size_t n = 4 + static_cast<std::size_t>(bounded(rng, 3));
        auto [g, st] = oracle::random_tiny_instance(n, rng);
        Instance inst(g, st.first, st.second);
        probe(inst);
    }
    bool pass = max_err <= 1e-12 && min_gap > 1e-12;
    return {pass, std::to_string(instances) + " instances, attainment error " + fmt(max_err) +
                      ", smallest removal gap " + fmt(min_gap)};
}

// 8. Exact cover solver matches brute force; greedy is always feasible
//    and within the 2 sqrt(|U|) factor of exact.
Outcome check_cover_solvers() {
    std::mt19937_64 rng(808);
    double worst_ratio = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::size_t u = 3 + static_cast<std::size_t>(bounded(rng, 10)); // universe <= 12
        std::size_t k = 1 + static_cast<std::size_t>(bounded(rng, 10)); // <= 10 sets
        RealizationBatch batch;
        std::vector<NodeId> universe;
        for (std::size_t v = 0; v < u; ++v) universe.push_back(static_cast<NodeId>(v));
        for (std::size_t s = 0; s < k; ++s) {
            std::vector<NodeId> nodes;
            for (std::size_t v = 0; v < u; ++v)
                if (uniform01(rng) < 0.35) nodes.push_back(static_cast<NodeId>(v));
            if (nodes.empty()) nodes.push_back(static_cast<NodeId>(bounded(rng, u)));
            std::uint64_t mult = 1 + bounded(rng, 3);
            for (std::uint64_t m = 0; m < mult; ++m) {
                BackwardTrace tr;
                tr.nodes = nodes;
                tr.terminal = TraceTerminal::ReachedSeed;
                tr.seed = 0;
                batch.traces.push_back(tr);
                ++batch.ones;
            }
        }
        batch.l = batch.ones;
        std::uint64_t p = bounded(rng, batch.ones + 1);
        CoverInstance ci = build_cover_instance(batch, universe, p);
        CoverSolution exact = solve_exact(ci);
        std::size_t brute = oracle::brute_force_cover_size(ci);
        if (!exact.exact || exact.chosen.size() != brute || exact.covered < p)
            return {false, "exact solver mismatch at instance " + std::to_string(i)};
        CoverSolution greedy = solve_greedy(ci);
        if (greedy.covered < p)
            return {false, "greedy infeasible at instance " + std::to_string(i)};
        double bound = 2.0 * std::sqrt(static_cast<double>(ci.family_size));
        if (brute == 0) {
            if (!greedy.chosen.empty())
                return {false, "greedy nonempty at zero demand"};
        } else {
            double ratio = static_cast<double>(greedy.chosen.size()) / brute;
            worst_ratio = std::max(worst_ratio, ratio / bound);
            if (ratio > bound + 1e-9)
                return {false, "greedy ratio " + fmt(ratio) + " exceeds bound " + fmt(bound)};
        }
    }
    return {true, "100 instances, worst greedy ratio at " + fmt(worst_ratio) +
                      " of the 2 sqrt(|U|) bound"};
}

// 9. On a 5k-node scale-free graph, the solver beats both baselines at
//    equal budget by more than the summed half-widths, and the candidate
//    region is strictly larger than the invitation it returns.
Outcome check_baseline_dominance() {
    auto t0 = std::chrono::steady_clock::now();
    SocialGraph g = oracle::barabasi_albert(5000, 3, 42);
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::FixedBudget;
    cfg.pair_count = 30;
    cfg.pmax_floor = 0.01;
    cfg.alpha = 0.1;
    cfg.epsilon = 0.0; // per-pair auto
    cfg.l_override = 100'000;
    cfg.eval_samples = 100'000;
    cfg.seed = 7;
    cfg.workers = 1;
    ExperimentReport rep = run_experiment(g, cfg);
    nlohmann::json j = nlohmann::json::parse(rep.json);
    const auto& agg = j["aggregates"];
    std::size_t n_ok = agg["n_ok"].get<std::size_t>();
    double margin_hd = agg["mean_f_raf"].get<double>() - agg["mean_f_hd"].get<double>();
    double margin_sp = agg["mean_f_raf"].get<double>() - agg["mean_f_sp"].get<double>();
    double hw_hd = agg["mean_hw_raf"].get<double>() + agg["mean_hw_hd"].get<double>();
    double hw_sp = agg["mean_hw_raf"].get<double>() + agg["mean_hw_sp"].get<double>();
    double ratio_sum = 0.0;
    for (const auto& row : j["per_pair"]) {
        if (row["status"] != "ok") continue;
        ratio_sum += row["vmax_size"].get<double>() / row["raf_size"].get<double>();
    }
    double mean_ratio = n_ok ? ratio_sum / static_cast<double>(n_ok) : 0.0;
    double elapsed = seconds_since(t0);
    bool pass = rep.pairs_run == 30 && n_ok == 30 && margin_hd > hw_hd &&
                margin_sp > hw_sp && mean_ratio > 1.0 && elapsed < 1800.0;
    return {pass, "hd margin " + fmt(margin_hd) + " vs hw " + fmt(hw_hd) + ", sp margin " +
                      fmt(margin_sp) + " vs hw " + fmt(hw_sp) + ", mean |V_max|/|I*| " +
                      fmt(mean_ratio) + ", " + std::to_string(n_ok) + "/30 ok, " +
                      fmt(elapsed) + " s"};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 10. The installed CLI is deterministic: reruns with the same seed give
//     byte-identical CSV bodies regardless of worker count.
Outcome check_cli_determinism() {
    SocialGraph g = oracle::barabasi_albert(300, 2, 9);
    {
        std::ofstream out("acc_graph.txt");
        for (NodeId u = 0; u < static_cast<NodeId>(g.n); ++u)
            for (NodeId v : g.adj[u])
                if (u < v) out << g.label[u] << " " << g.label[v] << "\n";
    }
    PairSampleResult ps = sample_pairs(g, 1, 0.05, 7);
    if (ps.pairs.empty()) return {false, "no screened pair found on the test graph"};
    std::string s_lbl = std::to_string(g.label[ps.pairs[0].first]);
    std::string t_lbl = std::to_string(g.label[ps.pairs[0].second]);

    const std::string cli = RAF_CLI_PATH;
    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " > /dev/null 2>> acc_cli_err.txt";
        return std::system(cmd.c_str()) == 0;
    };
    const std::string exp_common =
        " experiment --graph acc_graph.txt --experiment fixed-budget --pairs 3"
        " --pmax-floor 0.05 --alpha 0.3 --realizations 2000 --samples 2000 --seed 7";
    if (!run(exp_common + " --workers 1 --out acc_exp_w1.csv"))
        return {false, "experiment (1 worker) exited nonzero"};
    if (!run(exp_common + " --workers 3 --out acc_exp_w3.csv"))
        return {false, "experiment (3 workers) exited nonzero"};
    if (!run(exp_common + " --workers 1 --out acc_exp_w1b.csv"))
        return {false, "experiment rerun exited nonzero"};
    std::string w1 = slurp("acc_exp_w1.csv");
    if (w1.empty()) return {false, "experiment wrote an empty CSV"};
    if (w1 != slurp("acc_exp_w3.csv"))
        return {false, "experiment CSV differs across worker counts"};
    if (w1 != slurp("acc_exp_w1b.csv")) return {false, "experiment CSV differs across reruns"};

    const std::string solve_common = " solve --graph acc_graph.txt --s " + s_lbl + " --t " +
                                     t_lbl +
                                     " --alpha 0.3 --realizations 2000 --samples 2000"
                                     " --seed 5 --format csv";
    if (!run(solve_common + " --workers 1 --out acc_solve_w1.csv"))
        return {false, "solve (1 worker) exited nonzero"};
    if (!run(solve_common + " --workers 2 --out acc_solve_w2.csv"))
        return {false, "solve (2 workers) exited nonzero"};
    std::string s1 = slurp("acc_solve_w1.csv");
    if (s1.empty()) return {false, "solve wrote an empty CSV"};
    if (s1 != slurp("acc_solve_w2.csv"))
        return {false, "solve CSV differs across worker counts"};

    const std::string pmax_common = " estimate-pmax --graph acc_graph.txt --s " + s_lbl +
                                    " --t " + t_lbl + " --epsilon0 0.3 --seed 11";
    if (!run(pmax_common + " --out acc_pmax_a.csv"))
        return {false, "estimate-pmax exited nonzero"};
    if (!run(pmax_common + " --out acc_pmax_b.csv"))
        return {false, "estimate-pmax rerun exited nonzero"};
    if (slurp("acc_pmax_a.csv") != slurp("acc_pmax_b.csv"))
        return {false, "estimate-pmax CSV differs across reruns"};

    for (const char* f :
         {"acc_graph.txt", "acc_exp_w1.csv", "acc_exp_w1.csv.summary.json", "acc_exp_w3.csv",
          "acc_exp_w3.csv.summary.json", "acc_exp_w1b.csv", "acc_exp_w1b.csv.summary.json",
          "acc_solve_w1.csv", "acc_solve_w2.csv", "acc_pmax_a.csv", "acc_pmax_b.csv",
          "acc_cli_err.txt"})
        std::remove(f);
    return {true, "experiment, solve and estimate-pmax CSVs byte-identical"};
}

struct Criterion {
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {"oracle-equivalence", check_oracle_equivalence},
    {"trace-containment", check_trace_containment},
    {"hand-exact-values", check_hand_exact_values},
    {"stopping-rule-coverage", check_stopping_rule},
    {"feasibility-recount", check_feasibility_recount},
    {"quality-and-size", check_quality_and_size},
    {"vmax-minimality", check_vmax_minimality},
    {"cover-solvers", check_cover_solvers},
    {"baseline-dominance", check_baseline_dominance},
    {"cli-determinism", check_cli_determinism},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        int idx = std::atoi(argv[i]);
        if (idx < 1 || idx > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1..10 ...]\n", argv[0]);
            return 64;
        }
        selected.push_back(idx);
    }
    if (selected.empty())
        for (int i = 1; i <= 10; ++i) selected.push_back(i);

    int failures = 0;
    for (int idx : selected) {
        const Criterion& c = kCriteria[idx - 1];
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %d %s: %s\n", out.pass ? "PASS" : "FAIL", idx, c.name,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
