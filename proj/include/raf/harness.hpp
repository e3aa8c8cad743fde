#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "raf/baselines.hpp"
#include "raf/diffusion.hpp"
#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/pmax.hpp"
#include "raf/rng.hpp"
#include "raf/solver.hpp"

namespace raf {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { FixedBudget, MatchHd, MatchSp, VmaxRatio, RealizationSweep };

inline const char* experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::FixedBudget: return "fixed-budget";
        case ExperimentKind::MatchHd: return "match-hd";
        case ExperimentKind::MatchSp: return "match-sp";
        case ExperimentKind::VmaxRatio: return "vmax-ratio";
        case ExperimentKind::RealizationSweep: return "realization-sweep";
    }
    return "?";
}

struct ExperimentConfig {
    std::string dataset;
    WeightScheme scheme = WeightScheme::DegreeReciprocal;
    ExperimentKind kind = ExperimentKind::FixedBudget;
    std::size_t pair_count = 30;
    double pmax_floor = 0.01;
    double alpha = 0.1;
    double epsilon = 0.0; // 0 = per-pair auto: min(alpha/2, 1/n_eff)
    double n_big = 10.0;
    std::uint64_t l_override = 100'000;
    std::uint64_t eval_samples = 10'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t grow_k_cap = 0; // 0 = whole candidate pool
    std::vector<std::uint64_t> sweep_l = {10, 100, 1000, 10'000};
    std::string out_path; // CSV; JSON summary lands beside it
};

struct PairSampleResult {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    bool shortfall = false;
    std::uint64_t attempts = 0;
};

// Uniform node pairs passing the instance checks and a coarse
// stopping-rule screen p* >= pmax_floor (eps0 = 0.3, N = 10). Gives up
// after 1000 attempts per requested pair.
inline PairSampleResult sample_pairs(const SocialGraph& g, std::size_t pair_count,
                                     double pmax_floor, std::uint64_t seed) {
    if (!(pmax_floor > 0.0 && pmax_floor <= 1.0))
        throw InvalidParameterError("pmax_floor must lie in (0,1]");
    PairSampleResult out;
    if (g.n < 2 || pair_count == 0) {
        out.shortfall = pair_count > 0;
        return out;
    }
    const double screen_eps0 = 0.3;
    const double screen_n = 10.0;
    std::uint64_t upsilon = stopping_rule_upsilon(screen_eps0, screen_n);
    std::uint64_t budget = static_cast<std::uint64_t>(
        std::ceil(10.0 * static_cast<double>(upsilon) / pmax_floor));
    std::uint64_t cap = 1000 * static_cast<std::uint64_t>(pair_count);
    for (std::uint64_t attempt = 0; attempt < cap && out.pairs.size() < pair_count; ++attempt) {
        ++out.attempts;
        auto rng = make_stream(seed, attempt);
        NodeId s = static_cast<NodeId>(bounded(rng, g.n));
        NodeId t = static_cast<NodeId>(bounded(rng, g.n));
        if (s == t || g.has_edge(s, t)) continue;
        Instance inst(g, s, t);
        try {
            PmaxEstimate est = stopping_rule_estimate(inst, screen_eps0, screen_n, budget,
                                                      stream_seed(seed, attempt));
            if (est.p_star >= pmax_floor) out.pairs.emplace_back(s, t);
        } catch (const PmaxTooSmallError&) {
            // p_max below the floor, skip
        }
    }
    out.shortfall = out.pairs.size() < pair_count;
    return out;
}

// One output row; which fields are meaningful depends on the
// experiment. Timings stay out of the CSV so reruns are byte-identical.
struct PairRow {
    std::size_t pair_index = 0;
    std::uint64_t s_label = 0;
    std::uint64_t t_label = 0;
    std::string status = "ok";
    double epsilon = 0.0;
    double p_star = 0.0;
    std::uint64_t l = 0;
    std::uint64_t ones = 0;
    std::uint64_t p_demand = 0;
    std::uint64_t covered = 0;
    std::size_t vmax_size = 0;
    std::size_t raf_size = 0;
    std::size_t hd_size = 0;
    std::size_t sp_size = 0;
    FEstimate f_raf, f_hd, f_sp;
    std::size_t grown_k = 0;
    bool grow_reached = false;
    FEstimate f_grown;
    int f_ratio_bucket = -1; // quintile of f_base/f_raf at equal budget
    double size_ratio = 0.0; // grown k / |I_RAF|
    double vmax_ratio = 0.0; // |V_max| / |I_RAF|
    double solve_ms = 0.0;
    double baseline_ms = 0.0;
    double eval_ms = 0.0;
};

namespace detail {

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

inline double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

inline int quintile(double ratio) {
    if (ratio < 0.0) ratio = 0.0;
    int b = static_cast<int>(ratio * 5.0);
    return b > 4 ? 4 : b;
}

inline std::string csv_header(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::FixedBudget:
            return "pair,s,t,status,epsilon,p_star,l,ones,p_demand,covered,raf_size,"
                   "f_raf,f_raf_hw,f_hd,f_hd_hw,f_sp,f_sp_hw";
        case ExperimentKind::MatchHd:
        case ExperimentKind::MatchSp:
            return "pair,s,t,status,epsilon,p_star,raf_size,f_raf,f_raf_hw,"
                   "f_base,f_base_hw,bucket,grown_k,reached,size_ratio";
        case ExperimentKind::VmaxRatio:
            return "pair,s,t,status,epsilon,p_star,vmax_size,raf_size,vmax_ratio";
        case ExperimentKind::RealizationSweep:
            return "pair,s,t,status,epsilon,l,ones,p_demand,raf_size,f_raf,f_raf_hw";
    }
    return "";
}

inline std::string csv_row(ExperimentKind kind, const PairRow& r) {
    std::string line = std::to_string(r.pair_index) + "," + std::to_string(r.s_label) + "," +
                       std::to_string(r.t_label) + "," + r.status;
    auto add = [&line](const std::string& s) { line += "," + s; };
    switch (kind) {
        case ExperimentKind::FixedBudget:
            add(fmt_double(r.epsilon));
            add(fmt_double(r.p_star));
            add(std::to_string(r.l));
            add(std::to_string(r.ones));
            add(std::to_string(r.p_demand));
            add(std::to_string(r.covered));
            add(std::to_string(r.raf_size));
            add(fmt_double(r.f_raf.mean));
            add(fmt_double(r.f_raf.half_width));
            add(fmt_double(r.f_hd.mean));
            add(fmt_double(r.f_hd.half_width));
            add(fmt_double(r.f_sp.mean));
            add(fmt_double(r.f_sp.half_width));
            break;
        case ExperimentKind::MatchHd:
        case ExperimentKind::MatchSp:
            add(fmt_double(r.epsilon));
            add(fmt_double(r.p_star));
            add(std::to_string(r.raf_size));
            add(fmt_double(r.f_raf.mean));
            add(fmt_double(r.f_raf.half_width));
            add(fmt_double(r.f_grown.mean));
            add(fmt_double(r.f_grown.half_width));
            add(std::to_string(r.f_ratio_bucket));
            add(std::to_string(r.grown_k));
            add(r.grow_reached ? "1" : "0");
            add(fmt_double(r.size_ratio));
            break;
        case ExperimentKind::VmaxRatio:
            add(fmt_double(r.epsilon));
            add(fmt_double(r.p_star));
            add(std::to_string(r.vmax_size));
            add(std::to_string(r.raf_size));
            add(fmt_double(r.vmax_ratio));
            break;
        case ExperimentKind::RealizationSweep:
            add(fmt_double(r.epsilon));
            add(std::to_string(r.l));
            add(std::to_string(r.ones));
            add(std::to_string(r.p_demand));
            add(std::to_string(r.raf_size));
            add(fmt_double(r.f_raf.mean));
            add(fmt_double(r.f_raf.half_width));
            break;
    }
    return line;
}

// Everything for one (s,t): may yield several rows (the sweep).
inline std::vector<PairRow> run_pair(const SocialGraph& g, NodeId s, NodeId t,
                                     std::size_t pair_index, const ExperimentConfig& cfg,
                                     std::uint64_t pair_seed) {
    PairRow base;
    base.pair_index = pair_index;
    base.s_label = g.label[s];
    base.t_label = g.label[t];
    auto fail = [&](const std::string& status) {
        base.status = status;
        return std::vector<PairRow>{base};
    };
    std::vector<PairRow> rows;
    std::uint64_t eval_seed = stream_seed(pair_seed, 777);
    try {
        Instance inst(g, s, t);
        std::vector<NodeId> vmax = compute_vmax(inst, VmaxMode::Overapprox);
        if (vmax.empty()) return fail("pmax-zero");
        base.vmax_size = vmax.size();
        double n_eff = static_cast<double>(vmax.size());
        double eps = cfg.epsilon > 0.0 ? cfg.epsilon
                                       : std::min(cfg.alpha / 2.0, 1.0 / n_eff);
        base.epsilon = eps;

        RafOptions opt;
        opt.l_override = cfg.l_override;
        opt.eval_samples = cfg.eval_samples;
        opt.seed = pair_seed;
        opt.workers = 1; // pairs are already fanned out

        auto solve_once = [&](std::uint64_t l, std::uint64_t seed) {
            RafOptions o = opt;
            o.l_override = l;
            o.seed = seed;
            return raf(inst, cfg.alpha, eps, cfg.n_big, o);
        };

        if (cfg.kind == ExperimentKind::RealizationSweep) {
            for (std::size_t i = 0; i < cfg.sweep_l.size(); ++i) {
                PairRow row = base;
                row.l = cfg.sweep_l[i];
                double t0 = now_ms();
                try {
                    RafSolution sol = solve_once(cfg.sweep_l[i], stream_seed(pair_seed, 3000 + i));
                    row.p_star = sol.pmax_estimate.p_star;
                    row.ones = sol.batch_summary.ones;
                    row.p_demand = sol.batch_summary.p;
                    row.raf_size = sol.invitation.size();
                    row.f_raf = sol.f_check;
                } catch (const PmaxTooSmallError&) {
                    row.status = "pmax-too-small";
                }
                row.solve_ms = now_ms() - t0;
                rows.push_back(std::move(row));
            }
            return rows;
        }

        double t0 = now_ms();
        RafSolution sol = solve_once(cfg.l_override, pair_seed);
        base.solve_ms = now_ms() - t0;
        base.p_star = sol.pmax_estimate.p_star;
        base.l = sol.batch_summary.l;
        base.ones = sol.batch_summary.ones;
        base.p_demand = sol.batch_summary.p;
        base.covered = sol.covered;
        base.raf_size = sol.invitation.size();
        std::size_t k = sol.invitation.size();

        if (cfg.kind == ExperimentKind::VmaxRatio) {
            base.vmax_ratio = static_cast<double>(vmax.size()) / static_cast<double>(k);
            base.f_raf = sol.f_check;
            return {base};
        }

        double t1 = now_ms();
        // common eval stream across strategies: paired comparison
        base.f_raf = estimate_f_traces(inst, sol.invitation, cfg.eval_samples, eval_seed);
        if (cfg.kind == ExperimentKind::FixedBudget) {
            BaselineResult ihd = hd(inst, k);
            BaselineResult isp = sp(inst, k);
            base.hd_size = ihd.nodes.size();
            base.sp_size = isp.nodes.size();
            base.baseline_ms = now_ms() - t1;
            double t2 = now_ms();
            base.f_hd = estimate_f_traces(inst, ihd.nodes, cfg.eval_samples, eval_seed);
            base.f_sp = estimate_f_traces(inst, isp.nodes, cfg.eval_samples, eval_seed);
            base.eval_ms = now_ms() - t2;
            return {base};
        }

        // match experiments
        Strategy strat = cfg.kind == ExperimentKind::MatchHd ? Strategy::HD : Strategy::SP;
        BaselineResult equal = run_strategy(inst, strat, k);
        FEstimate f_equal = estimate_f_traces(inst, equal.nodes, cfg.eval_samples, eval_seed);
        base.f_grown = f_equal;
        double ratio = base.f_raf.mean > 0.0 ? f_equal.mean / base.f_raf.mean : 1.0;
        base.f_ratio_bucket = quintile(ratio);
        std::size_t cap = cfg.grow_k_cap ? cfg.grow_k_cap : inst.candidates.size();
        GrowResult grown = grow_until(inst, strat, base.f_raf.mean, cfg.eval_samples, cap,
                                      stream_seed(pair_seed, 888));
        base.grown_k = grown.k;
        base.grow_reached = grown.reached;
        base.f_grown = grown.achieved;
        base.size_ratio = k ? static_cast<double>(grown.k) / static_cast<double>(k) : 0.0;
        base.baseline_ms = now_ms() - t1;
        return {base};
    } catch (const InfeasibleError&) {
        return fail("infeasible");
    } catch (const PmaxTooSmallError&) {
        return fail("pmax-too-small");
    } catch (const InvalidParameterError&) {
        return fail("bad-params");
    }
}

} // namespace detail

struct ExperimentReport {
    std::string csv;
    std::string json;
    std::size_t pairs_requested = 0;
    std::size_t pairs_run = 0;
    bool shortfall = false;
};

inline ExperimentReport run_experiment(const SocialGraph& g, const ExperimentConfig& cfg) {
    if (!(cfg.pair_count >= 1))
        throw InvalidParameterError("pair_count must be at least 1");
    std::uint64_t sampling_seed = stream_seed(cfg.seed, 1);
    PairSampleResult ps = sample_pairs(g, cfg.pair_count, cfg.pmax_floor, sampling_seed);

    std::vector<std::vector<PairRow>> slots(ps.pairs.size());
    parallel_for(ps.pairs.size(), cfg.workers, [&](std::uint64_t i) {
        auto [s, t] = ps.pairs[i];
        std::uint64_t pair_seed = stream_seed(cfg.seed, 2 + i);
        slots[i] = detail::run_pair(g, s, t, static_cast<std::size_t>(i), cfg, pair_seed);
    });

    std::vector<PairRow> rows;
    for (auto& v : slots)
        for (auto& r : v) rows.push_back(std::move(r));

    ExperimentReport rep;
    rep.pairs_requested = cfg.pair_count;
    rep.pairs_run = ps.pairs.size();
    rep.shortfall = ps.shortfall;

    std::string csv;
    csv += "# experiment=" + std::string(experiment_name(cfg.kind)) +
           " pairs drawn uniformly over node pairs, screened at p* >= " +
           detail::fmt_double(cfg.pmax_floor) + "\n";
    csv += detail::csv_header(cfg.kind) + "\n";
    for (const auto& r : rows) csv += detail::csv_row(cfg.kind, r) + "\n";
    rep.csv = csv;

    nlohmann::json j;
    j["config"] = {
        {"dataset", cfg.dataset},
        {"weights", cfg.scheme == WeightScheme::DegreeReciprocal ? "recip" : "file"},
        {"experiment", experiment_name(cfg.kind)},
        {"pair_count", cfg.pair_count},
        {"pmax_floor", cfg.pmax_floor},
        {"alpha", cfg.alpha},
        {"epsilon", cfg.epsilon},
        {"epsilon_auto", cfg.epsilon <= 0.0},
        {"big_n", cfg.n_big},
        {"realizations", cfg.l_override},
        {"eval_samples", cfg.eval_samples},
        {"workers", cfg.workers},
        {"sweep_l", cfg.sweep_l},
        {"pair_protocol", "uniform over node pairs"},
    };
    j["seeds"] = {
        {"master", cfg.seed},
        {"pair_sampling", sampling_seed},
    };
    {
        std::vector<std::uint64_t> pair_seeds;
        for (std::size_t i = 0; i < ps.pairs.size(); ++i)
            pair_seeds.push_back(stream_seed(cfg.seed, 2 + i));
        j["seeds"]["per_pair"] = pair_seeds;
    }
    j["pairs_run"] = rep.pairs_run;
    j["shortfall"] = rep.shortfall;
    j["per_pair"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o = {
            {"pair", r.pair_index},
            {"s", r.s_label},
            {"t", r.t_label},
            {"status", r.status},
            {"epsilon", r.epsilon},
            {"p_star", r.p_star},
            {"l", r.l},
            {"ones", r.ones},
            {"p_demand", r.p_demand},
            {"covered", r.covered},
            {"vmax_size", r.vmax_size},
            {"raf_size", r.raf_size},
            {"f_raf", r.f_raf.mean},
            {"f_raf_hw", r.f_raf.half_width},
            {"timings_ms",
             {{"solve", r.solve_ms}, {"baseline", r.baseline_ms}, {"eval", r.eval_ms}}},
        };
        switch (cfg.kind) {
            case ExperimentKind::FixedBudget:
                o["f_hd"] = r.f_hd.mean;
                o["f_hd_hw"] = r.f_hd.half_width;
                o["f_sp"] = r.f_sp.mean;
                o["f_sp_hw"] = r.f_sp.half_width;
                break;
            case ExperimentKind::MatchHd:
            case ExperimentKind::MatchSp:
                o["f_base"] = r.f_grown.mean;
                o["f_base_hw"] = r.f_grown.half_width;
                o["bucket"] = r.f_ratio_bucket;
                o["grown_k"] = r.grown_k;
                o["reached"] = r.grow_reached;
                o["size_ratio"] = r.size_ratio;
                break;
            case ExperimentKind::VmaxRatio:
                o["vmax_ratio"] = r.vmax_ratio;
                break;
            case ExperimentKind::RealizationSweep:
                break;
        }
        j["per_pair"].push_back(std::move(o));
    }

    // aggregates over status = ok rows only
    nlohmann::json agg;
    auto ok_rows = [&rows]() {
        std::vector<const PairRow*> ok;
        for (const auto& r : rows)
            if (r.status == "ok") ok.push_back(&r);
        return ok;
    }();
    agg["n_ok"] = ok_rows.size();
    auto mean_of = [&](auto getter) {
        double sum = 0.0;
        for (const PairRow* r : ok_rows) sum += getter(*r);
        return ok_rows.empty() ? 0.0 : sum / static_cast<double>(ok_rows.size());
    };
    switch (cfg.kind) {
        case ExperimentKind::FixedBudget: {
            agg["mean_f_raf"] = mean_of([](const PairRow& r) { return r.f_raf.mean; });
            agg["mean_f_hd"] = mean_of([](const PairRow& r) { return r.f_hd.mean; });
            agg["mean_f_sp"] = mean_of([](const PairRow& r) { return r.f_sp.mean; });
            agg["mean_hw_raf"] = mean_of([](const PairRow& r) { return r.f_raf.half_width; });
            agg["mean_hw_hd"] = mean_of([](const PairRow& r) { return r.f_hd.half_width; });
            agg["mean_hw_sp"] = mean_of([](const PairRow& r) { return r.f_sp.half_width; });
            agg["mean_raf_size"] =
                mean_of([](const PairRow& r) { return static_cast<double>(r.raf_size); });
            break;
        }
        case ExperimentKind::MatchHd:
        case ExperimentKind::MatchSp: {
            std::vector<double> bucket_sum(5, 0.0);
            std::vector<std::size_t> bucket_n(5, 0);
            std::size_t reached = 0;
            for (const PairRow* r : ok_rows) {
                if (r->f_ratio_bucket >= 0) {
                    bucket_sum[r->f_ratio_bucket] += r->size_ratio;
                    ++bucket_n[r->f_ratio_bucket];
                }
                if (r->grow_reached) ++reached;
            }
            nlohmann::json buckets = nlohmann::json::array();
            for (int b = 0; b < 5; ++b) {
                buckets.push_back({{"bucket", b},
                                   {"count", bucket_n[b]},
                                   {"mean_size_ratio",
                                    bucket_n[b] ? bucket_sum[b] / bucket_n[b] : 0.0}});
            }
            agg["buckets"] = buckets;
            agg["reached"] = reached;
            agg["mean_size_ratio"] = mean_of([](const PairRow& r) { return r.size_ratio; });
            break;
        }
        case ExperimentKind::VmaxRatio: {
            agg["mean_vmax_size"] =
                mean_of([](const PairRow& r) { return static_cast<double>(r.vmax_size); });
            agg["mean_raf_size"] =
                mean_of([](const PairRow& r) { return static_cast<double>(r.raf_size); });
            agg["mean_vmax_ratio"] = mean_of([](const PairRow& r) { return r.vmax_ratio; });
            break;
        }
        case ExperimentKind::RealizationSweep: {
            nlohmann::json per_l = nlohmann::json::array();
            for (std::uint64_t l : cfg.sweep_l) {
                double sum = 0.0;
                std::size_t n = 0;
                for (const PairRow* r : ok_rows)
                    if (r->l == l) {
                        sum += r->f_raf.mean;
                        ++n;
                    }
                per_l.push_back(
                    {{"l", l}, {"count", n}, {"mean_f_raf", n ? sum / n : 0.0}});
            }
            agg["per_l"] = per_l;
            break;
        }
    }
    j["aggregates"] = std::move(agg);
    j["versions"] = {{"raf", kVersion}, {"report_format", 1}};
    rep.json = j.dump(2) + "\n";

    if (!cfg.out_path.empty()) {
        std::ofstream csv_out(cfg.out_path);
        if (!csv_out) throw ParseError("cannot write output file: " + cfg.out_path);
        csv_out << rep.csv;
        std::ofstream json_out(cfg.out_path + ".summary.json");
        if (!json_out) throw ParseError("cannot write output file: " + cfg.out_path + ".summary.json");
        json_out << rep.json;
    }
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    SocialGraph g = load_edge_list_file(cfg.dataset, cfg.scheme);
    return run_experiment(g, cfg);
}

} // namespace raf
