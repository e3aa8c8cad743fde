#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "raf/raf.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string graph_path;
    std::string weights = "recip";
    std::uint64_t s = 0;
    std::uint64_t t = 0;
    std::string out_path;
    std::string format = "csv";
};

raf::WeightScheme scheme_of(const std::string& w) {
    return w == "file" ? raf::WeightScheme::ExplicitWeights
                       : raf::WeightScheme::DegreeReciprocal;
}

raf::NodeId resolve(const raf::SocialGraph& g, std::uint64_t label, const char* what) {
    auto it = g.label_to_id.find(label);
    if (it == g.label_to_id.end())
        throw raf::InvalidParameterError(std::string(what) + " node " +
                                         std::to_string(label) + " is not in the graph");
    return it->second;
}

void emit(const CommonArgs& args, const std::string& csv, const json& j) {
    std::string text = args.format == "json" ? j.dump(2) + "\n" : csv;
    if (args.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.out_path);
    if (!out) throw raf::ParseError("cannot write output file: " + args.out_path);
    out << text;
}

std::string join_labels(const raf::SocialGraph& g, const std::vector<raf::NodeId>& nodes) {
    std::string s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) s += ";";
        s += std::to_string(g.label[nodes[i]]);
    }
    return s;
}

json label_array(const raf::SocialGraph& g, const std::vector<raf::NodeId>& nodes) {
    json a = json::array();
    for (raf::NodeId v : nodes) a.push_back(g.label[v]);
    return a;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_pair) {
    cmd->add_option("--graph", args.graph_path, "edge-list file")->required();
    cmd->add_option("--weights", args.weights, "weight scheme")
        ->check(CLI::IsMember({"recip", "file"}));
    if (needs_pair) {
        cmd->add_option("--s", args.s, "initiator node label")->required();
        cmd->add_option("--t", args.t, "target node label")->required();
    }
    cmd->add_option("--out", args.out_path, "output file (default stdout)");
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum active friending under the linear threshold model"};
    app.require_subcommand(1);

    CommonArgs args;

    // estimate-pmax
    double pm_eps0 = 0.3;
    double pm_big_n = 10.0;
    std::uint64_t pm_max_samples = 0;
    std::uint64_t pm_seed = 1;
    auto* cmd_pmax = app.add_subcommand("estimate-pmax",
                                        "estimate p_max by the stopping rule");
    add_common(cmd_pmax, args, true);
    cmd_pmax->add_option("--epsilon0", pm_eps0, "relative error target");
    cmd_pmax->add_option("--big-n", pm_big_n, "failure control parameter N");
    cmd_pmax->add_option("--max-samples", pm_max_samples, "sample budget, 0 = auto");
    cmd_pmax->add_option("--seed", pm_seed, "RNG seed");

    // solve
    double sv_alpha = 0.0;
    double sv_epsilon = 0.0;
    double sv_big_n = 10.0;
    std::uint64_t sv_l = 0;
    std::uint64_t sv_samples = 10'000;
    std::uint64_t sv_seed = 1;
    unsigned sv_workers = 1;
    bool sv_full_n = false;
    auto* cmd_solve = app.add_subcommand("solve", "run the full pipeline for one pair");
    add_common(cmd_solve, args, true);
    cmd_solve->add_option("--alpha", sv_alpha, "target fraction of p_max")->required();
    cmd_solve->add_option("--epsilon", sv_epsilon,
                          "accuracy slack, 0 = auto min(alpha/2, 1/n_eff)");
    cmd_solve->add_option("--big-n", sv_big_n, "failure control parameter N");
    cmd_solve->add_option("--realizations", sv_l, "realization count, 0 = derived l*");
    cmd_solve->add_option("--samples", sv_samples, "post-hoc f(I*) sample count");
    cmd_solve->add_option("--seed", sv_seed, "RNG seed");
    cmd_solve->add_option("--workers", sv_workers, "sampling threads");
    cmd_solve->add_flag("--full-n", sv_full_n, "use the full node count in the l* bound");

    // baseline
    std::string bl_strategy = "hd";
    std::size_t bl_k = 1;
    auto* cmd_base = app.add_subcommand("baseline", "HD or SP invitation set");
    add_common(cmd_base, args, true);
    cmd_base->add_option("--strategy", bl_strategy, "hd or sp")
        ->check(CLI::IsMember({"hd", "sp"}));
    cmd_base->add_option("--k", bl_k, "budget")->required();

    // vmax
    std::string vm_mode = "exact";
    auto* cmd_vmax = app.add_subcommand("vmax", "candidate region V_max");
    add_common(cmd_vmax, args, true);
    cmd_vmax->add_option("--mode", vm_mode, "exact or over")
        ->check(CLI::IsMember({"exact", "over"}));

    // exact-f
    std::vector<std::uint64_t> ef_invite;
    bool ef_all = false;
    auto* cmd_exact = app.add_subcommand("exact-f",
                                         "exact acceptance probability by enumeration");
    add_common(cmd_exact, args, true);
    cmd_exact->add_option("--invite", ef_invite, "invitation set as node labels")
        ->delimiter(',');
    cmd_exact->add_flag("--all", ef_all, "invite every candidate (yields p_max)");

    // experiment
    std::string ex_kind = "fixed-budget";
    std::size_t ex_pairs = 30;
    double ex_floor = 0.01;
    double ex_alpha = 0.1;
    double ex_epsilon = 0.0;
    double ex_big_n = 10.0;
    std::uint64_t ex_l = 100'000;
    std::uint64_t ex_samples = 10'000;
    std::uint64_t ex_seed = 1;
    unsigned ex_workers = 1;
    std::vector<std::uint64_t> ex_sweep = {10, 100, 1000, 10'000};
    auto* cmd_exp = app.add_subcommand("experiment", "multi-pair experiment harness");
    add_common(cmd_exp, args, false);
    cmd_exp->add_option("--experiment", ex_kind, "experiment kind")
        ->check(CLI::IsMember({"fixed-budget", "match-hd", "match-sp", "vmax-ratio",
                               "realization-sweep"}));
    cmd_exp->add_option("--pairs", ex_pairs, "number of (s,t) pairs");
    cmd_exp->add_option("--pmax-floor", ex_floor, "minimum screened p*");
    cmd_exp->add_option("--alpha", ex_alpha, "target fraction of p_max");
    cmd_exp->add_option("--epsilon", ex_epsilon, "accuracy slack, 0 = auto");
    cmd_exp->add_option("--big-n", ex_big_n, "failure control parameter N");
    cmd_exp->add_option("--realizations", ex_l, "realizations per solve");
    cmd_exp->add_option("--samples", ex_samples, "f evaluation sample count");
    cmd_exp->add_option("--seed", ex_seed, "master RNG seed");
    cmd_exp->add_option("--workers", ex_workers, "pair-level threads");
    cmd_exp->add_option("--sweep-l", ex_sweep, "realization counts for the sweep")
        ->delimiter(',');

    try {
        app.parse(argc, argv);

        if (*cmd_exp) {
            if (args.out_path.empty())
                throw raf::InvalidParameterError("experiment requires --out PATH");
            raf::ExperimentConfig cfg;
            cfg.dataset = args.graph_path;
            cfg.scheme = scheme_of(args.weights);
            static const std::map<std::string, raf::ExperimentKind> kinds = {
                {"fixed-budget", raf::ExperimentKind::FixedBudget},
                {"match-hd", raf::ExperimentKind::MatchHd},
                {"match-sp", raf::ExperimentKind::MatchSp},
                {"vmax-ratio", raf::ExperimentKind::VmaxRatio},
                {"realization-sweep", raf::ExperimentKind::RealizationSweep}};
            cfg.kind = kinds.at(ex_kind);
            cfg.pair_count = ex_pairs;
            cfg.pmax_floor = ex_floor;
            cfg.alpha = ex_alpha;
            cfg.epsilon = ex_epsilon;
            cfg.n_big = ex_big_n;
            cfg.l_override = ex_l;
            cfg.eval_samples = ex_samples;
            cfg.seed = ex_seed;
            cfg.workers = ex_workers;
            cfg.sweep_l = ex_sweep;
            cfg.out_path = args.out_path;
            raf::ExperimentReport rep = raf::run_experiment(cfg);
            if (rep.shortfall)
                std::cerr << "warning: only " << rep.pairs_run << " of "
                          << rep.pairs_requested << " pairs passed the screen\n";
            std::cout << "wrote " << args.out_path << " and " << args.out_path
                      << ".summary.json (" << rep.pairs_run << " pairs)\n";
            return 0;
        }

        raf::SocialGraph g = raf::load_edge_list_file(args.graph_path,
                                                      scheme_of(args.weights));
        raf::Instance inst(g, resolve(g, args.s, "initiator"), resolve(g, args.t, "target"));

        if (*cmd_pmax) {
            raf::PmaxEstimate est =
                raf::stopping_rule_estimate(inst, pm_eps0, pm_big_n, pm_max_samples, pm_seed);
            std::string csv = "p_star,upsilon,total_samples,epsilon0,failure_budget\n" +
                              fmt(est.p_star) + "," + std::to_string(est.upsilon) + "," +
                              std::to_string(est.total_samples) + "," + fmt(est.epsilon0) +
                              "," + fmt(est.failure_budget) + "\n";
            emit(args, csv,
                 json{{"p_star", est.p_star},
                      {"upsilon", est.upsilon},
                      {"total_samples", est.total_samples},
                      {"epsilon0", est.epsilon0},
                      {"failure_budget", est.failure_budget}});
        } else if (*cmd_solve) {
            if (sv_epsilon <= 0.0) {
                std::size_t n_eff = raf::compute_vmax(inst, raf::VmaxMode::Overapprox).size();
                if (n_eff == 0) throw raf::PmaxTooSmallError(0.0);
                sv_epsilon = std::min(sv_alpha / 2.0,
                                      1.0 / static_cast<double>(n_eff));
            }
            raf::RafOptions opt;
            opt.use_full_n = sv_full_n;
            opt.l_override = sv_l;
            opt.seed = sv_seed;
            opt.eval_samples = sv_samples;
            opt.workers = sv_workers;
            raf::RafSolution sol = raf::raf(inst, sv_alpha, sv_epsilon, sv_big_n, opt);
            std::string csv =
                "size,invitation,f_check,f_check_hw,p_star,l,ones,p_demand,covered,"
                "exact_cover,alpha,epsilon,epsilon0,epsilon1,beta,n_eff,l_star\n" +
                std::to_string(sol.invitation.size()) + "," +
                join_labels(g, sol.invitation) + "," + fmt(sol.f_check.mean) + "," +
                fmt(sol.f_check.half_width) + "," + fmt(sol.pmax_estimate.p_star) + "," +
                std::to_string(sol.config.l) + "," +
                std::to_string(sol.batch_summary.ones) + "," +
                std::to_string(sol.batch_summary.p) + "," + std::to_string(sol.covered) +
                "," + (sol.exact_cover ? "1" : "0") + "," + fmt(sol.config.alpha) + "," +
                fmt(sol.config.epsilon) + "," + fmt(sol.config.epsilon0) + "," +
                fmt(sol.config.epsilon1) + "," + fmt(sol.config.beta) + "," +
                fmt(sol.config.n_eff) + "," + std::to_string(sol.config.l_star) + "\n";
            emit(args, csv,
                 json{{"invitation", label_array(g, sol.invitation)},
                      {"size", sol.invitation.size()},
                      {"f_check", sol.f_check.mean},
                      {"f_check_hw", sol.f_check.half_width},
                      {"p_star", sol.pmax_estimate.p_star},
                      {"pmax_samples", sol.pmax_estimate.total_samples},
                      {"l", sol.config.l},
                      {"ones", sol.batch_summary.ones},
                      {"p_demand", sol.batch_summary.p},
                      {"covered", sol.covered},
                      {"exact_cover", sol.exact_cover},
                      {"config",
                       {{"alpha", sol.config.alpha},
                        {"epsilon", sol.config.epsilon},
                        {"big_n", sol.config.n_big},
                        {"epsilon0", sol.config.epsilon0},
                        {"epsilon1", sol.config.epsilon1},
                        {"beta", sol.config.beta},
                        {"n_eff", sol.config.n_eff},
                        {"l_star", sol.config.l_star}}},
                      {"seed", sv_seed}});
        } else if (*cmd_base) {
            raf::Strategy strat = bl_strategy == "sp" ? raf::Strategy::SP : raf::Strategy::HD;
            raf::BaselineResult res = raf::run_strategy(inst, strat, bl_k);
            std::string csv = "strategy,k,size,clipped,padded,nodes\n" + bl_strategy + "," +
                              std::to_string(bl_k) + "," + std::to_string(res.nodes.size()) +
                              "," + (res.clipped ? "1" : "0") + "," +
                              (res.padded ? "1" : "0") + "," + join_labels(g, res.nodes) +
                              "\n";
            emit(args, csv,
                 json{{"strategy", bl_strategy},
                      {"k", bl_k},
                      {"size", res.nodes.size()},
                      {"clipped", res.clipped},
                      {"padded", res.padded},
                      {"nodes", label_array(g, res.nodes)}});
        } else if (*cmd_vmax) {
            raf::VmaxMode mode =
                vm_mode == "over" ? raf::VmaxMode::Overapprox : raf::VmaxMode::Exact;
            std::vector<raf::NodeId> v = raf::compute_vmax(inst, mode);
            std::string csv = "mode,size,nodes\n" + vm_mode + "," +
                              std::to_string(v.size()) + "," + join_labels(g, v) + "\n";
            emit(args, csv,
                 json{{"mode", vm_mode}, {"size", v.size()}, {"nodes", label_array(g, v)}});
        } else if (*cmd_exact) {
            std::vector<raf::NodeId> I;
            if (ef_all) {
                I = inst.candidates;
            } else {
                for (std::uint64_t lbl : ef_invite)
                    I.push_back(resolve(g, lbl, "invited"));
            }
            raf::FEstimate est = raf::exact_f(inst, I);
            std::string csv = "f,size\n" + fmt(est.mean) + "," + std::to_string(I.size()) +
                              "\n";
            emit(args, csv,
                 json{{"f", est.mean}, {"size", I.size()}, {"invitation", label_array(g, I)}});
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    } catch (const raf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const raf::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const raf::PmaxTooSmallError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const raf::InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const raf::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const raf::EnumerationCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const raf::CoverIntractableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
