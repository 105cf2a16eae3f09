// Command-line driver: optimize, sweep, oracle, variance, validate.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <iostream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "qhmft/circuit.hpp"
#include "qhmft/ed_oracle.hpp"
#include "qhmft/objective.hpp"
#include "qhmft/optimizer.hpp"
#include "qhmft/rng.hpp"
#include "qhmft/sweep.hpp"
#include "qhmft/validate.hpp"

namespace fs = std::filesystem;
using namespace qhmft;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConverged = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    int L = 2;
    int m = 2;
    bool tied = false;
    double j1 = 1.0;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = ".";
    std::string grad_mode = "adjoint";
    double fd_delta = 1e-10;
    int max_iter = 2000;
    int history = 10;
    int verbosity = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--l", o.L, "cluster linear size (even)");
    cmd->add_option("--m", o.m, "macro-layers");
    cmd->add_flag("--tied", o.tied, "tie XY/ZZ parameters (L=2 only)");
    cmd->add_option("--j1", o.j1, "NN coupling (energy unit)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "worker pool size");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_option("--grad-mode", o.grad_mode, "adjoint | fd_forward | fd_central")
        ->check(CLI::IsMember({"adjoint", "fd_forward", "fd_central"}));
    cmd->add_option("--fd-delta", o.fd_delta, "finite-difference step");
    cmd->add_option("--max-iter", o.max_iter, "optimizer iteration cap");
    cmd->add_option("--history", o.history, "quasi-Newton memory");
    cmd->add_option("-v,--verbosity", o.verbosity, "0 quiet, 1 normal");
}

GradientMode parse_grad_mode(const std::string& s) {
    if (s == "fd_forward") return GradientMode::fd_forward;
    if (s == "fd_central") return GradientMode::fd_central;
    return GradientMode::adjoint;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    return os;
}

int cmd_optimize(const CommonOpts& common, double j2, int restarts) {
    ClusterGeometry geo = build_cluster(common.L);
    CircuitSpec spec = build_circuit(common.L, common.m, common.tied);
    auto objective =
        std::make_shared<const EnergyObjective>(geo, ModelParams{common.j1, j2}, spec);

    OptimizerConfig opt;
    opt.gradient_mode = parse_grad_mode(common.grad_mode);
    opt.fd_delta = common.fd_delta;
    opt.max_iterations = common.max_iter;
    opt.history_size = common.history;

    IterationObserver observer = [&](TraceRecord& rec, const Eigen::VectorXd& x) {
        rec.order = compute_order_parameters(geo, objective->prepare(x));
    };
    MultiStartResult ms = multi_start(make_objective_fn(objective, opt), spec.n_params, restarts,
                                      common.seed, opt, common.threads, observer);
    const MinimizeResult& best = ms.best;

    SectorState state = objective->prepare(best.x);
    EnergyReport rep = objective->report(state);
    OrderParameters order = compute_order_parameters(geo, state);

    fs::path out(common.out_dir);
    auto trace_path = out / "trace.csv";
    auto report_path = out / "energy.json";
    {
        auto os = open_output(trace_path);
        write_trace_csv(os, best.trace);
    }
    {
        nlohmann::json j{{"j2", j2},
                         {"e_total", rep.e_total},
                         {"e_intra", rep.e_intra},
                         {"e_mf", rep.e_mf},
                         {"dE_dJ2", objective->dE_dJ2(state)},
                         {"m_neel", order.m_neel},
                         {"m_caf_x", order.m_caf_x},
                         {"m_caf_y", order.m_caf_y},
                         {"d_x", order.d_x},
                         {"d_y", order.d_y},
                         {"status", to_string(best.trace.status)},
                         {"seed", common.seed}};
        j["params"] = std::vector<double>(best.x.data(), best.x.data() + best.x.size());
        auto os = open_output(report_path);
        os << j.dump(2) << '\n';
    }
    if (common.verbosity > 0) {
        std::cout << "E = " << rep.e_total << "  status = " << to_string(best.trace.status)
                  << '\n';
    }
    std::cout << trace_path.string() << '\n' << report_path.string() << '\n';
    return best.trace.status == OptStatus::converged ? kExitOk : kExitNonConverged;
}

int cmd_sweep(CommonOpts& common, SweepConfig& cfg, bool resume) {
    cfg.L = common.L;
    cfg.m = common.m;
    cfg.tied = common.tied;
    cfg.j1 = common.j1;
    cfg.seed = common.seed;
    cfg.threads = common.threads;
    cfg.optimizer.gradient_mode = parse_grad_mode(common.grad_mode);
    cfg.optimizer.fd_delta = common.fd_delta;
    cfg.optimizer.max_iterations = common.max_iter;
    cfg.optimizer.history_size = common.history;

    fs::path out(common.out_dir);
    fs::path ckpt_dir = out / "checkpoints";
    if (resume) {
        cfg.resume = [ckpt_dir](const std::string& direction,
                                std::size_t idx) -> std::optional<SweepRecord> {
            fs::path p = ckpt_dir / (direction + "_" + std::to_string(idx) + ".json");
            if (!fs::exists(p)) return std::nullopt;
            std::ifstream is(p);
            std::string text((std::istreambuf_iterator<char>(is)),
                             std::istreambuf_iterator<char>());
            return record_from_json(text);
        };
    }

    std::vector<SweepRecord> records = run_sweep(cfg);

    fs::create_directories(ckpt_dir);
    std::map<std::string, std::size_t> per_direction_index;
    for (const auto& r : records) {
        std::size_t idx = per_direction_index[r.direction]++;
        auto os = open_output(ckpt_dir / (r.direction + "_" + std::to_string(idx) + ".json"));
        os << record_to_json(r) << '\n';
    }

    auto records_path = out / "records.csv";
    auto transitions_path = out / "transitions.json";
    auto metadata_path = out / "metadata.json";
    {
        auto os = open_output(records_path);
        write_records_csv(os, records);
    }
    {
        auto os = open_output(transitions_path);
        write_transitions_json(os, detect_transitions(records));
    }
    {
        auto os = open_output(metadata_path);
        os << sweep_metadata_json(cfg) << '\n';
    }
    std::cout << records_path.string() << '\n'
              << transitions_path.string() << '\n'
              << metadata_path.string() << '\n';

    for (const auto& r : records) {
        if (r.status != "converged" && r.status != "paramagnet_nonconverged") {
            return kExitNonConverged;
        }
    }
    return kExitOk;
}

int cmd_oracle(const CommonOpts& common, double j2_min, double j2_max, double step) {
    ClusterGeometry geo = build_cluster(common.L);
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double v = j2_min + i * step;
        if (v > j2_max + 1e-9) break;
        grid.push_back(std::min(v, j2_max));
    }
    ScfConfig scf;
    scf.seed = common.seed;
    std::vector<HmftPoint> points = hmft_sweep(geo, grid, scf, common.j1);
    fs::path path = fs::path(common.out_dir) / "oracle.csv";
    auto os = open_output(path);
    write_oracle_csv(os, points);
    std::cout << path.string() << '\n';
    return kExitOk;
}

int cmd_variance(const CommonOpts& common, std::vector<double> j2_list, int samples) {
    if (j2_list.empty()) j2_list = {0.0, 0.5, 1.0};
    auto points = variance_study(common.L, common.m, j2_list, samples, common.seed,
                                 common.threads);
    fs::path path = fs::path(common.out_dir) / "variance.csv";
    auto os = open_output(path);
    write_variance_csv(os, points);
    std::cout << path.string() << '\n';
    return kExitOk;
}

int cmd_validate() {
    auto checks = run_validation_suite();
    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
    }
    return all ? kExitOk : kExitNonConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster-Gutzwiller variational circuit solver for the J1-J2 model"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts common;
    double j2 = 0.0;
    int restarts = 10;
    std::vector<double> j2_range{0.0, 1.0};
    double step = 0.01;
    bool resume = false;
    std::vector<double> j2_list;
    int samples = 100;
    SweepConfig sweep_cfg;

    auto* optimize = app.add_subcommand("optimize", "single-point energy minimization");
    add_common(optimize, common);
    optimize->add_option("--j2", j2, "NNN coupling");
    optimize->add_option("--restarts", restarts, "random restarts");

    auto* sweep = app.add_subcommand("sweep", "phase-diagram sweep over J2");
    add_common(sweep, common);
    sweep->add_option("--j2-range", j2_range, "J2 range: min max")->expected(2);
    sweep->add_option("--step", step, "grid step");
    sweep->add_option("--restarts", restarts, "restarts at each extreme");
    sweep->add_option("--restart-max-iter", sweep_cfg.restart_max_iterations,
                      "iteration cap for the scouting restarts (0: full budget)");
    sweep->add_flag("--resume", resume, "reuse checkpoints in out-dir");

    auto* oracle = app.add_subcommand("oracle", "classical self-consistent ED reference sweep");
    add_common(oracle, common);
    oracle->add_option("--j2-range", j2_range, "J2 range: min max")->expected(2);
    oracle->add_option("--step", step, "grid step");

    auto* variance = app.add_subcommand("variance", "gradient-variance study");
    add_common(variance, common);
    variance->add_option("--j2-list", j2_list, "J2 values");
    variance->add_option("--samples", samples, "random initializations per point");

    app.add_subcommand("validate", "run the built-in invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand("optimize")) return cmd_optimize(common, j2, restarts);
        if (app.got_subcommand("sweep")) {
            sweep_cfg.j2_min = j2_range[0];
            sweep_cfg.j2_max = j2_range[1];
            sweep_cfg.step = step;
            sweep_cfg.extreme_restarts = restarts;
            return cmd_sweep(common, sweep_cfg, resume);
        }
        if (app.got_subcommand("oracle")) {
            return cmd_oracle(common, j2_range[0], j2_range[1], step);
        }
        if (app.got_subcommand("variance")) return cmd_variance(common, j2_list, samples);
        if (app.got_subcommand("validate")) return cmd_validate();
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}
