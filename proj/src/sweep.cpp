#include "qhmft/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "qhmft/circuit.hpp"
#include "qhmft/rng.hpp"

namespace qhmft {

namespace {

constexpr double kOrderJumpThreshold = 0.05;
constexpr double kDerivJumpThreshold = 0.1;
constexpr double kVanishThreshold = 1e-3;

std::int64_t grid_key(double j2) { return std::llround(j2 * 1e7); }

std::vector<SweepRecord> filter_direction(const std::vector<SweepRecord>& records,
                                          const std::string& direction) {
    std::vector<SweepRecord> out;
    for (const auto& r : records) {
        if (r.direction == direction) out.push_back(r);
    }
    std::sort(out.begin(), out.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.j2 < b.j2; });
    return out;
}

struct IntervalEvent {
    double location;
    TransitionKind kind;
    std::string signal;
};

std::vector<IntervalEvent> detect_events(const std::vector<SweepRecord>& series) {
    std::vector<IntervalEvent> events;
    if (series.size() < 3) return events;

    std::vector<double> grid_deriv(series.size(), 0.0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::size_t a = (i == 0) ? 0 : i - 1;
        std::size_t b = (i + 1 == series.size()) ? i : i + 1;
        grid_deriv[i] = (series[b].energy - series[a].energy) / (series[b].j2 - series[a].j2);
    }

    // An order-parameter jump only counts as first order when it is abrupt
    // relative to the neighboring interval's trend; a square-root vanishing
    // can drop more than the threshold in its last grid interval.
    auto abrupt_jump = [&](auto&& get, std::size_t i) {
        double jump = std::abs(get(series[i + 1]) - get(series[i]));
        if (jump <= kOrderJumpThreshold) return false;
        double ref;
        if (i > 0) {
            ref = std::abs(get(series[i]) - get(series[i - 1]));
        } else if (i + 2 < series.size()) {
            ref = std::abs(get(series[i + 2]) - get(series[i + 1]));
        } else {
            ref = 0.0;
        }
        return jump > 3.0 * ref + 1e-3;
    };

    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const SweepRecord& lo = series[i];
        const SweepRecord& hi = series[i + 1];
        double mid = 0.5 * (lo.j2 + hi.j2);
        bool dn = abrupt_jump([](const SweepRecord& r) { return r.m_neel; }, i);
        bool dc = abrupt_jump([](const SweepRecord& r) { return r.m_caf(); }, i);
        double dd = std::abs(grid_deriv[i + 1] - grid_deriv[i]);

        if (dn || dc || dd > kDerivJumpThreshold) {
            std::string signal = dn ? "m_neel jump" : dc ? "m_caf jump" : "dE/dJ2 jump";
            events.push_back({mid, TransitionKind::first_order, signal});
            continue;
        }
        if (lo.m_neel >= kVanishThreshold && hi.m_neel < kVanishThreshold) {
            events.push_back({mid, TransitionKind::continuous, "m_neel vanishing"});
        } else if (lo.m_caf() >= kVanishThreshold && hi.m_caf() < kVanishThreshold) {
            events.push_back({mid, TransitionKind::continuous, "m_caf vanishing"});
        }
    }

    // coalesce neighboring events of the same kind (a jump smeared over two
    // grid intervals is one transition)
    std::vector<IntervalEvent> merged;
    double spacing = series[1].j2 - series[0].j2;
    for (const auto& ev : events) {
        if (!merged.empty() && merged.back().kind == ev.kind &&
            ev.location - merged.back().location <= 1.6 * spacing) {
            merged.back().location = 0.5 * (merged.back().location + ev.location);
        } else {
            merged.push_back(ev);
        }
    }
    return merged;
}

std::string record_status(const OptimizationTrace& trace, const OrderParameters& order) {
    if (trace.status == OptStatus::converged) return "converged";
    if (order.m_neel < kVanishThreshold && order.m_caf() < kVanishThreshold) {
        return "paramagnet_nonconverged";
    }
    return to_string(trace.status);
}

}  // namespace

std::vector<double> SweepConfig::grid() const {
    if (step <= 0) throw std::invalid_argument("SweepConfig: step must be positive");
    if (j2_min > j2_max) throw std::invalid_argument("SweepConfig: j2_min > j2_max");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        double v = j2_min + i * step;
        if (v > j2_max + 1e-9) break;
        g.push_back(std::min(v, j2_max));
    }
    return g;
}

ObjectiveFn make_objective_fn(std::shared_ptr<const EnergyObjective> objective,
                              const OptimizerConfig& config) {
    GradientMode mode = config.gradient_mode;
    double delta = config.fd_delta;
    return [objective, mode, delta](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        if (!grad) return objective->energy(x);
        switch (mode) {
            case GradientMode::adjoint: {
                ParamVector g;
                double value = objective->value_and_gradient_adjoint(x, g);
                *grad = std::move(g);
                return value;
            }
            case GradientMode::fd_forward:
                *grad = objective->gradient_fd(x, FdScheme::forward, delta);
                break;
            case GradientMode::fd_central:
                *grad = objective->gradient_fd(x, FdScheme::central, delta);
                break;
        }
        return objective->energy(x);
    };
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
    const std::vector<double> grid = config.grid();
    if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");

    const ClusterGeometry geo = build_cluster(config.L);
    const CircuitSpec spec = build_circuit(config.L, config.m, config.tied);

    auto make_objective = [&](double j2) {
        return std::make_shared<const EnergyObjective>(geo, ModelParams{config.j1, j2}, spec);
    };

    std::vector<SweepRecord> records;

    auto run_direction = [&](const std::string& name, bool ascending) {
        std::vector<std::size_t> order(grid.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (!ascending) std::reverse(order.begin(), order.end());

        double extreme = grid[order.front()];
        auto obj0 = make_objective(extreme);
        ObjectiveFn fn0 = make_objective_fn(obj0, config.optimizer);
        std::uint64_t dir_seed = derive_stream_seed(config.seed, "sweep-" + name);
        OptimizerConfig scout = config.optimizer;
        if (config.restart_max_iterations > 0) {
            scout.max_iterations = config.restart_max_iterations;
        }
        MultiStartResult ms = multi_start(fn0, spec.n_params, config.extreme_restarts, dir_seed,
                                          scout, config.threads);

        Eigen::VectorXd x = ms.best.x;
        std::vector<SweepRecord> chain(grid.size());
        for (std::size_t p = 0; p < order.size(); ++p) {
            std::size_t idx = order[p];
            if (config.resume) {
                if (auto stored = config.resume(name, idx)) {
                    SweepRecord rec = *stored;
                    rec.direction = name;
                    if (rec.params.size() == spec.n_params) x = rec.params;
                    chain[idx] = std::move(rec);
                    continue;
                }
            }
            auto obj = make_objective(grid[idx]);
            MinimizeResult r = minimize(make_objective_fn(obj, config.optimizer), x,
                                        config.optimizer);
            if (r.x.allFinite()) x = r.x;

            SectorState state = obj->prepare(r.x);
            OrderParameters op = compute_order_parameters(geo, state);
            SweepRecord rec;
            rec.j2 = grid[idx];
            rec.energy = r.value;
            rec.dE_dJ2 = obj->dE_dJ2(state);
            rec.m_neel = op.m_neel;
            rec.m_caf_x = op.m_caf_x;
            rec.m_caf_y = op.m_caf_y;
            rec.d_x = op.d_x;
            rec.d_y = op.d_y;
            rec.iterations = static_cast<int>(r.trace.records.size()) - 1;
            rec.status = record_status(r.trace, op);
            rec.direction = name;
            rec.seed = config.seed;
            rec.params = r.x;
            chain[idx] = std::move(rec);
        }
        for (std::size_t i = 0; i < chain.size(); ++i) {
            std::size_t a = (i == 0) ? 0 : i - 1;
            std::size_t b = (i + 1 == chain.size()) ? i : i + 1;
            chain[i].dE_dJ2_grid = (chain.size() < 2)
                                       ? 0.0
                                       : (chain[b].energy - chain[a].energy) /
                                             (chain[b].j2 - chain[a].j2);
        }
        records.insert(records.end(), chain.begin(), chain.end());
    };

    if (config.directions != SweepDirection::down) run_direction("up", true);
    if (config.directions != SweepDirection::up) run_direction("down", false);
    return records;
}

std::vector<SweepRecord> merge_best(const std::vector<SweepRecord>& records) {
    std::map<std::int64_t, SweepRecord> best;
    for (const auto& r : records) {
        auto key = grid_key(r.j2);
        auto it = best.find(key);
        if (it == best.end() || r.energy < it->second.energy) best[key] = r;
    }
    std::vector<SweepRecord> out;
    out.reserve(best.size());
    for (auto& [key, r] : best) out.push_back(std::move(r));
    return out;
}

TransitionReport detect_transitions(const std::vector<SweepRecord>& records) {
    std::vector<SweepRecord> merged = merge_best(records);
    if (merged.size() < 3) {
        throw std::invalid_argument("detect_transitions: need at least 3 grid points");
    }

    TransitionReport report;
    auto up_events = detect_events(filter_direction(records, "up"));
    auto down_events = detect_events(filter_direction(records, "down"));

    for (const IntervalEvent& ev : detect_events(merged)) {
        Transition t;
        t.location = ev.location;
        t.kind = ev.kind;
        t.signal = ev.signal;
        if (ev.kind == TransitionKind::first_order) {
            auto nearest = [&](const std::vector<IntervalEvent>& evs) -> std::optional<double> {
                std::optional<double> loc;
                for (const auto& e : evs) {
                    if (e.kind != TransitionKind::first_order) continue;
                    if (std::abs(e.location - ev.location) > 0.1) continue;
                    if (!loc || std::abs(e.location - ev.location) < std::abs(*loc - ev.location)) {
                        loc = e.location;
                    }
                }
                return loc;
            };
            auto u = nearest(up_events);
            auto d = nearest(down_events);
            if (u && d) t.hysteresis_window = std::abs(*u - *d);
        }
        report.transitions.push_back(std::move(t));
    }
    return report;
}

Phase classify_phase(const SweepRecord& r) {
    double caf = r.m_caf();
    bool mags_null = r.m_neel < kVanishThreshold && caf < kVanishThreshold;
    if (r.m_neel > 0.05 && r.m_neel >= caf) return Phase::neel;
    if (caf > 0.05 && caf > r.m_neel) return Phase::caf;
    if (mags_null && std::abs(r.d_x) > 0.01 && std::abs(r.d_y) > 0.01) {
        double rel = std::abs(r.d_x - r.d_y) / std::max(std::abs(r.d_x), std::abs(r.d_y));
        if (rel < 0.2) return Phase::plaquette_vbs;
    }
    return Phase::undetermined;
}

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::neel: return "neel";
        case Phase::caf: return "caf";
        case Phase::plaquette_vbs: return "plaquette_vbs";
        case Phase::undetermined: return "undetermined";
    }
    return "unknown";
}

std::vector<VariancePoint> variance_study(int L, int m, const std::vector<double>& j2_list,
                                          int n_samples, std::uint64_t seed, int threads) {
    if (n_samples < 2) throw std::invalid_argument("variance_study: n_samples must be >= 2");
    const ClusterGeometry geo = build_cluster(L);
    // the 2x2 ansatz is used in its shared-parameter form throughout
    const CircuitSpec spec = build_circuit(L, m, L == 2);

    std::vector<VariancePoint> points;
    for (double j2 : j2_list) {
        auto objective = std::make_shared<const EnergyObjective>(geo, ModelParams{1.0, j2}, spec);
        std::vector<double> samples(static_cast<std::size_t>(n_samples));

        auto run_one = [&](int s) {
            auto rng = make_stream(seed, "variance", (static_cast<std::uint64_t>(grid_key(j2)) << 20) +
                                                         static_cast<std::uint64_t>(s));
            std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
            ParamVector x(spec.n_params);
            for (int k = 0; k < spec.n_params; ++k) x[k] = dist(rng);
            // gradient of the cluster energy N*E(theta), first slot
            samples[static_cast<std::size_t>(s)] =
                geo.n_sites * objective->gradient_adjoint(x)[0];
        };
        int workers = std::max(1, std::min(threads, n_samples));
        if (workers == 1) {
            for (int s = 0; s < n_samples; ++s) run_one(s);
        } else {
            std::vector<std::thread> pool;
            std::atomic<int> next{0};
            for (int t = 0; t < workers; ++t) {
                pool.emplace_back([&] {
                    for (int s = next.fetch_add(1); s < n_samples; s = next.fetch_add(1)) {
                        run_one(s);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }

        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= n_samples;
        double var = 0.0;
        for (double v : samples) var += (v - mean) * (v - mean);
        var /= (n_samples - 1);
        points.push_back({L, j2, var, n_samples});
    }
    return points;
}

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << "j2,energy,dE_dJ2,dE_dJ2_grid,m_neel,m_caf_x,m_caf_y,d_x,d_y,iterations,status,"
          "direction,seed\n";
    for (const auto& r : records) {
        os << r.j2 << ',' << r.energy << ',' << r.dE_dJ2 << ',' << r.dE_dJ2_grid << ','
           << r.m_neel << ',' << r.m_caf_x << ',' << r.m_caf_y << ',' << r.d_x << ',' << r.d_y
           << ',' << r.iterations << ',' << r.status << ',' << r.direction << ',' << r.seed
           << '\n';
    }
}

void write_transitions_json(std::ostream& os, const TransitionReport& report) {
    nlohmann::json j;
    j["transitions"] = nlohmann::json::array();
    for (const auto& t : report.transitions) {
        j["transitions"].push_back(
            {{"location", t.location},
             {"kind", t.kind == TransitionKind::first_order ? "first_order" : "continuous"},
             {"signal", t.signal},
             {"hysteresis_window", t.hysteresis_window}});
    }
    os << j.dump(2) << '\n';
}

void write_variance_csv(std::ostream& os, const std::vector<VariancePoint>& points) {
    os << "L,j2,variance,n_samples\n";
    for (const auto& p : points) {
        os << p.L << ',' << p.j2 << ',' << p.variance << ',' << p.n_samples << '\n';
    }
}

std::string record_to_json(const SweepRecord& r) {
    nlohmann::json j{{"j2", r.j2},
                     {"energy", r.energy},
                     {"dE_dJ2", r.dE_dJ2},
                     {"dE_dJ2_grid", r.dE_dJ2_grid},
                     {"m_neel", r.m_neel},
                     {"m_caf_x", r.m_caf_x},
                     {"m_caf_y", r.m_caf_y},
                     {"d_x", r.d_x},
                     {"d_y", r.d_y},
                     {"iterations", r.iterations},
                     {"status", r.status},
                     {"direction", r.direction},
                     {"seed", r.seed}};
    j["params"] = std::vector<double>(r.params.data(), r.params.data() + r.params.size());
    return j.dump(2);
}

SweepRecord record_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SweepRecord r;
    r.j2 = j.at("j2");
    r.energy = j.at("energy");
    r.dE_dJ2 = j.at("dE_dJ2");
    r.dE_dJ2_grid = j.value("dE_dJ2_grid", 0.0);
    r.m_neel = j.at("m_neel");
    r.m_caf_x = j.at("m_caf_x");
    r.m_caf_y = j.at("m_caf_y");
    r.d_x = j.at("d_x");
    r.d_y = j.at("d_y");
    r.iterations = j.value("iterations", 0);
    r.status = j.value("status", "");
    r.direction = j.value("direction", "");
    r.seed = j.value("seed", std::uint64_t{0});
    std::vector<double> params = j.value("params", std::vector<double>{});
    r.params = Eigen::Map<Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
    return r;
}

std::string sweep_metadata_json(const SweepConfig& config) {
    nlohmann::json j;
    j["config"] = {{"j2_min", config.j2_min},
                   {"j2_max", config.j2_max},
                   {"step", config.step},
                   {"directions", config.directions == SweepDirection::both
                                      ? "both"
                                      : (config.directions == SweepDirection::up ? "up" : "down")},
                   {"extreme_restarts", config.extreme_restarts},
                   {"seed", config.seed},
                   {"L", config.L},
                   {"m", config.m},
                   {"tied", config.tied},
                   {"j1", config.j1},
                   {"threads", config.threads}};
    j["optimizer"] = {{"max_iterations", config.optimizer.max_iterations},
                      {"gradient_tolerance", config.optimizer.gradient_tolerance},
                      {"energy_tolerance", config.optimizer.energy_tolerance},
                      {"history_size", config.optimizer.history_size},
                      {"gradient_mode", config.optimizer.gradient_mode == GradientMode::adjoint
                                            ? "adjoint"
                                            : (config.optimizer.gradient_mode ==
                                                       GradientMode::fd_forward
                                                   ? "fd_forward"
                                                   : "fd_central")},
                      {"fd_delta", config.optimizer.fd_delta}};
    j["thresholds"] = {{"order_jump", kOrderJumpThreshold},
                       {"deriv_jump", kDerivJumpThreshold},
                       {"vanishing", kVanishThreshold}};
    return j.dump(2);
}

}  // namespace qhmft
