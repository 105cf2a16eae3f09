#include "qhmft/circuit.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qhmft {

namespace {

struct Dimer {
    int a, b;
};

// Columnar dimers along axis (0=x, 1=y) with the given start parity.
// Ordered by (y, x) of the lower-left site. Dimers must fit inside the
// cluster (open boundaries), so the translated sublayers are empty for L=2.
std::vector<Dimer> columnar_dimers(int L, int axis, int start_parity) {
    std::vector<Dimer> dimers;
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            int along = (axis == 0) ? x : y;
            if (along % 2 != start_parity || along + 1 > L - 1) continue;
            int a = y * L + x;
            int b = (axis == 0) ? a + 1 : a + L;
            dimers.push_back({a, b});
        }
    }
    return dimers;
}

void check_params(const CircuitSpec& spec, const ParamVector& params) {
    if (params.size() != spec.n_params) {
        throw std::invalid_argument("parameter vector length " + std::to_string(params.size()) +
                                    " does not match circuit n_params " +
                                    std::to_string(spec.n_params));
    }
}

}  // namespace

CircuitSpec build_circuit(int L, int m, bool tied) {
    if (L < 2 || L % 2 != 0) throw std::invalid_argument("build_circuit: L must be even, >= 2");
    if (m < 1) throw std::invalid_argument("build_circuit: m must be >= 1");
    if (tied && L != 2) throw std::invalid_argument("tied parameters are defined for L=2 only");

    CircuitSpec spec;
    spec.L = L;
    spec.m = m;
    spec.tied = tied;

    // sublayer patterns in application order: x even, y even, x odd, y odd
    std::vector<std::vector<Dimer>> sublayers;
    for (auto [axis, parity] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        auto d = columnar_dimers(L, axis, parity);
        if (!d.empty()) sublayers.push_back(std::move(d));
    }

    int layer = 0;
    int next_param = 0;
    for (int macro = 0; macro < m; ++macro) {
        for (GateFamily family : {GateFamily::xy, GateFamily::zz}) {
            int tie_class = -1;
            for (const auto& sub : sublayers) {
                for (const auto& d : sub) {
                    int p;
                    if (tied) {
                        if (tie_class < 0) tie_class = next_param++;
                        p = tie_class;
                    } else {
                        p = next_param++;
                    }
                    spec.slots.push_back(GateSlot{family, d.a, d.b, p, layer, macro});
                }
                ++layer;
            }
        }
        for (int site = 0; site < L * L; ++site) {
            spec.slots.push_back(GateSlot{GateFamily::z, site, -1, next_param++, layer, macro});
        }
        ++layer;
    }
    spec.n_params = next_param;
    spec.depth = layer;
    return spec;
}

void apply_circuit(const CircuitSpec& spec, const ParamVector& params, SectorState& state) {
    check_params(spec, params);
    for (const GateSlot& g : spec.slots) {
        double theta = params[g.param_slot];
        switch (g.family) {
            case GateFamily::xy: apply_xy(state, g.site_a, g.site_b, theta); break;
            case GateFamily::zz: apply_zz(state, g.site_a, g.site_b, theta); break;
            case GateFamily::z: apply_z(state, g.site_a, theta); break;
        }
    }
}

void apply_inverse(const CircuitSpec& spec, const ParamVector& params, SectorState& state) {
    check_params(spec, params);
    for (auto it = spec.slots.rbegin(); it != spec.slots.rend(); ++it) {
        double theta = -params[it->param_slot];
        switch (it->family) {
            case GateFamily::xy: apply_xy(state, it->site_a, it->site_b, theta); break;
            case GateFamily::zz: apply_zz(state, it->site_a, it->site_b, theta); break;
            case GateFamily::z: apply_z(state, it->site_a, theta); break;
        }
    }
}

std::string circuit_to_json(const CircuitSpec& spec) {
    nlohmann::json j;
    j["L"] = spec.L;
    j["m"] = spec.m;
    j["tied"] = spec.tied;
    j["n_params"] = spec.n_params;
    j["depth"] = spec.depth;
    j["slots"] = nlohmann::json::array();
    for (const auto& g : spec.slots) {
        const char* family = g.family == GateFamily::xy ? "xy"
                             : g.family == GateFamily::zz ? "zz"
                                                          : "z";
        nlohmann::json slot{{"family", family},
                            {"param_slot", g.param_slot},
                            {"layer", g.layer_index},
                            {"macro_layer", g.macro_layer}};
        slot["sites"] = g.site_b < 0 ? nlohmann::json::array({g.site_a})
                                     : nlohmann::json::array({g.site_a, g.site_b});
        j["slots"].push_back(slot);
    }
    return j.dump(2);
}

}  // namespace qhmft
