#include "qhmft/validate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qhmft/circuit.hpp"
#include "qhmft/ed_oracle.hpp"
#include "qhmft/full_space.hpp"
#include "qhmft/objective.hpp"
#include "qhmft/rng.hpp"

namespace qhmft {

namespace {

constexpr double pi = std::numbers::pi;

ValidationCheck check(const std::string& name, bool ok, const std::string& detail) {
    return {name, ok, detail};
}

ValidationCheck check_singlet() {
    ClusterGeometry geo = build_cluster(2);
    SectorState s = init_neel(geo);
    // sites 0 and 1 hold |0>|1>; XY(pi/2) should produce the singlet
    apply_xy(s, 0, 1, pi / 2);
    auto idx01 = s.basis->index_of(0b0110);  // bit1 set: |01> on sites (0,1), site 2 keeps its 1
    auto idx10 = s.basis->index_of(0b0101);
    double err = std::abs(s.amplitudes[static_cast<Eigen::Index>(idx01)] - Complex(1 / std::sqrt(2))) +
                 std::abs(s.amplitudes[static_cast<Eigen::Index>(idx10)] - Complex(-1 / std::sqrt(2)));
    std::ostringstream os;
    os << "deviation " << err;
    return check("xy(pi/2) singlet", err < 1e-12, os.str());
}

ValidationCheck check_sector_closure() {
    ClusterGeometry geo = build_cluster(2);
    SectorState s = init_neel(geo);
    StateVector full = full_space_reference(s);
    auto rng = make_stream(7, "validate-closure");
    std::uniform_real_distribution<double> angle(-pi, pi);
    std::uniform_int_distribution<int> site(0, 3);
    std::uniform_int_distribution<int> fam(0, 2);
    double max_err = 0.0;
    for (int g = 0; g < 300; ++g) {
        int i = site(rng), j = site(rng);
        while (j == i) j = site(rng);
        double t = angle(rng);
        switch (fam(rng)) {
            case 0: apply_xy(s, i, j, t); full_space::apply_xy(full, i, j, t); break;
            case 1: apply_zz(s, i, j, t); full_space::apply_zz(full, i, j, t); break;
            case 2: apply_z(s, i, t); full_space::apply_z(full, i, t); break;
        }
        max_err = std::max(max_err, (full_space_reference(s) - full).norm());
    }
    max_err = std::max(max_err, std::abs(s.norm() - 1.0));
    std::ostringstream os;
    os << "max deviation " << max_err;
    return check("sector closure and norm (300 random gates)", max_err < 1e-12, os.str());
}

ValidationCheck check_gradient() {
    ClusterGeometry geo = build_cluster(2);
    EnergyObjective obj(geo, ModelParams{1.0, 0.4}, build_circuit(2, 2, false));
    auto rng = make_stream(11, "validate-grad");
    std::uniform_real_distribution<double> dist(-pi, pi);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        ParamVector x(obj.n_params());
        for (int k = 0; k < obj.n_params(); ++k) x[k] = dist(rng);
        ParamVector ga = obj.gradient_adjoint(x);
        ParamVector gf = obj.gradient_fd(x, FdScheme::central, 1e-6);
        double rel = (ga - gf).norm() / std::max(1e-12, gf.norm());
        worst = std::max(worst, rel);
    }
    std::ostringstream os;
    os << "max relative deviation " << worst;
    return check("adjoint vs central-fd gradient", worst < 1e-5, os.str());
}

ValidationCheck check_oracle_duality() {
    ClusterGeometry geo = build_cluster(2);
    ModelParams model{1.0, 0.0};
    ScfConfig cfg;
    cfg.field_tolerance = 1e-12;
    HmftResult scf = self_consistent_hmft(geo, model, cfg);

    // same fields, but built through the dense full-space path and only then
    // restricted to the Sz=0 block
    Eigen::MatrixXd H = full_space::dense_hamiltonian(
        geo, model, effective_boundary_field(geo, model, scf.fields));
    auto basis = std::make_shared<SectorBasis>(geo.n_sites, geo.n_sites / 2);
    const auto dim = static_cast<Eigen::Index>(basis->dim());
    Eigen::MatrixXd block(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            block(r, c) = H(static_cast<Eigen::Index>(basis->state(static_cast<std::size_t>(r))),
                            static_cast<Eigen::Index>(basis->state(static_cast<std::size_t>(c))));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    SectorState state{basis, solver.eigenvectors().col(0).cast<Complex>()};
    double e = embedded_energy(geo, model, state).e_total;
    double err = std::abs(e - scf.energy);
    std::ostringstream os;
    os << "|dE| = " << err;
    return check("sector vs full-space oracle energy", err < 1e-10, os.str());
}

}  // namespace

std::vector<ValidationCheck> run_validation_suite() {
    std::vector<ValidationCheck> checks;
    checks.push_back(check_singlet());
    checks.push_back(check_sector_closure());
    checks.push_back(check_gradient());
    checks.push_back(check_oracle_duality());
    return checks;
}

}  // namespace qhmft
