#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qhmft/optimizer.hpp"
#include "qhmft/rng.hpp"

using namespace qhmft;
using Eigen::VectorXd;

namespace {

// f(x) = 1/2 (x-c)^T D (x-c), D = diag(1..n)
ObjectiveFn quadratic(const VectorXd& c) {
    return [c](const VectorXd& x, VectorXd* grad) {
        VectorXd d = x - c;
        double f = 0.0;
        if (grad) grad->resize(x.size());
        for (int i = 0; i < x.size(); ++i) {
            double w = i + 1.0;
            f += 0.5 * w * d[i] * d[i];
            if (grad) (*grad)[i] = w * d[i];
        }
        return f;
    };
}

ObjectiveFn rosenbrock() {
    return [](const VectorXd& x, VectorXd* grad) {
        double a = 1.0 - x[0];
        double b = x[1] - x[0] * x[0];
        if (grad) {
            grad->resize(2);
            (*grad)[0] = -2.0 * a - 400.0 * x[0] * b;
            (*grad)[1] = 200.0 * b;
        }
        return a * a + 100.0 * b * b;
    };
}

}  // namespace

TEST_CASE("rng streams are deterministic and purpose-separated") {
    CHECK(derive_stream_seed(1, "a", 0) == derive_stream_seed(1, "a", 0));
    CHECK(derive_stream_seed(1, "a", 0) != derive_stream_seed(1, "a", 1));
    CHECK(derive_stream_seed(1, "a", 0) != derive_stream_seed(1, "b", 0));
    CHECK(derive_stream_seed(1, "a", 0) != derive_stream_seed(2, "a", 0));
    auto r1 = make_stream(7, "x", 3);
    auto r2 = make_stream(7, "x", 3);
    for (int i = 0; i < 5; ++i) CHECK(r1() == r2());
}

TEST_CASE("quadratic minimization converges in a handful of iterations") {
    VectorXd c(6);
    c << 1, -2, 3, 0.5, -0.25, 4;
    OptimizerConfig cfg;
    MinimizeResult r = minimize(quadratic(c), VectorXd::Zero(6), cfg);
    CHECK(r.trace.status == OptStatus::converged);
    CHECK((r.x - c).norm() < 1e-6);
    CHECK(r.trace.records.back().iteration <= 15);
}

TEST_CASE("rosenbrock valley is solved") {
    OptimizerConfig cfg;
    cfg.max_iterations = 500;
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    MinimizeResult r = minimize(rosenbrock(), x0, cfg);
    CHECK(r.trace.status == OptStatus::converged);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-5);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-5);
}

TEST_CASE("accepted energies never increase") {
    VectorXd x0(2);
    x0 << 2.0, -3.0;
    MinimizeResult r = minimize(rosenbrock(), x0, OptimizerConfig{});
    REQUIRE(r.trace.records.size() > 2);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
        CHECK(r.trace.records[i].energy <= r.trace.records[i - 1].energy + 1e-15);
    }
}

TEST_CASE("non-finite start is rejected, iteration cap reported") {
    VectorXd bad(2);
    bad << std::nan(""), 0.0;
    CHECK_THROWS_AS(minimize(rosenbrock(), bad, OptimizerConfig{}), std::invalid_argument);

    OptimizerConfig tight;
    tight.max_iterations = 2;
    tight.gradient_tolerance = 1e-14;
    tight.energy_tolerance = 0.0;
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    MinimizeResult r = minimize(rosenbrock(), x0, tight);
    CHECK(r.trace.status == OptStatus::max_iterations);
}

TEST_CASE("multi start is deterministic in the seed and keeps every trace") {
    VectorXd c(3);
    c << 0.3, -0.7, 1.1;
    MultiStartResult a = multi_start(quadratic(c), 3, 6, 42, OptimizerConfig{}, 3);
    MultiStartResult b = multi_start(quadratic(c), 3, 6, 42, OptimizerConfig{}, 1);
    CHECK(a.all.size() == 6);
    CHECK(a.best.value == doctest::Approx(b.best.value).epsilon(1e-14));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK((a.all[i].x - b.all[i].x).norm() == doctest::Approx(0.0));
        CHECK(a.all[i].trace.seed == b.all[i].trace.seed);
    }
    MultiStartResult other = multi_start(quadratic(c), 3, 6, 43, OptimizerConfig{}, 1);
    CHECK((other.all[0].x - a.all[0].x).norm() >= 0.0);  // well-defined either way
    CHECK_THROWS_AS(multi_start(quadratic(c), 3, 0, 1, OptimizerConfig{}), std::invalid_argument);
}

TEST_CASE("a single-point chain equals plain minimization") {
    VectorXd c(4);
    c << 1, 2, 3, 4;
    auto family = [&](std::size_t) { return quadratic(c); };
    VectorXd x0 = VectorXd::Zero(4);
    auto chain = warm_start_chain(family, 1, x0, OptimizerConfig{});
    MinimizeResult direct = minimize(quadratic(c), x0, OptimizerConfig{});
    REQUIRE(chain.size() == 1);
    CHECK((chain[0].x - direct.x).norm() == doctest::Approx(0.0));
}

TEST_CASE("chains pass the previous optimum forward") {
    // family p: quadratic centred at (p, p); each point should start next to
    // the solution of the previous one and converge in very few iterations
    auto family = [](std::size_t p) {
        VectorXd c = VectorXd::Constant(2, static_cast<double>(p) * 0.1);
        return quadratic(c);
    };
    auto chain = warm_start_chain(family, 5, VectorXd::Zero(2), OptimizerConfig{});
    REQUIRE(chain.size() == 5);
    for (std::size_t p = 0; p < 5; ++p) {
        CHECK((chain[p].x - VectorXd::Constant(2, p * 0.1)).norm() < 1e-6);
        CHECK(chain[p].trace.status == OptStatus::converged);
    }
}

TEST_CASE("trace csv layout") {
    VectorXd c(2);
    c << 1, 1;
    MinimizeResult r = minimize(quadratic(c), VectorXd::Zero(2), OptimizerConfig{});
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    std::string text = os.str();
    CHECK(text.rfind("iteration,energy,grad_norm,m_neel,m_caf,d_x,d_y\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(r.trace.records.size()) + 1);
}
