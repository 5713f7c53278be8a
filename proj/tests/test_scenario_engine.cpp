#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <omp.h>

#include "doctest.h"
#include "oracles.hpp"

#include "dynreserve/normal.hpp"
#include "dynreserve/scenario_engine.hpp"
#include "dynreserve/synthetic.hpp"

using namespace dynreserve;

namespace {

const Timestamp kDay = parse_timestamp("2020-07-01T00:00");

double min_eigenvalue(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff(); }

ScenarioSet constant_set(std::vector<std::vector<double>> values, VariableKind kind) {
    ScenarioSet set;
    set.kind = kind;
    set.grid = {kDay, std::chrono::minutes{60}, values.front().size()};
    for (auto& v : values) set.scenarios.push_back({v, 0.0, 1.0 / static_cast<double>(values.size())});
    return set;
}

}  // namespace

TEST_CASE("lag correlation matrix") {
    const CopulaParams p;
    const Matrix m = lag_correlation(3, p);
    const double expected[3][3] = {{1, 0.92, 0.92 - 0.42}, {0.92, 1, 0.92}, {0.92 - 0.42, 0.92, 1}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) CHECK(m(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-15));
    }
    CHECK(build_covariance(1, p) == Matrix::Identity(1, 1));
    const Matrix big = lag_correlation(24, p);
    CHECK(big.minCoeff() >= 0.0);
}

TEST_CASE("covariance repair") {
    const CopulaParams p;
    for (std::size_t T : {3u, 24u, 96u}) {
        const Matrix c = build_covariance(T, p);
        CHECK(min_eigenvalue(c) > 0.0);
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((c.diagonal().array() - 1.0).abs().maxCoeff() < 1e-9);
        CHECK_NOTHROW(cholesky(c));
        for (std::size_t i = 0; i + 1 < T; ++i) CHECK(c(i, i + 1) == doctest::Approx(p.theta).epsilon(1e-9));
    }
    SUBCASE("no-op when already positive definite") {
        CopulaParams mild;
        mild.theta = 0.3;
        mild.omega = 0.1;
        const Matrix raw = lag_correlation(6, mild);
        REQUIRE(min_eigenvalue(raw) > mild.jitter);
        CHECK((build_covariance(6, mild) - raw).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("eigen_clip repair is PD with unit diagonal") {
        CopulaParams clip;
        clip.repair = CovarianceRepair::eigen_clip;
        const Matrix c = build_covariance(24, clip);
        CHECK(min_eigenvalue(c) > 0.0);
        CHECK((c.diagonal().array() - 1.0).abs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("cholesky") {
    CHECK(cholesky(Matrix::Identity(4, 4)) == Matrix::Identity(4, 4));
    Matrix a(2, 2);
    a << 1, 0.5, 0.5, 1;
    const Matrix c = cholesky(a);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(0, 1) == 0.0);
    CHECK(c(1, 0) == 0.5);
    CHECK(c(1, 1) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));

    const Matrix r = build_covariance(24, CopulaParams{});
    const Matrix f = cholesky(r);
    CHECK((f * f.transpose() - r).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(f.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.diagonal().minCoeff() > 0.0);

    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_WITH_AS(cholesky(bad), "matrix not positive definite", std::domain_error);
}

TEST_CASE("standard normal") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_inv(0.5) == 0.0);
    for (const auto& pt : oracle::kNormalCdf) CHECK(std::abs(std_normal_cdf(pt.x) - pt.value) < 1e-12);
    for (const auto& pt : oracle::kNormalInv) {
        // One ulp of p moves the quantile by ulp/phi(x).
        const double density = std::exp(-0.5 * pt.value * pt.value) / std::sqrt(2.0 * M_PI);
        CHECK(std::abs(std_normal_inv(pt.x) - pt.value) < 1e-12 + 4e-16 / density);
    }
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.99, 1 - 1e-9}) {
        CHECK(std::abs(std_normal_cdf(std_normal_inv(p)) - p) < 1e-9);
    }
    CHECK_THROWS_WITH_AS(std_normal_inv(0.0), "infinite quantile", std::domain_error);
    CHECK_THROWS_WITH_AS(std_normal_inv(1.0), "infinite quantile", std::domain_error);
}

TEST_CASE("generate_scenarios basics") {
    const auto f = synthetic::solar_forecast(kDay);
    CHECK_THROWS_WITH_AS(generate_scenarios(f, 0, {}, 1), "empty scenario request", std::invalid_argument);

    const auto set = generate_scenarios(f, 400, {}, 11);
    double total = 0.0;
    for (const auto& s : set.scenarios) {
        total += s.probability;
        for (std::size_t t = 0; t < set.horizon(); ++t) {
            CHECK(s.values[t] >= f.interval(t).v_min());
            CHECK(s.values[t] <= f.interval(t).v_max());
        }
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    // equal band masses: every scenario carries the same log-weight
    for (const auto& s : set.scenarios) CHECK(s.probability == doctest::Approx(1.0 / 400.0).epsilon(1e-12));
}

TEST_CASE("degenerate forecast reproduces the central forecast") {
    const auto f = synthetic::load_forecast(kDay);
    const auto set = generate_scenarios(f, 10, {}, 3);
    for (const auto& s : set.scenarios) {
        CHECK(s.probability == doctest::Approx(0.1));
        for (std::size_t t = 0; t < set.horizon(); ++t) CHECK(s.values[t] == f.central()[t]);
    }
}

TEST_CASE("softmax") {
    const auto eq = softmax_normalize(std::vector<double>{-700.0, -700.0, -700.0, -700.0});
    for (double p : eq) CHECK(p == 0.25);
    const auto p = softmax_normalize(std::vector<double>{0.0, std::log(3.0)});
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.75));
    // underflow-safe: the raw products would all be 0
    const auto tiny = softmax_normalize(std::vector<double>{-2000.0, -2001.0});
    CHECK(tiny[0] + tiny[1] == doctest::Approx(1.0));
    CHECK(tiny[0] > tiny[1]);
}

TEST_CASE("seed determinism across execution modes and thread counts") {
    const auto f = synthetic::solar_forecast(kDay);
    const auto serial = generate_scenarios(f, 257, {}, 99, Execution::serial);
    const int saved = omp_get_max_threads();
    for (int threads : {1, 3, 8}) {
        omp_set_num_threads(threads);
        const auto par = generate_scenarios(f, 257, {}, 99, Execution::parallel);
        for (std::size_t s = 0; s < serial.size(); ++s) {
            CHECK(par.scenarios[s].values == serial.scenarios[s].values);
            CHECK(par.scenarios[s].probability == serial.scenarios[s].probability);
        }
    }
    omp_set_num_threads(saved);
    const auto other = generate_scenarios(f, 257, {}, 100);
    CHECK(other.scenarios[0].values != serial.scenarios[0].values);
}

TEST_CASE("gaussian stage lag-1 correlation") {
    const CopulaParams p;
    const auto y = correlated_normals(cholesky(build_covariance(24, p)), 5000, 2020);
    std::vector<double> a, b;
    for (Eigen::Index s = 0; s < y.rows(); ++s) {
        for (Eigen::Index t = 0; t + 1 < y.cols(); ++t) {
            a.push_back(y(s, t));
            b.push_back(y(s, t + 1));
        }
    }
    CHECK(std::abs(oracle::pearson(a, b) - p.theta) < 0.03);
}

TEST_CASE("net demand combination") {
    SUBCASE("singletons") {
        const auto n = combine_net_demand(constant_set({{100.0}}, VariableKind::load),
                                          constant_set({{10.0}}, VariableKind::wind),
                                          constant_set({{20.0}}, VariableKind::solar), 100);
        REQUIRE(n.scenarios.size() == 1);
        CHECK(n.scenarios[0].values[0] == 70.0);
        CHECK(n.scenarios[0].probability == 1.0);
    }
    SUBCASE("2x2x2 uniform") {
        const auto n = combine_net_demand(constant_set({{100.0}, {110.0}}, VariableKind::load),
                                          constant_set({{10.0}, {5.0}}, VariableKind::wind),
                                          constant_set({{20.0}, {0.0}}, VariableKind::solar), 8);
        REQUIRE(n.scenarios.size() == 8);
        double total = 0.0;
        for (const auto& s : n.scenarios) {
            CHECK(s.probability == 0.125);
            total += s.probability;
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
        CHECK(n.scenarios[7].values[0] == 110.0 - 5.0 - 0.0);
    }
    SUBCASE("guards") {
        const auto two = constant_set({{1.0}, {2.0}}, VariableKind::load);
        CHECK_THROWS_AS(combine_net_demand(two, two, two, 7), std::length_error);
        CHECK_THROWS_AS(combine_net_demand(two, constant_set({{1.0, 2.0}}, VariableKind::wind), two, 100),
                        std::invalid_argument);
    }
}

TEST_CASE("copula parameter validation") {
    CopulaParams p;
    p.theta = 1.2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.omega = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.jitter = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("lag correlation estimator") {
    const auto h = synthetic::history(VariableKind::load, parse_timestamp("2019-07-02T00:00"), 365, 5);
    const auto est = estimate_lag_correlations(h);
    // synthetic load errors are AR(1) with coefficient 0.7
    CHECK(est.lag1 == doctest::Approx(0.7).epsilon(0.05));
    CHECK(est.lag2 == doctest::Approx(0.49).epsilon(0.1));
    CHECK(est.params().theta == est.lag1);
}
