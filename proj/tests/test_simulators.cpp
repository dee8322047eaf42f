#include <doctest.h>

#include "epps/estimators.hpp"
#include "epps/simulators.hpp"

#include <cmath>

using namespace epps;

namespace
{
std::vector<double> log_path(const TickSeries &s)
{
    std::vector<double> x;
    for (double p : s.prices())
        x.push_back(std::log(p));
    return x;
}

double sample_corr(const Matrix &d)
{
    const Eigen::VectorXd a = d.col(0).array() - d.col(0).mean();
    const Eigen::VectorXd b = d.col(1).array() - d.col(1).mean();
    return a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
}
} // namespace

TEST_CASE("enum names round-trip")
{
    for (auto m : {Model::gbm, Model::merton, Model::variance_gamma, Model::garch, Model::ou})
        CHECK(model_from_string(to_string(m)) == m);
    CHECK(model_from_string("variance_gamma") == Model::variance_gamma);
    for (auto v : {GarchVariant::andersen, GarchVariant::reno})
        CHECK(garch_variant_from_string(to_string(v)) == v);
    for (auto s : {Subordinator::shared, Subordinator::independent, Subordinator::degenerate})
        CHECK(subordinator_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(model_from_string("heston"), InputError);
}

TEST_CASE("validation names the field")
{
    SimConfig c = default_config(Model::gbm);
    c.sigma2 = {0.1};
    CHECK_THROWS_AS(c.validate(), InputError);
    c = default_config(Model::gbm);
    c.set_rho(1.5);
    CHECK_THROWS_AS(c.validate(), InputError);
    c = default_config(Model::gbm);
    c.n_steps = 1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = default_config(Model::gbm);
    c.start_price = {100.0, -1.0};
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("GBM degenerate and deterministic cases")
{
    SimConfig c = default_config(Model::gbm);
    c.n_steps = 500;
    c.sigma2 = {0.0, 0.0};
    c.mu = {0.0, 0.0};
    c.seed = 3;
    const auto b = simulate_gbm(c);
    REQUIRE(b.size() == 2);
    for (const auto &s : b.series())
    {
        CHECK(s.size() == 500);
        for (double p : s.prices())
            CHECK(p == doctest::Approx(100.0).epsilon(1e-14));
    }
    CHECK(b[0].times()[1] == 1.0);
    CHECK(b[1].asset_id() == "asset2");
}

TEST_CASE("GBM with rho 1 gives proportional log returns")
{
    SimConfig c = default_config(Model::gbm);
    c.n_steps = 1000;
    c.seed = 9;
    c.set_rho(1.0);
    // drift cancels the Ito correction so returns are pure diffusion
    c.mu = {c.sigma2[0] / 2, c.sigma2[1] / 2};
    const auto b = simulate_gbm(c);
    const auto r1 = log_returns(b[0]);
    const auto r2 = log_returns(b[1]);
    const double ratio = std::sqrt(c.sigma2[1] / c.sigma2[0]);
    for (std::size_t k = 0; k < r1.size(); ++k)
        CHECK(std::abs(r2[k] - ratio * r1[k]) < 1e-10 * std::max(1e-3, std::abs(r2[k])));
}

TEST_CASE("seed determinism")
{
    for (auto m : {Model::gbm, Model::merton, Model::variance_gamma, Model::garch, Model::ou})
    {
        SimConfig c = default_config(m);
        c.n_steps = 300;
        c.seed = 77;
        c.set_rho(0.3);
        if (m == Model::merton)
            c.merton.lambda = {500.0, 500.0};
        const auto a = simulate(c);
        const auto b = simulate(c);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::equal(a[i].prices().begin(), a[i].prices().end(), b[i].prices().begin()));
        c.seed = 78;
        const auto d = simulate(c);
        CHECK_FALSE(std::equal(a[0].prices().begin(), a[0].prices().end(), d[0].prices().begin()));
    }
}

TEST_CASE("driver correlation")
{
    SimConfig c = default_config(Model::gbm);
    c.n_steps = 20001;
    c.seed = 1;
    for (double rho : {-0.8, 0.0, 0.5})
    {
        c.set_rho(rho);
        const Matrix d = correlated_drivers(c);
        CHECK(std::abs(sample_corr(d) - rho) < 4.0 / std::sqrt(20000.0));
        CHECK(std::abs(d.col(0).squaredNorm() / 20000.0 - 1.0) < 0.05);
    }
}

TEST_CASE("Merton without jumps is GBM")
{
    SimConfig g = default_config(Model::gbm);
    g.n_steps = 400;
    g.seed = 5;
    g.set_rho(0.4);
    SimConfig m = default_config(Model::merton);
    m.n_steps = 400;
    m.seed = 5;
    m.set_rho(0.4);
    const auto a = simulate_gbm(g);
    const auto b = simulate_merton(m);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::equal(a[i].prices().begin(), a[i].prices().end(), b[i].prices().begin()));
}

TEST_CASE("compound jump")
{
    CHECK(compound_jump(0.1, 5.0, 1, 0.0) == 0.1);
    CHECK(compound_jump(0.1, 5.0, 0, 2.0) == 0.0);
    CHECK(compound_jump(0.0, 1.0, 4, 0.5) == 1.0);
}

TEST_CASE("VG with a degenerate clock is arithmetic Brownian motion")
{
    SimConfig v = default_config(Model::variance_gamma);
    v.n_steps = 400;
    v.seed = 21;
    v.set_rho(-0.3);
    v.vg.subordinator = Subordinator::degenerate;
    v.mu = {0.0, 0.0};
    SimConfig g = default_config(Model::gbm);
    g.n_steps = 400;
    g.seed = 21;
    g.set_rho(-0.3);
    g.mu = {g.sigma2[0] / 2, g.sigma2[1] / 2};
    const auto a = simulate_variance_gamma(v);
    const auto b = simulate_gbm(g);
    for (std::size_t i = 0; i < 2; ++i)
    {
        const auto x = log_path(a[i]), y = log_path(b[i]);
        for (std::size_t k = 0; k < x.size(); ++k)
            CHECK(x[k] == doctest::Approx(y[k]).epsilon(1e-12));
    }
}

TEST_CASE("VG increment mean")
{
    SimConfig v = default_config(Model::variance_gamma);
    v.n_steps = 1000001;
    v.dt = 1e-3;
    v.mu = {0.5, 0.5};
    v.sigma2 = {1.0, 1.0};
    v.seed = 4;
    const auto b = simulate_variance_gamma(v);
    const auto x = log_path(b[0]);
    double sum = 0.0, sq = 0.0;
    const auto n = static_cast<double>(x.size() - 1);
    for (std::size_t k = 1; k < x.size(); ++k)
    {
        const double d = x[k] - x[k - 1];
        sum += d;
        sq += d * d;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 0.5e-3) < 3 * se);
}

TEST_CASE("GARCH without vol-of-vol follows the variance ODE")
{
    SimConfig c = default_config(Model::garch);
    c.n_steps = 1000;
    c.dt = 0.5;
    c.seed = 2;
    c.garch.lambda = {0.0, 0.0};
    c.garch.start_variance = {2.0, 0.1};
    for (auto variant : {GarchVariant::andersen, GarchVariant::reno})
    {
        const auto g = simulate_garch_paths(c, variant);
        for (std::size_t i = 0; i < 2; ++i)
        {
            double v = c.garch.start_variance[i];
            REQUIRE(g.variance[i].size() == c.n_steps);
            CHECK(g.variance[i][0] == v);
            for (std::size_t k = 1; k < c.n_steps; ++k)
            {
                v += c.garch.theta[i] * (c.garch.w[i] - v) * c.dt;
                CHECK(g.variance[i][k] == doctest::Approx(v).epsilon(1e-14));
            }
            CHECK(std::abs(g.variance[i].back() - c.garch.w[i]) < 1e-6);
        }
        CHECK(g.floor_events == 0);
    }
}

TEST_CASE("GARCH stationary mean variance")
{
    SimConfig c = default_config(Model::garch);
    c.n_steps = 400000;
    c.dt = 1.0;
    c.seed = 12;
    const auto g = simulate_garch_paths(c, GarchVariant::andersen);
    for (std::size_t i = 0; i < 2; ++i)
    {
        double sum = 0.0;
        for (double v : g.variance[i])
            sum += v;
        const double mean = sum / static_cast<double>(g.variance[i].size());
        CHECK(std::abs(mean / c.garch.w[i] - 1.0) < 0.05);
    }
}

TEST_CASE("OU deterministic cases")
{
    SimConfig c = default_config(Model::ou);
    c.n_steps = 2000;
    c.dt = 1.0;
    c.seed = 8;
    c.sigma2 = {0.0, 0.0};
    c.start_price = {100.0, 200.0};
    const auto b = simulate_ou(c);
    for (double p : b[0].prices())
        CHECK(p == doctest::Approx(100.0).epsilon(1e-12));
    const auto p = b[1].prices();
    for (std::size_t k = 1; k < p.size(); ++k)
    {
        CHECK(p[k] <= p[k - 1]);
        CHECK(p[k] >= 100.0);
        if (k < 200)
            CHECK(p[k] < p[k - 1]);
    }
    CHECK(p.back() < 100.5);
}
