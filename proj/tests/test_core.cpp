#include <doctest.h>

#include "epps/core.hpp"

#include <cmath>
#include <numbers>

using namespace epps;

namespace
{
constexpr double pi = std::numbers::pi;

PathBundle one(std::vector<double> times)
{
    std::vector<double> prices(times.size(), 100.0);
    return PathBundle({TickSeries("a", std::move(times), std::move(prices))});
}
} // namespace

TEST_CASE("tick series invariants")
{
    CHECK_THROWS_AS(TickSeries("a", {0.0, 1.0}, {100.0}), InputError);
    CHECK_THROWS_AS(TickSeries("a", {1.0, 0.0}, {100.0, 100.0}), InputError);
    CHECK_THROWS_AS(TickSeries("a", {0.0, 1.0}, {100.0, -1.0}), InputError);
    CHECK_THROWS_AS(TickSeries("a", {0.0, 1.0}, {100.0, 100.0}, {1, 0}), InputError);
    CHECK_THROWS_AS(TickSeries("a", {0.0, NAN}, {100.0, 100.0}), InputError);

    TickSeries s("a", {0.0, 1.0, 1.0}, {1.0, 2.0, 3.0});
    CHECK_FALSE(s.strictly_increasing());
    CHECK(s.total_volume() == 3);
}

TEST_CASE("rescale_times maps the bundle window onto [0, 2pi]")
{
    auto r = rescale_times(one({0.0, 5.0, 10.0}));
    REQUIRE(r.tau[0].size() == 3);
    CHECK(r.tau[0][0] == 0.0);
    CHECK(r.tau[0][1] == doctest::Approx(pi).epsilon(1e-15));
    CHECK(r.tau[0][2] == doctest::Approx(2 * pi).epsilon(1e-15));

    r = rescale_times(one({0.0, 2.0, 3.0, 10.0}));
    CHECK(r.tau[0][1] == doctest::Approx(0.4 * pi).epsilon(1e-14));
    CHECK(r.tau[0][2] == doctest::Approx(0.6 * pi).epsilon(1e-14));
    CHECK(r.tau[0][3] == doctest::Approx(2 * pi).epsilon(1e-15));
    CHECK(r.min_source_gap == 1.0);

    CHECK_THROWS_AS(rescale_times(one({3.0})), InputError);

    // shared phase origin across assets
    PathBundle b({TickSeries("a", {2.0, 4.0}, {1.0, 1.0}), TickSeries("b", {0.0, 8.0}, {1.0, 1.0})});
    r = rescale_times(b);
    CHECK(r.tau[0][0] == doctest::Approx(pi / 2));
    CHECK(r.tau[1][1] == doctest::Approx(2 * pi));
}

TEST_CASE("log returns")
{
    auto r = log_returns(TickSeries("a", {0, 1, 2}, {100, 100, 100}));
    CHECK(r == std::vector<double>{0.0, 0.0});
    r = log_returns(TickSeries("a", {0, 1}, {100, 110}));
    CHECK(r[0] == doctest::Approx(std::log(1.1)).epsilon(1e-15));
    r = log_returns(TickSeries("a", {0, 1, 2}, {100, 105, 99}));
    CHECK(r[0] == doctest::Approx(std::log(1.05)).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(std::log(99.0 / 105.0)).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(log_returns(TickSeries("a", {0}, {1})), doctest::Contains("insufficient data"), InputError);
}

TEST_CASE("cholesky")
{
    CHECK(cholesky(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));

    Matrix s(2, 2);
    s << 1, 0.5, 0.5, 1;
    const Matrix a = cholesky(s);
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(a(0, 1) == 0.0);
    CHECK(a(1, 0) == doctest::Approx(0.5));
    CHECK(a(1, 1) == doctest::Approx(std::sqrt(0.75)));
    CHECK((a * a.transpose() - s).cwiseAbs().maxCoeff() < 1e-15);

    s << 1, 1.1, 1.1, 1;
    CHECK_THROWS_AS(cholesky(s), InputError);

    s << 1, 1, 1, 1;
    CHECK_THROWS_AS(cholesky(s), InputError);
    const Matrix d = cholesky(s, true);
    CHECK((d * d.transpose() - s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("correlation from covariance flags |rho| > 1")
{
    Matrix s(2, 2);
    s << 1, 0.5, 0.5, 4;
    bool flag = true;
    auto r = correlation_from_covariance(s, &flag);
    CHECK(r(0, 1) == doctest::Approx(0.25));
    CHECK(r(0, 0) == 1.0);
    CHECK_FALSE(flag);

    s << 1, 3, 3, 1;
    r = correlation_from_covariance(s, &flag);
    CHECK(r(0, 1) == 3.0);
    CHECK(flag);
}
