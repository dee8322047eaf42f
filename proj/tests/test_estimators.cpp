#include <doctest.h>

#include "epps/estimators.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace epps;

namespace
{
constexpr double pi = std::numbers::pi;

TickSeries series(const char *id, std::vector<double> t, std::vector<double> p)
{
    return TickSeries(id, std::move(t), std::move(p));
}

TickSeries random_walk(const char *id, std::vector<double> t, std::mt19937_64 &rng)
{
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> p{100.0};
    for (std::size_t k = 1; k < t.size(); ++k)
        p.push_back(p.back() * std::exp(z(rng)));
    return TickSeries(id, std::move(t), std::move(p));
}

std::vector<double> random_times(std::mt19937_64 &rng, std::size_t n, int span)
{
    std::uniform_int_distribution<int> pick(0, span);
    std::set<double> s;
    while (s.size() < n)
        s.insert(pick(rng));
    return {s.begin(), s.end()};
}

double max_abs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }
} // namespace

TEST_CASE("nyquist cutoff")
{
    std::vector<double> t(10001);
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = 2 * pi * static_cast<double>(k) / 10000.0;
    PathBundle uniform({TickSeries("a", t, std::vector<double>(t.size(), 1.0))});
    CHECK(nyquist_cutoff(rescale_times(uniform)) == 5000);

    PathBundle three({series("a", {0, pi, 2 * pi}, {1, 1, 1})});
    CHECK(nyquist_cutoff(rescale_times(three)) == 1);

    PathBundle mixed({series("a", {0, 0.1, 2 * pi}, {1, 1, 1})});
    CHECK(nyquist_cutoff(rescale_times(mixed)) == 31);
}

TEST_CASE("average-gap cutoff uses the mean arrival rate")
{
    PathBundle b({series("a", {0, 10, 20, 30, 40, 50, 60, 70, 80}, std::vector<double>(9, 1.0)),
                  series("b", {0, 40, 80}, {1, 1, 1})});
    // rates 1/10 and 1/40 average to 1/16: 80 / 16 / 2 = 2.5
    CHECK(average_gap_cutoff(b) == 2);
}

TEST_CASE("MM on identical synchronous series gives rho 1")
{
    std::mt19937_64 rng(7);
    auto s = random_walk("a", random_times(rng, 200, 5000), rng);
    PathBundle b({s, TickSeries("b", std::vector<double>(s.times().begin(), s.times().end()),
                                std::vector<double>(s.prices().begin(), s.prices().end()))});
    const auto r = mm_covariance(b);
    CHECK(std::abs(r.rho(0, 1) - 1.0) < 1e-10);
    CHECK(r.cutoff_used.has_value());
    CHECK(r.estimator == EstimatorTag::MM);
}

TEST_CASE("MM toy pair against the literal double sum")
{
    PathBundle b({series("a", {0, 1, 2, 3}, {100, 101, 99.5, 100.5}), series("b", {0, 2, 3}, {50, 50.5, 50.2})});
    for (int n : {1, 2, 3, 7})
    {
        const auto got = mm_covariance(b, n, FourierMethod::direct);
        const auto want = oracle::mm_sigma(b, n);
        CHECK(max_abs(got.sigma - want) < 1e-12);
        if (n == 1)
            CHECK(max_abs(mm_covariance(b, n, FourierMethod::fft).sigma - want) < 1e-12);
    }
}

TEST_CASE("MM random instances against the oracle, direct and FFT")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial)
    {
        std::uniform_int_distribution<std::size_t> count(2, 30);
        auto a = random_walk("a", random_times(rng, count(rng), 120), rng);
        auto b = random_walk("b", random_times(rng, count(rng), 120), rng);
        PathBundle bundle({a, b});
        const int n = std::uniform_int_distribution<int>(1, 20)(rng);
        const auto want = oracle::mm_sigma(bundle, n);
        const double scale = max_abs(want);
        CHECK(max_abs(mm_covariance(bundle, n, FourierMethod::direct).sigma - want) <= 1e-10 * scale);
        if (2 * n <= bundle.t_max() - bundle.t_min())
            CHECK(max_abs(mm_covariance(bundle, n, FourierMethod::fft).sigma - want) <= 1e-10 * scale);
        CHECK(max_abs(mm_covariance(bundle, n).sigma - want) <= 1e-10 * scale);
    }
}

TEST_CASE("MM FFT path refuses non-integer grids")
{
    PathBundle b({series("a", {0, 0.5, 2}, {1, 2, 1}), series("b", {0, 1, 2}, {1, 2, 3})});
    CHECK_THROWS_AS(mm_covariance(b, 1, FourierMethod::fft), InputError);
    CHECK_NOTHROW(mm_covariance(b, 1, FourierMethod::direct));
}

TEST_CASE("MM preconditions")
{
    PathBundle flat({series("a", {0, 1, 2}, {1, 1, 1}), series("b", {0, 1, 2}, {1, 2, 1})});
    CHECK_THROWS_AS(mm_covariance(flat), InputError);
    PathBundle tiny({series("a", {0}, {1}), series("b", {0, 1}, {1, 2})});
    CHECK_THROWS_AS(mm_covariance(tiny), InputError);
    PathBundle dup({series("a", {0, 1, 1}, {1, 2, 3}), series("b", {0, 1, 2}, {1, 2, 1})});
    CHECK_THROWS_AS(mm_covariance(dup), InputError);
}

TEST_CASE("kanatani weights")
{
    std::vector<double> g{0, 1, 2};
    auto w = kanatani_weights(g, g);
    REQUIRE(w.rows == 2);
    REQUIRE(w.cols == 2);
    CHECK((w(0, 0) == 1 && w(0, 1) == 0 && w(1, 0) == 0 && w(1, 1) == 1));

    std::vector<double> big{0, 2};
    w = kanatani_weights(big, g);
    REQUIRE(w.rows == 1);
    CHECK((w(0, 0) == 1 && w(0, 1) == 1));

    std::vector<double> x{0, 1, 3}, y{0, 2, 3};
    w = kanatani_weights(x, y);
    CHECK((w(0, 0) == 1 && w(0, 1) == 0 && w(1, 0) == 1 && w(1, 1) == 1));

    std::vector<double> single{0};
    CHECK_THROWS_AS(kanatani_weights(single, g), InputError);
}

TEST_CASE("HY toy 3-vs-4 against the naive double loop")
{
    auto a = series("a", {0, 2, 5}, {100, 102, 101});
    auto b = series("b", {1, 2, 3, 6}, {20, 20.4, 20.1, 20.3});
    const auto r = hy_covariance(PathBundle({a, b}));
    CHECK(r.sigma(0, 1) == doctest::Approx(oracle::hy_entry(a, b)).epsilon(1e-14));
    CHECK(r.sigma(0, 0) == doctest::Approx(oracle::hy_entry(a, a)).epsilon(1e-14));
}

TEST_CASE("HY sweep, weighted form and oracle agree on random instances")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::uniform_int_distribution<std::size_t> count(2, 20);
        auto a = random_walk("a", random_times(rng, count(rng), 40), rng);
        auto b = random_walk("b", random_times(rng, count(rng), 40), rng);
        const auto ra = log_returns(a), rb = log_returns(b);
        const double want = oracle::hy_entry(a, b);
        const double sweep = hy_cross_sweep(a.times(), ra, b.times(), rb);
        const double weighted = hy_cross_weighted(kanatani_weights(a.times(), b.times()), ra, rb);
        CHECK(std::abs(sweep - want) <= 1e-12 * std::max(1e-300, std::abs(want)) + 1e-18);
        CHECK(std::abs(weighted - want) <= 1e-12 * std::max(1e-300, std::abs(want)) + 1e-18);
    }
}

TEST_CASE("HY on a synchronous grid is the realized covariance")
{
    std::mt19937_64 rng(5);
    const auto t = random_times(rng, 10, 100);
    PathBundle b({random_walk("a", t, rng), random_walk("b", t, rng)});
    const auto hy = hy_covariance(b);
    const auto rv = realized_covariance(b);
    CHECK(max_abs(hy.sigma - rv.sigma) <= 1e-12 * max_abs(rv.sigma));

    const auto ra = log_returns(b[0]), rb = log_returns(b[1]);
    double sum = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k)
        sum += ra[k] * rb[k];
    CHECK(hy.sigma(0, 1) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("realized covariance")
{
    const double e = std::exp(1.0);
    PathBundle orth({series("a", {0, 1, 2}, {1, e, 1}), series("b", {0, 1, 2}, {1, e, e * e})});
    CHECK(std::abs(realized_covariance(orth).sigma(0, 1)) < 1e-15);

    auto s = series("a", {0, 1, 2, 3}, {1, 2, 1.5, 3});
    PathBundle same({s, series("b", {0, 1, 2, 3}, {1, 2, 1.5, 3})});
    CHECK(realized_covariance(same).rho(0, 1) == doctest::Approx(1.0).epsilon(1e-15));

    PathBundle async({series("a", {0, 1, 2}, {1, 2, 1}), series("b", {0, 1.5, 2}, {1, 2, 1})});
    CHECK_THROWS_AS(realized_covariance(async), InputError);
}

TEST_CASE("epps theory curve")
{
    CHECK(epps_theory_curve(0.5, 1.0, 1e9) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(epps_theory_curve(0.5, 1.0, 1e-9)) < 1e-9);
    CHECK(std::abs(epps_theory_curve(0.5, 1.0 / 15.0, 45.0) - 0.5 * (1.0 + (std::exp(-3.0) - 1.0) / 3.0)) < 1e-12);
    CHECK(epps_theory_curve(0.5, 1.0 / 15.0, 45.0) == doctest::Approx(0.34163).epsilon(1e-5));
}
