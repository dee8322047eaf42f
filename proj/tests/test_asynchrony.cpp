#include <doctest.h>

#include "epps/asynchrony.hpp"

#include <cmath>
#include <numeric>

using namespace epps;

namespace
{
TickSeries grid(std::size_t n)
{
    std::vector<double> t(n), p(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        t[k] = static_cast<double>(k);
        p[k] = 100.0 + static_cast<double>(k);
    }
    return TickSeries("g", std::move(t), std::move(p));
}

bool same(const TickSeries &a, const TickSeries &b)
{
    return std::ranges::equal(a.times(), b.times()) && std::ranges::equal(a.prices(), b.prices()) &&
           std::ranges::equal(a.volumes(), b.volumes());
}
} // namespace

TEST_CASE("decimate_missing")
{
    const auto s = grid(10000);
    CHECK(same(decimate_missing(s, 0.0, 1), s));

    const auto d = decimate_missing(s, 0.4, 1);
    CHECK(d.size() == 6000);
    CHECK(d.front_time() == 0.0);
    CHECK(d.strictly_increasing());
    for (std::size_t k = 0; k < d.size(); ++k)
        CHECK(d.prices()[k] == 100.0 + d.times()[k]);

    CHECK(same(decimate_missing(s, 0.4, 1), d));
    CHECK_FALSE(same(decimate_missing(s, 0.4, 2), d));

    CHECK_THROWS_AS(decimate_missing(s, 1.0, 1), InputError);
    CHECK_THROWS_AS(decimate_missing(s, -0.1, 1), InputError);
    CHECK_THROWS_AS(decimate_missing(grid(3), 0.9, 1), InputError);
}

TEST_CASE("exponential sampling thins a unit grid at rate 1 - e^-1")
{
    const auto s = grid(100000);
    const auto e = exponential_sample(s, 1.0, 5);
    const double kept = static_cast<double>(e.size()) / static_cast<double>(s.size());
    CHECK(std::abs(kept - (1.0 - std::exp(-1.0))) < 0.01);
    CHECK(e.front_time() >= 0.0);
    CHECK(e.strictly_increasing());
    for (std::size_t k = 0; k < e.size(); ++k)
        CHECK(e.prices()[k] == 100.0 + e.times()[k]);
    CHECK(same(exponential_sample(s, 1.0, 5), e));
}

TEST_CASE("exponential sampling tick counts")
{
    const auto day = grid(86400);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto e = exponential_sample(day, 45.0, seed);
        CHECK(std::abs(static_cast<double>(e.size()) - 1920.0) < 3.0 * std::sqrt(1920.0));
    }
    CHECK_THROWS_AS(exponential_sample(grid(10), 1e9, 1), InputError);
    CHECK_THROWS_AS(exponential_sample(grid(10), 0.0, 1), InputError);
}

TEST_CASE("synchronize_to")
{
    const auto s = grid(11);
    CHECK(same(synchronize_to(s, s.times()), s));

    TickSeries flat("f", {0, 3, 4}, {5, 5, 5});
    std::vector<double> ref{0.5, 1, 2, 9};
    const auto held = synchronize_to(flat, ref);
    for (double p : held.prices())
        CHECK(p == 5.0);

    std::vector<double> r{2.5, 7};
    const auto out = synchronize_to(s, r);
    REQUIRE(out.size() == 2);
    CHECK(out.times()[0] == 2.5);
    CHECK(out.prices()[0] == 102.0);
    CHECK(out.prices()[1] == 107.0);

    std::vector<double> early{-1, 2};
    CHECK_THROWS_AS(synchronize_to(s, early), InputError);
    std::vector<double> unsorted{3, 2};
    CHECK_THROWS_AS(synchronize_to(s, unsorted), InputError);
}
