#include "epps/asynchrony.hpp"

#include "epps/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace epps
{

namespace
{

TickSeries subset(const TickSeries &series, const std::vector<std::size_t> &keep)
{
    std::vector<double> t, p;
    std::vector<std::int64_t> v;
    t.reserve(keep.size());
    p.reserve(keep.size());
    v.reserve(keep.size());
    for (auto k : keep)
    {
        t.push_back(series.times()[k]);
        p.push_back(series.prices()[k]);
        v.push_back(series.volumes()[k]);
    }
    return TickSeries(series.asset_id(), std::move(t), std::move(p), std::move(v));
}

/// Index of the last source tick with time <= t, or npos.
std::size_t previous_tick(std::span<const double> times, double t)
{
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin())
        return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

} // namespace

TickSeries decimate_missing(const TickSeries &series, double fraction, std::uint64_t seed)
{
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw InputError("missing fraction must lie in [0, 1)");
    const std::size_t n = series.size();
    const auto keep_count = static_cast<std::size_t>(std::llround((1.0 - fraction) * static_cast<double>(n)));
    if (n < 2 || keep_count < 2)
        throw InputError("decimation leaves fewer than 2 ticks in series '" + series.asset_id() + "'");
    if (keep_count >= n)
        return series;

    // Partial Fisher-Yates over ticks 1..n-1, then restore time order.
    Engine engine = make_engine(seed, Stream::decimation);
    std::vector<std::size_t> pool(n - 1);
    std::iota(pool.begin(), pool.end(), std::size_t{1});
    const std::size_t draws = keep_count - 1;
    for (std::size_t i = 0; i < draws; ++i)
    {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(engine)]);
    }
    std::vector<std::size_t> keep(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(draws));
    keep.push_back(0);
    std::sort(keep.begin(), keep.end());
    return subset(series, keep);
}

TickSeries exponential_sample(const TickSeries &series, double mean_gap, std::uint64_t seed)
{
    if (!(mean_gap > 0.0))
        throw InputError("mean inter-arrival gap must be > 0");
    if (series.empty())
        throw InputError("cannot sample an empty series");

    Engine engine = make_engine(seed, Stream::arrivals);
    std::exponential_distribution<double> gap(1.0 / mean_gap);
    const auto times = series.times();
    std::vector<std::size_t> keep;
    double t = series.front_time();
    while (true)
    {
        t += gap(engine);
        if (t > series.back_time())
            break;
        const auto k = previous_tick(times, t);
        if (keep.empty() || keep.back() != k)
            keep.push_back(k);
    }
    if (keep.size() < 2)
        throw InputError("fewer than 2 arrivals inside the window of series '" + series.asset_id() + "'");
    return subset(series, keep);
}

TickSeries synchronize_to(const TickSeries &series, std::span<const double> reference_times)
{
    if (reference_times.empty())
        throw InputError("no reference times to synchronise to");
    std::vector<std::size_t> source;
    source.reserve(reference_times.size());
    for (std::size_t r = 0; r < reference_times.size(); ++r)
    {
        if (r > 0 && !(reference_times[r] > reference_times[r - 1]))
            throw InputError("reference times must be strictly increasing");
        const auto k = previous_tick(series.times(), reference_times[r]);
        if (k == static_cast<std::size_t>(-1))
            throw InputError("reference time precedes the first tick of series '" + series.asset_id() + "'");
        source.push_back(k);
    }
    std::vector<double> t(reference_times.begin(), reference_times.end());
    std::vector<double> p;
    std::vector<std::int64_t> v;
    p.reserve(source.size());
    v.reserve(source.size());
    for (auto k : source)
    {
        p.push_back(series.prices()[k]);
        v.push_back(series.volumes()[k]);
    }
    return TickSeries(series.asset_id(), std::move(t), std::move(p), std::move(v));
}

} // namespace epps
