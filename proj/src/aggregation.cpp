#include "epps/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <set>

#include "format.hpp"

namespace epps
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Running open/high/low/close and sum(p * shares) for one bar or bucket.
struct Accumulator
{
    double open = kNaN;
    double high = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    double close = kNaN;
    double notional = 0.0;
    std::int64_t shares = 0;

    void add(double price, std::int64_t volume)
    {
        if (shares == 0)
            open = price;
        high = std::max(high, price);
        low = std::min(low, price);
        close = price;
        notional += price * static_cast<double>(volume);
        shares += volume;
    }
};

void push_bar(BarSeries &bars, double time, double open, double high, double low, double close, double vwap,
              std::int64_t volume, bool missing)
{
    bars.bar_times.push_back(time);
    bars.open.push_back(open);
    bars.high.push_back(high);
    bars.low.push_back(low);
    bars.close.push_back(close);
    bars.vwap.push_back(vwap);
    bars.volume.push_back(volume);
    bars.missing.push_back(missing ? 1 : 0);
}

void push_missing(BarSeries &bars, double time)
{
    push_bar(bars, time, kNaN, kNaN, kNaN, kNaN, kNaN, 0, true);
}

void push_bucket(BarSeries &bars, double time, const Accumulator &acc)
{
    push_bar(bars, time, acc.open, acc.high, acc.low, acc.close, acc.notional / static_cast<double>(acc.shares),
             acc.shares, false);
}

void require_increasing(const TickSeries &s)
{
    if (!s.strictly_increasing())
        throw InputError("series '" + s.asset_id() + "' has repeated time stamps; aggregate repeated trades first");
}

/// Unconsumed shares of one asset, oldest first.
class ShareQueue
{
public:
    void push(double price, std::int64_t volume)
    {
        pieces_.push_back({price, volume});
        total_ += volume;
    }

    std::int64_t total() const noexcept { return total_; }

    Accumulator take(std::int64_t count)
    {
        Accumulator acc;
        while (count > 0)
        {
            auto &front = pieces_.front();
            const auto used = std::min(count, front.volume);
            acc.add(front.price, used);
            front.volume -= used;
            count -= used;
            total_ -= used;
            if (front.volume == 0)
                pieces_.pop_front();
        }
        return acc;
    }

private:
    struct Piece
    {
        double price;
        std::int64_t volume;
    };
    std::deque<Piece> pieces_;
    std::int64_t total_ = 0;
};

} // namespace

std::string to_string(BarKind kind)
{
    switch (kind)
    {
    case BarKind::calendar_close:
        return "calendar-close";
    case BarKind::calendar_vwap:
        return "calendar-vwap";
    case BarKind::intrinsic:
        return "intrinsic";
    case BarKind::sync_volume:
        return "sync-volume";
    }
    return "?";
}

BarKind bar_kind_from_string(const std::string &name)
{
    for (auto k : {BarKind::calendar_close, BarKind::calendar_vwap, BarKind::intrinsic, BarKind::sync_volume})
        if (to_string(k) == name)
            return k;
    throw InputError("unknown clock '" + name + "' (expected calendar-close, calendar-vwap, intrinsic or sync-volume)");
}

std::string to_string(Baseline baseline)
{
    return baseline == Baseline::least_liquid ? "least-liquid" : "most-liquid";
}

Baseline baseline_from_string(const std::string &name)
{
    if (name == "least-liquid")
        return Baseline::least_liquid;
    if (name == "most-liquid")
        return Baseline::most_liquid;
    throw InputError("unknown baseline '" + name + "' (expected least-liquid or most-liquid)");
}

TickSeries BarSeries::to_ticks() const
{
    std::vector<double> t, p;
    std::vector<std::int64_t> v;
    for (std::size_t k = 0; k < size(); ++k)
    {
        if (missing[k])
            continue;
        t.push_back(bar_times[k]);
        p.push_back(price(k));
        v.push_back(std::max<std::int64_t>(volume[k], 1));
    }
    if (t.empty())
        throw InputError("no non-missing bars for asset '" + asset_id + "'");
    return dedupe_trades(TickSeries(asset_id, std::move(t), std::move(p), std::move(v)));
}

TickSeries dedupe_trades(const TickSeries &series)
{
    if (series.strictly_increasing())
        return series;
    const auto times = series.times();
    const auto prices = series.prices();
    const auto volumes = series.volumes();
    std::vector<double> t, p;
    std::vector<std::int64_t> v;
    std::size_t k = 0;
    while (k < series.size())
    {
        double notional = 0.0;
        std::int64_t shares = 0;
        const double stamp = times[k];
        for (; k < series.size() && times[k] == stamp; ++k)
        {
            notional += prices[k] * static_cast<double>(volumes[k]);
            shares += volumes[k];
        }
        t.push_back(stamp);
        p.push_back(notional / static_cast<double>(shares));
        v.push_back(shares);
    }
    return TickSeries(series.asset_id(), std::move(t), std::move(p), std::move(v));
}

BarSeries calendar_bars(const TickSeries &series, double bar_length, std::optional<double> origin,
                        std::optional<double> end)
{
    if (!(bar_length > 0.0))
        throw InputError("bar length must be > 0");
    if (series.empty())
        throw InputError("cannot build bars from an empty series");
    require_increasing(series);

    const double o = origin.value_or(series.front_time());
    if (series.front_time() < o)
        throw InputError("trade before the bar origin in series '" + series.asset_id() + "'");
    const double last = std::max(end.value_or(series.back_time()), series.back_time());
    const auto n_bars = static_cast<std::size_t>(std::floor((last - o) / bar_length)) + 1;

    BarSeries bars;
    bars.asset_id = series.asset_id();
    bars.kind = BarKind::calendar_close;

    const auto times = series.times();
    const auto prices = series.prices();
    const auto volumes = series.volumes();
    std::size_t k = 0;
    double prev_close = kNaN;
    for (std::size_t j = 0; j < n_bars; ++j)
    {
        const double stamp = o + static_cast<double>(j + 1) * bar_length;
        Accumulator acc;
        for (; k < series.size() && times[k] < stamp; ++k)
            acc.add(prices[k], volumes[k]);
        if (acc.shares == 0)
        {
            if (std::isnan(prev_close))
                push_missing(bars, stamp);
            else
                push_bar(bars, stamp, prev_close, prev_close, prev_close, prev_close, prev_close, 0, false);
            continue;
        }
        const double open = std::isnan(prev_close) ? acc.open : prev_close;
        push_bar(bars, stamp, open, std::max(acc.high, open), std::min(acc.low, open), acc.close,
                 acc.notional / static_cast<double>(acc.shares), acc.shares, false);
        prev_close = acc.close;
    }
    return bars;
}

BarSeries intrinsic_volume_bars(const TickSeries &series, std::int64_t bucket_size)
{
    if (bucket_size < 1)
        throw InputError("bucket size must be at least 1 share");
    if (series.total_volume() < bucket_size)
        throw InputError("insufficient volume in series '" + series.asset_id() + "'");

    BarSeries bars;
    bars.asset_id = series.asset_id();
    bars.kind = BarKind::intrinsic;
    Accumulator acc;
    for (std::size_t k = 0; k < series.size(); ++k)
    {
        std::int64_t remaining = series.volumes()[k];
        while (remaining > 0)
        {
            const auto used = std::min(remaining, bucket_size - acc.shares);
            acc.add(series.prices()[k], used);
            remaining -= used;
            if (acc.shares == bucket_size)
            {
                push_bucket(bars, series.times()[k], acc);
                acc = Accumulator{};
            }
        }
    }
    return bars;
}

std::vector<BarSeries> synchronized_volume_bars(const PathBundle &bundle, std::int64_t bucket_size)
{
    if (bundle.size() == 0)
        throw InputError("empty bundle");
    if (bucket_size < 1)
        throw InputError("bucket size must be at least 1 share");
    const auto m = bundle.size();

    std::set<double> stamps;
    for (const auto &s : bundle.series())
    {
        require_increasing(s);
        stamps.insert(s.times().begin(), s.times().end());
    }

    std::vector<BarSeries> bars(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        bars[i].asset_id = bundle[i].asset_id();
        bars[i].kind = BarKind::sync_volume;
    }
    std::vector<ShareQueue> queues(m);
    std::vector<std::size_t> cursor(m, 0);

    for (double t : stamps)
    {
        for (std::size_t i = 0; i < m; ++i)
        {
            const auto &s = bundle[i];
            if (cursor[i] < s.size() && s.times()[cursor[i]] == t)
            {
                queues[i].push(s.prices()[cursor[i]], s.volumes()[cursor[i]]);
                ++cursor[i];
            }
        }
        while (std::any_of(queues.begin(), queues.end(), [&](const ShareQueue &q) { return q.total() >= bucket_size; }))
        {
            for (std::size_t i = 0; i < m; ++i)
            {
                if (queues[i].total() >= bucket_size)
                    push_bucket(bars[i], t, queues[i].take(bucket_size));
                else
                    push_missing(bars[i], t);
            }
        }
    }
    return bars;
}

double average_daily_volume(const TickSeries &series, double day_length)
{
    if (series.empty())
        throw InputError("cannot compute ADV of an empty series");
    if (!(day_length > 0.0))
        throw InputError("day length must be > 0");
    std::set<double> days;
    for (double t : series.times())
        days.insert(std::floor(t / day_length));
    return static_cast<double>(series.total_volume()) / static_cast<double>(days.size());
}

std::int64_t bucket_size_for(double adv, int buckets_per_day)
{
    if (buckets_per_day < 1)
        throw InputError("buckets per day must be at least 1");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(adv / buckets_per_day)));
}

std::int64_t synchronized_bucket_size(const PathBundle &bundle, int buckets_per_day, Baseline baseline,
                                      double day_length)
{
    if (bundle.size() == 0)
        throw InputError("empty bundle");
    double chosen = average_daily_volume(bundle[0], day_length);
    for (const auto &s : bundle.series())
    {
        const double adv = average_daily_volume(s, day_length);
        chosen = baseline == Baseline::least_liquid ? std::min(chosen, adv) : std::max(chosen, adv);
    }
    return bucket_size_for(chosen, buckets_per_day);
}

void write_bars_csv(std::ostream &out, const BarSeries &bars)
{
    out << "bar_time,open,high,low,close,volume,vwap,missing\n";
    for (std::size_t k = 0; k < bars.size(); ++k)
    {
        out << format_number(bars.bar_times[k]) << ',' << format_number(bars.open[k]) << ','
            << format_number(bars.high[k]) << ',' << format_number(bars.low[k]) << ','
            << format_number(bars.close[k]) << ',' << bars.volume[k] << ',' << format_number(bars.vwap[k]) << ','
            << static_cast<int>(bars.missing[k]) << '\n';
    }
}

} // namespace epps
