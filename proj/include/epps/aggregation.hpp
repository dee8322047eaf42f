/**
 * @file aggregation.hpp
 * @brief Tick aggregation clocks: repeated-trade VWAP, calendar bars, and
 * intrinsic and synchronised volume buckets.
 *
 * Volume clocks never expand trades into single shares; they walk
 * cumulative volume and split a trade across bucket boundaries, which gives
 * the same bucket means as the literal share expansion.
 */

#pragma once

#include "epps/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace epps
{

enum class BarKind
{
    calendar_close,
    calendar_vwap,
    intrinsic,
    sync_volume
};

std::string to_string(BarKind kind);
BarKind bar_kind_from_string(const std::string &name);

/**
 * @brief Aggregated bars of one asset.
 *
 * Calendar bars are stamped at the bar end. Volume buckets are stamped with
 * the time of the trade that completed them. For volume buckets open, high,
 * low and close describe the shares inside the bucket and vwap is the
 * bucket price. Missing bars hold NaN prices and zero volume.
 */
struct BarSeries
{
    std::string asset_id;
    BarKind kind = BarKind::calendar_close;
    std::vector<double> bar_times;
    std::vector<double> open;
    std::vector<double> high;
    std::vector<double> low;
    std::vector<double> close;
    std::vector<double> vwap;
    std::vector<std::int64_t> volume;
    std::vector<std::uint8_t> missing;

    std::size_t size() const noexcept { return bar_times.size(); }

    /// Price the estimators consume: close for calendar_close, vwap otherwise.
    double price(std::size_t k) const { return kind == BarKind::calendar_close ? close[k] : vwap[k]; }

    /**
     * @brief Non-missing bars as ticks (time, price, volume); bars sharing a
     * time stamp are merged by dedupe_trades.
     */
    TickSeries to_ticks() const;
};

/// Merge trades sharing a time stamp: price = sum(p v) / sum(v), volume = sum(v).
TickSeries dedupe_trades(const TickSeries &series);

/**
 * @brief OHLCV and VWAP bars of fixed length.
 *
 * Bar j covers [origin + (j-1) L, origin + j L) and is stamped at its end.
 * origin defaults to the first trade; the grid extends until it covers `end`
 * (default: the last trade). The first open is the first trade price and
 * every later open is the previous close. Empty bars carry the previous
 * close with zero volume; empty bars before the first trade are missing.
 * @throws InputError if bar_length <= 0, the series is empty or times
 *         are not strictly increasing.
 */
BarSeries calendar_bars(const TickSeries &series, double bar_length, std::optional<double> origin = std::nullopt,
                        std::optional<double> end = std::nullopt);

/**
 * @brief Buckets of `bucket_size` shares on the asset's own volume clock.
 *
 * Each bucket price is the mean over its shares; a trailing partial
 * bucket is dropped.
 * @throws InputError "insufficient volume" when fewer than bucket_size shares trade.
 */
BarSeries intrinsic_volume_bars(const TickSeries &series, std::int64_t bucket_size);

/**
 * @brief Buckets of a common size filled asynchronously across assets.
 *
 * Trades are walked in calendar order. After the trades at each time stamp
 * are added, while any asset holds at least `bucket_size` unconsumed shares
 * a bucket is emitted for every asset: assets holding enough shares emit
 * the mean of their first bucket_size shares and consume them, the others
 * emit a missing bucket. Buckets carry the time stamp of the triggering
 * trades. Each input series must have strictly increasing times.
 * @throws InputError on an empty bundle or bucket_size < 1.
 */
std::vector<BarSeries> synchronized_volume_bars(const PathBundle &bundle, std::int64_t bucket_size);

enum class Baseline
{
    least_liquid,
    most_liquid
};

std::string to_string(Baseline baseline);
Baseline baseline_from_string(const std::string &name);

/// Total volume over the number of distinct days (floor(t / day_length)) with trades.
double average_daily_volume(const TickSeries &series, double day_length = 86400.0);

/// max(1, floor(adv / buckets_per_day)).
std::int64_t bucket_size_for(double adv, int buckets_per_day);

/// Common bucket size from the least or most liquid asset's ADV.
std::int64_t synchronized_bucket_size(const PathBundle &bundle, int buckets_per_day, Baseline baseline,
                                      double day_length = 86400.0);

/// CSV with header bar_time,open,high,low,close,volume,vwap,missing.
void write_bars_csv(std::ostream &out, const BarSeries &bars);

} // namespace epps
