/**
 * @file asynchrony.hpp
 * @brief Turn synchronous simulated paths into asynchronous tick streams.
 *
 * Sampling is always previous-tick: a query time receives the most recent
 * source price at or before it.
 */

#pragma once

#include "epps/core.hpp"

#include <cstdint>
#include <span>

namespace epps
{

/**
 * @brief Drop a fixed share of ticks at random.
 *
 * Keeps exactly round((1 - fraction) * n) ticks in order; tick 0 is always
 * kept and the rest form a uniform random subset of ticks 1..n-1.
 * @throws InputError if fraction is outside [0, 1) or fewer than 2 ticks remain.
 */
TickSeries decimate_missing(const TickSeries &series, double fraction, std::uint64_t seed);

/**
 * @brief Sample a path at exponential inter-arrival times.
 *
 * Arrivals start at the first source time and accumulate Exp(mean_gap)
 * gaps. Each arrival is floored to the latest source time at or before it;
 * repeated source times are kept once.
 * @throws InputError if mean_gap <= 0 or fewer than 2 arrivals land in the window.
 */
TickSeries exponential_sample(const TickSeries &series, double mean_gap, std::uint64_t seed);

/**
 * @brief Observe a series at the given times by previous tick.
 * @throws InputError if a reference time precedes the first source tick or
 *         the reference times are not strictly increasing.
 */
TickSeries synchronize_to(const TickSeries &series, std::span<const double> reference_times);

} // namespace epps
