/**
 * @file core.hpp
 * @brief Shared domain types for asynchronous tick data.
 *
 * A TickSeries is one asset's (time, price, volume) event stream. A
 * PathBundle groups several series over a common clock window and is the
 * input to every covariance estimator.
 */

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epps
{

using Matrix = Eigen::MatrixXd;

/// Thrown for precondition violations on user-facing inputs.
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * @brief One asset's asynchronous event stream.
 *
 * Times are seconds since the window start, finite and non-decreasing.
 * Prices are strictly positive. Volumes are share counts >= 1; simulated
 * paths default every volume to 1.
 */
class TickSeries
{
public:
    TickSeries() = default;

    /// @throws InputError if any invariant is violated.
    TickSeries(std::string asset_id, std::vector<double> times, std::vector<double> prices,
               std::vector<std::int64_t> volumes = {});

    const std::string &asset_id() const noexcept { return asset_id_; }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> prices() const noexcept { return prices_; }
    std::span<const std::int64_t> volumes() const noexcept { return volumes_; }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    double front_time() const { return times_.front(); }
    double back_time() const { return times_.back(); }

    /// True when every consecutive pair of times is strictly increasing.
    bool strictly_increasing() const noexcept;

    std::int64_t total_volume() const noexcept;

private:
    std::string asset_id_;
    std::vector<double> times_;
    std::vector<double> prices_;
    std::vector<std::int64_t> volumes_;
};

/// Several series over a shared window [t_min, t_max].
class PathBundle
{
public:
    PathBundle() = default;
    explicit PathBundle(std::vector<TickSeries> series);

    std::span<const TickSeries> series() const noexcept { return series_; }
    const TickSeries &operator[](std::size_t i) const { return series_.at(i); }
    std::size_t size() const noexcept { return series_.size(); }

    double t_min() const noexcept { return t_min_; }
    double t_max() const noexcept { return t_max_; }

    std::vector<std::string> asset_ids() const;

private:
    std::vector<TickSeries> series_;
    double t_min_ = 0.0;
    double t_max_ = 0.0;
};

/**
 * @brief Event times mapped affinely onto [0, 2*pi].
 *
 * The map uses the global min/max over the whole bundle so every asset
 * shares one phase origin.
 */
struct RescaledTimes
{
    std::vector<std::vector<double>> tau;
    double t_min = 0.0;
    double t_max = 0.0;
    /// Smallest strictly positive gap between consecutive source times of
    /// any asset; zero when no such gap exists.
    double min_source_gap = 0.0;

    double window_length() const noexcept { return t_max - t_min; }
};

enum class EstimatorTag
{
    MM,
    HY,
    RV
};

std::string to_string(EstimatorTag tag);

/**
 * @brief Integrated covariance and correlation from one estimator run.
 *
 * rho is formed as sigma_ij / sqrt(sigma_ii * sigma_jj) with no clamping;
 * out_of_range is set when any off-diagonal |rho| exceeds 1.
 */
struct CovarianceResult
{
    Matrix sigma;
    Matrix rho;
    EstimatorTag estimator = EstimatorTag::MM;
    std::optional<int> cutoff_used;
    bool out_of_range = false;
};

/// rho from sigma, unit diagonal set exactly.
Matrix correlation_from_covariance(const Matrix &sigma, bool *out_of_range = nullptr);

/**
 * @brief Map every event time of the bundle onto [0, 2*pi].
 * @throws InputError "zero-length window" when t_max == t_min.
 */
RescaledTimes rescale_times(const PathBundle &bundle);

/// ln(p[j+1]) - ln(p[j]); throws "insufficient data" below two ticks.
std::vector<double> log_returns(const TickSeries &series);

/**
 * @brief Lower-triangular A with A * A^T == sigma.
 *
 * With allow_semidefinite, a pivot that vanishes to rounding zeroes its
 * column instead of failing (perfectly correlated drivers).
 * @throws InputError naming the failing pivot when sigma is not positive-definite.
 */
Matrix cholesky(const Matrix &sigma, bool allow_semidefinite = false);

} // namespace epps
