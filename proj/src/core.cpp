#include "epps/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace epps
{

TickSeries::TickSeries(std::string asset_id, std::vector<double> times, std::vector<double> prices,
                       std::vector<std::int64_t> volumes)
    : asset_id_(std::move(asset_id)), times_(std::move(times)), prices_(std::move(prices)),
      volumes_(std::move(volumes))
{
    if (volumes_.empty())
        volumes_.assign(times_.size(), 1);

    if (times_.empty())
        throw InputError("series '" + asset_id_ + "': no ticks");
    if (times_.size() != prices_.size() || times_.size() != volumes_.size())
        throw InputError("series '" + asset_id_ + "': times, prices and volumes differ in length");

    for (std::size_t i = 0; i < times_.size(); ++i)
    {
        if (!std::isfinite(times_[i]))
            throw InputError("series '" + asset_id_ + "': non-finite time at index " + std::to_string(i));
        if (i > 0 && times_[i] < times_[i - 1])
            throw InputError("series '" + asset_id_ + "': times decrease at index " + std::to_string(i));
        if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i]))
            throw InputError("series '" + asset_id_ + "': non-positive price at index " + std::to_string(i));
        if (volumes_[i] < 1)
            throw InputError("series '" + asset_id_ + "': volume below 1 at index " + std::to_string(i));
    }
}

bool TickSeries::strictly_increasing() const noexcept
{
    return std::adjacent_find(times_.begin(), times_.end(),
                              [](double a, double b) { return !(a < b); }) == times_.end();
}

std::int64_t TickSeries::total_volume() const noexcept
{
    return std::accumulate(volumes_.begin(), volumes_.end(), std::int64_t{0});
}

PathBundle::PathBundle(std::vector<TickSeries> series) : series_(std::move(series))
{
    if (series_.empty())
        throw InputError("empty bundle");
    t_min_ = series_.front().front_time();
    t_max_ = series_.front().back_time();
    for (const auto &s : series_)
    {
        if (s.empty())
            throw InputError("series '" + s.asset_id() + "': no ticks");
        t_min_ = std::min(t_min_, s.front_time());
        t_max_ = std::max(t_max_, s.back_time());
    }
}

std::vector<std::string> PathBundle::asset_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(series_.size());
    for (const auto &s : series_)
        ids.push_back(s.asset_id());
    return ids;
}

std::string to_string(EstimatorTag tag)
{
    switch (tag)
    {
    case EstimatorTag::MM:
        return "MM";
    case EstimatorTag::HY:
        return "HY";
    case EstimatorTag::RV:
        return "RV";
    }
    return "?";
}

Matrix correlation_from_covariance(const Matrix &sigma, bool *out_of_range)
{
    const auto m = sigma.rows();
    Matrix rho(m, m);
    bool flagged = false;
    for (Eigen::Index i = 0; i < m; ++i)
    {
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (i == j)
            {
                rho(i, j) = 1.0;
                continue;
            }
            rho(i, j) = sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));
            if (std::abs(rho(i, j)) > 1.0)
                flagged = true;
        }
    }
    if (out_of_range)
        *out_of_range = flagged;
    return rho;
}

RescaledTimes rescale_times(const PathBundle &bundle)
{
    if (bundle.size() == 0)
        throw InputError("empty bundle");

    RescaledTimes out;
    out.t_min = bundle.t_min();
    out.t_max = bundle.t_max();
    const double length = out.t_max - out.t_min;
    if (!(length > 0.0))
        throw InputError("zero-length window");

    const double scale = 2.0 * std::numbers::pi / length;
    double min_gap = 0.0;
    out.tau.reserve(bundle.size());
    for (const auto &s : bundle.series())
    {
        const auto t = s.times();
        std::vector<double> tau(t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            tau[i] = scale * (t[i] - out.t_min);
            if (i > 0)
            {
                const double gap = t[i] - t[i - 1];
                if (gap > 0.0 && (min_gap == 0.0 || gap < min_gap))
                    min_gap = gap;
            }
        }
        // The global extremes land exactly on the interval ends.
        for (auto &v : tau)
            v = std::clamp(v, 0.0, 2.0 * std::numbers::pi);
        out.tau.push_back(std::move(tau));
    }
    out.min_source_gap = min_gap;
    return out;
}

std::vector<double> log_returns(const TickSeries &series)
{
    if (series.size() < 2)
        throw InputError("insufficient data: series '" + series.asset_id() + "' has fewer than 2 ticks");
    const auto p = series.prices();
    std::vector<double> r(p.size() - 1);
    for (std::size_t j = 0; j + 1 < p.size(); ++j)
        r[j] = std::log(p[j + 1]) - std::log(p[j]);
    return r;
}

Matrix cholesky(const Matrix &sigma, bool allow_semidefinite)
{
    const auto m = sigma.rows();
    if (sigma.cols() != m)
        throw InputError("cholesky: matrix is not square");
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-12 * (std::abs(sigma(i, j)) + std::abs(sigma(j, i))))
                throw InputError("cholesky: matrix is not symmetric at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");

    Matrix a = Matrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
    {
        double d = sigma(j, j);
        for (Eigen::Index k = 0; k < j; ++k)
            d -= a(j, k) * a(j, k);
        if (allow_semidefinite && std::abs(d) <= 1e-12 * std::abs(sigma(j, j)))
        {
            // column stays zero
            continue;
        }
        if (!(d > 0.0))
        {
            std::ostringstream msg;
            msg << "cholesky: matrix is not positive-definite (pivot " << j << " = " << d << ")";
            throw InputError(msg.str());
        }
        a(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < m; ++i)
        {
            double s = sigma(i, j);
            for (Eigen::Index k = 0; k < j; ++k)
                s -= a(i, k) * a(j, k);
            a(i, j) = s / a(j, j);
        }
    }
    return a;
}

} // namespace epps
