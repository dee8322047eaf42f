#include "epps/estimators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace epps
{

namespace
{

// Exact phases are recomputed this often so rotation error stays bounded.
constexpr int kReanchorEvery = 256;

void require_estimable(const TickSeries &s)
{
    if (s.size() < 2)
        throw InputError("insufficient data: series '" + s.asset_id() + "' has fewer than 2 ticks");
    if (!s.strictly_increasing())
        throw InputError("series '" + s.asset_id() +
                         "' has repeated time stamps; aggregate repeated trades first");
}

void require_variation(const TickSeries &s, std::span<const double> returns)
{
    if (std::all_of(returns.begin(), returns.end(), [](double r) { return r == 0.0; }))
        throw InputError("zero total variation in series '" + s.asset_id() + "'");
}

/// sum_j delta_j exp(sign * i k tau_j) for k = 1..n_coeffs.
std::vector<std::complex<double>> fourier_sum(std::span<const double> tau, std::span<const double> delta,
                                              int n_coeffs, double sign)
{
    const std::size_t n = delta.size();
    std::vector<double> step_re(n), step_im(n), cur_re(n), cur_im(n);
    for (std::size_t j = 0; j < n; ++j)
    {
        step_re[j] = std::cos(tau[j]);
        step_im[j] = sign * std::sin(tau[j]);
    }
    cur_re = step_re;
    cur_im = step_im;

    std::vector<std::complex<double>> out(static_cast<std::size_t>(n_coeffs));
    for (int k = 1; k <= n_coeffs; ++k)
    {
        if (k % kReanchorEvery == 0)
        {
            for (std::size_t j = 0; j < n; ++j)
            {
                cur_re[j] = std::cos(k * tau[j]);
                cur_im[j] = sign * std::sin(k * tau[j]);
            }
        }

        double acc_re[4] = {0.0, 0.0, 0.0, 0.0};
        double acc_im[4] = {0.0, 0.0, 0.0, 0.0};
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4)
        {
            for (std::size_t l = 0; l < 4; ++l)
            {
                const double d = delta[j + l];
                const double cr = cur_re[j + l];
                const double ci = cur_im[j + l];
                acc_re[l] += d * cr;
                acc_im[l] += d * ci;
                cur_re[j + l] = cr * step_re[j + l] - ci * step_im[j + l];
                cur_im[j + l] = cr * step_im[j + l] + ci * step_re[j + l];
            }
        }
        for (; j < n; ++j)
        {
            const double cr = cur_re[j];
            const double ci = cur_im[j];
            acc_re[0] += delta[j] * cr;
            acc_im[0] += delta[j] * ci;
            cur_re[j] = cr * step_re[j] - ci * step_im[j];
            cur_im[j] = cr * step_im[j] + ci * step_re[j];
        }
        out[static_cast<std::size_t>(k - 1)] = {(acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
                                                (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3])};
    }
    return out;
}

std::span<const double> left_ends(const std::vector<double> &tau)
{
    return std::span<const double>(tau.data(), tau.size() - 1);
}

// Largest window (in grid units) handed to the FFT path.
constexpr double kMaxFftLength = 1 << 24;

/// Window length when every event sits on an integer offset from t_min, else 0.
std::size_t integer_grid_length(const PathBundle &bundle)
{
    const double length = bundle.t_max() - bundle.t_min();
    if (!(length >= 1.0) || length > kMaxFftLength || length != std::floor(length))
        return 0;
    for (const auto &s : bundle.series())
        for (double t : s.times())
        {
            const double off = t - bundle.t_min();
            if (off != std::floor(off))
                return 0;
        }
    return static_cast<std::size_t>(length);
}

std::mutex &fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// c+_k for k = 1..n_coeffs from one real DFT of the returns placed on the grid.
std::vector<std::complex<double>> fourier_sum_fft(std::span<const double> times, double t_min,
                                                  std::span<const double> delta, std::size_t length,
                                                  int n_coeffs)
{
    const std::size_t bins = length / 2 + 1;
    double *in = fftw_alloc_real(length);
    fftw_complex *out = fftw_alloc_complex(bins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(length), in, out, FFTW_ESTIMATE);
    }
    std::fill(in, in + length, 0.0);
    for (std::size_t j = 0; j < delta.size(); ++j)
        in[static_cast<std::size_t>(times[j] - t_min)] = delta[j];
    fftw_execute(plan);

    std::vector<std::complex<double>> c(static_cast<std::size_t>(n_coeffs));
    for (int k = 1; k <= n_coeffs; ++k)
        c[static_cast<std::size_t>(k - 1)] = {out[k][0], -out[k][1]};
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return c;
}

bool use_fft(FourierMethod method, std::size_t grid_length, int n_coeffs, std::size_t ticks)
{
    switch (method)
    {
    case FourierMethod::direct:
        return false;
    case FourierMethod::fft:
        if (grid_length == 0 || static_cast<std::size_t>(n_coeffs) > grid_length / 2)
            throw InputError("FFT path needs integer event times and N <= window / 2");
        return true;
    case FourierMethod::automatic:
        break;
    }
    if (grid_length == 0 || static_cast<std::size_t>(n_coeffs) > grid_length / 2)
        return false;
    const double direct_cost = static_cast<double>(n_coeffs) * static_cast<double>(ticks);
    const double fft_cost = 8.0 * static_cast<double>(grid_length) * std::log2(static_cast<double>(grid_length) + 1.0);
    return direct_cost > fft_cost;
}

} // namespace

int nyquist_cutoff(const RescaledTimes &rescaled)
{
    if (!(rescaled.min_source_gap > 0.0) || !(rescaled.window_length() > 0.0))
        throw InputError("no frequency content");
    // pi / (2*pi*gap/T) in source units; the slack absorbs rounding when the
    // gap divides the window exactly.
    const double ratio = rescaled.window_length() / (2.0 * rescaled.min_source_gap);
    const auto n = static_cast<int>(std::floor(ratio * (1.0 + 1e-9)));
    return std::max(n, 1);
}

int average_gap_cutoff(const PathBundle &bundle)
{
    const double length = bundle.t_max() - bundle.t_min();
    if (!(length > 0.0))
        throw InputError("zero-length window");
    double freq = 0.0;
    std::size_t counted = 0;
    for (const auto &s : bundle.series())
    {
        const double span = s.back_time() - s.front_time();
        if (s.size() < 2 || !(span > 0.0))
            continue;
        freq += static_cast<double>(s.size() - 1) / span;
        ++counted;
    }
    if (counted == 0)
        throw InputError("no frequency content");
    freq /= static_cast<double>(counted);
    return std::max(static_cast<int>(std::floor(length * freq / 2.0)), 1);
}

FourierCoefficients fourier_coefficients(const RescaledTimes &rescaled,
                                         std::span<const std::vector<double>> returns, int n_coeffs)
{
    if (n_coeffs < 1)
        throw InputError("Fourier cutoff must be at least 1");
    if (returns.size() != rescaled.tau.size())
        throw InputError("returns and rescaled times cover different asset counts");

    FourierCoefficients fc;
    fc.n_coeffs = n_coeffs;
    for (std::size_t i = 0; i < returns.size(); ++i)
    {
        if (returns[i].size() + 1 != rescaled.tau[i].size())
            throw InputError("returns must have one entry fewer than times");
        fc.plus.push_back(fourier_sum(left_ends(rescaled.tau[i]), returns[i], n_coeffs, +1.0));
        fc.minus.push_back(fourier_sum(left_ends(rescaled.tau[i]), returns[i], n_coeffs, -1.0));
    }
    return fc;
}

CovarianceResult mm_covariance(const PathBundle &bundle, std::optional<int> cutoff)
{
    return mm_covariance(bundle, cutoff, FourierMethod::automatic);
}

CovarianceResult mm_covariance(const PathBundle &bundle, std::optional<int> cutoff, FourierMethod method)
{
    const auto m = bundle.size();
    std::vector<std::vector<double>> returns;
    returns.reserve(m);
    for (const auto &s : bundle.series())
    {
        require_estimable(s);
        returns.push_back(log_returns(s));
        require_variation(s, returns.back());
    }

    const RescaledTimes rescaled = rescale_times(bundle);
    const int n_coeffs = cutoff ? *cutoff : nyquist_cutoff(rescaled);
    if (n_coeffs < 1)
        throw InputError("Fourier cutoff must be at least 1");

    // Real returns give c- = conj(c+), so only c+ is formed here and
    // Re[c+(i) c-(j)] = re_i re_j + im_i im_j.
    std::size_t ticks = 0;
    for (const auto &r : returns)
        ticks += r.size();
    const std::size_t grid_length = method == FourierMethod::direct ? 0 : integer_grid_length(bundle);
    const bool fft = use_fft(method, grid_length, n_coeffs, ticks);

    std::vector<std::vector<std::complex<double>>> coeffs;
    coeffs.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        if (fft)
            coeffs.push_back(fourier_sum_fft(bundle[i].times(), bundle.t_min(), returns[i], grid_length, n_coeffs));
        else
            coeffs.push_back(fourier_sum(left_ends(rescaled.tau[i]), returns[i], n_coeffs, +1.0));
    }

    CovarianceResult result;
    result.estimator = EstimatorTag::MM;
    result.cutoff_used = n_coeffs;
    result.sigma = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
    {
        for (std::size_t j = i; j < m; ++j)
        {
            double acc = 0.0;
            for (int k = 0; k < n_coeffs; ++k)
            {
                const auto &a = coeffs[i][static_cast<std::size_t>(k)];
                const auto &b = coeffs[j][static_cast<std::size_t>(k)];
                acc += a.real() * b.real() + a.imag() * b.imag();
            }
            const double v = acc / n_coeffs;
            result.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            result.sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    result.rho = correlation_from_covariance(result.sigma, &result.out_of_range);
    return result;
}

KanataniWeights kanatani_weights(std::span<const double> times_i, std::span<const double> times_j)
{
    auto check = [](std::span<const double> t) {
        if (t.size() < 2)
            throw InputError("kanatani weights need at least 2 times per series");
        for (std::size_t k = 1; k < t.size(); ++k)
            if (!(t[k - 1] < t[k]))
                throw InputError("kanatani weights need strictly increasing times");
    };
    check(times_i);
    check(times_j);

    KanataniWeights w;
    w.rows = times_i.size() - 1;
    w.cols = times_j.size() - 1;
    w.w.assign(w.rows * w.cols, 0);
    for (std::size_t k = 0; k < w.rows; ++k)
        for (std::size_t l = 0; l < w.cols; ++l)
            if (times_i[k] < times_j[l + 1] && times_j[l] < times_i[k + 1])
                w.w[k * w.cols + l] = 1;
    return w;
}

double hy_cross_weighted(const KanataniWeights &w, std::span<const double> returns_i,
                         std::span<const double> returns_j)
{
    if (returns_i.size() != w.rows || returns_j.size() != w.cols)
        throw InputError("weight matrix shape does not match the return vectors");
    double total = 0.0;
    for (std::size_t k = 0; k < w.rows; ++k)
        for (std::size_t l = 0; l < w.cols; ++l)
            if (w(k, l))
                total += returns_i[k] * returns_j[l];
    return total;
}

double hy_cross_sweep(std::span<const double> times_i, std::span<const double> returns_i,
                      std::span<const double> times_j, std::span<const double> returns_j)
{
    if (returns_i.size() + 1 != times_i.size() || returns_j.size() + 1 != times_j.size())
        throw InputError("returns must have one entry fewer than times");

    const std::size_t n_j = returns_j.size();
    std::size_t lo = 0;
    double total = 0.0;
    for (std::size_t k = 0; k < returns_i.size(); ++k)
    {
        const double left = times_i[k];
        const double right = times_i[k + 1];
        // Intervals of j ending at or before `left` can no longer overlap.
        while (lo < n_j && times_j[lo + 1] <= left)
            ++lo;
        double partial = 0.0;
        for (std::size_t l = lo; l < n_j && times_j[l] < right; ++l)
            partial += returns_j[l];
        total += returns_i[k] * partial;
    }
    return total;
}

CovarianceResult hy_covariance(const PathBundle &bundle)
{
    const auto m = bundle.size();
    std::vector<std::vector<double>> returns;
    returns.reserve(m);
    for (const auto &s : bundle.series())
    {
        require_estimable(s);
        returns.push_back(log_returns(s));
        require_variation(s, returns.back());
    }

    CovarianceResult result;
    result.estimator = EstimatorTag::HY;
    result.sigma = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
    {
        for (std::size_t j = i; j < m; ++j)
        {
            double v = 0.0;
            if (i == j)
            {
                for (double r : returns[i])
                    v += r * r;
            }
            else
            {
                v = hy_cross_sweep(bundle[i].times(), returns[i], bundle[j].times(), returns[j]);
            }
            result.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            result.sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    result.rho = correlation_from_covariance(result.sigma, &result.out_of_range);
    return result;
}

CovarianceResult realized_covariance(const PathBundle &bundle)
{
    const auto m = bundle.size();
    const auto reference = bundle[0].times();
    std::vector<std::vector<double>> returns;
    returns.reserve(m);
    for (const auto &s : bundle.series())
    {
        require_estimable(s);
        const auto t = s.times();
        if (t.size() != reference.size() || !std::equal(t.begin(), t.end(), reference.begin()))
            throw InputError("realized covariance needs synchronous series; '" + s.asset_id() +
                             "' has different time stamps");
        returns.push_back(log_returns(s));
        require_variation(s, returns.back());
    }

    CovarianceResult result;
    result.estimator = EstimatorTag::RV;
    result.sigma = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
    {
        for (std::size_t j = i; j < m; ++j)
        {
            double v = 0.0;
            for (std::size_t k = 0; k < returns[i].size(); ++k)
                v += returns[i][k] * returns[j][k];
            result.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            result.sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    result.rho = correlation_from_covariance(result.sigma, &result.out_of_range);
    return result;
}

double epps_theory_curve(double c, double lambda, double dt)
{
    if (!(lambda > 0.0) || !(dt > 0.0))
        throw InputError("epps curve needs lambda > 0 and dt > 0");
    const double x = lambda * dt;
    return c * (1.0 + std::expm1(-x) / x);
}

} // namespace epps
