/**
 * @file estimators.hpp
 * @brief Nonparametric integrated-covariance estimators for asynchronous ticks.
 *
 * - Malliavin-Mancino (MM): Fourier coefficients of the returns on the
 *   rescaled [0, 2*pi] clock, convolved up to a cutoff N.
 * - Hayashi-Yoshida (HY): sum of return products over every pair of
 *   overlapping return intervals.
 * - Realized covariance (RV): synchronous return products; the reference
 *   HY collapses to on a shared grid.
 *
 * All estimators expect strictly increasing times per series; duplicate
 * stamps must be merged first (see aggregation::dedupe_trades).
 */

#pragma once

#include "epps/core.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace epps
{

/**
 * @brief Fourier coefficients of one bundle's returns, k = 1..N.
 *
 * plus[i][k-1] = sum_j exp(+i k tau_j) delta_j and minus the same with
 * exp(-i k tau_j), where tau_j is the left end of return j.
 */
struct FourierCoefficients
{
    std::vector<std::vector<std::complex<double>>> plus;
    std::vector<std::vector<std::complex<double>>> minus;
    int n_coeffs = 0;
};

/// 0/1 overlap matrix between the return intervals of two series.
struct KanataniWeights
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> w;

    std::uint8_t operator()(std::size_t k, std::size_t l) const { return w[k * cols + l]; }
};

/**
 * @brief Largest N resolvable without aliasing: floor(pi / min gap on the
 * rescaled clock).
 * @throws InputError "no frequency content" when all times coincide.
 */
int nyquist_cutoff(const RescaledTimes &rescaled);

/// Nyquist N from the arrival rate averaged across assets, floor(T * mean rate / 2), at least 1.
int average_gap_cutoff(const PathBundle &bundle);

/// Both coefficient families for every asset of the bundle.
FourierCoefficients fourier_coefficients(const RescaledTimes &rescaled,
                                         std::span<const std::vector<double>> returns, int n_coeffs);

/**
 * @brief MM integrated covariance.
 *
 * sigma_ij = (1/N) sum_{k=1..N} Re[ (c+_k(i) c-_k(j) + c-_k(i) c+_k(j)) / 2 ],
 * which equals the |s| <= N Fourier convolution without the k = 0 term and
 * without the constant 2*pi prefactor. When cutoff is absent the Nyquist
 * cutoff of the bundle is used.
 *
 * @throws InputError on fewer than two ticks, repeated time stamps, or a
 *         series whose returns are all zero.
 */
CovarianceResult mm_covariance(const PathBundle &bundle, std::optional<int> cutoff = std::nullopt);

enum class FourierMethod
{
    /// FFT when every time is an integer offset from t_min and it is cheaper.
    automatic,
    /// Phase-rotation sums over the ticks; works for any time stamps.
    direct,
    /// Real DFT over the integer grid; throws if the grid condition fails.
    fft
};

CovarianceResult mm_covariance(const PathBundle &bundle, std::optional<int> cutoff, FourierMethod method);

/**
 * @brief Overlap weights for half-open intervals (t_{k-1}, t_k].
 *
 * Two intervals overlap iff a_{k-1} < b_l and b_{l-1} < a_k.
 * @throws InputError if either input is not strictly increasing or has
 *         fewer than two entries.
 */
KanataniWeights kanatani_weights(std::span<const double> times_i, std::span<const double> times_j);

/// delta_i^T W delta_j with a materialised weight matrix.
double hy_cross_weighted(const KanataniWeights &w, std::span<const double> returns_i,
                         std::span<const double> returns_j);

/**
 * @brief delta_i^T W delta_j evaluated by an interval sweep.
 *
 * Linear in the number of ticks; equals hy_cross_weighted on every input.
 * On identical grids it reproduces the realized covariance sum exactly.
 */
double hy_cross_sweep(std::span<const double> times_i, std::span<const double> returns_i,
                      std::span<const double> times_j, std::span<const double> returns_j);

/// HY covariance matrix; diagonal is each series' realized variance.
CovarianceResult hy_covariance(const PathBundle &bundle);

/// Synchronous realized covariance; throws if time stamps differ across series.
CovarianceResult realized_covariance(const PathBundle &bundle);

/**
 * @brief Correlation implied by asynchronous Poisson sampling at interval dt.
 *
 * c * (1 + (exp(-lambda*dt) - 1) / (lambda*dt)); lambda is the mean arrival
 * intensity (per second) and c the asymptotic correlation.
 */
double epps_theory_curve(double c, double lambda, double dt);

} // namespace epps
