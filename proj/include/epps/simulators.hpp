/**
 * @file simulators.hpp
 * @brief Correlated path generators on a uniform one-second grid.
 *
 * Every model evolves log-prices and exponentiates at the end, so emitted
 * prices are strictly positive. Parameters are per day and one step is one
 * second (dt = 1/86400) unless a config says otherwise.
 *
 * Random streams (see random.hpp) are split by role: the correlated
 * Gaussian drivers always come from Stream::diffusion, drawn asset-major
 * within each step, so models that share a seed share the same drivers.
 * Jumps, subordinator draws and variance shocks use their own streams.
 */

#pragma once

#include "epps/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace epps
{

enum class Model
{
    gbm,
    merton,
    variance_gamma,
    garch,
    ou
};

enum class GarchVariant
{
    /// d sigma^2 = theta (w - sigma^2) dt + sqrt(2 lambda theta) sigma^2 dW
    andersen,
    /// d sigma^2 = theta (w - sigma^2) dt + sqrt(2 lambda theta) sigma dW
    reno
};

enum class Subordinator
{
    /// One gamma clock drives every asset.
    shared,
    /// Each asset draws its own gamma clock.
    independent,
    /// Y = dt exactly; the model collapses to arithmetic Brownian motion.
    degenerate
};

std::string to_string(Model model);
std::string to_string(GarchVariant variant);
std::string to_string(Subordinator subordinator);
Model model_from_string(const std::string &name);
GarchVariant garch_variant_from_string(const std::string &name);
Subordinator subordinator_from_string(const std::string &name);

struct MertonParams
{
    std::vector<double> lambda; ///< jump intensity per day
    std::vector<double> a;      ///< log jump location
    std::vector<double> b;      ///< log jump scale
};

struct VgParams
{
    /// Variance rate of the gamma clock, in units of one step.
    std::vector<double> beta;
    Subordinator subordinator = Subordinator::shared;
};

struct GarchParams
{
    std::vector<double> theta;
    std::vector<double> w;
    std::vector<double> lambda;
    std::vector<double> start_variance; ///< defaults to w when empty
    GarchVariant variant = GarchVariant::andersen;
};

struct OuParams
{
    std::vector<double> theta;           ///< mean-reversion rate per unit of dt
    std::vector<double> long_term_price; ///< level mu the log-price reverts to (as ln mu)
};

struct SimConfig
{
    Model model = Model::gbm;
    std::size_t n_steps = 10000;
    double dt = 1.0 / 86400.0;
    std::vector<double> start_price{100.0, 100.0};
    std::vector<double> mu{0.01, 0.01};
    std::vector<double> sigma2{0.1, 0.2};
    /// Unit-diagonal correlation of the Gaussian drivers.
    Matrix correlation = Matrix::Identity(2, 2);
    std::uint64_t seed = 0;

    MertonParams merton;
    VgParams vg;
    GarchParams garch;
    OuParams ou;

    std::size_t assets() const noexcept { return start_price.size(); }

    /// @throws InputError describing the first invalid field.
    void validate() const;

    void set_rho(double rho);
};

/// Reference parameter set for a model (bivariate, rho = 0).
SimConfig default_config(Model model);

/// S(t+dt) = S(t) exp[(mu - sigma^2/2) dt + sqrt(dt) (A Z)], A A^T = Sigma.
PathBundle simulate_gbm(const SimConfig &config);

/// GBM plus a compound-Poisson log jump a*N + b*sqrt(N)*Z per step.
PathBundle simulate_merton(const SimConfig &config);

/// X += mu*Y + sqrt(Y) (A Z) with Y a gamma-clock increment of mean dt.
PathBundle simulate_variance_gamma(const SimConfig &config);

struct GarchPaths
{
    PathBundle bundle;
    /// Per asset, n_steps variance values starting from the start variance.
    std::vector<std::vector<double>> variance;
    /// Euler steps whose variance fell below the floor and was clamped.
    std::size_t floor_events = 0;
};

/// Euler GARCH(1,1) diffusion: variance first, then the log-price with that variance.
GarchPaths simulate_garch_paths(const SimConfig &config, GarchVariant variant);
PathBundle simulate_garch(const SimConfig &config, GarchVariant variant);

/// X += theta (ln mu - X) dt + sqrt(dt) (A Z).
PathBundle simulate_ou(const SimConfig &config);

/// Dispatch on config.model (GARCH uses config.garch.variant).
PathBundle simulate(const SimConfig &config);

/// Log-price contribution of `count` lognormal jumps: a*count + b*sqrt(count)*z.
double compound_jump(double a, double b, std::int64_t count, double z) noexcept;

/**
 * @brief The unit-variance correlated drivers L*Z (L = chol(correlation))
 * exactly as the simulators consume them; (n_steps - 1) rows by m columns.
 */
Matrix correlated_drivers(const SimConfig &config);

/// Variance floor used by the GARCH Euler scheme.
inline constexpr double kGarchVarianceFloor = 1e-12;

} // namespace epps
