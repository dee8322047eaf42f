#include "epps/simulators.hpp"

#include "epps/random.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace epps
{

namespace
{

/// Correlated unit-variance Gaussian drivers, one vector per step.
class Drivers
{
public:
    explicit Drivers(const SimConfig &config)
        : engine_(make_engine(config.seed, Stream::diffusion)),
          factor_(cholesky(config.correlation, true)), z_(config.assets()), out_(config.assets())
    {
    }

    const std::vector<double> &next()
    {
        const auto m = z_.size();
        for (std::size_t k = 0; k < m; ++k)
            z_[k] = normal_(engine_);
        for (std::size_t i = 0; i < m; ++i)
        {
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k)
                s += factor_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * z_[k];
            out_[i] = s;
        }
        return out_;
    }

private:
    Engine engine_;
    std::normal_distribution<double> normal_;
    Matrix factor_;
    std::vector<double> z_;
    std::vector<double> out_;
};

std::vector<double> uniform_times(std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = static_cast<double>(k);
    return t;
}

PathBundle bundle_from_log_paths(const std::vector<std::vector<double>> &log_paths)
{
    std::vector<TickSeries> series;
    series.reserve(log_paths.size());
    for (std::size_t i = 0; i < log_paths.size(); ++i)
    {
        std::vector<double> prices(log_paths[i].size());
        for (std::size_t k = 0; k < prices.size(); ++k)
            prices[k] = std::exp(log_paths[i][k]);
        series.emplace_back("asset" + std::to_string(i + 1), uniform_times(prices.size()), std::move(prices));
    }
    return PathBundle(std::move(series));
}

std::vector<std::vector<double>> start_log_paths(const SimConfig &config)
{
    std::vector<std::vector<double>> x(config.assets(), std::vector<double>(config.n_steps));
    for (std::size_t i = 0; i < config.assets(); ++i)
        x[i][0] = std::log(config.start_price[i]);
    return x;
}

void require_size(const std::vector<double> &v, std::size_t m, const char *field)
{
    if (v.size() != m)
    {
        std::ostringstream msg;
        msg << "config field '" << field << "' has " << v.size() << " entries, expected " << m;
        throw InputError(msg.str());
    }
}

void require_model(const SimConfig &config, Model model)
{
    if (config.model != model)
        throw InputError("config.model is '" + to_string(config.model) + "', expected '" + to_string(model) + "'");
}

void validate_merton(const SimConfig &c)
{
    const auto m = c.assets();
    require_size(c.merton.lambda, m, "merton.lambda");
    require_size(c.merton.a, m, "merton.a");
    require_size(c.merton.b, m, "merton.b");
    for (std::size_t i = 0; i < m; ++i)
    {
        if (!(c.merton.lambda[i] >= 0.0))
            throw InputError("config field 'merton.lambda' must be >= 0");
        if (!(c.merton.b[i] >= 0.0))
            throw InputError("config field 'merton.b' must be >= 0");
    }
}

void validate_vg(const SimConfig &c)
{
    const auto m = c.assets();
    require_size(c.vg.beta, m, "vg.beta");
    for (std::size_t i = 0; i < m; ++i)
        if (!(c.vg.beta[i] > 0.0))
            throw InputError("config field 'vg.beta' must be > 0");
    if (c.vg.subordinator == Subordinator::shared)
        for (std::size_t i = 1; i < m; ++i)
            if (c.vg.beta[i] != c.vg.beta[0])
                throw InputError("config field 'vg.beta' must be equal across assets for a shared subordinator");
}

void validate_garch(const SimConfig &c)
{
    const auto m = c.assets();
    require_size(c.garch.theta, m, "garch.theta");
    require_size(c.garch.w, m, "garch.w");
    require_size(c.garch.lambda, m, "garch.lambda");
    if (!c.garch.start_variance.empty())
        require_size(c.garch.start_variance, m, "garch.start_variance");
    for (std::size_t i = 0; i < m; ++i)
    {
        if (!(c.garch.theta[i] > 0.0))
            throw InputError("config field 'garch.theta' must be > 0");
        if (!(c.garch.w[i] > 0.0))
            throw InputError("config field 'garch.w' must be > 0");
        if (!(c.garch.lambda[i] >= 0.0))
            throw InputError("config field 'garch.lambda' must be >= 0");
        if (!c.garch.start_variance.empty() && !(c.garch.start_variance[i] > 0.0))
            throw InputError("config field 'garch.start_variance' must be > 0");
    }
}

void validate_ou(const SimConfig &c)
{
    const auto m = c.assets();
    require_size(c.ou.theta, m, "ou.theta");
    require_size(c.ou.long_term_price, m, "ou.long_term_price");
    for (std::size_t i = 0; i < m; ++i)
    {
        if (!(c.ou.theta[i] > 0.0))
            throw InputError("config field 'ou.theta' must be > 0");
        if (!(c.ou.long_term_price[i] > 0.0))
            throw InputError("config field 'ou.long_term_price' must be > 0");
    }
}

} // namespace

std::string to_string(Model model)
{
    switch (model)
    {
    case Model::gbm:
        return "gbm";
    case Model::merton:
        return "merton";
    case Model::variance_gamma:
        return "vg";
    case Model::garch:
        return "garch";
    case Model::ou:
        return "ou";
    }
    return "?";
}

std::string to_string(GarchVariant variant)
{
    return variant == GarchVariant::andersen ? "andersen" : "reno";
}

std::string to_string(Subordinator subordinator)
{
    switch (subordinator)
    {
    case Subordinator::shared:
        return "shared";
    case Subordinator::independent:
        return "independent";
    case Subordinator::degenerate:
        return "degenerate";
    }
    return "?";
}

Model model_from_string(const std::string &name)
{
    for (auto m : {Model::gbm, Model::merton, Model::variance_gamma, Model::garch, Model::ou})
        if (to_string(m) == name)
            return m;
    if (name == "variance_gamma")
        return Model::variance_gamma;
    throw InputError("unknown model '" + name + "' (expected gbm, merton, vg, garch or ou)");
}

GarchVariant garch_variant_from_string(const std::string &name)
{
    if (name == "andersen")
        return GarchVariant::andersen;
    if (name == "reno")
        return GarchVariant::reno;
    throw InputError("unknown GARCH variant '" + name + "' (expected andersen or reno)");
}

Subordinator subordinator_from_string(const std::string &name)
{
    for (auto s : {Subordinator::shared, Subordinator::independent, Subordinator::degenerate})
        if (to_string(s) == name)
            return s;
    throw InputError("unknown subordinator '" + name + "' (expected shared, independent or degenerate)");
}

void SimConfig::validate() const
{
    const auto m = assets();
    if (m < 1)
        throw InputError("config field 'start_price' is empty");
    if (n_steps < 2)
        throw InputError("config field 'n_steps' must be >= 2");
    if (!(dt > 0.0))
        throw InputError("config field 'dt' must be > 0");
    require_size(mu, m, "mu");
    require_size(sigma2, m, "sigma2");
    for (std::size_t i = 0; i < m; ++i)
    {
        if (!(start_price[i] > 0.0))
            throw InputError("config field 'start_price' must be > 0");
        if (!(sigma2[i] >= 0.0))
            throw InputError("config field 'sigma2' must be >= 0");
    }
    if (correlation.rows() != static_cast<Eigen::Index>(m) || correlation.cols() != static_cast<Eigen::Index>(m))
        throw InputError("config field 'rho' does not match the asset count");
    for (Eigen::Index i = 0; i < correlation.rows(); ++i)
    {
        if (correlation(i, i) != 1.0)
            throw InputError("config field 'rho' must have a unit diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            if (!(std::abs(correlation(i, j)) <= 1.0))
                throw InputError("config field 'rho' must lie in [-1, 1]");
    }
    cholesky(correlation, true);

    switch (model)
    {
    case Model::merton:
        validate_merton(*this);
        break;
    case Model::variance_gamma:
        validate_vg(*this);
        break;
    case Model::garch:
        validate_garch(*this);
        break;
    case Model::ou:
        validate_ou(*this);
        break;
    case Model::gbm:
        break;
    }
}

void SimConfig::set_rho(double rho)
{
    const auto m = static_cast<Eigen::Index>(assets());
    correlation = Matrix::Constant(m, m, rho);
    correlation.diagonal().setOnes();
}

SimConfig default_config(Model model)
{
    SimConfig c;
    c.model = model;
    switch (model)
    {
    case Model::gbm:
        break;
    case Model::merton:
        c.merton.lambda = {0.0, 0.0};
        c.merton.a = {0.0, 0.0};
        c.merton.b = {100.0, 100.0};
        break;
    case Model::variance_gamma:
        c.vg.beta = {1.0, 1.0};
        break;
    case Model::garch:
        c.garch.theta = {0.035, 0.054};
        c.garch.w = {0.636, 0.476};
        c.garch.lambda = {0.296, 0.48};
        break;
    case Model::ou:
        c.ou.theta = {0.035, 0.054};
        c.ou.long_term_price = {100.0, 100.0};
        break;
    }
    return c;
}

double compound_jump(double a, double b, std::int64_t count, double z) noexcept
{
    const auto n = static_cast<double>(count);
    return a * n + b * std::sqrt(n) * z;
}

Matrix correlated_drivers(const SimConfig &config)
{
    config.validate();
    Drivers drivers(config);
    const auto m = config.assets();
    Matrix out(static_cast<Eigen::Index>(config.n_steps - 1), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k + 1 < config.n_steps; ++k)
    {
        const auto &d = drivers.next();
        for (std::size_t i = 0; i < m; ++i)
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = d[i];
    }
    return out;
}

PathBundle simulate_gbm(const SimConfig &config)
{
    require_model(config, Model::gbm);
    config.validate();
    const auto m = config.assets();
    const double sqrt_dt = std::sqrt(config.dt);
    std::vector<double> drift(m), vol(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        drift[i] = (config.mu[i] - 0.5 * config.sigma2[i]) * config.dt;
        vol[i] = std::sqrt(config.sigma2[i]) * sqrt_dt;
    }

    Drivers drivers(config);
    auto x = start_log_paths(config);
    for (std::size_t k = 0; k + 1 < config.n_steps; ++k)
    {
        const auto &d = drivers.next();
        for (std::size_t i = 0; i < m; ++i)
            x[i][k + 1] = x[i][k] + drift[i] + vol[i] * d[i];
    }
    return bundle_from_log_paths(x);
}

PathBundle simulate_merton(const SimConfig &config)
{
    require_model(config, Model::merton);
    config.validate();
    const auto m = config.assets();
    const double sqrt_dt = std::sqrt(config.dt);
    std::vector<double> drift(m), vol(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        drift[i] = (config.mu[i] - 0.5 * config.sigma2[i]) * config.dt;
        vol[i] = std::sqrt(config.sigma2[i]) * sqrt_dt;
    }

    Drivers drivers(config);
    Engine jump_engine = make_engine(config.seed, Stream::jumps);
    std::vector<std::poisson_distribution<std::int64_t>> counts;
    for (std::size_t i = 0; i < m; ++i)
        counts.emplace_back(config.merton.lambda[i] > 0.0 ? config.merton.lambda[i] * config.dt : 1.0);
    std::normal_distribution<double> jump_normal;

    auto x = start_log_paths(config);
    for (std::size_t k = 0; k + 1 < config.n_steps; ++k)
    {
        const auto &d = drivers.next();
        for (std::size_t i = 0; i < m; ++i)
        {
            double jump = 0.0;
            if (config.merton.lambda[i] > 0.0)
            {
                const auto n = counts[i](jump_engine);
                if (n > 0)
                    jump = compound_jump(config.merton.a[i], config.merton.b[i], n, jump_normal(jump_engine));
            }
            x[i][k + 1] = x[i][k] + drift[i] + vol[i] * d[i] + jump;
        }
    }
    return bundle_from_log_paths(x);
}

PathBundle simulate_variance_gamma(const SimConfig &config)
{
    require_model(config, Model::variance_gamma);
    config.validate();
    const auto m = config.assets();
    std::vector<double> sigma(m);
    for (std::size_t i = 0; i < m; ++i)
        sigma[i] = std::sqrt(config.sigma2[i]);

    Drivers drivers(config);
    Engine clock_engine = make_engine(config.seed, Stream::subordinator);
    std::vector<std::gamma_distribution<double>> clocks;
    for (std::size_t i = 0; i < m; ++i)
        clocks.emplace_back(1.0 / config.vg.beta[i], config.vg.beta[i]);

    std::vector<double> y(m, config.dt);
    auto x = start_log_paths(config);
    for (std::size_t k = 0; k + 1 < config.n_steps; ++k)
    {
        switch (config.vg.subordinator)
        {
        case Subordinator::shared:
            std::fill(y.begin(), y.end(), config.dt * clocks[0](clock_engine));
            break;
        case Subordinator::independent:
            for (std::size_t i = 0; i < m; ++i)
                y[i] = config.dt * clocks[i](clock_engine);
            break;
        case Subordinator::degenerate:
            break;
        }
        const auto &d = drivers.next();
        for (std::size_t i = 0; i < m; ++i)
            x[i][k + 1] = x[i][k] + config.mu[i] * y[i] + std::sqrt(y[i]) * sigma[i] * d[i];
    }
    return bundle_from_log_paths(x);
}

GarchPaths simulate_garch_paths(const SimConfig &config, GarchVariant variant)
{
    require_model(config, Model::garch);
    config.validate();
    const auto m = config.assets();
    const auto &p = config.garch;
    const double sqrt_dt = std::sqrt(config.dt);

    std::vector<double> shock_scale(m);
    for (std::size_t i = 0; i < m; ++i)
        shock_scale[i] = std::sqrt(2.0 * p.lambda[i] * p.theta[i] * config.dt);

    GarchPaths out;
    out.variance.assign(m, std::vector<double>(config.n_steps));
    for (std::size_t i = 0; i < m; ++i)
        out.variance[i][0] = p.start_variance.empty() ? p.w[i] : p.start_variance[i];

    Drivers drivers(config);
    Engine variance_engine = make_engine(config.seed, Stream::variance);
    std::normal_distribution<double> variance_normal;

    auto x = start_log_paths(config);
    for (std::size_t k = 0; k + 1 < config.n_steps; ++k)
    {
        for (std::size_t i = 0; i < m; ++i)
        {
            const double v = out.variance[i][k];
            const double z = variance_normal(variance_engine);
            const double loading = variant == GarchVariant::andersen ? v : std::sqrt(v);
            double next = v + p.theta[i] * (p.w[i] - v) * config.dt + shock_scale[i] * loading * z;
            if (next < kGarchVarianceFloor)
            {
                next = kGarchVarianceFloor;
                ++out.floor_events;
            }
            out.variance[i][k + 1] = next;
        }
        const auto &d = drivers.next();
        for (std::size_t i = 0; i < m; ++i)
            x[i][k + 1] = x[i][k] + sqrt_dt * std::sqrt(out.variance[i][k + 1]) * d[i];
    }
    out.bundle = bundle_from_log_paths(x);
    return out;
}

PathBundle simulate_garch(const SimConfig &config, GarchVariant variant)
{
    return simulate_garch_paths(config, variant).bundle;
}

PathBundle simulate_ou(const SimConfig &config)
{
    require_model(config, Model::ou);
    config.validate();
    const auto m = config.assets();
    const double sqrt_dt = std::sqrt(config.dt);
    std::vector<double> level(m), vol(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        level[i] = std::log(config.ou.long_term_price[i]);
        vol[i] = std::sqrt(config.sigma2[i]) * sqrt_dt;
    }

    Drivers drivers(config);
    auto x = start_log_paths(config);
    for (std::size_t k = 0; k + 1 < config.n_steps; ++k)
    {
        const auto &d = drivers.next();
        for (std::size_t i = 0; i < m; ++i)
            x[i][k + 1] = x[i][k] + config.ou.theta[i] * (level[i] - x[i][k]) * config.dt + vol[i] * d[i];
    }
    return bundle_from_log_paths(x);
}

PathBundle simulate(const SimConfig &config)
{
    switch (config.model)
    {
    case Model::gbm:
        return simulate_gbm(config);
    case Model::merton:
        return simulate_merton(config);
    case Model::variance_gamma:
        return simulate_variance_gamma(config);
    case Model::garch:
        return simulate_garch(config, config.garch.variant);
    case Model::ou:
        return simulate_ou(config);
    }
    throw InputError("unknown model");
}

} // namespace epps
