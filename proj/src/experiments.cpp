#include "epps/experiments.hpp"

#include "epps/asynchrony.hpp"
#include "epps/config.hpp"
#include "epps/estimators.hpp"
#include "epps/parallel.hpp"
#include "epps/random.hpp"

#include "format.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace epps
{

namespace
{

using nlohmann::json;

// Top-level stream labels, one per runner.
enum RunnerLabel : std::uint64_t
{
    missing_data_label = 11,
    process_comparison_label = 12,
    reno_recovery_label = 13,
    reno_extended_label = 14,
};

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

/// FNV-1a, so model panels seed by name rather than by list position.
std::uint64_t label_hash(const std::string &s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// One (panel, series, param, value) cell with one estimate per replication.
struct Cell
{
    std::string panel;
    std::string series;
    std::string param;
    double value;
    std::vector<double> estimates;
};

class CellTable
{
public:
    explicit CellTable(std::size_t reps) : reps_(reps) {}

    std::size_t add(std::string panel, std::string series, std::string param, double value)
    {
        cells_.push_back({std::move(panel), std::move(series), std::move(param), value,
                          std::vector<double>(reps_, std::nan(""))});
        return cells_.size() - 1;
    }

    double &at(std::size_t cell, std::size_t rep) { return cells_[cell].estimates[rep]; }

    void fill(ExperimentReport &report) const
    {
        for (const auto &c : cells_)
        {
            const auto ms = mean_std(c.estimates);
            report.rows.push_back({c.panel, c.series, c.param, c.value, c.estimates.size(), ms.mean, ms.std});
            for (std::size_t r = 0; r < c.estimates.size(); ++r)
                report.reps.push_back({c.panel, c.series, c.param, c.value, r, c.estimates[r]});
        }
    }

private:
    std::size_t reps_;
    std::vector<Cell> cells_;
};

std::string panel_name(const char *key, double value) { return std::string(key) + "=" + format_number(value); }

double rho12(const CovarianceResult &r) { return r.rho(0, 1); }

PathBundle pair(TickSeries a, TickSeries b)
{
    std::vector<TickSeries> s;
    s.push_back(std::move(a));
    s.push_back(std::move(b));
    return PathBundle(std::move(s));
}

json run_options_json(const RunOptions &o) { return {{"seed", o.seed}, {"reps", o.reps}}; }

void require_reps(const RunOptions &o)
{
    if (o.reps < 1)
        throw InputError("replication count must be at least 1");
}

SimConfig with_rho(SimConfig c, double rho, std::uint64_t seed)
{
    c.set_rho(rho);
    c.seed = seed;
    return c;
}

/// Exponential sampling of both assets plus asset 1 forced onto asset 2's times.
struct SampledPair
{
    PathBundle async;
    PathBundle sync;
};

SampledPair sample_pair(const PathBundle &paths, double gap_1, double gap_2, std::uint64_t seed)
{
    TickSeries s1 = exponential_sample(paths[0], gap_1, derive_seed(seed, {1}));
    TickSeries s2 = exponential_sample(paths[1], gap_2, derive_seed(seed, {2}));
    TickSeries forced = synchronize_to(paths[0], s2.times());
    return {pair(std::move(s1), s2), pair(std::move(forced), s2)};
}

json model_cases_json(const std::vector<ModelCase> &models)
{
    json out = json::array();
    for (const auto &m : models)
        out.push_back({{"label", m.label}, {"config", to_json(m.config)}});
    return out;
}

void require_models(const std::vector<ModelCase> &models)
{
    if (models.empty())
        throw InputError("no models configured");
    std::set<std::string> seen;
    for (const auto &m : models)
    {
        if (!seen.insert(m.label).second)
            throw InputError("duplicate model label '" + m.label + "'");
        m.config.validate();
    }
}

std::vector<std::string> split_csv_line(const std::string &line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(const std::string &text, T &out)
{
    const char *begin = text.data();
    const char *end = begin + text.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

TickSeries take_range(const TickSeries &s, std::size_t from, std::size_t to)
{
    std::vector<double> t(s.times().begin() + static_cast<std::ptrdiff_t>(from),
                          s.times().begin() + static_cast<std::ptrdiff_t>(to));
    std::vector<double> p(s.prices().begin() + static_cast<std::ptrdiff_t>(from),
                          s.prices().begin() + static_cast<std::ptrdiff_t>(to));
    std::vector<std::int64_t> v(s.volumes().begin() + static_cast<std::ptrdiff_t>(from),
                                s.volumes().begin() + static_cast<std::ptrdiff_t>(to));
    return TickSeries(s.asset_id(), std::move(t), std::move(p), std::move(v));
}

bool has_variation(const TickSeries &s)
{
    if (s.size() < 2)
        return false;
    const auto p = s.prices();
    return std::any_of(p.begin() + 1, p.end(), [&](double x) { return x != p[0]; });
}

void atomic_write(const std::filesystem::path &path, const std::string &content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out)
            throw InputError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

const SummaryRow &ExperimentReport::at(const std::string &panel, const std::string &series, double value) const
{
    for (const auto &r : rows)
        if (r.panel == panel && r.series == series && r.value == value)
            return r;
    throw std::out_of_range("no report row for " + panel + "/" + series + "/" + format_number(value));
}

MeanStd mean_std(const std::vector<double> &values)
{
    MeanStd out;
    if (values.empty())
        return out;
    const double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1)
    {
        double ss = 0.0;
        for (double v : values)
            ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / (n - 1.0));
    }
    return out;
}

void write_report(std::ostream &out, const ExperimentReport &report)
{
    std::istringstream meta(report.metadata.dump(2));
    std::string line;
    while (std::getline(meta, line))
        out << "# " << line << '\n';
    out << "panel,series,param,value,n,mean,std\n";
    for (const auto &r : report.rows)
        out << r.panel << ',' << r.series << ',' << r.param << ',' << format_number(r.value) << ',' << r.n << ','
            << format_number(r.mean) << ',' << format_number(r.std) << '\n';
}

void write_replications(std::ostream &out, const ExperimentReport &report)
{
    out << "panel,series,param,value,rep,estimate\n";
    for (const auto &r : report.reps)
        out << r.panel << ',' << r.series << ',' << r.param << ',' << format_number(r.value) << ',' << r.rep << ','
            << format_number(r.estimate) << '\n';
}

void write_report_files(const ExperimentReport &report, const std::filesystem::path &path)
{
    std::ostringstream main, reps;
    write_report(main, report);
    write_replications(reps, report);
    atomic_write(path, main.str());
    auto reps_path = path;
    reps_path.replace_extension(".reps.csv");
    atomic_write(reps_path, reps.str());
}

std::vector<double> default_rho_grid()
{
    std::vector<double> grid{-0.99};
    for (int k = 0; k <= 16; ++k)
        grid.push_back(-0.8 + 0.1 * k);
    grid.push_back(0.99);
    for (auto &g : grid)
        g = std::round(g * 100.0) / 100.0;
    return grid;
}

// ------------------------------------------------------------ missing data

ExperimentReport run_missing_data_sweep(const MissingDataConfig &config, const RunOptions &options)
{
    require_reps(options);
    if (config.base.model != Model::gbm)
        throw InputError("the missing-data sweep simulates GBM");
    config.base.validate();

    const auto nf = config.fractions.size();
    const auto nr = config.rho_grid.size();
    CellTable table(options.reps);
    std::vector<std::size_t> cell_mm(nf * nr), cell_hy(nf * nr);
    for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t r = 0; r < nr; ++r)
        {
            const auto panel = panel_name("missing", config.fractions[f]);
            cell_mm[f * nr + r] = table.add(panel, "MM", "rho", config.rho_grid[r]);
            cell_hy[f * nr + r] = table.add(panel, "HY", "rho", config.rho_grid[r]);
        }

    const std::size_t points = nf * nr;
    parallel_for(points * options.reps, options.threads, [&](std::size_t task) {
        const std::size_t g = task / options.reps;
        const std::size_t rep = task % options.reps;
        const double fraction = config.fractions[g / nr];
        const double rho = config.rho_grid[g % nr];
        const auto seed = derive_seed(options.seed, {missing_data_label, bits(fraction), bits(rho), rep});

        const PathBundle paths = simulate_gbm(with_rho(config.base, rho, derive_seed(seed, {0})));
        const PathBundle observed = pair(decimate_missing(paths[0], fraction, derive_seed(seed, {1})),
                                         decimate_missing(paths[1], fraction, derive_seed(seed, {2})));
        table.at(cell_mm[g], rep) = rho12(mm_covariance(observed));
        table.at(cell_hy[g], rep) = rho12(hy_covariance(observed));
    });

    ExperimentReport report;
    report.name = "missing-data";
    report.metadata = {{"experiment", report.name},
                       {"run", run_options_json(options)},
                       {"fractions", config.fractions},
                       {"rho_grid", config.rho_grid},
                       {"model", to_json(config.base)},
                       {"decisions",
                        {{"decimation", "exact count round((1-f)n), first tick kept, assets decimated independently"},
                         {"mm_cutoff", "nyquist (minimum gap)"},
                         {"time_unit", "parameters per day, one step = dt days"}}}};
    table.fill(report);
    return report;
}

// ------------------------------------------------------ process comparison

std::vector<ModelCase> default_process_models()
{
    std::vector<ModelCase> out;
    for (double lambda : {0.0, 0.2, 0.5})
    {
        SimConfig c = default_config(Model::merton);
        c.merton.lambda = {lambda, lambda};
        out.push_back({"merton-lambda=" + format_number(lambda), c});
    }
    out.push_back({"vg", default_config(Model::variance_gamma)});
    out.push_back({"garch", default_config(Model::garch)});
    out.push_back({"ou", default_config(Model::ou)});
    return out;
}

ProcessComparisonConfig default_process_comparison()
{
    ProcessComparisonConfig c;
    c.models = default_process_models();
    return c;
}

ExperimentReport run_process_comparison(const ProcessComparisonConfig &config, const RunOptions &options)
{
    require_reps(options);
    require_models(config.models);

    const auto nm = config.models.size();
    const auto nr = config.rho_grid.size();
    static const char *kSeries[] = {"MM-sync", "HY-sync", "MM-async", "HY-async"};
    CellTable table(options.reps);
    std::vector<std::array<std::size_t, 4>> cells(nm * nr);
    for (std::size_t m = 0; m < nm; ++m)
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t s = 0; s < 4; ++s)
                cells[m * nr + r][s] = table.add(config.models[m].label, kSeries[s], "rho", config.rho_grid[r]);

    parallel_for(nm * nr * options.reps, options.threads, [&](std::size_t task) {
        const std::size_t g = task / options.reps;
        const std::size_t rep = task % options.reps;
        const auto &model = config.models[g / nr];
        const double rho = config.rho_grid[g % nr];
        const auto seed =
            derive_seed(options.seed, {process_comparison_label, label_hash(model.label), bits(rho), rep});

        const PathBundle paths = simulate(with_rho(model.config, rho, derive_seed(seed, {0})));
        const PathBundle observed =
            pair(decimate_missing(paths[0], config.missing_fraction, derive_seed(seed, {1})),
                 decimate_missing(paths[1], config.missing_fraction, derive_seed(seed, {2})));
        const auto &c = cells[g];
        table.at(c[0], rep) = rho12(mm_covariance(paths));
        table.at(c[1], rep) = rho12(hy_covariance(paths));
        table.at(c[2], rep) = rho12(mm_covariance(observed));
        table.at(c[3], rep) = rho12(hy_covariance(observed));
    });

    ExperimentReport report;
    report.name = "process-comparison";
    report.metadata = {{"experiment", report.name},
                       {"run", run_options_json(options)},
                       {"rho_grid", config.rho_grid},
                       {"missing_fraction", config.missing_fraction},
                       {"models", model_cases_json(config.models)},
                       {"decisions",
                        {{"asynchrony", "independent decimation of each path, first tick kept"},
                         {"mm_cutoff", "nyquist (minimum gap)"}}}};
    table.fill(report);
    return report;
}

// ----------------------------------------------------------- reno recovery

ExperimentReport run_reno_recovery(const RenoRecoveryConfig &config, const RunOptions &options)
{
    require_reps(options);
    if (config.variants.empty() || config.n_grid.empty())
        throw InputError("reno recovery needs at least one variant and one N");
    for (int n : config.n_grid)
        if (n < 1)
            throw InputError("Fourier cutoffs must be at least 1");

    const auto nv = config.variants.size();
    const auto nn = config.n_grid.size();
    CellTable table(options.reps);
    std::vector<std::size_t> cell_async(nv * nn), cell_sync(nv * nn);
    for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t k = 0; k < nn; ++k)
        {
            const auto panel = to_string(config.variants[v]);
            cell_async[v * nn + k] = table.add(panel, "MM-async", "N", config.n_grid[k]);
            cell_sync[v * nn + k] = table.add(panel, "MM-sync", "N", config.n_grid[k]);
        }

    parallel_for(nv * options.reps, options.threads, [&](std::size_t task) {
        const std::size_t v = task / options.reps;
        const std::size_t rep = task % options.reps;
        const auto variant = config.variants[v];
        const auto seed = derive_seed(options.seed, {reno_recovery_label, static_cast<std::uint64_t>(variant), rep});

        SimConfig sim = default_config(Model::garch);
        sim.n_steps = config.n_steps;
        sim.garch.variant = variant;
        const PathBundle paths = simulate_garch(with_rho(sim, config.rho, derive_seed(seed, {0})), variant);
        const SampledPair sampled = sample_pair(paths, config.mean_gap_1, config.mean_gap_2, seed);
        for (std::size_t k = 0; k < nn; ++k)
        {
            table.at(cell_async[v * nn + k], rep) = rho12(mm_covariance(sampled.async, config.n_grid[k]));
            table.at(cell_sync[v * nn + k], rep) = rho12(mm_covariance(sampled.sync, config.n_grid[k]));
        }
    });

    std::vector<std::string> variants;
    for (auto v : config.variants)
        variants.push_back(to_string(v));
    ExperimentReport report;
    report.name = "reno-recovery";
    report.metadata = {{"experiment", report.name},
                       {"run", run_options_json(options)},
                       {"variants", variants},
                       {"n_grid", config.n_grid},
                       {"n_steps", config.n_steps},
                       {"rho", config.rho},
                       {"mean_gaps", {config.mean_gap_1, config.mean_gap_2}},
                       {"model", to_json(default_config(Model::garch))},
                       {"decisions",
                        {{"arrivals", "cumulative exponential gaps floored to the 1-second grid, duplicates merged"},
                         {"sync", "asset 1 observed by previous tick at asset 2 arrival times"}}}};
    table.fill(report);
    return report;
}

// ----------------------------------------------------------- reno extended

std::vector<ModelCase> default_extended_models()
{
    std::vector<ModelCase> out;
    out.push_back({"gbm", default_config(Model::gbm)});
    SimConfig merton = default_config(Model::merton);
    merton.merton.lambda = {0.2, 0.2};
    out.push_back({"merton", merton});
    out.push_back({"vg", default_config(Model::variance_gamma)});
    out.push_back({"garch", default_config(Model::garch)});
    SimConfig ou = default_config(Model::ou);
    ou.dt = 1.0;
    out.push_back({"ou", ou});
    return out;
}

RenoExtendedConfig default_reno_extended()
{
    RenoExtendedConfig c;
    c.models = default_extended_models();
    return c;
}

ExperimentReport run_reno_extended(const RenoExtendedConfig &config, const RunOptions &options)
{
    require_reps(options);
    require_models(config.models);
    if (config.n_grid.empty())
        throw InputError("reno extended needs at least one N");
    for (int n : config.n_grid)
        if (n < 1)
            throw InputError("Fourier cutoffs must be at least 1");

    const auto nm = config.models.size();
    const auto nn = config.n_grid.size();
    CellTable table(options.reps);
    struct ModelCells
    {
        std::vector<std::size_t> mm_sync, mm_async;
        std::size_t hy_sync, hy_async, nyquist;
    };
    std::vector<ModelCells> cells(nm);
    for (std::size_t m = 0; m < nm; ++m)
    {
        const auto &label = config.models[m].label;
        for (int n : config.n_grid)
        {
            cells[m].mm_sync.push_back(table.add(label, "MM-sync", "N", n));
            cells[m].mm_async.push_back(table.add(label, "MM-async", "N", n));
        }
        cells[m].hy_sync = table.add(label, "HY-sync", "baseline", 0.0);
        cells[m].hy_async = table.add(label, "HY-async", "baseline", 0.0);
        cells[m].nyquist = table.add(label, "nyquist", "average-gap", 0.0);
    }

    parallel_for(nm * options.reps, options.threads, [&](std::size_t task) {
        const std::size_t m = task / options.reps;
        const std::size_t rep = task % options.reps;
        const auto &model = config.models[m];
        const auto seed =
            derive_seed(options.seed, {reno_extended_label, label_hash(model.label), rep});

        SimConfig sim = model.config;
        sim.n_steps = config.n_steps;
        const PathBundle paths = simulate(with_rho(sim, config.rho, derive_seed(seed, {0})));
        const SampledPair sampled = sample_pair(paths, config.mean_gap_1, config.mean_gap_2, seed);
        const auto &c = cells[m];
        for (std::size_t k = 0; k < nn; ++k)
        {
            table.at(c.mm_sync[k], rep) = rho12(mm_covariance(sampled.sync, config.n_grid[k]));
            table.at(c.mm_async[k], rep) = rho12(mm_covariance(sampled.async, config.n_grid[k]));
        }
        table.at(c.hy_sync, rep) = rho12(hy_covariance(sampled.sync));
        table.at(c.hy_async, rep) = rho12(hy_covariance(sampled.async));
        table.at(c.nyquist, rep) = average_gap_cutoff(sampled.async);
    });

    ExperimentReport report;
    report.name = "reno-extended";
    report.metadata = {{"experiment", report.name},
                       {"run", run_options_json(options)},
                       {"n_grid", config.n_grid},
                       {"n_steps", config.n_steps},
                       {"rho", config.rho},
                       {"mean_gaps", {config.mean_gap_1, config.mean_gap_2}},
                       {"models", model_cases_json(config.models)},
                       {"decisions",
                        {{"nyquist", "floor(T * mean sampling frequency / 2), averaged over replications"},
                         {"sync", "asset 1 observed by previous tick at asset 2 arrival times"}}}};
    table.fill(report);

    json nyquist = json::object();
    for (std::size_t m = 0; m < nm; ++m)
        nyquist[config.models[m].label] = report.at(config.models[m].label, "nyquist", 0.0).mean;
    report.metadata["nyquist_average_gap"] = nyquist;
    return report;
}

// --------------------------------------------------------------------- TAQ

TaqData read_taq_csv(std::istream &in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!trim(line).empty())
            break;
    }
    if (trim(line) != "timestamp,ticker,price,volume")
        throw InputError("line " + std::to_string(line_no) + ": expected header 'timestamp,ticker,price,volume'");

    struct Row
    {
        double t;
        double p;
        std::int64_t v;
    };
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> by_ticker;
    while (std::getline(in, line))
    {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv_line(trim(line));
        const auto where = "line " + std::to_string(line_no) + ": ";
        if (fields.size() != 4)
            throw InputError(where + "expected 4 fields, found " + std::to_string(fields.size()));
        std::int64_t ts = 0;
        double price = 0.0;
        std::int64_t volume = 0;
        const auto ticker = trim(fields[1]);
        if (!parse_number(trim(fields[0]), ts))
            throw InputError(where + "field 'timestamp' is not an integer number of seconds");
        if (ticker.empty())
            throw InputError(where + "field 'ticker' is empty");
        if (!parse_number(trim(fields[2]), price) || !std::isfinite(price) || !(price > 0.0))
            throw InputError(where + "field 'price' must be a positive number");
        if (!parse_number(trim(fields[3]), volume) || volume < 1)
            throw InputError(where + "field 'volume' must be a positive integer");
        auto [it, inserted] = by_ticker.try_emplace(ticker);
        if (inserted)
            order.push_back(ticker);
        it->second.push_back({static_cast<double>(ts), price, volume});
    }

    TaqData data;
    std::vector<TickSeries> series;
    std::sort(order.begin(), order.end());
    for (const auto &ticker : order)
    {
        auto &rows = by_ticker[ticker];
        if (rows.size() < 2)
        {
            data.warnings.push_back("dropped ticker '" + ticker + "': fewer than 2 trades");
            continue;
        }
        std::stable_sort(rows.begin(), rows.end(), [](const Row &a, const Row &b) { return a.t < b.t; });
        std::vector<double> t, p;
        std::vector<std::int64_t> v;
        for (const auto &r : rows)
        {
            t.push_back(r.t);
            p.push_back(r.p);
            v.push_back(r.v);
        }
        series.emplace_back(ticker, std::move(t), std::move(p), std::move(v));
    }
    if (series.empty())
        throw InputError("no ticker has at least 2 trades");
    data.trades = PathBundle(std::move(series));
    return data;
}

TaqData read_taq_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open TAQ file '" + path.string() + "'");
    return read_taq_csv(in);
}

void write_taq_csv(std::ostream &out, const std::vector<TaqTrade> &trades)
{
    out << "timestamp,ticker,price,volume\n";
    for (const auto &t : trades)
        out << t.timestamp << ',' << t.ticker << ',' << format_number(t.price) << ',' << t.volume << '\n';
}

std::vector<TaqTrade> generate_synthetic_taq(const SyntheticTaqConfig &config, std::uint64_t seed)
{
    if (config.assets < 1 || config.days < 1 || config.mean_gaps.empty())
        throw InputError("synthetic TAQ needs assets, days and mean gaps");
    if (!(config.mean_volume >= 1.0))
        throw InputError("mean volume must be at least 1");
    const auto session_seconds = static_cast<std::size_t>(config.session.close - config.session.open);
    if (session_seconds < 2)
        throw InputError("session shorter than 2 seconds");

    std::vector<TaqTrade> out;
    for (std::size_t d = 0; d < config.days; ++d)
    {
        SimConfig sim = default_config(Model::gbm);
        sim.n_steps = session_seconds;
        sim.start_price.assign(config.assets, 100.0);
        sim.mu.assign(config.assets, config.mu);
        sim.sigma2.assign(config.assets, config.sigma2);
        sim.correlation = Matrix::Identity(static_cast<Eigen::Index>(config.assets),
                                           static_cast<Eigen::Index>(config.assets));
        sim.set_rho(config.rho);
        sim.seed = derive_seed(seed, {d, 0});
        const PathBundle paths = simulate_gbm(sim);

        const double day_start = static_cast<double>(d) * config.session.day_length + config.session.open;
        for (std::size_t i = 0; i < config.assets; ++i)
        {
            const double gap = config.mean_gaps[i % config.mean_gaps.size()];
            const TickSeries sampled = exponential_sample(paths[i], gap, derive_seed(seed, {d, 1, i}));
            Engine volume_engine = make_engine(derive_seed(seed, {d, 2, i}), Stream::volumes);
            std::poisson_distribution<std::int64_t> extra(config.mean_volume - 1.0);
            const auto ticker = "SYN" + std::to_string(i + 1);
            for (std::size_t k = 0; k < sampled.size(); ++k)
            {
                const std::int64_t volume = 1 + (config.mean_volume > 1.0 ? extra(volume_engine) : 0);
                out.push_back({static_cast<std::int64_t>(day_start + sampled.times()[k]), ticker,
                               sampled.prices()[k], volume});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TaqTrade &a, const TaqTrade &b) { return a.timestamp < b.timestamp; });
    return out;
}

CorrelationSummary summarize_correlations(const Matrix &rho)
{
    if (rho.rows() != rho.cols())
        throw InputError("correlation matrix must be square");
    std::vector<double> values;
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = i + 1; j < rho.cols(); ++j)
            values.push_back(std::abs(rho(i, j)));
    const auto ms = mean_std(values);
    return {ms.mean, ms.std, values.size()};
}

TaqResult run_taq_pipeline(const TaqData &data, const TaqPipelineConfig &config)
{
    const auto &session = config.session;
    if (!(session.close > session.open) || !(session.day_length > 0.0))
        throw InputError("invalid session window");
    if (!(config.scale > 0.0))
        throw InputError("scale must be > 0");
    if (config.estimator == EstimatorTag::RV)
        throw InputError("the TAQ pipeline supports the MM and HY estimators");
    const bool calendar = config.clock == BarKind::calendar_close || config.clock == BarKind::calendar_vwap;
    const int buckets_per_day = static_cast<int>(std::lround(config.scale));
    if (!calendar && (buckets_per_day < 1 || std::abs(config.scale - buckets_per_day) > 1e-9))
        throw InputError("volume clocks need an integer number of buckets per day");

    std::vector<std::string> warnings = data.warnings;

    // Session filter and repeated-trade VWAP.
    std::vector<TickSeries> kept;
    for (const auto &s : data.trades.series())
    {
        std::vector<double> t, p;
        std::vector<std::int64_t> v;
        for (std::size_t k = 0; k < s.size(); ++k)
        {
            const double tod = s.times()[k] - std::floor(s.times()[k] / session.day_length) * session.day_length;
            if (tod >= session.open && tod < session.close)
            {
                t.push_back(s.times()[k]);
                p.push_back(s.prices()[k]);
                v.push_back(s.volumes()[k]);
            }
        }
        if (t.size() < 2)
        {
            warnings.push_back("dropped ticker '" + s.asset_id() + "': fewer than 2 session trades");
            continue;
        }
        TickSeries filtered = dedupe_trades(TickSeries(s.asset_id(), std::move(t), std::move(p), std::move(v)));
        if (filtered.size() < 2)
        {
            warnings.push_back("dropped ticker '" + s.asset_id() + "': fewer than 2 distinct trade times");
            continue;
        }
        kept.push_back(std::move(filtered));
    }
    if (kept.size() < 2)
        throw InputError("fewer than 2 tickers with session trades");
    const PathBundle bundle(std::move(kept));
    const auto m = bundle.size();

    std::vector<double> adv(m);
    for (std::size_t i = 0; i < m; ++i)
        adv[i] = average_daily_volume(bundle[i], session.day_length);
    std::int64_t sync_bucket = 0;
    if (config.clock == BarKind::sync_volume)
        sync_bucket = synchronized_bucket_size(bundle, buckets_per_day, config.baseline, session.day_length);

    std::set<double> days;
    for (const auto &s : bundle.series())
        for (double t : s.times())
            days.insert(std::floor(t / session.day_length));

    const auto mi = static_cast<Eigen::Index>(m);
    Matrix sigma = Matrix::Zero(mi, mi);
    std::vector<std::size_t> returns(m, 0);
    std::vector<std::size_t> cursor(m, 0);
    for (double day : days)
    {
        const double day_end = (day + 1.0) * session.day_length;
        std::vector<std::optional<TickSeries>> today(m);
        for (std::size_t i = 0; i < m; ++i)
        {
            const auto &s = bundle[i];
            std::size_t from = cursor[i];
            std::size_t to = from;
            while (to < s.size() && s.times()[to] < day_end)
                ++to;
            cursor[i] = to;
            if (to > from)
                today[i] = take_range(s, from, to);
        }

        std::vector<std::optional<TickSeries>> clocked(m);
        if (calendar)
        {
            const double origin = day * session.day_length + session.open;
            const double end = day * session.day_length + session.close;
            for (std::size_t i = 0; i < m; ++i)
            {
                if (!today[i])
                    continue;
                BarSeries bars = calendar_bars(*today[i], config.scale, origin, end);
                bars.kind = config.clock;
                clocked[i] = bars.to_ticks();
            }
        }
        else if (config.clock == BarKind::intrinsic)
        {
            for (std::size_t i = 0; i < m; ++i)
            {
                const auto bucket = bucket_size_for(adv[i], buckets_per_day);
                if (today[i] && today[i]->total_volume() >= bucket)
                    clocked[i] = intrinsic_volume_bars(*today[i], bucket).to_ticks();
            }
        }
        else
        {
            std::vector<TickSeries> present;
            std::vector<std::size_t> index;
            for (std::size_t i = 0; i < m; ++i)
                if (today[i])
                {
                    present.push_back(*today[i]);
                    index.push_back(i);
                }
            const auto bars = synchronized_volume_bars(PathBundle(std::move(present)), sync_bucket);
            for (std::size_t k = 0; k < bars.size(); ++k)
                if (std::any_of(bars[k].missing.begin(), bars[k].missing.end(), [](auto x) { return x == 0; }))
                    clocked[index[k]] = bars[k].to_ticks();
        }

        std::vector<TickSeries> usable;
        std::vector<std::size_t> index;
        for (std::size_t i = 0; i < m; ++i)
            if (clocked[i] && has_variation(*clocked[i]))
            {
                usable.push_back(*clocked[i]);
                index.push_back(i);
            }
        if (usable.size() < 2)
            continue;
        for (std::size_t k = 0; k < usable.size(); ++k)
            returns[index[k]] += usable[k].size() - 1;
        const PathBundle estimable(std::move(usable));
        const CovarianceResult r =
            config.estimator == EstimatorTag::MM ? mm_covariance(estimable) : hy_covariance(estimable);
        for (std::size_t a = 0; a < index.size(); ++a)
            for (std::size_t b = 0; b < index.size(); ++b)
                sigma(static_cast<Eigen::Index>(index[a]), static_cast<Eigen::Index>(index[b])) +=
                    r.sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }

    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < m; ++i)
    {
        if (sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) > 0.0)
            alive.push_back(i);
        else
            warnings.push_back("dropped ticker '" + bundle[i].asset_id() + "': no usable bars at this scale");
    }
    if (alive.size() < 2)
        throw InputError("fewer than 2 tickers have usable bars at this scale");

    TaqResult result;
    const auto na = static_cast<Eigen::Index>(alive.size());
    result.sigma = Matrix(na, na);
    for (Eigen::Index a = 0; a < na; ++a)
    {
        result.tickers.push_back(bundle[alive[static_cast<std::size_t>(a)]].asset_id());
        for (Eigen::Index b = 0; b < na; ++b)
            result.sigma(a, b) = sigma(static_cast<Eigen::Index>(alive[static_cast<std::size_t>(a)]),
                                       static_cast<Eigen::Index>(alive[static_cast<std::size_t>(b)]));
    }
    bool out_of_range = false;
    result.rho = correlation_from_covariance(result.sigma, &out_of_range);
    result.summary = summarize_correlations(result.rho);

    // Daily volatility: per-bar variance scaled by bars per day.
    const double bars_per_day = calendar ? session.day_length / config.scale : config.scale;
    auto &report = result.report;
    report.name = "taq";
    report.rows.push_back({"summary", to_string(config.estimator), "scale", config.scale, result.summary.pairs,
                           result.summary.mean_abs, result.summary.std_abs});
    for (std::size_t a = 0; a < alive.size(); ++a)
    {
        const auto i = alive[a];
        const double per_bar = result.sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) /
                               static_cast<double>(returns[i]);
        report.rows.push_back({"volatility", bundle[i].asset_id(), "adv", adv[i], returns[i],
                               std::sqrt(per_bar * bars_per_day), 0.0});
    }
    for (std::size_t a = 0; a < alive.size(); ++a)
    {
        const auto i = alive[a];
        const double daily = result.sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) /
                             static_cast<double>(days.size());
        report.rows.push_back(
            {"integrated-volatility", bundle[i].asset_id(), "adv", adv[i], returns[i], std::sqrt(daily), 0.0});
    }
    report.metadata = {{"experiment", "taq"},
                       {"clock", to_string(config.clock)},
                       {"scale", config.scale},
                       {"estimator", to_string(config.estimator)},
                       {"baseline", to_string(config.baseline)},
                       {"session", {{"open", session.open}, {"close", session.close}, {"day_length", session.day_length}}},
                       {"tickers", result.tickers},
                       {"days", days.size()},
                       {"out_of_range", out_of_range},
                       {"warnings", warnings},
                       {"decisions",
                        {{"overnight", "per-day estimation, covariances summed over days"},
                         {"calendar_bars", "previous close carried into empty bars"},
                         {"volume_buckets", "missing buckets dropped; same-stamp buckets merged by VWAP"},
                         {"volatility", "sqrt(summed variance / bar returns * bars per day)"},
                         {"integrated_volatility", "sqrt(summed variance / days)"}}}};
    if (config.clock == BarKind::sync_volume)
        report.metadata["bucket_size"] = sync_bucket;
    return result;
}

void write_matrix_csv(std::ostream &out, const std::vector<std::string> &tickers, const Matrix &m)
{
    if (m.rows() != static_cast<Eigen::Index>(tickers.size()) || m.cols() != m.rows())
        throw InputError("matrix shape does not match the ticker list");
    out << "ticker";
    for (const auto &t : tickers)
        out << ',' << t;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        out << tickers[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << ',' << format_number(m(i, j));
        out << '\n';
    }
}

} // namespace epps
