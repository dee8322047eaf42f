/**
 * @file experiments.hpp
 * @brief Seeded Monte Carlo studies of the Epps effect and the TAQ pipeline.
 *
 * Every replication draws its randomness from
 * derive_seed(seed, {label, bits(grid value)..., rep}), so a grid point can
 * be rerun alone and results do not depend on the thread count.
 *
 * Reports are written as CSV: '#' lines carrying the metadata JSON, then
 * panel,series,param,value,n,mean,std. Per-replication estimates go to a
 * sibling file with suffix .reps.csv.
 */

#pragma once

#include "epps/aggregation.hpp"
#include "epps/core.hpp"
#include "epps/simulators.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace epps
{

struct SummaryRow
{
    std::string panel;
    std::string series;
    std::string param;
    double value = 0.0;
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
};

struct ReplicationRow
{
    std::string panel;
    std::string series;
    std::string param;
    double value = 0.0;
    std::size_t rep = 0;
    double estimate = 0.0;
};

struct ExperimentReport
{
    std::string name;
    nlohmann::json metadata;
    std::vector<SummaryRow> rows;
    std::vector<ReplicationRow> reps;

    /// @throws std::out_of_range when no row matches.
    const SummaryRow &at(const std::string &panel, const std::string &series, double value) const;
};

/// Sample mean and (n - 1) standard deviation; std is 0 for a single value.
struct MeanStd
{
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(const std::vector<double> &values);

void write_report(std::ostream &out, const ExperimentReport &report);
void write_replications(std::ostream &out, const ExperimentReport &report);

/// Writes `path` and `<stem>.reps.csv` next to it, each via a temporary file and rename.
void write_report_files(const ExperimentReport &report, const std::filesystem::path &path);

/// 17 points on [-0.8, 0.8] plus -0.99 and 0.99.
std::vector<double> default_rho_grid();

struct RunOptions
{
    std::uint64_t seed = 42;
    std::size_t reps = 100;
    /// 0 = every hardware thread.
    unsigned threads = 0;
};

struct MissingDataConfig
{
    std::vector<double> fractions{0.0, 0.1, 0.2, 0.4};
    std::vector<double> rho_grid = default_rho_grid();
    /// GBM parameters; rho and seed are overwritten per replication.
    SimConfig base = default_config(Model::gbm);
};

/// Panels "missing=<f>", series MM and HY, param rho.
ExperimentReport run_missing_data_sweep(const MissingDataConfig &config, const RunOptions &options);

struct ModelCase
{
    std::string label;
    SimConfig config;
};

struct ProcessComparisonConfig
{
    std::vector<ModelCase> models;
    std::vector<double> rho_grid = default_rho_grid();
    double missing_fraction = 0.2;
};

/// Merton with lambda 0, 0.2, 0.5; VG; GARCH (Andersen-Bollerslev); OU.
std::vector<ModelCase> default_process_models();
ProcessComparisonConfig default_process_comparison();

/// Panels per model, series MM-sync, HY-sync, MM-async, HY-async, param rho.
ExperimentReport run_process_comparison(const ProcessComparisonConfig &config, const RunOptions &options);

struct RenoRecoveryConfig
{
    std::vector<GarchVariant> variants{GarchVariant::reno, GarchVariant::andersen};
    std::vector<int> n_grid{10, 20, 40, 80, 160};
    std::size_t n_steps = 86400;
    double rho = 0.35;
    double mean_gap_1 = 15.0;
    double mean_gap_2 = 45.0;
};

/// Panels per variant, series MM-async and MM-sync, param N.
ExperimentReport run_reno_recovery(const RenoRecoveryConfig &config, const RunOptions &options);

struct RenoExtendedConfig
{
    std::vector<ModelCase> models;
    std::vector<int> n_grid{10, 20, 40, 80, 160};
    std::size_t n_steps = 10000;
    double rho = 0.35;
    double mean_gap_1 = 30.0;
    double mean_gap_2 = 45.0;
};

/// GBM, Merton (lambda 0.2), VG, GARCH (Andersen-Bollerslev), OU (per-second clock).
std::vector<ModelCase> default_extended_models();
RenoExtendedConfig default_reno_extended();

/**
 * @brief Panels per model: MM-sync and MM-async against N, HY-sync and
 * HY-async as rows with param "baseline", and a "nyquist" row holding the
 * average-gap Nyquist cutoff.
 */
ExperimentReport run_reno_extended(const RenoExtendedConfig &config, const RunOptions &options);

// ---------------------------------------------------------------- TAQ

struct TaqData
{
    PathBundle trades;
    std::vector<std::string> warnings;
};

/**
 * @brief Parse `timestamp,ticker,price,volume` rows (integer seconds).
 *
 * Rows are stably sorted by time per ticker; tickers are ordered by name.
 * Tickers with fewer than 2 trades are dropped with a warning.
 * @throws InputError "line <n>: ..." for malformed rows.
 */
TaqData read_taq_csv(std::istream &in);
TaqData read_taq_csv(const std::filesystem::path &path);

struct TaqTrade
{
    std::int64_t timestamp;
    std::string ticker;
    double price;
    std::int64_t volume;
};

void write_taq_csv(std::ostream &out, const std::vector<TaqTrade> &trades);

struct SessionWindow
{
    double open = 9.0 * 3600.0;
    double close = 16.0 * 3600.0 + 50.0 * 60.0;
    double day_length = 86400.0;
};

struct SyntheticTaqConfig
{
    std::size_t assets = 4;
    double rho = 0.6;
    std::size_t days = 1;
    /// Mean inter-arrival gap per asset in seconds (cycled if shorter than assets).
    std::vector<double> mean_gaps{10.0, 20.0, 30.0, 60.0};
    double mean_volume = 200.0;
    double sigma2 = 0.1;
    double mu = 0.01;
    SessionWindow session;
};

/// Correlated GBM per day on a 1-second grid, exponential arrivals, volume 1 + Poisson(mean - 1).
std::vector<TaqTrade> generate_synthetic_taq(const SyntheticTaqConfig &config, std::uint64_t seed);

struct TaqPipelineConfig
{
    BarKind clock = BarKind::calendar_close;
    /// Bar length in seconds for calendar clocks, buckets per day for volume clocks.
    double scale = 60.0;
    EstimatorTag estimator = EstimatorTag::MM;
    Baseline baseline = Baseline::least_liquid;
    SessionWindow session;
};

struct CorrelationSummary
{
    double mean_abs = 0.0;
    double std_abs = 0.0;
    std::size_t pairs = 0;
};

/// Mean and sample std of |rho_ij| over the strict upper triangle.
CorrelationSummary summarize_correlations(const Matrix &rho);

struct TaqResult
{
    std::vector<std::string> tickers;
    Matrix sigma;
    Matrix rho;
    CorrelationSummary summary;
    ExperimentReport report;
};

/**
 * @brief Session filter, repeated-trade VWAP, clock aggregation and
 * estimation per day; covariances are summed over days before forming rho.
 *
 * Report rows: ("summary", estimator, "scale") with mean|rho| and its std;
 * per ticker ("volatility", ticker, "adv") holding the per-bar volatility
 * rescaled by sqrt(bars per day), and ("integrated-volatility", ticker,
 * "adv") holding sqrt(summed variance / days).
 */
TaqResult run_taq_pipeline(const TaqData &data, const TaqPipelineConfig &config);

/// Square CSV with a ticker header row and column.
void write_matrix_csv(std::ostream &out, const std::vector<std::string> &tickers, const Matrix &m);

} // namespace epps
