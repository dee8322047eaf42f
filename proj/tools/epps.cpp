// Command-line front end: simulate, estimate, bars, experiment, summarize.

#include "epps/aggregation.hpp"
#include "epps/asynchrony.hpp"
#include "epps/config.hpp"
#include "epps/estimators.hpp"
#include "epps/experiments.hpp"
#include "epps/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

using namespace epps;
using nlohmann::json;

namespace
{

template <class T>
struct is_optional : std::false_type
{
};
template <class T>
struct is_optional<std::optional<T>> : std::true_type
{
};

template <class T>
struct is_vector : std::false_type
{
};
template <class T>
struct is_vector<std::vector<T>> : std::true_type
{
};

/// A JSON config key that fills a variable unless its flag was given.
struct Binding
{
    CLI::Option *option = nullptr;
    std::function<void(const json &)> assign;
};

class ConfigOverlay
{
public:
    template <class T>
    CLI::Option *add(CLI::App *app, const std::string &flag, const std::string &key, T &target,
                     const std::string &help)
    {
        auto *opt = app->add_option(flag, target, help);
        if constexpr (is_vector<T>::value)
            opt->delimiter(',');
        bind(key, opt, target);
        return opt;
    }

    template <class T>
    void bind(const std::string &key, CLI::Option *opt, T &target)
    {
        bindings_[key] = {opt, [&target, key](const json &v) {
                              try
                              {
                                  if constexpr (is_optional<T>::value)
                                      target = v.get<typename T::value_type>();
                                  else
                                      target = v.get<T>();
                              }
                              catch (const json::exception &)
                              {
                                  throw InputError("config field '" + key + "' has the wrong type");
                              }
                          }};
    }

    void extra(const std::string &key, std::function<void(const json &)> fn) { bindings_[key] = {nullptr, std::move(fn)}; }

    void apply(const std::string &path) const
    {
        if (path.empty())
            return;
        const json doc = read_json_file(path);
        if (!doc.is_object())
            throw InputError("config file '" + path + "' must hold a JSON object");
        for (const auto &item : doc.items())
        {
            auto it = bindings_.find(item.key());
            if (it == bindings_.end())
                throw InputError("unknown config field '" + item.key() + "'");
            if (it->second.option && it->second.option->count() > 0)
                continue;
            it->second.assign(item.value());
        }
    }

private:
    std::map<std::string, Binding> bindings_;
};

struct Common
{
    std::optional<std::uint64_t> seed;
    std::size_t reps = 100;
    std::string out;
    unsigned threads = 0;
    std::string config;
};

void add_seed(CLI::App *app, ConfigOverlay &overlay, Common &c)
{
    auto *opt = app->add_option("--seed", c.seed, "Root random seed (generated and printed when omitted)");
    overlay.bind("seed", opt, c.seed);
}

void add_common(CLI::App *app, ConfigOverlay &overlay, Common &c, bool with_reps, bool with_seed = true)
{
    if (with_seed)
        add_seed(app, overlay, c);
    if (with_reps)
    {
        overlay.add(app, "--reps", "reps", c.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
        overlay.add(app, "--threads", "threads", c.threads, "Worker threads (0 = all cores)");
    }
    app->add_option("--out", c.out, "Output path")->required();
    app->add_option("--config", c.config, "JSON file with defaults for any flag")->check(CLI::ExistingFile);
}

std::uint64_t resolve_seed(const Common &c)
{
    if (c.seed)
        return *c.seed;
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed " << seed << '\n';
    return seed;
}

RunOptions run_options(const Common &c)
{
    return {resolve_seed(c), c.reps, c.threads};
}

void write_text(const std::string &path, const std::function<void(std::ostream &)> &fn)
{
    std::ostringstream buf;
    fn(buf);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out || !(out << buf.str()))
            throw InputError("cannot write '" + path + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::vector<TaqTrade> bundle_to_trades(const PathBundle &bundle)
{
    std::vector<TaqTrade> rows;
    for (const auto &s : bundle.series())
        for (std::size_t k = 0; k < s.size(); ++k)
            rows.push_back({static_cast<std::int64_t>(std::llround(s.times()[k])), s.asset_id(), s.prices()[k],
                            s.volumes()[k]});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TaqTrade &a, const TaqTrade &b) { return a.timestamp < b.timestamp; });
    return rows;
}

PathBundle deduped(const PathBundle &bundle)
{
    std::vector<TickSeries> out;
    for (const auto &s : bundle.series())
        out.push_back(dedupe_trades(s));
    return PathBundle(std::move(out));
}

std::string rounded(double x)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << x;
    return s.str();
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Covariance estimation and Epps-effect experiments for asynchronous tick data"};
    app.require_subcommand(1);
    std::map<CLI::App *, ConfigOverlay> overlays;
    ConfigOverlay *cur = nullptr;
    Common common;

    // simulate
    auto *sim = app.add_subcommand("simulate", "Simulate correlated paths and write them as a TAQ CSV");
    cur = &overlays[sim];
    std::string sim_model = "gbm";
    std::optional<std::size_t> sim_steps;
    std::optional<double> sim_rho;
    double sim_missing = 0.0;
    std::vector<double> sim_gaps;
    bool sim_synthetic = false;
    SyntheticTaqConfig synth;
    json sim_model_block;
    cur->add(sim, "--model", "model", sim_model, "gbm, merton, vg, garch or ou");
    cur->add(sim, "--steps", "n_steps", sim_steps, "Number of one-second steps");
    cur->add(sim, "--rho", "rho", sim_rho, "Correlation between all asset pairs");
    cur->add(sim, "--missing", "missing", sim_missing, "Fraction of ticks removed from each path");
    cur->add(sim, "--arrival-gaps", "arrival_gaps", sim_gaps, "Mean exponential inter-arrival gap per asset (s)");
    auto *synth_flag = sim->add_flag("--synthetic-taq", sim_synthetic,
                                     "Write a multi-asset synthetic TAQ file (GBM, exponential arrivals, Poisson volumes)");
    cur->bind("synthetic_taq", synth_flag, sim_synthetic);
    cur->add(sim, "--assets", "assets", synth.assets, "Synthetic TAQ: number of tickers");
    cur->add(sim, "--days", "days", synth.days, "Synthetic TAQ: number of trading days");
    cur->add(sim, "--mean-volume", "mean_volume", synth.mean_volume, "Synthetic TAQ: mean trade size");
    cur->extra("model_config", [&](const json &v) { sim_model_block = v; });
    add_common(sim, *cur, common, false);

    // estimate
    auto *est = app.add_subcommand("estimate", "Estimate the correlation matrix of a TAQ CSV");
    cur = &overlays[est];
    std::string est_method = "mm";
    std::string est_in;
    std::optional<int> est_cutoff;
    std::string est_sigma_out;
    cur->add(est, "--method", "method", est_method, "mm, hy or rv")->check(CLI::IsMember({"mm", "hy", "rv"}));
    cur->add(est, "--in", "in", est_in, "TAQ CSV (timestamp,ticker,price,volume)");
    cur->add(est, "--cutoff", "cutoff", est_cutoff, "Fourier cutoff N for mm (default: Nyquist)");
    cur->add(est, "--sigma-out", "sigma_out", est_sigma_out, "Also write the covariance matrix here");
    add_common(est, *cur, common, false, false);

    // bars
    auto *bars = app.add_subcommand("bars", "Aggregate each ticker of a TAQ CSV into bars");
    cur = &overlays[bars];
    std::string bars_in, bars_clock = "calendar-close", bars_baseline = "least-liquid";
    double bars_scale = 60.0;
    cur->add(bars, "--in", "in", bars_in, "TAQ CSV");
    cur->add(bars, "--clock", "clock", bars_clock, "calendar-close, calendar-vwap, intrinsic or sync-volume");
    cur->add(bars, "--scale", "scale", bars_scale, "Bar length (s) or buckets per day");
    cur->add(bars, "--baseline", "baseline", bars_baseline, "least-liquid or most-liquid (sync-volume)");
    add_common(bars, *cur, common, false, false);

    // summarize
    auto *summ = app.add_subcommand("summarize", "Mean and std of |rho| over the upper triangle of a matrix CSV");
    cur = &overlays[summ];
    std::string summ_in;
    cur->add(summ, "--in", "in", summ_in, "Correlation matrix CSV");
    summ->add_option("--out", common.out, "Write the summary here as CSV");
    summ->add_option("--config", common.config, "JSON file with defaults for any flag")->check(CLI::ExistingFile);

    // experiment
    auto *exp = app.add_subcommand("experiment", "Run a seeded Monte Carlo study or the TAQ pipeline");
    exp->require_subcommand(1);

    auto *md = exp->add_subcommand("missing-data", "MM and HY under random decimation");
    cur = &overlays[md];
    MissingDataConfig md_cfg;
    cur->add(md, "--fractions", "fractions", md_cfg.fractions, "Missing fractions");
    cur->add(md, "--rho-grid", "rho_grid", md_cfg.rho_grid, "Induced correlations");
    cur->add(md, "--steps", "n_steps", md_cfg.base.n_steps, "Steps per path");
    add_common(md, *cur, common, true);

    auto *pc = exp->add_subcommand("process-comparison", "Synchronous vs decimated estimates across processes");
    cur = &overlays[pc];
    ProcessComparisonConfig pc_cfg = default_process_comparison();
    std::optional<std::size_t> pc_steps;
    cur->add(pc, "--rho-grid", "rho_grid", pc_cfg.rho_grid, "Induced correlations");
    cur->add(pc, "--missing", "missing", pc_cfg.missing_fraction, "Fraction removed for the asynchronous case");
    cur->add(pc, "--steps", "n_steps", pc_steps, "Steps per path");
    add_common(pc, *cur, common, true);

    auto *rr = exp->add_subcommand("reno-recovery", "MM against N on exponentially sampled GARCH paths");
    cur = &overlays[rr];
    RenoRecoveryConfig rr_cfg;
    std::vector<std::string> rr_variants{"reno", "andersen"};
    std::vector<double> rr_gaps{rr_cfg.mean_gap_1, rr_cfg.mean_gap_2};
    cur->add(rr, "--variants", "variants", rr_variants, "GARCH specifications");
    cur->add(rr, "--n-grid", "n_grid", rr_cfg.n_grid, "Fourier cutoffs");
    cur->add(rr, "--steps", "n_steps", rr_cfg.n_steps, "Steps per path");
    cur->add(rr, "--rho", "rho", rr_cfg.rho, "Induced correlation");
    cur->add(rr, "--gaps", "gaps", rr_gaps, "Mean arrival gaps of asset 1 and 2 (s)")->expected(2);
    add_common(rr, *cur, common, true);

    auto *re = exp->add_subcommand("reno-extended", "MM against N and HY baselines for all five processes");
    cur = &overlays[re];
    RenoExtendedConfig re_cfg = default_reno_extended();
    std::vector<double> re_gaps{re_cfg.mean_gap_1, re_cfg.mean_gap_2};
    cur->add(re, "--n-grid", "n_grid", re_cfg.n_grid, "Fourier cutoffs");
    cur->add(re, "--steps", "n_steps", re_cfg.n_steps, "Steps per path");
    cur->add(re, "--rho", "rho", re_cfg.rho, "Induced correlation");
    cur->add(re, "--gaps", "gaps", re_gaps, "Mean arrival gaps of asset 1 and 2 (s)")->expected(2);
    add_common(re, *cur, common, true);

    auto *taq = exp->add_subcommand("taq", "Session filter, aggregation and estimation of a TAQ CSV");
    cur = &overlays[taq];
    std::string taq_in, taq_clock = "calendar-close", taq_estimator = "mm", taq_baseline = "least-liquid",
                        taq_matrix_out;
    TaqPipelineConfig taq_cfg;
    cur->add(taq, "--in", "in", taq_in, "TAQ CSV")->required();
    cur->add(taq, "--clock", "clock", taq_clock, "calendar-close, calendar-vwap, intrinsic or sync-volume");
    cur->add(taq, "--scale", "scale", taq_cfg.scale, "Bar length (s) or buckets per day");
    cur->add(taq, "--estimator", "estimator", taq_estimator, "mm or hy")->check(CLI::IsMember({"mm", "hy"}));
    cur->add(taq, "--baseline", "baseline", taq_baseline, "least-liquid or most-liquid");
    cur->add(taq, "--session-open", "session_open", taq_cfg.session.open, "Session open (seconds of day)");
    cur->add(taq, "--session-close", "session_close", taq_cfg.session.close, "Session close (seconds of day)");
    cur->add(taq, "--matrix-out", "matrix_out", taq_matrix_out, "Correlation matrix CSV (default: <out>.matrix.csv)");
    taq->add_option("--out", common.out, "Report CSV")->required();
    taq->add_option("--config", common.config, "JSON file with defaults for any flag")->check(CLI::ExistingFile);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }

    try
    {
        for (auto &[sub, ov] : overlays)
            if (sub->parsed())
                ov.apply(common.config);

        if (*sim)
        {
            const auto seed = resolve_seed(common);
            if (sim_synthetic)
            {
                if (sim_rho)
                    synth.rho = *sim_rho;
                if (!sim_gaps.empty())
                    synth.mean_gaps = sim_gaps;
                const auto rows = generate_synthetic_taq(synth, seed);
                write_text(common.out, [&](std::ostream &o) { write_taq_csv(o, rows); });
                std::cout << "wrote " << rows.size() << " trades for " << synth.assets << " tickers to " << common.out
                          << '\n';
                return 0;
            }
            json doc = sim_model_block.is_null() ? json::object() : sim_model_block;
            if (!doc.is_object())
                throw InputError("config field 'sim' must be an object");
            doc["model"] = doc.value("model", sim_model);
            if (sim->count("--model"))
                doc["model"] = sim_model;
            if (sim_steps)
                doc["n_steps"] = *sim_steps;
            if (sim_rho)
                doc["rho"] = *sim_rho;
            doc["seed"] = seed;
            const SimConfig cfg = sim_config_from_json(doc);
            PathBundle paths = simulate(cfg);
            std::vector<TickSeries> observed;
            for (std::size_t i = 0; i < paths.size(); ++i)
            {
                TickSeries s = paths[i];
                if (sim_missing > 0.0)
                    s = decimate_missing(s, sim_missing, derive_seed(seed, {1, i}));
                if (!sim_gaps.empty())
                    s = exponential_sample(s, sim_gaps[i % sim_gaps.size()], derive_seed(seed, {2, i}));
                observed.push_back(std::move(s));
            }
            const auto rows = bundle_to_trades(PathBundle(std::move(observed)));
            write_text(common.out, [&](std::ostream &o) { write_taq_csv(o, rows); });
            std::cout << "wrote " << rows.size() << " ticks of " << to_string(cfg.model) << " to " << common.out << '\n';
        }
        else if (*est)
        {
            if (est_in.empty())
                throw InputError("missing --in");
            const TaqData data = read_taq_csv(std::filesystem::path(est_in));
            for (const auto &w : data.warnings)
                std::cerr << "warning: " << w << '\n';
            const PathBundle bundle = deduped(data.trades);
            CovarianceResult r;
            if (est_method == "mm")
                r = mm_covariance(bundle, est_cutoff);
            else if (est_method == "hy")
                r = hy_covariance(bundle);
            else
                r = realized_covariance(bundle);
            const auto tickers = bundle.asset_ids();
            write_text(common.out, [&](std::ostream &o) { write_matrix_csv(o, tickers, r.rho); });
            if (!est_sigma_out.empty())
                write_text(est_sigma_out, [&](std::ostream &o) { write_matrix_csv(o, tickers, r.sigma); });
            const auto s = summarize_correlations(r.rho);
            std::cout << to_string(r.estimator) << " on " << tickers.size() << " tickers";
            if (r.cutoff_used)
                std::cout << " (N = " << *r.cutoff_used << ")";
            std::cout << ": mean|rho| " << rounded(s.mean_abs) << " +/- " << rounded(s.std_abs)
                      << (r.out_of_range ? " [|rho| > 1 present]" : "") << '\n';
        }
        else if (*bars)
        {
            if (bars_in.empty())
                throw InputError("missing --in");
            const TaqData data = read_taq_csv(std::filesystem::path(bars_in));
            const PathBundle bundle = deduped(data.trades);
            const BarKind kind = bar_kind_from_string(bars_clock);
            std::vector<BarSeries> out;
            if (kind == BarKind::sync_volume)
            {
                const auto v = synchronized_bucket_size(bundle, static_cast<int>(std::lround(bars_scale)),
                                                        baseline_from_string(bars_baseline));
                out = synchronized_volume_bars(bundle, v);
            }
            else
            {
                for (const auto &s : bundle.series())
                {
                    if (kind == BarKind::intrinsic)
                        out.push_back(intrinsic_volume_bars(
                            s, bucket_size_for(average_daily_volume(s), static_cast<int>(std::lround(bars_scale)))));
                    else
                    {
                        out.push_back(calendar_bars(s, bars_scale, bundle.t_min(), bundle.t_max()));
                        out.back().kind = kind;
                    }
                }
            }
            std::filesystem::create_directories(common.out);
            for (const auto &b : out)
            {
                const auto path = (std::filesystem::path(common.out) / (b.asset_id + ".csv")).string();
                write_text(path, [&](std::ostream &o) { write_bars_csv(o, b); });
            }
            std::cout << "wrote " << out.size() << " bar files (" << bars_clock << ") to " << common.out << '\n';
        }
        else if (*summ)
        {
            if (summ_in.empty())
                throw InputError("missing --in");
            std::ifstream in(summ_in);
            if (!in)
                throw InputError("cannot open '" + summ_in + "'");
            std::string line;
            std::getline(in, line);
            std::vector<std::vector<double>> rows;
            std::size_t line_no = 1;
            while (std::getline(in, line))
            {
                ++line_no;
                if (line.empty())
                    continue;
                std::istringstream ss(line);
                std::string cell;
                std::getline(ss, cell, ',');
                rows.emplace_back();
                while (std::getline(ss, cell, ','))
                {
                    try
                    {
                        rows.back().push_back(std::stod(cell));
                    }
                    catch (const std::exception &)
                    {
                        throw InputError("line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
                    }
                }
            }
            const auto n = static_cast<Eigen::Index>(rows.size());
            Matrix rho(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
                    throw InputError("matrix in '" + summ_in + "' is not square");
                for (Eigen::Index j = 0; j < n; ++j)
                    rho(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
            const auto s = summarize_correlations(rho);
            std::cout << "mean|rho| " << rounded(s.mean_abs) << " +/- " << rounded(s.std_abs) << " over " << s.pairs
                      << " pairs\n";
            if (!common.out.empty())
                write_text(common.out, [&](std::ostream &o) {
                    o << "pairs,mean_abs,std_abs\n" << s.pairs << ',' << s.mean_abs << ',' << s.std_abs << '\n';
                });
        }
        else if (*md)
        {
            const auto report = run_missing_data_sweep(md_cfg, run_options(common));
            write_report_files(report, common.out);
            std::cout << "missing-data: " << report.rows.size() << " rows written to " << common.out << '\n';
        }
        else if (*pc)
        {
            if (pc_steps)
                for (auto &m : pc_cfg.models)
                    m.config.n_steps = *pc_steps;
            const auto report = run_process_comparison(pc_cfg, run_options(common));
            write_report_files(report, common.out);
            std::cout << "process-comparison: " << report.rows.size() << " rows written to " << common.out << '\n';
        }
        else if (*rr)
        {
            rr_cfg.variants.clear();
            for (const auto &v : rr_variants)
                rr_cfg.variants.push_back(garch_variant_from_string(v));
            if (rr_gaps.size() != 2)
                throw InputError("--gaps needs two values");
            rr_cfg.mean_gap_1 = rr_gaps[0];
            rr_cfg.mean_gap_2 = rr_gaps[1];
            const auto report = run_reno_recovery(rr_cfg, run_options(common));
            write_report_files(report, common.out);
            std::cout << "reno-recovery: " << report.rows.size() << " rows written to " << common.out << '\n';
        }
        else if (*re)
        {
            if (re_gaps.size() != 2)
                throw InputError("--gaps needs two values");
            re_cfg.mean_gap_1 = re_gaps[0];
            re_cfg.mean_gap_2 = re_gaps[1];
            const auto report = run_reno_extended(re_cfg, run_options(common));
            write_report_files(report, common.out);
            std::cout << "reno-extended: " << report.rows.size() << " rows written to " << common.out << '\n';
        }
        else if (*taq)
        {
            taq_cfg.clock = bar_kind_from_string(taq_clock);
            taq_cfg.estimator = taq_estimator == "mm" ? EstimatorTag::MM : EstimatorTag::HY;
            taq_cfg.baseline = baseline_from_string(taq_baseline);
            const TaqData data = read_taq_csv(std::filesystem::path(taq_in));
            const TaqResult result = run_taq_pipeline(data, taq_cfg);
            for (const auto &w : result.report.metadata["warnings"])
                std::cerr << "warning: " << w.get<std::string>() << '\n';
            write_report_files(result.report, common.out);
            auto matrix_path = taq_matrix_out;
            if (matrix_path.empty())
                matrix_path = std::filesystem::path(common.out).replace_extension(".matrix.csv").string();
            write_text(matrix_path, [&](std::ostream &o) { write_matrix_csv(o, result.tickers, result.rho); });
            std::cout << "taq " << taq_clock << " " << taq_estimator << ": mean|rho| "
                      << rounded(result.summary.mean_abs) << " +/- " << rounded(result.summary.std_abs) << " over "
                      << result.tickers.size() << " tickers\n";
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
