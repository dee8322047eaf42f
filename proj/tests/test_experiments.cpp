#include <doctest.h>

#include "epps/experiments.hpp"

#include <cmath>
#include <sstream>

using namespace epps;

namespace
{
std::string report_text(const ExperimentReport &r)
{
    std::ostringstream out;
    write_report(out, r);
    write_replications(out, r);
    return out.str();
}

PathBundle trades_of(const std::string &csv)
{
    std::istringstream in(csv);
    return read_taq_csv(in).trades;
}
} // namespace

TEST_CASE("mean_std")
{
    auto m = mean_std({1.0, 2.0, 3.0});
    CHECK(m.mean == 2.0);
    CHECK(m.std == 1.0);
    m = mean_std({4.0});
    CHECK(m.std == 0.0);
}

TEST_CASE("summarize correlations")
{
    auto s = summarize_correlations(Matrix::Identity(4, 4));
    CHECK(s.mean_abs == 0.0);
    CHECK(s.std_abs == 0.0);
    CHECK(s.pairs == 6);

    Matrix half = Matrix::Constant(3, 3, 0.5);
    half.diagonal().setOnes();
    s = summarize_correlations(half);
    CHECK(s.mean_abs == doctest::Approx(0.5));
    CHECK(s.std_abs == doctest::Approx(0.0));

    Matrix r = Matrix::Identity(3, 3);
    r(0, 1) = r(1, 0) = 0.2;
    r(0, 2) = r(2, 0) = -0.4;
    r(1, 2) = r(2, 1) = 0.6;
    s = summarize_correlations(r);
    CHECK(s.mean_abs == doctest::Approx(0.4));
    CHECK(s.std_abs == doctest::Approx(0.2));
}

TEST_CASE("default rho grid")
{
    const auto g = default_rho_grid();
    REQUIRE(g.size() == 19);
    CHECK(g.front() == -0.99);
    CHECK(g.back() == 0.99);
    CHECK(g[9] == doctest::Approx(0.0));
}

TEST_CASE("report csv layout")
{
    ExperimentReport r;
    r.name = "x";
    r.metadata = {{"experiment", "x"}};
    r.rows.push_back({"p", "MM", "rho", 0.5, 3, 0.25, std::nan("")});
    r.reps.push_back({"p", "MM", "rho", 0.5, 0, 0.1});
    CHECK(report_text(r) == "# {\n#   \"experiment\": \"x\"\n# }\npanel,series,param,value,n,mean,std\n"
                            "p,MM,rho,0.5,3,0.25,NaN\npanel,series,param,value,rep,estimate\np,MM,rho,0.5,0,0.1\n");
    CHECK(r.at("p", "MM", 0.5).n == 3);
    CHECK_THROWS_AS(r.at("p", "HY", 0.5), std::out_of_range);
}

TEST_CASE("small sweeps are deterministic across thread counts")
{
    MissingDataConfig md;
    md.fractions = {0.0, 0.4};
    md.rho_grid = {0.5};
    md.base.n_steps = 500;
    const auto a = report_text(run_missing_data_sweep(md, {42, 3, 1}));
    const auto b = report_text(run_missing_data_sweep(md, {42, 3, 3}));
    CHECK(a == b);
    CHECK(a != report_text(run_missing_data_sweep(md, {43, 3, 1})));

    RenoRecoveryConfig rr;
    rr.n_steps = 3000;
    rr.n_grid = {5, 10};
    CHECK(report_text(run_reno_recovery(rr, {1, 2, 1})) == report_text(run_reno_recovery(rr, {1, 2, 2})));
}

TEST_CASE("missing data sweep layout")
{
    MissingDataConfig md;
    md.fractions = {0.0, 0.2};
    md.rho_grid = {-0.5, 0.5};
    md.base.n_steps = 400;
    const auto r = run_missing_data_sweep(md, {7, 4, 1});
    CHECK(r.rows.size() == 2 * 2 * 2);
    CHECK(r.reps.size() == 2 * 2 * 2 * 4);
    CHECK(r.at("missing=0.2", "HY", -0.5).n == 4);
    CHECK(r.rows.front().param == "rho");
}

TEST_CASE("TAQ parsing")
{
    const auto b = trades_of("timestamp,ticker,price,volume\n5,ZZZ,10,1\n3,AAA,1.5,2\n1,AAA,1.25,3\n7,ZZZ,11,4\n");
    REQUIRE(b.size() == 2);
    CHECK(b[0].asset_id() == "AAA");
    CHECK(b[0].times()[0] == 1.0);
    CHECK(b[0].volumes()[0] == 3);
    CHECK(b[1].asset_id() == "ZZZ");

    std::istringstream lonely("timestamp,ticker,price,volume\n1,A,1,1\n2,A,1,1\n3,B,1,1\n");
    const auto d = read_taq_csv(lonely);
    CHECK(d.trades.size() == 1);
    CHECK(d.warnings.size() == 1);

    CHECK_THROWS_WITH_AS(trades_of("time,ticker,price,volume\n"), doctest::Contains("line 1"), InputError);
    CHECK_THROWS_WITH_AS(trades_of("timestamp,ticker,price,volume\n1,A,1,1\n2,A,-1,1\n"),
                         doctest::Contains("line 3: field 'price'"), InputError);
    CHECK_THROWS_WITH_AS(trades_of("timestamp,ticker,price,volume\n1.5,A,1,1\n"),
                         doctest::Contains("line 2: field 'timestamp'"), InputError);
    CHECK_THROWS_WITH_AS(trades_of("timestamp,ticker,price,volume\n1,A,1,0\n"),
                         doctest::Contains("line 2: field 'volume'"), InputError);
    CHECK_THROWS_WITH_AS(trades_of("timestamp,ticker,price,volume\n1,A,1\n"), doctest::Contains("line 2"),
                         InputError);
}

TEST_CASE("TAQ round trip through the writer")
{
    SyntheticTaqConfig cfg;
    cfg.assets = 2;
    const auto trades = generate_synthetic_taq(cfg, 3);
    std::ostringstream out;
    write_taq_csv(out, trades);
    std::istringstream in(out.str());
    const auto data = read_taq_csv(in);
    CHECK(data.trades.size() == 2);
    std::size_t total = 0;
    for (const auto &s : data.trades.series())
    {
        total += s.size();
        CHECK(s.front_time() >= cfg.session.open);
        CHECK(s.back_time() <= cfg.session.close);
    }
    CHECK(total == trades.size());
}

TEST_CASE("identical tickers are perfectly correlated under every clock and estimator")
{
    SyntheticTaqConfig cfg;
    cfg.assets = 1;
    auto trades = generate_synthetic_taq(cfg, 11);
    const auto n = trades.size();
    for (std::size_t k = 0; k < n; ++k)
    {
        auto copy = trades[k];
        copy.ticker = "TWIN";
        trades.push_back(copy);
    }
    std::ostringstream out;
    write_taq_csv(out, trades);
    for (auto clock : {BarKind::calendar_close, BarKind::calendar_vwap, BarKind::intrinsic, BarKind::sync_volume})
        for (auto est : {EstimatorTag::MM, EstimatorTag::HY})
        {
            std::istringstream in(out.str());
            TaqPipelineConfig p;
            p.clock = clock;
            p.estimator = est;
            p.scale = (clock == BarKind::calendar_close || clock == BarKind::calendar_vwap) ? 60.0 : 100.0;
            const auto r = run_taq_pipeline(read_taq_csv(in), p);
            REQUIRE(r.rho.rows() == 2);
            CHECK(r.rho(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("synthetic pipeline: calendar bars agree, volume clock orders HY above MM")
{
    SyntheticTaqConfig cfg;
    const auto trades = generate_synthetic_taq(cfg, 1000);
    std::ostringstream out;
    write_taq_csv(out, trades);
    auto run = [&](BarKind clock, double scale, EstimatorTag est) {
        std::istringstream in(out.str());
        TaqPipelineConfig p;
        p.clock = clock;
        p.scale = scale;
        p.estimator = est;
        return run_taq_pipeline(read_taq_csv(in), p);
    };
    const auto mm = run(BarKind::calendar_close, 60.0, EstimatorTag::MM);
    const auto hy = run(BarKind::calendar_close, 60.0, EstimatorTag::HY);
    CHECK(std::abs(mm.summary.mean_abs - hy.summary.mean_abs) < 0.1);
    CHECK(mm.tickers.size() == 4);
    CHECK(mm.report.rows.front().panel == "summary");

    const auto mm_v = run(BarKind::sync_volume, 480.0, EstimatorTag::MM);
    const auto hy_v = run(BarKind::sync_volume, 480.0, EstimatorTag::HY);
    CHECK(hy_v.summary.mean_abs >= mm_v.summary.mean_abs);
}

TEST_CASE("matrix csv")
{
    Matrix m(2, 2);
    m << 1, 0.5, 0.5, 1;
    std::ostringstream out;
    write_matrix_csv(out, {"A", "B"}, m);
    CHECK(out.str() == "ticker,A,B\nA,1,0.5\nB,0.5,1\n");
}
