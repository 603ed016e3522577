#include <szo/harness/config.hpp>
#include <szo/harness/csv.hpp>
#include <szo/harness/grid.hpp>
#include <szo/harness/plot.hpp>
#include <szo/harness/runner.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace szo::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("szo_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json small_config_json(const fs::path& out) {
    json j = json::parse(R"({
        "objective": {"family": "IdentityQuadratic", "d": 20, "s": 3},
        "sigma": 0.1, "T": 3000, "B": 3,
        "algorithms": ["GD", "MD"],
        "overrides": {"MD": {"c_n": 0.01}},
        "seeds": [1, 2, 3],
        "checkpoints": [100, 1000, 2999]
    })");
    j["output_dir"] = out.string();
    return j;
}

TEST(Config, RoundTripsThroughJson) {
    const ExperimentConfig cfg = parse_config(small_config_json("x"));
    EXPECT_EQ(cfg.algorithms, (std::vector<Algorithm>{Algorithm::GD, Algorithm::MD}));
    EXPECT_EQ(cfg.overrides.at(Algorithm::MD).at("c_n"), 0.01);
    const ExperimentConfig again = parse_config(config_to_json(cfg));
    EXPECT_EQ(config_to_json(again), config_to_json(cfg));
}

TEST(Config, RejectsUnknownAndInvalidFields) {
    auto bad = [](auto mutate) {
        json j = small_config_json("x");
        mutate(j);
        return j;
    };
    EXPECT_THROW(parse_config(bad([](json& j) { j["surprise"] = 1; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["objective"]["rho"] = 1; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["overrides"]["MD"]["c_nope"] = 1; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["algorithms"] = {"SGD"}; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["T"] = 0; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["sigma"] = -1; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["checkpoints"] = {5, 4}; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j["seeds"] = {1, 1}; })), InvalidConfig);
    EXPECT_THROW(parse_config(bad([](json& j) { j.erase("B"); })), InvalidConfig);
}

TEST(Config, InfeasibleProblemIsReportedBeforeRunning) {
    json j = small_config_json(scratch_dir("infeasible"));
    j["B"] = 0.5;  // ||x*||_1 = s/2 = 1.5
    EXPECT_THROW(run_experiment(parse_config(j)), InvalidConfig);
    j["B"] = 3;
    j["overrides"]["MD"]["n"] = 1000;  // T < 4n
    EXPECT_THROW(run_experiment(parse_config(j)), InvalidConfig);
}

TEST(Config, OverrideMappingPerAlgorithm) {
    ExperimentConfig cfg = parse_config(small_config_json("x"));
    const Objective obj = make_objective(cfg.objective, 1);
    cfg.overrides[Algorithm::GD] = {{"c_eta", 0.5}, {"c_delta", 0.2}};
    cfg.overrides[Algorithm::LassoGD] = {{"c_eta", 0.7}, {"c_delta", 3.0}};
    const OptimizerParams gd = make_params(cfg, obj, Algorithm::GD);
    EXPECT_EQ(*gd.flaxman_c_eta, 0.5);
    EXPECT_EQ(*gd.flaxman_c_delta, 0.2);
    const OptimizerParams sel = make_params(cfg, obj, Algorithm::LassoGD);
    EXPECT_EQ(*sel.flaxman_c_eta, 0.7);
    EXPECT_EQ(sel.c_delta, 3.0);
    const OptimizerParams md = make_params(cfg, obj, Algorithm::MD);
    EXPECT_EQ(md.c_n, 0.01);
    EXPECT_EQ(md.s, 3);
    EXPECT_GT(md.H, 0.0);
}

TEST(Seeds, SharedObjectiveDistinctStreams) {
    const TrialSeeds a = derive_seeds(7, 0, Algorithm::GD);
    const TrialSeeds b = derive_seeds(7, 0, Algorithm::MD);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_NE(a.noise, b.noise);
    EXPECT_NE(a.algorithm, b.algorithm);
    EXPECT_NE(a.noise, a.algorithm);
    EXPECT_EQ(derive_seeds(7, 3, Algorithm::GD).objective, derive_seeds(10, 0, Algorithm::GD).objective);
}

TEST(Csv, ShortestRoundTripAndSchema) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) EXPECT_EQ(parse_double(format_double(v)), v);
    RegretTrace trace{{10, 1.5, 0.25, 0.75, 0.8}, {20, 1.25, 0.125, 0.5, 0.6}};
    const fs::path dir = scratch_dir("csv");
    write_text((dir / "t.csv").string(), trace_csv("MD", 4, trace));
    const auto rows = read_trace_csv((dir / "t.csv").string());
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].algo, "MD");
    EXPECT_EQ(rows[1].seed, 4u);
    EXPECT_EQ(rows[1].row.cum_regret_iter, 0.5);

    write_text((dir / "bad.csv").string(), "algo,seed,queries\nMD,1,3\n");
    EXPECT_THROW(read_trace_csv((dir / "bad.csv").string()), SchemaMismatch);
    write_text((dir / "short.csv").string(), std::string(kTraceHeader) + "MD,1,3\n");
    EXPECT_THROW(read_trace_csv((dir / "short.csv").string()), SchemaMismatch);
}

TEST(RegretMonitor, ChargesQueriesToCurrentIterate) {
    auto f = [](const Vector& x) { return x.squaredNorm(); };
    NoisyOracle oracle(f, 1, 0.0, 1);
    RegretMonitor mon(oracle, f, 0.0, {2, 4});
    const Vector x1 = Vector::Constant(1, 1.0), x2 = Vector::Constant(1, 2.0), q = Vector::Constant(1, 3.0);
    mon.observe(x1, x1);
    mon.query(q);
    mon.query(q);
    mon.observe(x2, x2);
    mon.query(q);
    mon.query(q);
    mon.finish(Vector::Zero(1));
    ASSERT_EQ(mon.trace().size(), 2u);
    EXPECT_DOUBLE_EQ(mon.trace()[0].cum_regret_iter, 1.0);
    EXPECT_DOUBLE_EQ(mon.trace()[1].cum_regret_iter, (1.0 + 1.0 + 4.0 + 4.0) / 4.0);
    EXPECT_DOUBLE_EQ(mon.trace()[1].cum_regret_query, 9.0);
    EXPECT_DOUBLE_EQ(mon.trace()[1].simple_regret, 0.0);
}

TEST(Runner, OneCsvPerCellPlusManifestAndDeterminism) {
    const fs::path d1 = scratch_dir("run1"), d2 = scratch_dir("run2");
    const ExperimentSummary s1 = run_experiment(parse_config(small_config_json(d1)));
    run_experiment(parse_config(small_config_json(d2)));
    ASSERT_TRUE(s1.all_ok());

    std::size_t csvs = 0, manifests = 0;
    for (const auto& e : fs::directory_iterator(d1)) {
        if (e.path().extension() == ".csv") ++csvs;
        if (e.path().filename() == "manifest.json") ++manifests;
    }
    EXPECT_EQ(csvs, 6u);
    EXPECT_EQ(manifests, 1u);

    for (const auto& e : fs::directory_iterator(d1)) {
        if (e.path().extension() != ".csv") continue;
        EXPECT_EQ(slurp(e.path()), slurp(d2 / e.path().filename())) << e.path();
        const auto rows = read_trace_csv(e.path().string());
        ASSERT_FALSE(rows.empty());
        EXPECT_LE(rows.back().row.queries_used, 3000);
    }
    for (const auto& cell : s1.cells) {
        if (cell.algorithm == Algorithm::GD) {
            EXPECT_EQ(cell.queries_used, 3000);
            EXPECT_EQ(cell.trace.back().queries_used, 3000);
        }
        EXPECT_LE(cell.queries_used, 3000);
    }
    const json manifest = json::parse(slurp(d1 / "manifest.json"));
    EXPECT_EQ(manifest["cells"].size(), 6u);
    EXPECT_EQ(manifest["cells"][0]["status"], "ok");
}

TEST(Runner, SeedOffsetChangesOutput) {
    ExperimentConfig cfg = parse_config(small_config_json("unused"));
    const CellResult a = run_cell(cfg, Algorithm::GD, 1, 0);
    const CellResult b = run_cell(cfg, Algorithm::GD, 1, 1);
    const CellResult c = run_cell(cfg, Algorithm::GD, 2, 0);
    EXPECT_NE(a.final_cum_regret_iter(), b.final_cum_regret_iter());
    EXPECT_EQ(b.final_cum_regret_iter(), c.final_cum_regret_iter());
}

TEST(Grid, ParsesFlatAndPerAlgorithmForms) {
    const GridSpec flat = parse_grid(json::parse(R"({"c_eta": [1, 2]})"));
    ASSERT_TRUE(flat.shared.has_value());
    const GridSpec per = parse_grid(json::parse(R"({"MD": {"c_n": [0.01]}, "GD": {"c_eta": [1]}})"));
    EXPECT_EQ(per.per_algorithm.size(), 2u);
    EXPECT_THROW(parse_grid(json::parse(R"({"bogus": [1]})")), InvalidConfig);
    EXPECT_THROW(parse_grid(json::parse(R"({"c_eta": []})")), InvalidConfig);
    EXPECT_EQ(grid_points(Grid{{"a", {1, 2}}, {"c_eta", {3, 4, 5}}}).size(), 6u);
}

ExperimentConfig grid_config() {
    json j = small_config_json("unused");
    j["algorithms"] = {"GD"};
    j["overrides"] = json::object();
    return parse_config(j);
}

TEST(Grid, SingletonReturnsThatPoint) {
    const GridResult r = grid_search(grid_config(), parse_grid(json::parse(R"({"c_eta": [0.5]})")));
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.best.at(Algorithm::GD).params.at("c_eta"), 0.5);
    EXPECT_EQ(r.best_config.overrides.at(Algorithm::GD).at("c_eta"), 0.5);
}

TEST(Grid, ThreePointsBestIsColumnMinimum) {
    const GridResult r = grid_search(grid_config(), parse_grid(json::parse(R"({"c_eta": [0.5, 1, 2]})")));
    ASSERT_EQ(r.points.size(), 3u);
    double lowest = INFINITY;
    for (const auto& p : r.points) lowest = std::min(lowest, p.median_cum_regret_iter);
    EXPECT_EQ(r.best.at(Algorithm::GD).median_cum_regret_iter, lowest);
    const std::string report = grid_report_csv(r);
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 4);
}

TEST(Grid, TiesGoToLexicographicallySmallerPoint) {
    // omega does not affect GD, so every point has the same regret
    const GridResult r = grid_search(grid_config(), parse_grid(json::parse(R"({"omega": [3, 1.5, 2]})")));
    EXPECT_EQ(r.points[0].median_cum_regret_iter, r.points[1].median_cum_regret_iter);
    EXPECT_EQ(r.best.at(Algorithm::GD).params.at("omega"), 1.5);
}

TEST(Grid, FailingPointsAreFlaggedNotChosen) {
    ExperimentConfig cfg = grid_config();
    cfg.algorithms = {Algorithm::MD};
    const GridResult r = grid_search(cfg, parse_grid(json::parse(R"({"n": [10, 5000]})")));
    ASSERT_EQ(r.points.size(), 2u);
    EXPECT_TRUE(r.points[1].failed);
    EXPECT_EQ(r.best.at(Algorithm::MD).params.at("n"), 10);
}

TEST(Plot, OnePolylinePerAlgorithm) {
    const fs::path dir = scratch_dir("plot");
    RegretTrace trace{{1000, 1.0, 0.5, 0.5, 0.5}, {2000, 1.0, 0.25, 0.25, 0.25}};
    write_text((dir / "a.csv").string(), trace_csv("MD", 1, trace));
    emit_plot({(dir / "a.csv").string()}, (dir / "out.svg").string());
    const std::string svg = slurp(dir / "out.svg");
    std::size_t count = 0;
    for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++count;
    EXPECT_EQ(count, 1u);
    EXPECT_NE(svg.find(">MD</text>"), std::string::npos);
}

TEST(Plot, EmptyAfterBurnInWritesNothing) {
    const fs::path dir = scratch_dir("plot_empty");
    RegretTrace trace{{10, 1.0, 0.5, 0.5, 0.5}};
    write_text((dir / "a.csv").string(), trace_csv("GD", 1, trace));
    EXPECT_THROW(emit_plot({(dir / "a.csv").string()}, (dir / "out.svg").string()), Error);
    EXPECT_FALSE(fs::exists(dir / "out.svg"));
}

TEST(Plot, MedianAcrossSeeds) {
    std::vector<TraceRecord> rows;
    for (double v : {1.0, 5.0, 2.0}) rows.push_back({"GD", 0, {1000, 0, 0, v, 0}});
    const auto curves = regret_curves(rows, 1000);
    ASSERT_EQ(curves.size(), 1u);
    EXPECT_EQ(curves[0].median_regret[0], 2.0);
    EXPECT_EQ(xml_escape("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
}

#ifdef SZO_BENCH_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(SZO_BENCH_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch_dir("cli");
    write_text((dir / "good.json").string(), small_config_json(dir / "out").dump());
    json bad = small_config_json(dir / "out");
    bad["unknown"] = true;
    write_text((dir / "bad.json").string(), bad.dump());
    write_text((dir / "grid.json").string(), R"({"GD": {"c_eta": [0.5, 1]}, "MD": {"c_n": [0.01]}})");

    EXPECT_EQ(run_cli("run " + (dir / "good.json").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
    EXPECT_EQ(run_cli("run " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("run " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("grid " + (dir / "good.json").string() + " " + (dir / "grid.json").string() +
                      " --output-dir " + (dir / "grid").string()),
              0);
    EXPECT_TRUE(fs::exists(dir / "grid" / "grid_report.csv"));
    EXPECT_TRUE(fs::exists(dir / "grid" / "grid_best.json"));
    EXPECT_EQ(run_cli("plot " + (dir / "p.svg").string() + " " + (dir / "out" / "GD_seed1.csv").string() +
                      " --burn-in 100"),
              0);
    EXPECT_EQ(run_cli("plot " + (dir / "q.svg").string() + " " + (dir / "out" / "GD_seed1.csv").string() +
                      " --burn-in 100000"),
              3);
    EXPECT_FALSE(fs::exists(dir / "q.svg"));
}
#endif

}  // namespace
}  // namespace szo::harness
