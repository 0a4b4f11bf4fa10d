#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ipl/cli/commands.hpp"
#include "ipl/cli/config.hpp"

namespace ipl::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kData = IPL_EXAMPLE_CONFIG_DIR;

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv read_csv(const fs::path& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in) << path;
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with('#')) {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      std::vector<double> row;
      for (const auto& cell : split(line)) row.push_back(std::stod(cell));
      EXPECT_EQ(row.size(), csv.header.size());
      csv.rows.push_back(std::move(row));
    }
  }
  return csv;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    out_ = fs::path(::testing::TempDir()) / (std::string("ipl_cli_") + info->name());
    fs::remove_all(out_);
  }
  void TearDown() override { fs::remove_all(out_); }

  CommandContext context(const std::string& file) const {
    CommandContext ctx;
    ctx.config = load_config((kData / file).string());
    ctx.out_dir = out_;
    ctx.command_line = "ipl test " + file;
    return ctx;
  }

  fs::path out_;
};

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(ConfigTest, MinimalConfig) {
  const auto c = load_config((kData / "minimal.json").string());
  EXPECT_EQ(c.sites, (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(c.times.points(), (std::vector<double>{0, 0.5, 1, 2}));
  const auto model = c.model();
  EXPECT_EQ(model.initial.mass(), 1.0);
  EXPECT_FALSE(model.has_mutation());
  EXPECT_FALSE(model.has_selection());
}

TEST(ConfigTest, ZeroRateIsRejectedWithMergeGuidance) {
  const auto msg = error_of(R"({"sites": [2, 2, 2], "rho": [0.0, 1.0]})");
  EXPECT_NE(msg.find("rho"), std::string::npos) << msg;
  EXPECT_NE(msg.find("merge"), std::string::npos) << msg;
  EXPECT_NE(error_of(R"({"sites": [2, 2], "rho": [1.0, 1.0]})"), "");
}

TEST(ConfigTest, BadGeneratorNamesTheMatrix) {
  const auto msg = error_of(R"({"sites": [2, 2], "rho": [1.0],
    "mutation": {"matrices": [[[-1, 1], [1, -1]], [[-1, 1], [0.5, -1]]]}})");
  EXPECT_NE(msg.find("mutation.matrices[1]"), std::string::npos) << msg;
}

TEST(ConfigTest, MalformedDocumentsNameThePath) {
  EXPECT_NE(error_of("{not json").find("JSON"), std::string::npos);
  EXPECT_NE(error_of(R"({"rho": [1]})").find("sites"), std::string::npos);
  EXPECT_NE(error_of(R"({"sites": [2, 2], "rho": [1], "times": [0.5, 1]})").find("start at 0"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"sites": [2, 2], "rho": [1], "initial": [1, 2]})").find("initial"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"sites": [2, 2], "rho": [1], "schema": 9})").find("schema"), std::string::npos);
  EXPECT_NE(error_of(R"({"sites": [2, 2], "rho": [1], "fitness": [[0, 1]]})").find("fitness"),
            std::string::npos);
}

TEST(ConfigTest, EmitParseRoundTrip) {
  for (const auto* file : {"minimal.json", "three_site.json", "selection_product.json", "discrete.json"}) {
    const auto c = load_config((kData / file).string());
    EXPECT_EQ(parse_config(emit_config(c)), c) << file;
    EXPECT_EQ(model_hash(parse_config(emit_config(c))), model_hash(c));
  }
  auto c = load_config((kData / "minimal.json").string());
  const auto h = model_hash(c);
  EXPECT_EQ(h.size(), 16u);
  c.rho[0] = 1.5;
  EXPECT_NE(model_hash(c), h);
}

TEST(ConfigTest, LogGridStartsAtZero) {
  const auto c = load_config((kData / "selection_product.json").string());
  const auto pts = c.times.points();
  ASSERT_EQ(pts.size(), 9u);
  EXPECT_EQ(pts.front(), 0.0);
  EXPECT_NEAR(pts[1], 0.01, 1e-15);
  EXPECT_NEAR(pts.back(), 4.0, 1e-13);
  EXPECT_NEAR(pts[2] / pts[1], pts[3] / pts[2], 1e-12);
}

TEST(ConfigTest, RandomInitialIsDeterministic) {
  const TypeSpace space({2, 3});
  const auto a = random_initial(space, 42, 2.0);
  EXPECT_EQ(a, random_initial(space, 42, 2.0));
  EXPECT_NE(a, random_initial(space, 43, 2.0));
  EXPECT_NEAR(a.mass(), 2.0, 1e-14);
  for (double x : a.weights()) EXPECT_GT(x, 0.0);
}

TEST(OutputTest, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(OutputTest, ProductDetection) {
  const TypeSpace space({2, 2});
  EXPECT_TRUE(is_product_measure(Measure::uniform(space)));
  EXPECT_FALSE(is_product_measure(Measure(space, {0.5, 0, 0, 0.5})));
}

TEST_F(CliRun, SolveWritesTrajectoryAndCoefficients) {
  auto ctx = context("three_site.json");
  const auto result = run_solve(ctx);
  EXPECT_EQ(result.exit_code, kOk);
  const auto model = ctx.config.model();

  const auto traj = read_csv(out_ / "trajectory.csv");
  ASSERT_EQ(traj.rows.size(), 9u);
  EXPECT_EQ(traj.header.front(), "t");
  EXPECT_EQ(traj.header[1], "(0;0;0)");
  EXPECT_EQ(traj.header.back(), "(1;2;1)");
  for (std::size_t i = 0; i < model.initial.size(); ++i) EXPECT_EQ(traj.rows[0][i + 1], model.initial[i]);
  for (const auto& row : traj.rows) {
    double sum = 0.0;
    for (std::size_t i = 1; i < row.size(); ++i) sum += row[i];
    EXPECT_NEAR(sum, model.initial.mass(), 1e-13);
  }

  const auto coeff = read_csv(out_ / "coefficients.csv");
  ASSERT_EQ(coeff.header.size(), 1u + 2u * 4u);
  EXPECT_EQ(coeff.header[1], "a{}");
  EXPECT_EQ(coeff.header[4], "a{0;1}");
  for (const auto& row : coeff.rows) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= 4; ++i) sum += row[i];
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(row[5], std::exp(-(0.7 + 1.3) * row[0]), 1e-14);  // b_∅
    EXPECT_EQ(row[8], 1.0);                                        // b_L
  }
  EXPECT_FALSE(fs::exists(out_ / "mean_fitness.csv"));
}

TEST_F(CliRun, HeaderCarriesProvenance) {
  auto ctx = context("three_site.json");
  run_solve(ctx);
  const auto csv = read_csv(out_ / "trajectory.csv");
  ASSERT_GE(csv.comments.size(), 4u);
  EXPECT_EQ(csv.comments[0], "# ipl schema=1");
  EXPECT_EQ(csv.comments[1], "# seed=7");
  EXPECT_EQ(csv.comments[2], "# model_hash=" + model_hash(ctx.config));
  EXPECT_EQ(csv.comments[3], "# command=ipl test three_site.json");
  for (const auto& entry : fs::directory_iterator(out_)) EXPECT_NE(entry.path().extension(), ".tmp");
}

TEST_F(CliRun, SelectionWritesMeanFitnessAndWarnsOnlyForLinkedStates) {
  auto ctx = context("selection_product.json");
  run_solve(ctx);
  const auto mf = read_csv(out_ / "mean_fitness.csv");
  ASSERT_EQ(mf.rows.size(), 9u);
  // 0.7*0.4 + 0.5*0.1 + 0.2*0.3
  EXPECT_NEAR(mf.rows[0][1], 0.39, 1e-14);
  for (std::size_t k = 1; k < mf.rows.size(); ++k) EXPECT_GE(mf.rows[k][1], mf.rows[k - 1][1] - 1e-14);
  for (const auto& line : read_csv(out_ / "trajectory.csv").comments) {
    EXPECT_EQ(line.find("warning"), std::string::npos);
  }

  ctx.config.initial = InitialSpec{.kind = InitialSpec::Kind::weights, .weights = {0.5, 0, 0, 0, 0, 0, 0, 0.5}};
  const auto result = run_solve(ctx);
  EXPECT_EQ(result.warnings.size(), 1u);
  bool warned = false;
  for (const auto& line : read_csv(out_ / "trajectory.csv").comments) warned |= line.starts_with("# warning:");
  EXPECT_TRUE(warned);
}

TEST_F(CliRun, ComparePassesWithoutSelection) {
  for (const auto* file : {"minimal.json", "three_site.json", "selection_product.json"}) {
    auto ctx = context(file);
    const auto result = run_compare(ctx);
    EXPECT_EQ(result.exit_code, kOk) << file << ": " << result.summary;
    const auto doc = read_json(out_ / "compare.json");
    EXPECT_TRUE(doc["pass"].get<bool>());
    EXPECT_EQ(doc["deviations"].size(), doc["times"].size());
    EXPECT_LE(doc["max_deviation"].get<double>(), ctx.config.threshold);
    EXPECT_EQ(doc["model_hash"], model_hash(ctx.config));
  }
}

TEST_F(CliRun, CompareDeviationShrinksAtFourthOrder) {
  auto ctx = context("three_site.json");
  double dev[2];
  int k = 0;
  for (double dt : {0.0625, 0.03125}) {  // both divide the sample spacing 0.25
    ctx.config.dt = dt;
    const auto result = run_compare(ctx);
    EXPECT_EQ(result.exit_code, kCompareFailed);
    dev[k++] = read_json(out_ / "compare.json")["max_deviation"].get<double>();
  }
  EXPECT_NEAR(dev[0] / dev[1], 16.0, 2.0);
}

TEST_F(CliRun, CompareFailsOnLinkedStatesUnderSelection) {
  auto ctx = context("selection_product.json");
  ctx.config.initial = InitialSpec{.kind = InitialSpec::Kind::weights, .weights = {0.5, 0, 0, 0, 0, 0, 0, 0.5}};
  const auto result = run_compare(ctx);
  EXPECT_EQ(result.exit_code, kCompareFailed);
  const auto doc = read_json(out_ / "compare.json");
  EXPECT_FALSE(doc["pass"].get<bool>());
  EXPECT_TRUE(doc.contains("warnings"));
}

TEST_F(CliRun, IntegrateHitsSampleTimes) {
  auto ctx = context("minimal.json");
  run_integrate(ctx);
  const auto csv = read_csv(out_ / "trajectory_rk4.csv");
  ASSERT_EQ(csv.rows.size(), 4u);
  EXPECT_EQ(csv.rows[3][0], 2.0);
  // two loci from (½,0,0,½): ω(0;0) = ¼(1 + e^{-t})
  EXPECT_NEAR(csv.rows[3][1], 0.25 * (1 + std::exp(-2.0)), 1e-12);
}

TEST_F(CliRun, DisequilibriaDecayLikeB) {
  auto ctx = context("discrete.json");  // no mutation or selection
  ctx.config.times = TimeGrid{.kind = TimeGrid::Kind::linear, .end = 3.0, .count = 7};
  run_ld(ctx);
  const auto csv = read_csv(out_ / "ld.csv");
  const auto space = ctx.config.model().space;
  ASSERT_EQ(csv.header[1], "mass");
  std::map<std::string, std::size_t> b_column;
  std::size_t n_f = 0;
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (csv.header[c].starts_with("b")) b_column[csv.header[c].substr(1)] = c;
    if (csv.header[c].starts_with("F")) ++n_f;
  }
  EXPECT_EQ(n_f + 1, linkage_disequilibrium_count(space));
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    const auto& h = csv.header[c];
    if (!h.starts_with("F[")) continue;
    std::vector<std::size_t> sites;
    for (std::size_t p = 2; p < h.size(); p = h.find(';', p) + 1) {
      sites.push_back(static_cast<std::size_t>(h[p] - '0'));
      if (h.find(';', p) == std::string::npos) break;
    }
    const LinkSet g = span_link_set(space, sites);
    std::string label = "{";
    for (auto link : g.links()) label += (label.size() > 1 ? ";" : "") + std::to_string(link);
    label += "}";
    ASSERT_TRUE(b_column.count(label)) << h << " " << label;
    const double f0 = csv.rows[0][c];
    ASSERT_NE(f0, 0.0) << h;
    for (const auto& row : csv.rows) EXPECT_NEAR(row[c] / f0, row[b_column[label]], 1e-12) << h;
  }
}

TEST_F(CliRun, ProductStatesCarryNoDisequilibrium) {
  auto ctx = context("selection_product.json");
  run_ld(ctx);
  const auto csv = read_csv(out_ / "ld.csv");
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    const auto& h = csv.header[c];
    EXPECT_FALSE(h.starts_with("b")) << "b columns only for pure recombination";
    if (!h.starts_with("F[") || h.find(';') == std::string::npos) continue;
    for (const auto& row : csv.rows) EXPECT_NEAR(row[c], 0.0, 1e-13) << h;
  }
  for (const auto& row : csv.rows) EXPECT_NEAR(row[1], 1.0, 1e-13);
}

TEST_F(CliRun, EquilibriumIsStationaryProduct) {
  auto ctx = context("three_site.json");
  run_equilibrium(ctx);
  const auto doc = read_json(out_ / "equilibrium.json");
  EXPECT_TRUE(doc["irreducible"].get<bool>());
  EXPECT_EQ(doc["site_factors"].size(), 3u);
  for (double r : doc["growth_rates"]) EXPECT_NEAR(r, 0.0, 1e-10);
  std::ifstream in(out_ / "equilibrium.csv");
  std::string line;
  double sum = 0.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.starts_with('#') || line.starts_with("state")) continue;
    sum += std::stod(line.substr(line.find(',') + 1));
    ++rows;
  }
  EXPECT_EQ(rows, 12u);
  EXPECT_NEAR(sum, 1.0, 1e-12);
  // the equilibrium is the t → ∞ limit of the closed form
  const auto eq = equilibrium(ctx.config.model());
  EXPECT_LT(max_abs_difference(CombinedSolver(ctx.config.model()).at(80.0), eq.measure), 1e-9);
}

TEST_F(CliRun, DiscreteRunsForTheConfiguredGenerations) {
  auto ctx = context("discrete.json");
  run_discrete(ctx);
  const auto csv = read_csv(out_ / "discrete.csv");
  EXPECT_EQ(csv.header.front(), "generation");
  ASSERT_EQ(csv.rows.size(), 6u);
  for (const auto& row : csv.rows) {
    double sum = 0.0;
    for (std::size_t i = 1; i < row.size(); ++i) sum += row[i];
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
  // one generation: any single crossover sends half of the parental mass to recombinants
  EXPECT_NEAR(csv.rows[1][1], 0.65 * 0.5 + 0.35 * 0.25, 1e-15);

  auto missing = context("minimal.json");
  EXPECT_THROW(run_discrete(missing), ConfigError);
}

}  // namespace
}  // namespace ipl::cli
