#include "cli.hpp"
#include "gaitopt/io.hpp"
#include "gaitopt/svg.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gaitopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gaitopt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RunSpec, RoundTrip) {
  RunSpec s;
  s.system = "snake";
  s.direction = Direction::Theta;
  s.grid_resolution = 32;
  s.momentum_levels = {0.0, 0.1, 0.2};
  s.solver.max_iterations = 7;
  s.gait = Gait::circle({1.0, 2.0}, 0.5, 3.0);
  const RunSpec back = run_spec_from_json(nlohmann::json::parse(to_json(s).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
  EXPECT_EQ(back.gait->parameters(), s.gait->parameters());
}

TEST(RunSpec, RejectsUnknownKeys) {
  EXPECT_THROW(run_spec_from_json(nlohmann::json{{"sytem", "snake"}}), std::invalid_argument);
  EXPECT_THROW(run_spec_from_json(nlohmann::json{{"solver", {{"tolerance", 1}}}}), std::invalid_argument);
}

TEST(RunSpec, ValidationNamesField) {
  RunSpec s;
  s.grid_resolution = 15;
  try {
    s.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("grid_resolution"), std::string::npos);
  }
  s.grid_resolution = 32;
  s.direction = Direction::Y;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.direction = Direction::X;
  s.momentum_levels = {0.2, 0.1};
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(RunSpec, CustomModelRoundTrip) {
  const SystemModel m = SystemModel::swimmer();
  const SystemModel back = model_from_json(model_to_json(m));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(back.link_inertia(i), m.link_inertia(i));
}

TEST(Io, NumbersAreLossless) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Io, TrajectoryCsvShape) {
  const ShapeGrid grid = ShapeGrid::build(SystemModel::snake(), 32);
  const Trajectory t = integrate_gait(grid, Gait::circle({1.0, 1.0}, 0.5, 2.0), Covector(), GroupElement(), 32);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  EXPECT_EQ(header.rfind("t,alpha1,alpha2,", 0), 0u);
  const auto columns = std::count(header.begin(), header.end(), ',');
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
    ++rows;
  }
  EXPECT_EQ(rows, 33);
}

TEST(Svg, ContourOfPlane) {
  // f = x on a 3x3 lattice: the level 0.5 crosses two cells as a vertical line.
  std::vector<double> f(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) f[i * 3 + j] = i;
  const auto segs = contour_segments(f, 3, 3, 0.0, 0.0, 1.0, 1.0, 0.5);
  ASSERT_EQ(segs.size(), 2u);
  for (const auto& s : segs) {
    EXPECT_NEAR(s.a[0], 0.5, 1e-15);
    EXPECT_NEAR(s.b[0], 0.5, 1e-15);
  }
}

TEST(Svg, SaddleCellSplitsByCenter) {
  // Corners 1, 0, 1, 0 around the cell with center average 0.5 > 0.4.
  const std::vector<double> f{1.0, 0.0, 0.0, 1.0};
  const auto segs = contour_segments(f, 2, 2, 0.0, 0.0, 1.0, 1.0, 0.4);
  ASSERT_EQ(segs.size(), 2u);
  for (const auto& s : segs) EXPECT_GT((s.a - s.b).norm(), 0.0);
}

TEST(Cli, UnknownSpecKeyIsInvalidInput) {
  const fs::path dir = scratch_dir("badspec");
  std::ofstream(dir / "spec.json") << R"({"system": "swimmer", "bogus": 1})";
  EXPECT_EQ(cli::run({"simulate", "--spec", (dir / "spec.json").string(), "-o", dir.string()}), cli::kExitInvalid);
}

TEST(Cli, BadArgumentsAreInvalidInput) {
  EXPECT_EQ(cli::run({"simulate", "--system", "eel"}), cli::kExitInvalid);
  EXPECT_EQ(cli::run({"simulate", "--direction", "y"}), cli::kExitInvalid);
  EXPECT_EQ(cli::run({"frobnicate"}), cli::kExitInvalid);
}

TEST(Cli, SimulateIsByteIdenticalAcrossRuns) {
  const fs::path a = scratch_dir("sim_a"), b = scratch_dir("sim_b");
  const std::vector<std::string> common{"simulate", "--system", "snake", "--direction", "theta", "--resolution", "32",
                                        "--momentum", "0.1", "--steps", "64"};
  auto args = common;
  args.insert(args.end(), {"-o", a.string()});
  ASSERT_EQ(cli::run(args), cli::kExitOk);
  args = common;
  args.insert(args.end(), {"-o", b.string()});
  ASSERT_EQ(cli::run(args), cli::kExitOk);
  for (const char* f : {"trajectory.csv", "outcome.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, FieldsWritesCsvAndSvg) {
  const fs::path dir = scratch_dir("fields");
  ASSERT_EQ(cli::run({"fields", "--system", "swimmer", "--resolution", "16", "-o", dir.string()}), cli::kExitOk);
  EXPECT_TRUE(fs::exists(dir / "fields.csv"));
  EXPECT_NE(slurp(dir / "fields_x.svg").find("<svg"), std::string::npos);
}
