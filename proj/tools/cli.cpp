#include "cli.hpp"

#include "gaitopt/curvature.hpp"
#include "gaitopt/io.hpp"
#include "gaitopt/svg.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace gaitopt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised when a computation finishes but its result is unusable.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string spec_path;
  std::string system;
  std::string direction;
  std::string coordinates;
  std::string gait_path;
  std::string output;
  std::string levels;
  std::string radii;
  double momentum = std::numeric_limits<double>::quiet_NaN();
  int resolution = 0;
  int max_iterations = 0;
  int steps = 0;
  int level_count = 0;
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

RunSpec resolve(const Options& o) {
  RunSpec s = o.spec_path.empty() ? RunSpec{} : run_spec_from_json(read_json_file(o.spec_path));
  if (!o.system.empty()) {
    s.system = o.system;
    s.custom_links.reset();
  }
  if (!o.direction.empty()) s.direction = parse_direction(o.direction);
  else if (o.spec_path.empty() && s.system == "snake") s.direction = Direction::Theta;
  if (!o.coordinates.empty()) {
    if (o.coordinates == "original") s.coordinates = Coordinates::Original;
    else if (o.coordinates == "minimum_perturbation") s.coordinates = Coordinates::MinimumPerturbation;
    else throw std::invalid_argument("--coordinates: expected 'original' or 'minimum_perturbation'");
  }
  if (!o.gait_path.empty()) s.gait = gait_from_json(read_json_file(o.gait_path));
  if (!std::isnan(o.momentum)) s.momentum = o.momentum;
  if (!o.levels.empty()) s.momentum_levels = parse_list(o.levels, "--levels");
  if (!o.radii.empty()) s.radii = parse_list(o.radii, "--radii");
  if (o.resolution) s.grid_resolution = o.resolution;
  if (o.max_iterations) s.solver.max_iterations = o.max_iterations;
  if (o.steps) s.solver.steps = o.steps;
  if (o.level_count) s.level_count = o.level_count;
  if (const char* env = std::getenv("GAITOPT_OUTPUT_DIR"); env && *env) s.output_dir = env;
  if (!o.output.empty()) s.output_dir = o.output;
  s.validate();
  return s;
}

ShapeGrid build_grid(const RunSpec& s) { return ShapeGrid::build(s.model(), s.grid_resolution, s.coordinates); }

Problem make_problem(const RunSpec& s, const ShapeGrid& grid) {
  Problem pr;
  pr.grid = &grid;
  pr.direction = s.direction;
  pr.momentum = s.momentum;
  pr.effort_bound = s.effort_bound;
  pr.settings = s.solver;
  pr.initial = s.gait;
  pr.validate();
  return pr;
}

std::string csv(const std::function<void(std::ostream&)>& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

ShapePlot gait_plot(const ShapeGrid& grid, Direction d) {
  const Shape c = momentum_gait_shape(grid, d);
  // Center on the nearest node so contours and gaits share one window.
  const double h = grid.spacing();
  ShapePlot plot({std::round(c.alpha1 / h) * h, std::round(c.alpha2 / h) * h});
  plot.add_curvature_contours(grid, d);
  plot.add_marker(c, "black", "minimum inertia");
  return plot;
}

void print_written(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

// --- subcommands --------------------------------------------------------

int cmd_fields(const RunSpec& s) {
  const ShapeGrid grid = build_grid(s);
  const Covector p = aligned_momentum(s.direction, s.momentum);
  const fs::path dir = s.output_dir;
  write_text_file(dir / "fields.csv", csv([&](std::ostream& os) { write_fields_csv(os, grid, p); }));
  print_written(dir / "fields.csv");
  ShapePlot plot = gait_plot(grid, s.direction);
  plot.add_connection_arrows(grid, s.direction);
  const std::string name = "fields_" + to_string(s.direction) + ".svg";
  write_text_file(dir / name, plot.str(grid.model().name() + ": D12 " + to_string(s.direction) + " and -A"));
  print_written(dir / name);
  std::cout << "orientation residual " << format_number(grid.orientation_residual()) << '\n';
  return kExitOk;
}

int cmd_simulate(const RunSpec& s) {
  const ShapeGrid grid = build_grid(s);
  const Gait gait = s.gait ? *s.gait : default_initial_gait(grid, s.direction);
  const Covector p = aligned_momentum(s.direction, s.momentum);
  const Trajectory traj = integrate_gait(grid, gait, p, GroupElement::identity(), s.solver.steps);
  const GaitOutcome o = outcome(traj);
  const fs::path dir = s.output_dir;
  write_text_file(dir / "trajectory.csv", csv([&](std::ostream& os) { write_trajectory_csv(os, traj); }));
  print_written(dir / "trajectory.csv");
  json j = to_json(o);
  j["momentum"] = json::array({p.v[0], p.v[1], p.v[2]});
  to_json(j["gait"], gait);
  write_json_file(dir / "outcome.json", j);
  print_written(dir / "outcome.json");
  std::cout << "displacement " << format_number(o.displacement[0]) << ' ' << format_number(o.displacement[1]) << ' '
            << format_number(o.displacement[2]) << "  effort " << format_number(o.effort) << '\n';
  if (!o.displacement.allFinite() || !std::isfinite(o.effort)) throw NumericalFailure("simulation diverged");
  return kExitOk;
}

int cmd_optimize(const RunSpec& s) {
  const ShapeGrid grid = build_grid(s);
  const Problem pr = make_problem(s, grid);
  const SolveResult r = solve(pr);
  const fs::path dir = s.output_dir;
  json gj;
  to_json(gj, r.gait);
  write_json_file(dir / "gait.json", gj);
  write_json_file(dir / "result.json", to_json(r));
  ShapePlot plot = gait_plot(grid, s.direction);
  plot.add_gait(r.gait, "black");
  write_text_file(dir / "optimize.svg", plot.str(grid.model().name() + " optimal gait, p = " +
                                                     format_number(s.momentum)));
  for (const char* f : {"gait.json", "result.json", "optimize.svg"}) print_written(dir / f);
  std::cout << "velocity " << format_number(r.velocity) << "  effort " << format_number(r.outcome.effort)
            << "  status " << to_string(r.status) << "  iterations " << r.iterations << '\n';
  if (r.status == SolveStatus::Infeasible) throw NumericalFailure("no feasible gait found");
  return kExitOk;
}

int cmd_sweep(const RunSpec& s) {
  const ShapeGrid grid = build_grid(s);
  if (!s.momentum_levels.empty() && s.momentum_levels.front() != 0.0)
    throw std::invalid_argument("momentum_levels: a sweep must start at 0");
  const SweepResult r = sweep(grid, s.direction, s.momentum_levels, s.solver, s.effort_bound, s.level_count);
  const fs::path dir = s.output_dir;
  write_text_file(dir / "sweep.csv", csv([&](std::ostream& os) { write_sweep_csv(os, r); }));
  write_json_file(dir / "sweep.json", to_json(r));
  std::vector<double> x, vo, vk, vm, amp;
  ShapePlot plot = gait_plot(grid, s.direction);
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const SweepLevel& L = r.levels[i];
    char name[32];
    std::snprintf(name, sizeof name, "gait_level_%02zu.json", i);
    json gj;
    to_json(gj, L.result.gait);
    write_json_file(dir / "gaits" / name, gj);
    const double shade = r.levels.size() > 1 ? double(i) / (r.levels.size() - 1) : 0.0;
    plot.add_gait(L.result.gait, "rgb(" + std::to_string(int(200 * shade)) + ",0," +
                                     std::to_string(int(200 * (1 - shade))) + ")");
    x.push_back(L.momentum);
    vo.push_back(L.result.velocity);
    vk.push_back(L.baselines.kinematic);
    vm.push_back(L.baselines.momentum);
    amp.push_back(L.amplitude);
  }
  write_text_file(dir / "sweep_gaits.svg", plot.str(grid.model().name() + " optimal gaits, blue = low momentum"));
  write_text_file(dir / "sweep_velocity.svg",
                  line_chart(grid.model().name() + " average velocity", "momentum", x,
                             {{"optimal", "black", vo}, {"kinematic", "#1f77b4", vk}, {"momentum", "#d62728", vm}}));
  write_text_file(dir / "sweep_amplitude.svg",
                  line_chart(grid.model().name() + " gait amplitude", "momentum", x, {{"amplitude", "black", amp}}));
  for (const char* f : {"sweep.csv", "sweep.json", "sweep_gaits.svg", "sweep_velocity.svg", "sweep_amplitude.svg"})
    print_written(dir / f);
  std::cout << "crossover " << format_number(r.crossover) << '\n';
  std::cout << "level momentum velocity kinematic momentum_gait amplitude status\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const SweepLevel& L = r.levels[i];
    std::printf("%5zu %8.4f %8.4f %9.4f %13.4f %9.4f %s\n", i, L.momentum, L.result.velocity, L.baselines.kinematic,
                L.baselines.momentum, L.amplitude, to_string(L.result.status).c_str());
  }
  return kExitOk;
}

int cmd_circle_sweep(const RunSpec& s) {
  const ShapeGrid grid = build_grid(s);
  std::vector<double> radii = s.radii;
  if (radii.empty())
    for (int i = 0; i < 40; ++i) radii.push_back(3.0 * i / 39.0);
  std::vector<double> levels = s.momentum_levels;
  if (levels.empty()) {
    Problem pr;
    pr.grid = &grid;
    pr.direction = Direction::Theta;
    pr.settings = s.solver;
    pr.effort_bound = s.effort_bound;
    const SolveResult kin = solve(pr);
    const double pc = crossover_momentum(grid, Direction::Theta, kin.gait, s.effort_bound, s.solver.steps);
    levels = {0.25 * pc, pc, 4.0 * pc};
    std::cout << "crossover " << format_number(pc) << '\n';
  }
  const Shape tangent = momentum_gait_shape(grid, Direction::Theta);
  const auto pts = circle_sweep(grid, radii, levels, tangent, s.effort_bound, s.solver.steps);
  const fs::path dir = s.output_dir;
  write_text_file(dir / "circle_sweep.csv", csv([&](std::ostream& os) { write_circle_csv(os, pts); }));
  std::vector<Series> series;
  const char* colors[] = {"#1f77b4", "black", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    Series sr{"p = " + format_number(std::round(levels[k] * 1e4) / 1e4), colors[k % 5], {}};
    for (const auto& q : pts)
      if (q.momentum == levels[k]) sr.y.push_back(q.velocity_total);
    series.push_back(std::move(sr));
  }
  write_text_file(dir / "circle_sweep.svg",
                  line_chart(grid.model().name() + " circle gaits: total angular velocity", "radius", radii, series));
  print_written(dir / "circle_sweep.csv");
  print_written(dir / "circle_sweep.svg");
  return kExitOk;
}

int cmd_baselines(const RunSpec& s) {
  const ShapeGrid grid = build_grid(s);
  Problem pr;
  pr.grid = &grid;
  pr.direction = s.direction;
  pr.settings = s.solver;
  pr.effort_bound = s.effort_bound;
  pr.initial = s.gait;
  const SolveResult kin = solve(pr);
  if (kin.status == SolveStatus::Infeasible) throw NumericalFailure("p = 0 problem is infeasible");
  const double pc = crossover_momentum(grid, s.direction, kin.gait, s.effort_bound, s.solver.steps);
  const std::vector<double> levels =
      s.momentum_levels.empty() ? default_levels(pc, s.level_count) : s.momentum_levels;
  std::ostringstream os;
  os << "momentum,velocity_kinematic,velocity_momentum,kinematic_period\n";
  json rows = json::array();
  for (double L : levels) {
    double T = 0.0;
    const double vk = baseline_kinematic(grid, s.direction, L, kin.gait, s.effort_bound, s.solver.steps, &T);
    const double vm = baseline_momentum(grid, s.direction, L);
    os << format_number(L) << ',' << format_number(vk) << ',' << format_number(vm) << ',' << format_number(T)
       << '\n';
    rows.push_back({{"momentum", L}, {"velocity_kinematic", vk}, {"velocity_momentum", vm}, {"kinematic_period", T}});
  }
  const fs::path dir = s.output_dir;
  write_text_file(dir / "baselines.csv", os.str());
  json j = {{"crossover", pc}, {"levels", rows}};
  to_json(j["kinematic_gait"], kin.gait);
  const Shape m = momentum_gait_shape(grid, s.direction);
  j["minimum_inertia_shape"] = json::array({m.alpha1, m.alpha2});
  write_json_file(dir / "baselines.json", j);
  print_written(dir / "baselines.csv");
  print_written(dir / "baselines.json");
  std::cout << "crossover " << format_number(pc) << '\n';
  return kExitOk;
}

// --- verify ---------------------------------------------------------------

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

Vec3 spatial_momentum(const SystemModel& model, const TrajectorySample& s) {
  const InertiaMatrix M = inertia_matrix(model, s.shape);
  const Vec3 body = M.M_gg * s.body_velocity_original.v + M.M_gr * s.shape_velocity;
  return dual_adjoint_matrix(s.pose_original.inverse()) * body;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<Check> verification_suite(std::uint64_t seed) {
  std::vector<Check> out;
  const ShapeGrid swimmer = ShapeGrid::build(SystemModel::swimmer(), 64);
  const ShapeGrid snake = ShapeGrid::build(SystemModel::snake(), 64);
  constexpr double pi = std::numbers::pi;

  {
    // Momentum stays fixed along a moving gait.
    const Covector p(Vec3(0.3, -0.2, 0.5));
    const Trajectory t = integrate_gait(snake, Gait::circle({2.0, 2.5}, 0.6, 2.0), p);
    double drift = 0.0;
    for (const auto& s : t.samples) drift = std::max(drift, (spatial_momentum(snake.model(), s) - p.v).norm());
    drift /= p.norm();
    out.push_back({"momentum conservation", drift < 1e-8, "relative drift " + num(drift)});
  }
  {
    // Running a loop backwards at p = 0 undoes it.
    const Gait g = Gait::circle({0.3, -0.2}, 0.7, 3.0);
    const Trajectory f = integrate_gait(swimmer, g, Covector());
    const Trajectory b = integrate_gait(swimmer, g.reversed(), Covector());
    const GroupElement df = f.samples.front().pose.inverse() * f.samples.back().pose;
    const GroupElement db = b.samples.front().pose.inverse() * b.samples.back().pose;
    const GroupElement e = df * db;
    const double err = std::max({std::abs(e.x), std::abs(e.y), std::abs(e.theta)});
    out.push_back({"time reversal", err < 1e-8, "residual " + num(err)});
  }
  {
    // Power balance with momentum.
    const Trajectory t = integrate_gait(swimmer, Gait::circle({0.2, 0.1}, 0.5, 5.0), aligned_momentum(Direction::X, 0.2));
    const auto& S = t.samples;
    const double dt = t.period / t.steps;
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 1; k + 1 < S.size(); ++k) {
      const double dke = (S[k + 1].kinetic_energy - S[k - 1].kinetic_energy) / (2 * dt);
      const double power = S[k].force.dot(S[k].shape_velocity);
      worst = std::max(worst, std::abs(dke - power));
      scale = std::max(scale, std::abs(power));
    }
    out.push_back({"power balance", worst / scale < 1e-3, "relative error " + num(worst / scale)});
  }
  {
    const Gait g = Gait::circle({0.0, 0.0}, 0.2, 1.0);
    const Trajectory t = integrate_gait(swimmer, g, Covector());
    std::vector<GroupElement> poses;
    for (const auto& s : t.samples) poses.push_back(s.pose);
    const double est = flux_estimate(swimmer, g, Covector(), poses)[0];
    const double ref = outcome(t).displacement[0];
    const double err = std::abs(est - ref) / std::abs(ref);
    out.push_back({"curvature flux vs integration", err <= 0.05, "relative error " + num(err)});
  }
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    std::array<JointSeries, 2> js{};
    for (auto& j : js) {
      j.a0 = 4 * u(rng);
      for (int k = 0; k < kFourierOrder; ++k) {
        j.a[k] = u(rng) / (k + 1);
        j.b[k] = u(rng) / (k + 1);
      }
    }
    Problem pr;
    pr.grid = &snake;
    pr.direction = Direction::Theta;
    pr.momentum = 0.03;
    const Gait g(js, 1.5);
    const GaitVector geo = displacement_gradient(pr, g);
    GaitVector fd;
    const GaitVector z = g.parameters();
    for (int i = 0; i < kGaitParameters; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(z[i]));
      GaitVector zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      fd[i] = (displacement(pr, Gait::from_parameters(zp)) - displacement(pr, Gait::from_parameters(zm))) / (2 * h);
    }
    const double cosine = geo.dot(fd) / (geo.norm() * fd.norm());
    out.push_back({"displacement gradient vs finite differences", cosine >= 0.99, "cosine " + num(cosine)});
  }
  {
    const Shape a = momentum_gait_shape(snake, Direction::Theta);
    const Shape b = momentum_gait_shape(swimmer, Direction::X);
    const double da = periodic_distance(a, {pi, pi}), db = periodic_distance(b, {0.0, 0.0});
    out.push_back({"minimum-inertia shapes", da <= snake.spacing() && db <= swimmer.spacing(),
                   "snake " + num(da) + ", swimmer " + num(db) + " from expected"});
  }
  {
    const Gait g = Gait::circle({0.1, 0.2}, 0.3, 1.7);
    json j;
    to_json(j, g);
    const Gait back = gait_from_json(json::parse(j.dump()));
    out.push_back({"gait JSON round trip", back.parameters() == g.parameters(), "exact"});
  }
  return out;
}

int cmd_verify(const RunSpec& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Check> checks = verification_suite(s.seed);
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    failed += c.pass ? 0 : 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << checks.size() - failed << "/" << checks.size() << " checks passed in " << num(secs) << " s\n";
  return failed ? kExitNumerical : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Geometric gait optimization for planar three-link locomotors with momentum"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--spec", o.spec_path, "Run spec JSON");
    sub->add_option("--system", o.system, "swimmer or snake");
    sub->add_option("--direction", o.direction, "x or theta");
    sub->add_option("--coordinates", o.coordinates, "minimum_perturbation or original");
    sub->add_option("--resolution", o.resolution, "Shape grid resolution");
    sub->add_option("--momentum", o.momentum, "Momentum along the direction");
    sub->add_option("--levels", o.levels, "Comma-separated momentum levels");
    sub->add_option("--level-count", o.level_count, "Number of default sweep levels");
    sub->add_option("--radii", o.radii, "Comma-separated circle radii");
    sub->add_option("--gait", o.gait_path, "Gait JSON");
    sub->add_option("--output,-o", o.output, "Output directory");
    sub->add_option("--max-iterations", o.max_iterations, "Solver iteration cap");
    sub->add_option("--steps", o.steps, "Integration steps per cycle");
  };

  using Handler = int (*)(const RunSpec&);
  const std::pair<const char*, std::pair<const char*, Handler>> commands[] = {
      {"fields", {"Connection and curvature fields (CSV, SVG)", cmd_fields}},
      {"simulate", {"Integrate one gait cycle", cmd_simulate}},
      {"optimize", {"Optimal gait at one momentum level", cmd_optimize}},
      {"sweep", {"Continuation over momentum levels", cmd_sweep}},
      {"circle-sweep", {"Circle gaits tangent to the minimum-inertia shape", cmd_circle_sweep}},
      {"baselines", {"Kinematic and momentum baselines", cmd_baselines}},
      {"verify", {"Quick oracle and property checks", cmd_verify}},
  };
  Handler chosen = nullptr;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    common(sub);
    const Handler h = info.second;
    sub->callback([&chosen, h] { chosen = h; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    const RunSpec spec = resolve(o);
    return chosen(spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"gaitopt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gaitopt::cli
