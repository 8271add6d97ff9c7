#include "gaitopt/io.hpp"

#include "gaitopt/curvature.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace gaitopt {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) throw std::invalid_argument(path + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw std::invalid_argument(path + ": unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw std::invalid_argument(path + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw std::invalid_argument(path + ": must be finite");
  return x;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw std::invalid_argument(path + ": expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw std::invalid_argument(path + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw std::invalid_argument(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

LinkGeometry link_from_json(const json& j, const std::string& path) {
  check_keys(j, {"length", "aspect_ratio", "body_density", "fluid_density"}, path);
  LinkGeometry g;
  if (j.contains("length")) g.length = number(j["length"], path + ".length");
  if (j.contains("aspect_ratio")) g.aspect_ratio = number(j["aspect_ratio"], path + ".aspect_ratio");
  if (j.contains("body_density")) g.body_density = number(j["body_density"], path + ".body_density");
  if (j.contains("fluid_density")) g.fluid_density = number(j["fluid_density"], path + ".fluid_density");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return g;
}

std::string coordinates_name(Coordinates c) {
  return c == Coordinates::Original ? "original" : "minimum_perturbation";
}

std::string transport_name(Transport t) { return t == Transport::None ? "none" : "adjoint"; }

std::string status_of(const SolveResult& r) { return to_string(r.status); }

json gait_json(const Gait& g) {
  json j;
  to_json(j, g);
  return j;
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void RunSpec::validate() const {
  if (!custom_links && system != "swimmer" && system != "snake")
    throw std::invalid_argument("system: expected 'swimmer', 'snake' or a custom model object (got '" + system + "')");
  if (direction == Direction::Y) throw std::invalid_argument("direction: must be x or theta");
  if (grid_resolution < 16 || grid_resolution % 2 != 0)
    throw std::invalid_argument("grid_resolution: must be an even integer >= 16");
  if (!std::isfinite(momentum)) throw std::invalid_argument("momentum: must be finite");
  for (std::size_t i = 0; i < momentum_levels.size(); ++i) {
    if (!std::isfinite(momentum_levels[i]) || momentum_levels[i] < 0.0)
      throw std::invalid_argument("momentum_levels[" + std::to_string(i) + "]: must be finite and >= 0");
  }
  if (!std::is_sorted(momentum_levels.begin(), momentum_levels.end()))
    throw std::invalid_argument("momentum_levels: must be ascending");
  if (level_count < 2) throw std::invalid_argument("level_count: must be >= 2");
  if (!(effort_bound > 0.0) || !std::isfinite(effort_bound))
    throw std::invalid_argument("effort_bound: must be positive");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0) || !std::isfinite(radii[i]))
      throw std::invalid_argument("radii[" + std::to_string(i) + "]: must be finite and >= 0");
  }
  if (output_dir.empty()) throw std::invalid_argument("output_dir: must not be empty");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("solver: ") + e.what());
  }
}

SystemModel RunSpec::model() const {
  if (custom_links) return SystemModel(system, *custom_links);
  return SystemModel::preset(system);
}

SystemModel model_from_json(const json& j) {
  check_keys(j, {"name", "links"}, "system");
  const std::string name = j.contains("name") ? text(j["name"], "system.name") : "custom";
  if (!j.contains("links") || !j["links"].is_array() || j["links"].size() != 3)
    throw std::invalid_argument("system.links: expected three link objects");
  std::array<LinkGeometry, 3> links;
  for (int i = 0; i < 3; ++i) links[i] = link_from_json(j["links"][i], "system.links[" + std::to_string(i) + "]");
  return SystemModel(name, links);
}

json model_to_json(const SystemModel& model) {
  json links = json::array();
  for (const auto& l : model.links()) {
    links.push_back({{"length", l.length},
                     {"aspect_ratio", l.aspect_ratio},
                     {"body_density", l.body_density},
                     {"fluid_density", l.fluid_density}});
  }
  return {{"name", model.name()}, {"links", links}};
}

RunSpec run_spec_from_json(const json& j) {
  check_keys(j,
             {"system", "direction", "grid_resolution", "coordinates", "momentum", "momentum_levels", "level_count",
              "effort_bound", "solver", "gait", "radii", "output_dir", "seed"},
             "run spec");
  RunSpec s;
  if (j.contains("system")) {
    const json& sys = j["system"];
    if (sys.is_string()) {
      s.system = sys.get<std::string>();
    } else if (sys.is_object()) {
      const SystemModel m = model_from_json(sys);
      s.system = m.name();
      s.custom_links = m.links();
    } else {
      throw std::invalid_argument("system: expected a preset name or a model object");
    }
  }
  if (j.contains("direction")) {
    try {
      s.direction = parse_direction(text(j["direction"], "direction"));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("direction: ") + e.what());
    }
  }
  if (j.contains("grid_resolution")) s.grid_resolution = integer(j["grid_resolution"], "grid_resolution");
  if (j.contains("coordinates")) {
    const std::string c = text(j["coordinates"], "coordinates");
    if (c == "original") s.coordinates = Coordinates::Original;
    else if (c == "minimum_perturbation") s.coordinates = Coordinates::MinimumPerturbation;
    else throw std::invalid_argument("coordinates: expected 'original' or 'minimum_perturbation'");
  }
  if (j.contains("momentum")) s.momentum = number(j["momentum"], "momentum");
  if (j.contains("momentum_levels")) s.momentum_levels = numbers(j["momentum_levels"], "momentum_levels");
  if (j.contains("level_count")) s.level_count = integer(j["level_count"], "level_count");
  if (j.contains("effort_bound")) s.effort_bound = number(j["effort_bound"], "effort_bound");
  if (j.contains("solver")) {
    const json& o = j["solver"];
    check_keys(o, {"max_iterations", "kkt_tolerance", "steps", "fd_step", "min_period", "transport"}, "solver");
    if (o.contains("max_iterations")) s.solver.max_iterations = integer(o["max_iterations"], "solver.max_iterations");
    if (o.contains("kkt_tolerance")) s.solver.kkt_tolerance = number(o["kkt_tolerance"], "solver.kkt_tolerance");
    if (o.contains("steps")) s.solver.steps = integer(o["steps"], "solver.steps");
    if (o.contains("fd_step")) s.solver.fd_step = number(o["fd_step"], "solver.fd_step");
    if (o.contains("min_period")) s.solver.min_period = number(o["min_period"], "solver.min_period");
    if (o.contains("transport")) {
      const std::string t = text(o["transport"], "solver.transport");
      if (t == "adjoint") s.solver.transport = Transport::Adjoint;
      else if (t == "none") s.solver.transport = Transport::None;
      else throw std::invalid_argument("solver.transport: expected 'adjoint' or 'none'");
    }
  }
  if (j.contains("gait")) {
    try {
      s.gait = gait_from_json(j["gait"]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("gait: ") + e.what());
    }
  }
  if (j.contains("radii")) s.radii = numbers(j["radii"], "radii");
  if (j.contains("output_dir")) s.output_dir = text(j["output_dir"], "output_dir");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw std::invalid_argument("seed: expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.validate();
  return s;
}

json to_json(const RunSpec& s) {
  json j;
  if (s.custom_links) j["system"] = model_to_json(s.model());
  else j["system"] = s.system;
  j["direction"] = to_string(s.direction);
  j["grid_resolution"] = s.grid_resolution;
  j["coordinates"] = coordinates_name(s.coordinates);
  j["momentum"] = s.momentum;
  j["momentum_levels"] = s.momentum_levels;
  j["level_count"] = s.level_count;
  j["effort_bound"] = s.effort_bound;
  j["solver"] = {{"max_iterations", s.solver.max_iterations}, {"kkt_tolerance", s.solver.kkt_tolerance},
                 {"steps", s.solver.steps},                   {"fd_step", s.solver.fd_step},
                 {"min_period", s.solver.min_period},         {"transport", transport_name(s.solver.transport)}};
  if (s.gait) j["gait"] = gait_json(*s.gait);
  j["radii"] = s.radii;
  j["output_dir"] = s.output_dir;
  j["seed"] = s.seed;
  return j;
}

json to_json(const GaitOutcome& o) {
  return {{"displacement", vec_json(o.displacement)},
          {"average_velocity", vec_json(o.average_velocity)},
          {"effort", o.effort}};
}

json to_json(const SolveResult& r) {
  return {{"gait", gait_json(r.gait)},         {"outcome", to_json(r.outcome)},
          {"velocity", r.velocity},            {"amplitude", amplitude(r.gait)},
          {"iterations", r.iterations},        {"status", status_of(r)},
          {"kkt_residual", r.kkt_residual},    {"multiplier", r.multiplier}};
}

json to_json(const SweepResult& r) {
  json levels = json::array();
  for (const auto& L : r.levels) {
    levels.push_back({{"momentum", L.momentum},
                      {"result", to_json(L.result)},
                      {"amplitude", L.amplitude},
                      {"seed", L.seed},
                      {"velocity_kinematic", L.baselines.kinematic},
                      {"velocity_momentum", L.baselines.momentum},
                      {"kinematic_period", L.baselines.kinematic_period}});
  }
  return {{"direction", to_string(r.direction)},
          {"crossover", r.crossover},
          {"kinematic_gait", gait_json(r.kinematic_gait)},
          {"levels", levels}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,alpha1,alpha2,alpha1_dot,alpha2_dot,x,y,theta,heading,xi_x,xi_y,xi_theta,"
        "x_original,y_original,theta_original,p_r1,p_r2,kinetic_energy,u1,u2\n";
  for (const auto& s : traj.samples) {
    const double row[] = {s.t,
                          s.shape.alpha1,
                          s.shape.alpha2,
                          s.shape_velocity[0],
                          s.shape_velocity[1],
                          s.pose.x,
                          s.pose.y,
                          s.pose.theta,
                          s.heading,
                          s.body_velocity.v[0],
                          s.body_velocity.v[1],
                          s.body_velocity.v[2],
                          s.pose_original.x,
                          s.pose_original.y,
                          s.pose_original.theta,
                          s.shape_momentum[0],
                          s.shape_momentum[1],
                          s.kinetic_energy,
                          s.force[0],
                          s.force[1]};
    for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "level,momentum,velocity_optimal,velocity_kinematic,velocity_momentum,amplitude,effort,period,"
        "center_alpha1,center_alpha2,iterations,status,seed\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const SweepLevel& L = r.levels[i];
    const Gait& g = L.result.gait;
    os << i << ',' << format_number(L.momentum) << ',' << format_number(L.result.velocity) << ','
       << format_number(L.baselines.kinematic) << ',' << format_number(L.baselines.momentum) << ','
       << format_number(L.amplitude) << ',' << format_number(L.result.outcome.effort) << ','
       << format_number(g.period()) << ',' << format_number(g.joints()[0].a0) << ','
       << format_number(g.joints()[1].a0) << ',' << L.result.iterations << ',' << status_of(L.result) << ','
       << L.seed << '\n';
  }
}

void write_circle_csv(std::ostream& os, const std::vector<CirclePoint>& pts) {
  os << "radius,momentum,period,velocity_total,velocity_kinematic,velocity_momentum,momentum_normalized\n";
  for (const auto& q : pts) {
    os << format_number(q.radius) << ',' << format_number(q.momentum) << ',' << format_number(q.period) << ','
       << format_number(q.velocity_total) << ',' << format_number(q.velocity_kinematic) << ','
       << format_number(q.velocity_momentum) << ',' << format_number(q.momentum_normalized) << '\n';
  }
}

void write_fields_csv(std::ostream& os, const ShapeGrid& grid, const Covector& p) {
  const std::vector<CCFSample> ccf = ccf_grid_snapshot(grid, p);
  const int n = grid.resolution();
  os << "i,j,alpha1,alpha2";
  for (const char* d : {"x", "y", "theta"}) os << ",A1_" << d << ",A2_" << d;
  os << ",M_xx,M_yy,M_thth";
  for (const char* c : {"D12", "D1t", "D2t"})
    for (const char* d : {"x", "y", "theta"}) os << ',' << c << '_' << d;
  os << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Shape r = grid.node_shape(i, j);
      const ConnectionSample c = grid.node(i, j);
      const Mat3 M = grid.locked_inertia_node(i, j);
      const CCFSample& d = ccf[i * n + j];
      os << i << ',' << j << ',' << format_number(r.alpha1) << ',' << format_number(r.alpha2);
      for (int k = 0; k < 3; ++k) os << ',' << format_number(c.A(k, 0)) << ',' << format_number(c.A(k, 1));
      for (int k = 0; k < 3; ++k) os << ',' << format_number(M(k, k));
      for (const AlgebraVector* v : {&d.D12, &d.D1t, &d.D2t})
        for (int k = 0; k < 3; ++k) os << ',' << format_number(v->v[k]);
      os << '\n';
    }
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path.string() + "': " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace gaitopt
