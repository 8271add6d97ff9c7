#pragma once

#include "gaitopt/optimize.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gaitopt {

/// Scenario description shared by every subcommand. Built from a JSON file
/// and command-line overrides; validate() runs before any computation.
struct RunSpec {
  /// Preset name, or the name of the custom block when `custom_links` is set.
  std::string system = "swimmer";
  std::optional<std::array<LinkGeometry, 3>> custom_links;
  Direction direction = Direction::X;
  int grid_resolution = 64;
  Coordinates coordinates = Coordinates::MinimumPerturbation;
  /// Single level for simulate / optimize / fields.
  double momentum = 0.0;
  /// Sweep and baseline levels; empty means the default grid.
  std::vector<double> momentum_levels;
  int level_count = 12;
  double effort_bound = 1.0;
  SolverSettings solver;
  std::optional<Gait> gait;
  std::vector<double> radii;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  SystemModel model() const;
};

/// Parses a run spec; unknown keys anywhere are rejected with the field path.
RunSpec run_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunSpec& spec);

SystemModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const SystemModel& model);

/// "%.17g": lossless and byte-stable across runs.
std::string format_number(double x);

nlohmann::json to_json(const GaitOutcome& o);
nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const SweepResult& r);

/// t, alpha1, alpha2, rates, pose in both frames, body velocity, shape
/// momentum, kinetic energy and torques.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_sweep_csv(std::ostream& os, const SweepResult& r);
void write_circle_csv(std::ostream& os, const std::vector<CirclePoint>& pts);
/// Node values of the connection, locked inertia and curvature at g = identity.
void write_fields_csv(std::ostream& os, const ShapeGrid& grid, const Covector& p);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gaitopt
