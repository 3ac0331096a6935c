#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rayleigh/basis.hpp"
#include "rayleigh/povm.hpp"
#include "rayleigh/psf.hpp"
#include "rayleigh/scene.hpp"

namespace rayleigh {

/// Moment order paired with a measurement family name.
struct Target {
  int k = 2;
  std::string povm = "spade";  // spade | interleaved-even | interleaved-odd | direct | sliver
};

/// Everything one CLI run needs. Lengths are stored in units of σ after
/// `length_unit` has been applied.
struct ExperimentConfig {
  std::string psf_kind = "gaussian";
  double sigma = 1.0;
  std::string psf_file;
  int psf_max_order = 12;

  std::string scene_file;
  Eigen::VectorXd positions;  // shape of the scene, rescaled to each s
  Eigen::VectorXd weights;
  double epsilon = 0.01;

  std::vector<double> s_values;
  std::vector<double> epsilons;

  int lmax = 4;
  int kmax = -1;
  int series_order = 8;
  double pixel_width = 0.05;
  std::vector<Target> targets;

  long shots = 10000000;
  int replications = 200;
  std::uint64_t seed = 1;
  std::string method = "ml";
  int param = 2;
  double split = 0.5;

  double length_unit = 1.0;
  std::string out;
  std::string format = "csv";

  /// key = value lines reproducing this configuration.
  std::map<std::string, std::string> echo() const;
};

/// Reads a sectioned key-value file; relative paths resolve against its directory.
ExperimentConfig load_config(const std::string& path);

/// Files exist, grids are non-empty and every s is inside the convergence radius.
void validate_config(const ExperimentConfig& config);

PsfModel make_psf(const ExperimentConfig& config);
Scene shape_scene(const ExperimentConfig& config);
/// `n` log-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int n);

/// POVM of the named family about the origin.
Povm make_povm(const std::string& name, const DerivativeBasis& basis, double pixel_width);

/// Least-squares line through (log s, log F).
struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;
  double intercept = 0.0;
  int points = 0;
};

SlopeFit fit_loglog(const std::vector<double>& s, const std::vector<double>& f);

/// Expected exponent of 𝓕_kk in s for a target.
double expected_exponent(const Target& t);

struct ScalingRow {
  Target target;
  double expected = 0.0;
  SlopeFit fit;
  std::vector<double> s;
  std::vector<double> fisher;
  int discarded = 0;
  bool pass = false;
};

/// Fits log 𝓕_kk against log s per target; needs at least 8 s values.
std::vector<ScalingRow> run_scaling_experiment(const ExperimentConfig& config);

struct ConvergenceRow {
  double s = 0.0;
  double radius = 0.0;
  double max_error = 0.0;       // |exact - series| over outcomes
  double remainder = 0.0;       // largest per-outcome remainder bound
  bool inside = true;
  bool pass = false;
};

std::vector<ConvergenceRow> run_convergence_check(const ExperimentConfig& config);

/// Plain table of numbers and strings for CSV / JSON output.
using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, std::string> meta;

  void add(std::vector<Cell> row);
};

/// Writes the table; doubles keep 17 significant digits.
void emit_results(const Table& table, const std::string& format, const std::string& path);
std::string render(const Table& table, const std::string& format);
Table read_results(const std::string& path, const std::string& format);

}  // namespace rayleigh
