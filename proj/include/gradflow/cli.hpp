#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradflow/flows.hpp"
#include "gradflow/problems.hpp"
#include "gradflow/sim.hpp"

namespace gradflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSimulation = 3;

inline constexpr int kSchemaVersion = 1;

struct ProblemConfig {
  std::string name;  // "quadratic" or "zakharov"
  Matrix matrix;     // quadratic only
  Eigen::Index dimension = 0;
  std::optional<double> lipschitz;         // overrides the computed value
  std::optional<double> strong_convexity;  // overrides the computed value
};

struct VariationConfig {
  enum class Kind { None, InitialConditions, Parameter };
  Kind kind = Kind::None;
  std::vector<Vector> initial_conditions;
  std::string parameter;
  std::vector<double> values;
};

/// Parsed experiment file. See README.md for the JSON layout.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ProblemConfig problem;
  FlowLaw flow;
  std::vector<Vector> initial_conditions;
  SimOptions sim;
  std::string prefix = "run";
  VariationConfig variations;
};

/// Throws ConfigError with a message naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

Problem build_problem(const ProblemConfig& cfg);

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<double> step;
  std::optional<double> horizon;
  std::filesystem::path out_dir = ".";
};

/// CSV with header t,x_1..x_n,theta,V and 9 significant digits. theta is
/// blank for the finite-time law and V blank when x* is unknown.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// Replaces characters outside [A-Za-z0-9._-] with '_'.
std::string sanitize_label(const std::string& label);

/// Writes <prefix>.csv and <prefix>.json into the output directory.
int cmd_run(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out,
            std::ostream& err);

/// Writes <prefix>_<label>.csv per run and <prefix>_summary.csv.
int cmd_sweep(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out,
              std::ostream& err);

int cmd_ml_eval(double alpha, double beta, double z, std::ostream& out, std::ostream& err);
/// kind is "standard" or "kernel".
int cmd_ml_zero(double alpha, double rho, const std::string& kind, std::ostream& out,
                std::ostream& err);
int cmd_ml_table(double rho, std::ostream& out, std::ostream& err);

/// First positive zeros of E_{a,1}(-rho t^a) for a in {1.7, 1.5, 1.3, 1.1, 1.05}.
std::vector<std::pair<double, double>> ml_table(double rho = 1.0);

struct BoundsArgs {
  std::optional<double> lipschitz;
  std::optional<double> strong_convexity;
  std::optional<double> rho;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<double> beta;
  std::optional<double> distance;
};

struct BoundLine {
  std::string name;
  std::optional<BoundReport> report;
  std::string reason;  // set when report is empty
};

/// Every bound family, evaluated or flagged with the reason it does not apply.
std::vector<BoundLine> evaluate_bounds(const BoundsArgs& args);

int cmd_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err);

}  // namespace gradflow::cli
