#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cutofflab/experiments.hpp"
#include "cutofflab/levy.hpp"
#include "cutofflab/vector_field.hpp"

namespace cutofflab {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Resolved experiment description. Round-trips through JSON bit-exactly;
/// the canonical dump feeds the manifest content hash.
struct ExperimentConfig {
  // field
  std::string field_name = "fput";  // fput | oscillator | linear
  int dim = 1;
  Eigen::MatrixXd linear_matrix;    // field_name == linear
  double osc_a = 1.0, osc_b = 1.0, osc_c = 0.0, osc_eta0 = 0.0, osc_quartic = 0.0;

  // noise
  std::string noise_family = "brownian";  // brownian | cpp | stable
  Eigen::MatrixXd sigma_sqrt;             // brownian factor; empty = identity
  Eigen::VectorXd drift;                  // optional
  double p_star = std::numeric_limits<double>::infinity();
  double cpp_rate = 1.0, cpp_jump_scale = 1.0;
  double stable_alpha = 1.5, stable_scale = 1.0;
  std::string stable_mode = "isotropic";  // isotropic | projected
  Eigen::VectorXd stable_projection;

  // experiment
  Eigen::VectorXd x0;
  CutoffSchedule schedule;
  int n_traj = 20000;
  double dt = 0.0;       // 0 = default
  double horizon = 0.0;  // 0 = 20/delta
  double r0 = 0.0;       // 0 = automatic geometric search
  std::vector<double> times;  // explicit output grid for `simulate`
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  VectorFieldSpec make_field() const;
  LevyTriplet make_triplet() const;
  SimulationBudget make_budget() const;
  void validate() const;
};

/// SHA-1 of the git blob encoding ("blob <len>\0" + content).
std::string git_blob_hash(const std::string& content);
std::string sha1_hex(const std::string& data);

/// Writes content to path via a temp file plus rename; no partial outputs.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Serializes a double so the text round-trips to the identical bits.
std::string format_double(double value);

/// Executes one subcommand (spectral, simulate, ergodic, cutoff, moments,
/// fw-error, properties) and writes its artifacts plus manifest.json under
/// output_dir. Returns the process exit status.
int run_experiment(const ExperimentConfig& config, const std::string& subcommand);

}  // namespace cutofflab
