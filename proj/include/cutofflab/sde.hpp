#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "cutofflab/levy.hpp"
#include "cutofflab/vector_field.hpp"

namespace cutofflab {

enum class ProcessTag { X_eps, X_zero, Y_fw, O_hom, Y_eps };

/// Positions of an ensemble at one time (row per trajectory).
struct TrajectoryBatch {
  Eigen::MatrixXd states;
  double time = 0.0;
  double epsilon = 0.0;
  ProcessTag tag = ProcessTag::X_eps;
};

struct SimOptions {
  double dt = 1e-2;
  int n_traj = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t job_index = 0;  // distinct jobs draw disjoint streams
  int n_workers = 0;            // 0 = default pool
};

/// Default step size min(1e-2, 0.05/delta).
double default_dt(const VectorFieldSpec& field);

/// Classical RK4 integration of xdot = -b(x), one state per step on the
/// uniform grid. The returned path is checked against the dissipative
/// contraction |X^0_t| <= e^{-delta t} |x0| (1 + 10 dt); persistent failure
/// throws StepSizeTooLarge.
std::vector<std::pair<double, Eigen::VectorXd>> integrate_deterministic(
    const VectorFieldSpec& field, const Eigen::VectorXd& x0, double t_end, double dt);

/// Euler-Maruyama for dX = -b(X) dt + eps dL. Output times are snapped to
/// the step grid; batch.time records the snapped value. Each trajectory
/// consumes the counter-based stream (master_seed, job_index, trajectory,
/// step), so coupled processes re-reading the same streams see identical
/// increments and worker count never changes results.
std::vector<TrajectoryBatch> integrate_sde(const VectorFieldSpec& field,
                                           const LevyTriplet& triplet,
                                           const Eigen::VectorXd& x0, double epsilon,
                                           const std::vector<double>& output_times,
                                           const SimOptions& opts);

/// Same dynamics started from one row of `starts` per trajectory (used for
/// stationary ensembles and synchronous-coupling comparisons).
std::vector<TrajectoryBatch> integrate_sde_from(const VectorFieldSpec& field,
                                                const LevyTriplet& triplet,
                                                const Eigen::MatrixXd& starts, double epsilon,
                                                const std::vector<double>& output_times,
                                                const SimOptions& opts);

/// First-order linearization along the deterministic flow:
///   dY = -Db(X^0_t(x)) Y dt + dL,  Y_0 = 0.
std::vector<TrajectoryBatch> integrate_fw_linearization(const VectorFieldSpec& field,
                                                        const LevyTriplet& triplet,
                                                        const Eigen::VectorXd& x0,
                                                        const std::vector<double>& output_times,
                                                        const SimOptions& opts);

/// Ornstein-Uhlenbeck companion with frozen Jacobian:
///   dO = -Db(0) O dt + dL, started at x0 (or rows of `starts`).
std::vector<TrajectoryBatch> integrate_ou(const VectorFieldSpec& field,
                                          const LevyTriplet& triplet, const Eigen::VectorXd& x0,
                                          const std::vector<double>& output_times,
                                          const SimOptions& opts);
std::vector<TrajectoryBatch> integrate_ou_from(const VectorFieldSpec& field,
                                               const LevyTriplet& triplet,
                                               const Eigen::MatrixXd& starts,
                                               const std::vector<double>& output_times,
                                               const SimOptions& opts);

struct CoupledMoments {
  std::map<double, double> theta_moments;  // p -> E|X^eps - X^0|^p
  std::map<double, double> delta_moments;  // p -> E|X^eps - Y^eps|^p
};

/// Runs X^eps, X^0 and the linearization on the same increment streams and
/// returns pathwise moments of Theta = X^eps - X^0 and Delta = X^eps - Y^eps
/// at the horizon. X^0 is stepped with the same one-step map so the
/// differences carry no scheme mismatch.
CoupledMoments coupled_difference(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                  const Eigen::VectorXd& x0, double epsilon, double t_end,
                                  const SimOptions& opts, const std::vector<double>& ps);

/// Invariant-measure estimation methods.
enum class InvariantMethod { ensemble_endpoints, thinned_run };

/// Sample cloud approximating the invariant law: either n independent
/// endpoints at the horizon (default; embarrassingly parallel) or a single
/// long run thinned at spacing 2/delta after a 20/delta burn-in.
Eigen::MatrixXd invariant_measure_samples(const VectorFieldSpec& field,
                                          const LevyTriplet& triplet, double epsilon,
                                          InvariantMethod method, int n, double horizon,
                                          const SimOptions& opts);

}  // namespace cutofflab
