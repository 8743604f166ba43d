#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cutofflab/sde.hpp"
#include "cutofflab/spectral.hpp"
#include "cutofflab/wasserstein.hpp"

namespace cutofflab {

/// Grid of noise intensities and window offsets for one cutoff experiment.
struct CutoffSchedule {
  std::vector<double> epsilons;  // strictly decreasing
  std::vector<double> r_grid;    // window offsets
  double w = 1.0;                // window size
  double p = 2.0;                // Wasserstein order, p < p_star
};

/// Throws ConfigInvalid unless epsilons decrease, the induced times
/// increase, and p < p_star.
void validate_schedule(const CutoffSchedule& schedule, double p_star, double q, int ell);

/// t_eps = (1/q) |ln eps| + ((ell-1)/q) ln |ln eps|.
double cutoff_time(double q, int ell, double epsilon);

/// Profile prefactor kappa(r) = e^{q tau} q^{1-ell} e^{-q r w}. The e^{q tau}
/// factor compensates the tau-dependence of the limiting vectors (the
/// rotating-sum radius scales as e^{-q tau}), which keeps kappa(r)|v|
/// invariant under the admissible choices of tau.
double kappa_profile(const CutoffParams& params, double r, double w);

struct SimulationBudget {
  int n_traj = 20000;
  double dt = 0.0;          // 0 = default_dt(field)
  double horizon = 0.0;     // 0 = 20/delta (invariant-measure runs)
  std::uint64_t seed = 0;
  int wp_cap = 2048;
  int wp_reps = 8;
};

/// Sample cloud approximating the invariant law mu^eps.
EmpiricalMeasure estimate_invariant_measure(const VectorFieldSpec& field,
                                            const LevyTriplet& triplet, double epsilon,
                                            InvariantMethod method, int n, double horizon,
                                            std::uint64_t seed, double dt = 0.0);

struct ErgodicPoint {
  double t = 0.0;
  double wp = 0.0;
  double bound = 0.0;
};

struct ErgodicReport {
  std::vector<ErgodicPoint> points;
  double tolerance = 0.0;  // sampling tolerance added to the bound
  bool pass = false;
};

/// Measures W_p(X^eps_t(x), mu^eps) on the grid against the exponential
/// ergodicity bound e^{-(1 ^ p) delta t} (|x|^{1 ^ p} + int |y|^{1 ^ p} dmu).
/// The state and stationary ensembles share increment streams (synchronous
/// coupling), and the sampling tolerance is self-calibrated as three times
/// the same-law distance between two independent stationary clouds.
ErgodicReport ergodic_decay_check(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                  double epsilon, const Eigen::VectorXd& x0, double p,
                                  const std::vector<double>& time_grid,
                                  const SimulationBudget& budget);

struct ProfileVerdict {
  bool granted = false;
  bool omega_sphere = false;
  double omega_radius = 0.0;
  double omega_min_norm = 0.0;
  double omega_max_norm = 0.0;
  bool non_resonant = false;
  bool normal_growth = false;
  std::string convention_note;
};

/// Decides whether a profile exists: for p >= 1 exactly when the omega-limit
/// set lies on a sphere; for p < 1 a Monte Carlo constancy test of
/// u -> W_p(lambda u + O_inf, O_inf) over omega samples (needs o_inf).
ProfileVerdict profile_verdict(const CutoffParams& params, double p,
                               const EmpiricalMeasure* o_inf = nullptr,
                               std::uint64_t seed = 0);

struct ProfilePoint {
  double r = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;  // nonzero only for the Monte Carlo (p < 1) branch
};

/// P_p(r): kappa(r) * |v| for p >= 1 (|v| = omega sphere radius); Monte
/// Carlo W_p(kappa(r) v + O_inf, O_inf) at a representative v for p < 1.
/// Throws NoProfile when the verdict denies a profile.
std::vector<ProfilePoint> theoretical_profile(const CutoffParams& params, double p, double w,
                                              const std::vector<double>& r_grid,
                                              const ProfileVerdict& verdict,
                                              const EmpiricalMeasure* o_inf = nullptr,
                                              std::uint64_t seed = 0);

struct CurveEntry {
  double epsilon = 0.0;
  double r = 0.0;
  double t = 0.0;         // snapped simulation time, max(0, t_eps + r w)
  double wp_ratio = 0.0;  // W_p(X_t(x), mu_hat) / eps^{1 ^ p}
  double stderr_ = 0.0;
  std::optional<double> theory;
};

struct CutoffCurve {
  double p = 2.0;
  double w = 1.0;
  std::vector<CurveEntry> entries;
};

/// The headline measurement: for each (eps, r) the normalized distance to
/// equilibrium at t = t_eps + r w. The state ensemble from x0 and the
/// stationary ensemble (independently estimated starting points) consume
/// identical increment streams, which removes the same-law sampling floor
/// from the distance estimate while each cloud remains an exact sample of
/// its law; distances are still computed by exact transport.
CutoffCurve cutoff_curve(const VectorFieldSpec& field, const LevyTriplet& triplet,
                         const Eigen::VectorXd& x0, const CutoffSchedule& schedule,
                         const CutoffParams& params, const SimulationBudget& budget,
                         const std::vector<ProfilePoint>* theory = nullptr);

struct ProfileFit {
  double q_hat = 0.0;
  double c_hat = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

/// Least squares of log(ratio) = log C - q r w at the smallest epsilon,
/// using entries with ratio > 3 stderr; requires >= 4 such points.
ProfileFit profile_fit(const CutoffCurve& curve);

struct MomentEntry {
  double epsilon = 0.0;
  double r = 0.0;
  double t = 0.0;
  double moment_ratio = 0.0;  // E|X_t|^p / eps^p
  double stderr_ = 0.0;
};

/// Moment analogue of the curve; the large-r plateau estimates E|O_inf|^p.
std::vector<MomentEntry> moments_cutoff(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                        const Eigen::VectorXd& x0, const CutoffSchedule& schedule,
                                        const CutoffParams& params,
                                        const SimulationBudget& budget);

struct FwErrorEntry {
  double epsilon = 0.0;
  double t = 0.0;
  double wp_xy_over_eps = 0.0;  // coupled-pairing bound on W_p(X, Y)/eps^{1^p}
  double wp_mu_over_eps = 0.0;  // W_p(eps O_inf, mu^eps)/eps^{1^p}
};

/// First-order-approximation error at t_eps: the pathwise X-vs-Y moment
/// (domination bound on W_p) and the distance between eps O_inf and mu^eps;
/// both must shrink along the epsilon list.
std::vector<FwErrorEntry> fw_error_decay(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                         const Eigen::VectorXd& x0,
                                         const CutoffSchedule& schedule,
                                         const CutoffParams& params,
                                         const SimulationBudget& budget);

struct CollapsePoint {
  double r = 0.0;
  double diff = 0.0;
  double joint_stderr = 0.0;
  bool within = false;
};

/// Compares ratios at the two smallest epsilons per r (the o(eps) collapse).
/// rel_tol adds a relative tolerance floor: a point is `within` when
/// diff <= max(3 joint_stderr, rel_tol * scale). The floor covers the
/// residual finite-eps deviation, which coupled estimators resolve far
/// beyond their statistical error.
std::vector<CollapsePoint> epsilon_collapse(const CutoffCurve& curve, double rel_tol = 0.0);

/// Largest pairwise ratio separation across the epsilon subsequence at
/// fixed r, in units of max(joint stderr, rel_tol * scale / 3); > 3 flags
/// window-only oscillation.
double oscillation_score(const CutoffCurve& curve, double r, double rel_tol = 0.0);

}  // namespace cutofflab
