#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "cutofflab/errors.hpp"
#include "cutofflab/vector_field.hpp"

namespace cutofflab {

/// Spectral data controlling the long-time decay of the flow e^{-At} w:
///   e^{q t} t^{1-ell} e^{-At} w  ->  sum_k e^{i theta_k t} v_k.
/// q is the smallest real part among eigenvalues seen by w, ell the largest
/// nilpotent height there plus one, and the (theta_k, v_k) the rotating
/// limit terms. Nonzero angles come in (+theta, -theta) pairs with complex
/// conjugate vectors; at most one angle is zero and its vector is real.
/// tau is the dissipation time of the nonlinear flow into the conjugacy
/// ball (0 for linear extractions).
struct CutoffParams {
  double q = 0.0;
  int ell = 1;
  int m = 0;
  std::vector<double> thetas;
  std::vector<Eigen::VectorXcd> vs;
  double tau = 0.0;
  std::optional<double> tau_upper_bound;  // (1/delta) ln(2|x|/R0) when known

  /// One angle per conjugate pair, positive representatives.
  std::vector<double> positive_angles() const;
  /// Re sum_k e^{i theta_k t} v_k (imaginary parts cancel by pairing).
  Eigen::VectorXd rotating_sum(double t) const;
  /// Pairing / realness invariants; throws on violation.
  void validate() const;
};

/// Extracts CutoffParams from the linear flow e^{-At} w. All eigenvalues of
/// A must have real part > tol (throws EigenvalueInStability otherwise).
/// Eigenvalues are clustered at relative tolerance tol; nilpotent-height
/// decisions falling into the ambiguous band raise DefectiveAmbiguity
/// rather than guessing a Jordan structure.
CutoffParams linear_cutoff_params(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                                  double tol = 1e-8);

/// Max over the tail half of t_grid of
///   | e^{qt} t^{1-ell} e^{-At} w - sum_k e^{i theta_k t} v_k |.
/// Decays to zero for a correct extraction; the defective part contributes
/// O(1/t).
double verify_hg_limit(const CutoffParams& params, const Eigen::MatrixXd& A,
                       const Eigen::VectorXd& w, const std::vector<double>& t_grid);

struct FlowOptions {
  double dt = 1e-3;
  double horizon = 0.0;  // 0 = auto (60/delta)
};

/// Runs the deterministic flow from x until |X^0_t| <= R0/2, takes the
/// hitting time as tau and the hit state as w, then reads the spectral data
/// off Db(0). Also records the analytic bound (1/delta) ln(2|x|/R0).
/// Throws FlowDidNotEnter if the ball is not reached within the horizon.
CutoffParams nonlinear_cutoff_params(const VectorFieldSpec& field, const Eigen::VectorXd& x,
                                     double R0, const FlowOptions& opts = {});

/// Largest radius in the geometric search {1, 1/2, 1/4, ...} at which the
/// quadratic remainder |b(x) - Db(0)x| stays below 10% of |Db(0)x| on the
/// sphere (sampled directions).
double default_domain_radius(const VectorFieldSpec& field, int n_directions = 64,
                             std::uint64_t seed = 0);

struct OmegaLimitSet {
  Eigen::MatrixXd samples;  // n_samples x d accumulation points
  bool is_sphere = false;
  double radius = 0.0;
  double min_norm = 0.0;
  double max_norm = 0.0;
};

/// Samples the rotating sum on [t_max/2, t_max] and tests whether all
/// accumulation points share one Euclidean norm (relative spread below
/// sphere_tol).
OmegaLimitSet omega_limit_set(const CutoffParams& params, double t_max, int n_samples,
                              double sphere_tol = 1e-6);

struct ResonanceReport {
  bool resonant = false;
  std::optional<std::vector<int>> witness;
};

/// Brute-force search for a nontrivial integer combination of the positive
/// angle representatives lying in 2*pi*Z (within tol). resonant = true
/// means such a combination exists; profile characterization via the
/// normal-growth test requires resonant = false.
ResonanceReport non_resonance_check(const std::vector<double>& thetas, int h_max = 20,
                                    double tol = 1e-9);

/// Orthogonality of (v_1, Re v_2, Im v_2, ...) plus |Re v_{2k}| = |Im v_{2k}|
/// for every rotating pair, to relative tolerance tol.
bool normal_growth_check(const CutoffParams& params, double tol = 1e-9);

}  // namespace cutofflab
