#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "cutofflab/errors.hpp"

namespace cutofflab {

/// A drift vector field b : R^d -> R^d with Jacobian access and a claimed
/// dissipativity constant delta, i.e. <b(x)-b(y), x-y> >= delta |x-y|^2.
/// Values are immutable after construction; evaluation is pure, so a spec
/// may be shared freely across trajectory workers.
struct VectorFieldSpec {
  int dim = 0;
  std::function<void(Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::VectorXd>)> eval_into;
  std::function<void(Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::MatrixXd>)> jac_into;
  double delta = 0.0;
  std::string name;

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dim);
    eval_into(x, out);
    return out;
  }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out(dim, dim);
    jac_into(x, out);
    return out;
  }
};

/// Parameters of the planar oscillator family
///   b(x1,x2) = ( x2 F(x) - d1 H(x),  -x1 F(x) - d2 H(x) ).
/// The linearization at the origin is determined by four scalars
///   a = -H_11(0,0), b = -H_22(0,0), c = -H_12(0,0), eta0 = -F(0,0),
/// giving Jb(0,0) = [[a, -eta0+c], [eta0+c, b]].
struct OscillatorParams {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double eta0 = 0.0;
  // closed-form pieces with analytic first/second derivatives
  std::function<double(double, double)> F, F_1, F_2;
  std::function<double(double, double)> H_1, H_2, H_11, H_12, H_22;

  /// (a-b)^2 + 4(c^2 - eta0^2); sign separates real from rotating spectra.
  double discriminant() const { return (a - b) * (a - b) + 4.0 * (c * c - eta0 * eta0); }
};

/// Constant F == -eta0 and quadratic H (plus an optional isotropic quartic
/// well of strength k4 >= 0, which strengthens dissipativity).
OscillatorParams oscillator_params(double a, double b, double c, double eta0, double quartic = 0.0);

/// Gradient flow of U(x) = |x|^2/2 + |x|^4/4: b(x) = x(1+|x|^2),
/// Db(x) = (1+|x|^2) I + 2 x x^T, delta = 1.
VectorFieldSpec fput_field(int dim);

/// b(x) = A x; delta is the smallest eigenvalue of the symmetric part
/// (the sharp dissipativity constant of a linear drift).
VectorFieldSpec linear_field(const Eigen::MatrixXd& A);

/// Builds the planar oscillator drift. Throws DissipativityViolation if the
/// sampled quadratic-form check u^T Jb(v) u >= delta |u|^2 fails on a
/// deterministic sample of points.
VectorFieldSpec oscillator_field(const OscillatorParams& params);

/// Registers a user field from an evaluator; when no analytic Jacobian is
/// given, central differences with step 1e-6 * max(1,|x|) are used.
VectorFieldSpec make_field(
    int dim, std::string name, double delta,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian = nullptr);

struct DissipativityReport {
  double min_ratio = 0.0;
  bool pass = false;
};

/// Samples n_pairs point pairs uniformly in the ball of the given radius and
/// returns the minimum of <b(x)-b(y), x-y>/|x-y|^2 together with whether it
/// clears delta * (1 - 1e-9). Coincident pairs are resampled.
DissipativityReport check_dissipativity(const VectorFieldSpec& field, int n_pairs,
                                        double radius, std::uint64_t seed);

/// Max relative error between the analytic Jacobian and central finite
/// differences over n_points sampled in the unit ball.
double jacobian_consistency(const VectorFieldSpec& field, int n_points, std::uint64_t seed);

/// Central-difference Jacobian with step 1e-6 * max(1,|x|).
Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x);

}  // namespace cutofflab
