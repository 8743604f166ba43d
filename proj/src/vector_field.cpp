#include "cutofflab/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cutofflab/rng.hpp"

namespace cutofflab {

namespace {

Eigen::VectorXd sample_in_ball(int dim, double radius, RngStream& rng) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = rng.normal();
  const double norm = x.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
  const double u = rng.uniform_pos();
  return x * (radius * std::pow(u, 1.0 / dim) / norm);
}

constexpr std::uint64_t kFieldModuleId = 0x7f1e1dull;

}  // namespace

Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  const double h = 1e-6 * std::max(1.0, x.norm());
  Eigen::MatrixXd jac(d, d);
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < d; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

VectorFieldSpec fput_field(int dim) {
  VectorFieldSpec spec;
  spec.dim = dim;
  spec.delta = 1.0;
  spec.name = "fput";
  spec.eval_into = [](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
    out = x * (1.0 + x.squaredNorm());
  };
  spec.jac_into = [](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::MatrixXd> out) {
    const int d = static_cast<int>(x.size());
    out = (1.0 + x.squaredNorm()) * Eigen::MatrixXd::Identity(d, d);
    out.noalias() += 2.0 * x * x.transpose();
  };
  return spec;
}

VectorFieldSpec linear_field(const Eigen::MatrixXd& A) {
  VectorFieldSpec spec;
  spec.dim = static_cast<int>(A.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(0.5 * (A + A.transpose()));
  spec.delta = sym.eigenvalues().minCoeff();
  spec.name = "linear";
  spec.eval_into = [A](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
    out.noalias() = A * x;
  };
  spec.jac_into = [A](Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::MatrixXd> out) {
    out = A;
  };
  return spec;
}

OscillatorParams oscillator_params(double a, double b, double c, double eta0, double quartic) {
  OscillatorParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.eta0 = eta0;
  const double k4 = quartic;
  p.F = [eta0](double, double) { return -eta0; };
  p.F_1 = [](double, double) { return 0.0; };
  p.F_2 = [](double, double) { return 0.0; };
  // H = -(a/2) x1^2 - (b/2) x2^2 - c x1 x2 - (k4/4)(x1^2+x2^2)^2
  p.H_1 = [a, c, k4](double x1, double x2) {
    return -a * x1 - c * x2 - k4 * x1 * (x1 * x1 + x2 * x2);
  };
  p.H_2 = [b, c, k4](double x1, double x2) {
    return -b * x2 - c * x1 - k4 * x2 * (x1 * x1 + x2 * x2);
  };
  p.H_11 = [a, k4](double x1, double x2) { return -a - k4 * (3.0 * x1 * x1 + x2 * x2); };
  p.H_22 = [b, k4](double x1, double x2) { return -b - k4 * (x1 * x1 + 3.0 * x2 * x2); };
  p.H_12 = [c, k4](double x1, double x2) { return -c - 2.0 * k4 * x1 * x2; };
  return p;
}

VectorFieldSpec oscillator_field(const OscillatorParams& params) {
  VectorFieldSpec spec;
  spec.dim = 2;
  spec.name = "oscillator";

  const OscillatorParams p = params;
  spec.eval_into = [p](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
    const double x1 = x[0], x2 = x[1];
    const double f = p.F(x1, x2);
    out[0] = x2 * f - p.H_1(x1, x2);
    out[1] = -x1 * f - p.H_2(x1, x2);
  };
  spec.jac_into = [p](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::MatrixXd> out) {
    const double v1 = x[0], v2 = x[1];
    const double f = p.F(v1, v2);
    const double f1 = p.F_1(v1, v2), f2 = p.F_2(v1, v2);
    out(0, 0) = v2 * f1 - p.H_11(v1, v2);
    out(0, 1) = f + v2 * f2 - p.H_12(v1, v2);
    out(1, 0) = -f - v1 * f1 - p.H_12(v1, v2);
    out(1, 1) = -v1 * f2 - p.H_22(v1, v2);
  };

  // estimate delta from the sampled quadratic form u^T Jb(v) u
  RngStream rng(derive_stream_key(0xD155u, kFieldModuleId, 1), 0, 0);
  double min_form = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd jac(2, 2);
  for (int k = 0; k < 4096; ++k) {
    const Eigen::VectorXd v = sample_in_ball(2, 4.0, rng);
    spec.jac_into(v, jac);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(0.5 * (jac + jac.transpose()));
    min_form = std::min(min_form, sym.eigenvalues().minCoeff());
  }
  if (min_form <= 0.0) {
    throw DissipativityViolation(
        "oscillator: sampled quadratic form u^T Jb(v) u is not positive definite "
        "(min eigenvalue " + std::to_string(min_form) + ")");
  }
  spec.delta = min_form;
  return spec;
}

VectorFieldSpec make_field(int dim, std::string name, double delta,
                           std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval,
                           std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian) {
  VectorFieldSpec spec;
  spec.dim = dim;
  spec.delta = delta;
  spec.name = std::move(name);
  spec.eval_into = [eval](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
    out = eval(x);
  };
  if (jacobian) {
    spec.jac_into = [jacobian](Eigen::Ref<const Eigen::VectorXd> x,
                               Eigen::Ref<Eigen::MatrixXd> out) { out = jacobian(x); };
  } else {
    spec.jac_into = [eval](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::MatrixXd> out) {
      out = finite_difference_jacobian(eval, x);
    };
  }
  return spec;
}

DissipativityReport check_dissipativity(const VectorFieldSpec& field, int n_pairs, double radius,
                                        std::uint64_t seed) {
  RngStream rng(derive_stream_key(seed, kFieldModuleId, 2), 0, 0);
  DissipativityReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  Eigen::VectorXd bx(field.dim), by(field.dim);
  for (int k = 0; k < n_pairs; ++k) {
    Eigen::VectorXd x, y;
    double dist2 = 0.0;
    int attempts = 0;
    do {
      x = sample_in_ball(field.dim, radius, rng);
      y = sample_in_ball(field.dim, radius, rng);
      dist2 = (x - y).squaredNorm();
      if (++attempts > 100) throw DegenerateInput("check_dissipativity: sampled pairs keep coinciding");
    } while (dist2 == 0.0);
    field.eval_into(x, bx);
    field.eval_into(y, by);
    const double ratio = (bx - by).dot(x - y) / dist2;
    report.min_ratio = std::min(report.min_ratio, ratio);
  }
  report.pass = report.min_ratio >= field.delta * (1.0 - 1e-9);
  return report;
}

double jacobian_consistency(const VectorFieldSpec& field, int n_points, std::uint64_t seed) {
  RngStream rng(derive_stream_key(seed, kFieldModuleId, 3), 0, 0);
  auto eval = [&field](const Eigen::VectorXd& x) { return field.eval(x); };
  double worst = 0.0;
  for (int k = 0; k < n_points; ++k) {
    const Eigen::VectorXd x = sample_in_ball(field.dim, 1.0, rng);
    const Eigen::MatrixXd analytic = field.jacobian(x);
    const Eigen::MatrixXd numeric = finite_difference_jacobian(eval, x);
    const double scale = std::max(1.0, analytic.norm());
    worst = std::max(worst, (analytic - numeric).norm() / scale);
  }
  return worst;
}

}  // namespace cutofflab
