#include "cutofflab/spectral.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "cutofflab/rng.hpp"
#include "cutofflab/sde.hpp"

namespace cutofflab {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kProjectionTol = 1e-10;  // relative size below which w misses an eigenspace
constexpr double kAmbiguityLow = 1e-13;   // gray band for nilpotent-height decisions
constexpr double kAmbiguityHigh = 1e-7;

struct Cluster {
  std::complex<double> lambda;  // representative (mean)
  int multiplicity = 0;
  VectorXcd projection;         // P_lambda w
  int height = 0;               // max k with N^k P w significant
  VectorXcd dominant;           // N^height P w
};

std::vector<std::vector<int>> cluster_indices(const VectorXcd& eigenvalues, double ctol) {
  const int d = static_cast<int>(eigenvalues.size());
  std::vector<int> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (std::abs(eigenvalues[i] - eigenvalues[j]) <= ctol) {
        parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  for (int root = 0; root < d; ++root) {
    if (find(root) != root) continue;
    std::vector<int> group;
    for (int i = 0; i < d; ++i) {
      if (find(i) == root) group.push_back(i);
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

/// Splits w into its component in ker (A - lambda)^mult along the
/// complementary range space. The kernel dimension is dictated by the
/// cluster multiplicity; singular values that are neither clearly kernel
/// noise nor clearly rank raise DefectiveAmbiguity.
VectorXcd eigenspace_projection(const MatrixXcd& shifted_power, const VectorXcd& w,
                                int multiplicity, double ctol) {
  const int d = static_cast<int>(shifted_power.rows());
  Eigen::JacobiSVD<MatrixXcd> svd(shifted_power, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const int rank = d - multiplicity;
  if (rank > 0 && multiplicity > 0) {
    const double sigma0 = std::max(sigma[0], 1e-300);
    // legitimate kernel noise: cluster spread raised to the power, machine
    // noise of the power, and a floor relative to sigma0
    const double thr_kernel = std::max({std::pow(2.0 * ctol, multiplicity),
                                        d * 1e-15 * sigma0, kAmbiguityLow * sigma0});
    const double thr_clear = std::max(kAmbiguityHigh * sigma0, 1e3 * thr_kernel);
    const double kept = sigma[rank - 1];
    const double dropped = sigma[rank];
    if (dropped > thr_kernel || kept < thr_clear) {
      throw DefectiveAmbiguity(
          "eigenspace rank decision inside the tolerance band (singular values " +
          std::to_string(kept) + " vs " + std::to_string(dropped) + ")");
    }
  }
  MatrixXcd basis(d, d);
  basis.leftCols(multiplicity) = svd.matrixV().rightCols(multiplicity);   // kernel
  if (rank > 0) basis.rightCols(rank) = svd.matrixU().leftCols(rank);     // range
  const VectorXcd coeffs = basis.colPivHouseholderQr().solve(w);
  return svd.matrixV().rightCols(multiplicity) * coeffs.head(multiplicity);
}

/// True when every eigenvalue in the group appears together with its
/// complex conjugate, which forces a real representative.
bool conjugate_symmetric(const VectorXcd& eigenvalues, const std::vector<int>& group,
                         double ctol) {
  for (int i : group) {
    bool found = false;
    for (int j : group) {
      if (std::abs(eigenvalues[j] - std::conj(eigenvalues[i])) <= ctol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

std::vector<double> CutoffParams::positive_angles() const {
  std::vector<double> out;
  for (double theta : thetas) {
    if (theta > 0.0) out.push_back(theta);
  }
  return out;
}

VectorXd CutoffParams::rotating_sum(double t) const {
  VectorXcd acc = VectorXcd::Zero(vs.empty() ? 0 : vs.front().size());
  for (int k = 0; k < m; ++k) {
    acc += std::exp(std::complex<double>(0.0, thetas[static_cast<std::size_t>(k)] * t)) *
           vs[static_cast<std::size_t>(k)];
  }
  return acc.real();
}

void CutoffParams::validate() const {
  if (static_cast<int>(thetas.size()) != m || static_cast<int>(vs.size()) != m) {
    throw DegenerateInput("CutoffParams: m does not match thetas/vs");
  }
  int zeros = 0;
  std::vector<bool> matched(static_cast<std::size_t>(m), false);
  for (int k = 0; k < m; ++k) {
    const double theta = thetas[static_cast<std::size_t>(k)];
    if (theta == 0.0) {
      ++zeros;
      if (vs[static_cast<std::size_t>(k)].imag().norm() >
          1e-10 * std::max(1.0, vs[static_cast<std::size_t>(k)].norm())) {
        throw DegenerateInput("CutoffParams: zero-angle vector must be real");
      }
      matched[static_cast<std::size_t>(k)] = true;
    }
  }
  if (zeros > 1) throw DegenerateInput("CutoffParams: more than one zero angle");
  for (int k = 0; k < m; ++k) {
    if (matched[static_cast<std::size_t>(k)]) continue;
    bool found = false;
    for (int j = k + 1; j < m; ++j) {
      if (matched[static_cast<std::size_t>(j)]) continue;
      if (std::abs(thetas[static_cast<std::size_t>(k)] + thetas[static_cast<std::size_t>(j)]) <=
              1e-12 * std::max(1.0, std::abs(thetas[static_cast<std::size_t>(k)])) &&
          (vs[static_cast<std::size_t>(k)] - vs[static_cast<std::size_t>(j)].conjugate()).norm() <=
              1e-10 * std::max(1.0, vs[static_cast<std::size_t>(k)].norm())) {
        matched[static_cast<std::size_t>(k)] = matched[static_cast<std::size_t>(j)] = true;
        found = true;
        break;
      }
    }
    if (!found) throw DegenerateInput("CutoffParams: unmatched rotation pair");
  }
}

CutoffParams linear_cutoff_params(const MatrixXd& A, const VectorXd& w, double tol) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d) throw DimensionMismatch("linear_cutoff_params: A must be square");
  if (w.size() != d) throw DimensionMismatch("linear_cutoff_params: w size mismatch");
  if (w.norm() == 0.0) throw DegenerateInput("linear_cutoff_params: w must be nonzero");

  Eigen::EigenSolver<MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) throw Error("eigen decomposition failed");
  const VectorXcd eigenvalues = solver.eigenvalues();
  double scale = 1.0;
  for (int i = 0; i < d; ++i) {
    scale = std::max(scale, std::abs(eigenvalues[i]));
    if (eigenvalues[i].real() <= tol) {
      throw EigenvalueInStability("eigenvalue with real part " +
                                  std::to_string(eigenvalues[i].real()) +
                                  " is not strictly stable after negation");
    }
  }

  const double ctol = tol * scale;
  const VectorXcd wc = w.cast<std::complex<double>>();
  std::vector<Cluster> clusters;
  for (const auto& group : cluster_indices(eigenvalues, ctol)) {
    Cluster c;
    c.multiplicity = static_cast<int>(group.size());
    std::complex<double> mean{0.0, 0.0};
    for (int idx : group) mean += eigenvalues[idx];
    c.lambda = mean / static_cast<double>(c.multiplicity);
    if (conjugate_symmetric(eigenvalues, group, ctol)) c.lambda.imag(0.0);

    MatrixXcd shifted = A.cast<std::complex<double>>();
    shifted.diagonal().array() -= c.lambda;
    MatrixXcd power = MatrixXcd::Identity(d, d);
    for (int k = 0; k < c.multiplicity; ++k) power = power * shifted;
    c.projection = eigenspace_projection(power, wc, c.multiplicity, ctol);
    const double proj_norm = c.projection.norm();
    if (proj_norm <= kProjectionTol * w.norm()) continue;  // w misses this eigenspace

    // nilpotent height of the projection: largest k with N^k P w nonzero
    VectorXcd current = c.projection;
    c.height = 0;
    c.dominant = current;
    const double opnorm = std::max(shifted.norm(), 1e-300);
    for (int k = 1; k < c.multiplicity; ++k) {
      VectorXcd next = shifted * current;
      const double ratio = next.norm() / (current.norm() * opnorm);
      if (ratio < kAmbiguityLow) break;
      if (ratio < kAmbiguityHigh) {
        throw DefectiveAmbiguity("nilpotent height decision inside the tolerance band (ratio " +
                                 std::to_string(ratio) + ")");
      }
      current = std::move(next);
      c.height = k;
      c.dominant = current;
    }
    clusters.push_back(std::move(c));
  }
  if (clusters.empty()) throw DegenerateInput("w has no component on any eigenspace");

  double q = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) q = std::min(q, c.lambda.real());
  int ell = 1;
  for (const auto& c : clusters) {
    if (c.lambda.real() <= q + ctol) ell = std::max(ell, c.height + 1);
  }

  // dominant rotating terms: rate q, height ell-1
  double factorial = 1.0;
  for (int k = 2; k <= ell - 1; ++k) factorial *= k;
  const double coeff_scale = (ell % 2 == 0 ? -1.0 : 1.0) / factorial;  // (-1)^{ell-1}/(ell-1)!

  struct Term {
    double theta;
    VectorXcd v;
  };
  std::vector<Term> terms;
  for (const auto& c : clusters) {
    if (c.lambda.real() > q + ctol || c.height != ell - 1) continue;
    const double theta = c.lambda.imag() == 0.0 ? 0.0 : -c.lambda.imag();
    terms.push_back({theta, coeff_scale * c.dominant});
  }

  // convention: zero angle first (real vector), then (+theta, -theta) pairs
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    const double ka = std::abs(a.theta), kb = std::abs(b.theta);
    if (ka != kb) return ka < kb;
    return a.theta > b.theta;
  });
  CutoffParams params;
  params.q = q;
  params.ell = ell;
  params.m = static_cast<int>(terms.size());
  for (auto& term : terms) {
    if (term.theta == 0.0) term.v = term.v.real().cast<std::complex<double>>();
    params.thetas.push_back(term.theta);
    params.vs.push_back(term.v);
  }
  // symmetrize conjugate pairs so downstream pairing checks hold exactly
  for (int k = 0; k < params.m; ++k) {
    for (int j = k + 1; j < params.m; ++j) {
      if (std::abs(params.thetas[k] + params.thetas[j]) <= ctol && params.thetas[k] != 0.0) {
        const VectorXcd sym =
            0.5 * (params.vs[k] + params.vs[j].conjugate());
        params.vs[k] = sym;
        params.vs[j] = sym.conjugate();
        params.thetas[j] = -params.thetas[k];
      }
    }
  }
  params.validate();
  return params;
}

double verify_hg_limit(const CutoffParams& params, const MatrixXd& A, const VectorXd& w,
                       const std::vector<double>& t_grid) {
  const int d = static_cast<int>(A.rows());
  const MatrixXd shifted = A - params.q * MatrixXd::Identity(d, d);
  double worst = 0.0;
  const std::size_t start = t_grid.size() / 2;
  for (std::size_t i = start; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    // e^{qt} e^{-At} = exp(-(A - qI) t); the shifted exponent stays bounded
    const MatrixXd flow = (-shifted * t).exp();
    const VectorXd scaled = std::pow(t, 1 - params.ell) * (flow * w);
    worst = std::max(worst, (scaled - params.rotating_sum(t)).norm());
  }
  return worst;
}

double default_domain_radius(const VectorFieldSpec& field, int n_directions, std::uint64_t seed) {
  const MatrixXd j0 = field.jacobian(VectorXd::Zero(field.dim));
  RngStream rng(derive_stream_key(seed, 0x5bec7ull, 4), 0, 0);
  std::vector<VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(n_directions));
  for (int k = 0; k < n_directions; ++k) {
    VectorXd u(field.dim);
    double norm = 0.0;
    do {
      for (int i = 0; i < field.dim; ++i) u[i] = rng.normal();
      norm = u.norm();
    } while (norm == 0.0);
    dirs.push_back(u / norm);
  }
  Eigen::VectorXd bx(field.dim);
  for (double radius = 1.0; radius > std::ldexp(1.0, -20); radius *= 0.5) {
    bool ok = true;
    for (const auto& u : dirs) {
      const VectorXd x = radius * u;
      field.eval_into(x, bx);
      const VectorXd linear = j0 * x;
      if ((bx - linear).norm() > 0.1 * linear.norm()) {
        ok = false;
        break;
      }
    }
    if (ok) return radius;
  }
  throw DegenerateInput("default_domain_radius: no radius passed the remainder test");
}

CutoffParams nonlinear_cutoff_params(const VectorFieldSpec& field, const Eigen::VectorXd& x,
                                     double R0, const FlowOptions& opts) {
  if (x.norm() == 0.0) throw DegenerateInput("nonlinear_cutoff_params: x must be nonzero");
  if (!(R0 > 0.0)) throw DegenerateInput("nonlinear_cutoff_params: R0 must be positive");
  const double target = 0.5 * R0;
  const double horizon =
      opts.horizon > 0.0 ? opts.horizon : 60.0 / std::max(field.delta, 1e-9);
  const double dt = opts.dt;

  const auto path = integrate_deterministic(field, x, horizon, dt);
  double tau = 0.0;
  bool entered = x.norm() <= target;
  for (std::size_t i = 1; i < path.size() && !entered; ++i) {
    if (path[i].second.norm() <= target) {
      const double n0 = path[i - 1].second.norm();
      const double n1 = path[i].second.norm();
      const double frac = n0 > n1 ? std::clamp((n0 - target) / (n0 - n1), 0.0, 1.0) : 1.0;
      tau = path[i - 1].first + frac * dt;
      entered = true;
    }
  }
  if (!entered) {
    throw FlowDidNotEnter("deterministic flow did not reach the ball of radius R0/2 = " +
                          std::to_string(target) + " within the horizon (check delta)");
  }

  // Extract deep inside the ball where the dynamics are linear to machine
  // precision, then undo the extra flow time. The rescale makes the
  // composite e^{q tau} |v| independent of both tau and the refine point.
  const double refine_target = target * 1e-4;
  std::size_t refine_idx = path.size() - 1;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].second.norm() <= refine_target) {
      refine_idx = i;
      break;
    }
  }
  const double t_refine = path[refine_idx].first;
  const VectorXd w_deep = path[refine_idx].second;
  if (w_deep.norm() == 0.0) {
    throw DegenerateInput("nonlinear_cutoff_params: flow reached the fixed point exactly");
  }

  CutoffParams params =
      linear_cutoff_params(field.jacobian(VectorXd::Zero(field.dim)), w_deep);
  const double shift = t_refine - tau;  // extra flow time beyond tau
  const double amplitude = std::exp(params.q * shift);
  for (int k = 0; k < params.m; ++k) {
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.0, -params.thetas[static_cast<std::size_t>(k)] * shift));
    params.vs[static_cast<std::size_t>(k)] *= amplitude * phase;
  }
  params.tau = tau;
  params.tau_upper_bound = std::log(std::max(2.0 * x.norm() / R0, 1.0)) / field.delta;
  return params;
}

OmegaLimitSet omega_limit_set(const CutoffParams& params, double t_max, int n_samples,
                              double sphere_tol) {
  if (n_samples < 100) throw DegenerateInput("omega_limit_set: n_samples must be >= 100");
  OmegaLimitSet omega;
  const int d = params.vs.empty() ? 0 : static_cast<int>(params.vs.front().size());
  omega.samples.resize(n_samples, d);
  omega.min_norm = std::numeric_limits<double>::infinity();
  omega.max_norm = 0.0;
  double mean_norm = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double t = 0.5 * t_max + 0.5 * t_max * static_cast<double>(i) / (n_samples - 1);
    const VectorXd s = params.rotating_sum(t);
    omega.samples.row(i) = s;
    const double norm = s.norm();
    omega.min_norm = std::min(omega.min_norm, norm);
    omega.max_norm = std::max(omega.max_norm, norm);
    mean_norm += norm;
  }
  mean_norm /= n_samples;
  omega.is_sphere =
      omega.max_norm > 0.0 && (omega.max_norm - omega.min_norm) / omega.max_norm < sphere_tol;
  omega.radius = mean_norm;
  return omega;
}

ResonanceReport non_resonance_check(const std::vector<double>& thetas, int h_max, double tol) {
  ResonanceReport report;
  const int n = static_cast<int>(thetas.size());
  if (n == 0) return report;
  std::vector<int> h(static_cast<std::size_t>(n), -h_max);
  const double two_pi = 2.0 * M_PI;
  for (;;) {
    bool nonzero = false;
    for (int hi : h) {
      if (hi != 0) {
        nonzero = true;
        break;
      }
    }
    if (nonzero) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += h[static_cast<std::size_t>(i)] * thetas[static_cast<std::size_t>(i)];
      const double dist = std::abs(s - two_pi * std::round(s / two_pi));
      if (dist < tol) {
        report.resonant = true;
        report.witness = h;
        return report;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && h[static_cast<std::size_t>(pos)] == h_max) {
      h[static_cast<std::size_t>(pos)] = -h_max;
      --pos;
    }
    if (pos < 0) break;
    ++h[static_cast<std::size_t>(pos)];
  }
  return report;
}

bool normal_growth_check(const CutoffParams& params, double tol) {
  std::vector<VectorXd> family;
  for (int k = 0; k < params.m; ++k) {
    const double theta = params.thetas[static_cast<std::size_t>(k)];
    const auto& v = params.vs[static_cast<std::size_t>(k)];
    if (theta == 0.0) {
      family.push_back(v.real());
    } else if (theta > 0.0) {
      const VectorXd re = v.real();
      const VectorXd im = v.imag();
      if (std::abs(re.norm() - im.norm()) > tol * std::max({re.norm(), im.norm(), 1e-300})) {
        return false;
      }
      family.push_back(re);
      family.push_back(im);
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double bound = tol * std::max(family[i].norm() * family[j].norm(), 1e-300);
      if (std::abs(family[i].dot(family[j])) > bound) return false;
    }
  }
  return true;
}

}  // namespace cutofflab
