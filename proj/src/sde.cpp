#include "cutofflab/sde.hpp"

#include <algorithm>
#include <cmath>

#include "cutofflab/parallel.hpp"
#include "cutofflab/rng.hpp"

namespace cutofflab {

namespace {

constexpr std::uint64_t kSdeModuleId = 0x5de5ull;

struct StepGrid {
  double dt = 0.0;
  long long n_steps = 0;                  // total steps to the last output
  std::vector<long long> output_steps;    // sorted, one per requested time
};

StepGrid make_grid(const std::vector<double>& output_times, double dt) {
  if (!(dt > 0.0)) throw ConfigInvalid("integrator: dt must be positive");
  StepGrid grid;
  grid.dt = dt;
  grid.output_steps.reserve(output_times.size());
  for (double t : output_times) {
    if (t < 0.0) throw ConfigInvalid("integrator: negative output time");
    grid.output_steps.push_back(std::llround(t / dt));
  }
  if (!std::is_sorted(grid.output_steps.begin(), grid.output_steps.end())) {
    throw ConfigInvalid("integrator: output times must be nondecreasing");
  }
  grid.n_steps = grid.output_steps.empty() ? 0 : grid.output_steps.back();
  return grid;
}

void check_stability(const VectorFieldSpec& field, double dt) {
  if (field.delta > 0.0 && dt > 0.1 / field.delta + 1e-15) {
    throw StepSizeTooLarge("dt = " + std::to_string(dt) + " exceeds the stability guard 0.1/delta");
  }
}

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& x, long long traj, long long step) {
  if (!x.allFinite()) {
    throw NonFiniteState("non-finite state in trajectory " + std::to_string(traj) +
                         " at step " + std::to_string(step));
  }
}

/// Shared Euler-Maruyama driver. `drift_into(x, out, step)` supplies the
/// full drift term -b(x) (or its linearized analogue); increments come from
/// the per-(trajectory, step) stream and are scaled by `epsilon`.
template <typename DriftFn>
std::vector<TrajectoryBatch> run_em(const LevyTriplet& triplet, const Eigen::MatrixXd& starts,
                                    double epsilon, const std::vector<double>& output_times,
                                    const SimOptions& opts, ProcessTag tag, DriftFn&& drift_into) {
  const int d = static_cast<int>(starts.cols());
  const auto n_traj = static_cast<std::size_t>(starts.rows());
  const StepGrid grid = make_grid(output_times, opts.dt);
  const std::uint64_t run_key = derive_stream_key(opts.master_seed, kSdeModuleId, opts.job_index);

  std::vector<TrajectoryBatch> batches(grid.output_steps.size());
  for (std::size_t k = 0; k < batches.size(); ++k) {
    batches[k].states.resize(starts.rows(), d);
    batches[k].time = static_cast<double>(grid.output_steps[k]) * grid.dt;
    batches[k].epsilon = epsilon;
    batches[k].tag = tag;
  }

  parallel_for(n_traj, [&](std::size_t traj) {
    Eigen::VectorXd x = starts.row(static_cast<Eigen::Index>(traj));
    Eigen::VectorXd drift(d), inc(d);
    std::size_t out_idx = 0;
    for (long long step = 0; step <= grid.n_steps; ++step) {
      while (out_idx < grid.output_steps.size() && grid.output_steps[out_idx] == step) {
        batches[out_idx].states.row(static_cast<Eigen::Index>(traj)) = x;
        ++out_idx;
      }
      if (step == grid.n_steps) break;
      drift_into(x, drift, step);
      RngStream rng(run_key, traj, static_cast<std::uint64_t>(step));
      sample_increment_into(triplet, grid.dt, rng, inc);
      x += drift * grid.dt + epsilon * inc;
      require_finite(x, static_cast<long long>(traj), step);
    }
  }, opts.n_workers);
  return batches;
}

Eigen::MatrixXd replicate_start(const Eigen::VectorXd& x0, int n_traj) {
  Eigen::MatrixXd starts(n_traj, x0.size());
  starts.rowwise() = x0.transpose();
  return starts;
}

/// Jacobians of the deterministic flow on the step grid, for the
/// linearized processes: J_s = Db(X^0_{s dt}(x0)).
std::vector<Eigen::MatrixXd> path_jacobians(const VectorFieldSpec& field,
                                            const Eigen::VectorXd& x0, long long n_steps,
                                            double dt) {
  std::vector<Eigen::MatrixXd> jacobians;
  jacobians.reserve(static_cast<std::size_t>(n_steps));
  const auto path = integrate_deterministic(field, x0, static_cast<double>(n_steps) * dt, dt);
  Eigen::MatrixXd jac(field.dim, field.dim);
  for (long long s = 0; s < n_steps; ++s) {
    field.jac_into(path[static_cast<std::size_t>(s)].second, jac);
    jacobians.push_back(jac);
  }
  return jacobians;
}

}  // namespace

double default_dt(const VectorFieldSpec& field) {
  return std::min(1e-2, field.delta > 0.0 ? 0.05 / field.delta : 1e-2);
}

std::vector<std::pair<double, Eigen::VectorXd>> integrate_deterministic(
    const VectorFieldSpec& field, const Eigen::VectorXd& x0, double t_end, double dt) {
  if (!(dt > 0.0) || t_end < 0.0) throw ConfigInvalid("integrate_deterministic: bad dt or t_end");
  const auto n_steps = static_cast<long long>(std::ceil(t_end / dt - 1e-12));
  std::vector<std::pair<double, Eigen::VectorXd>> path;
  path.reserve(static_cast<std::size_t>(n_steps) + 1);

  const int d = field.dim;
  Eigen::VectorXd x = x0, k1(d), k2(d), k3(d), k4(d), tmp(d);
  const double norm0 = x0.norm();
  int consecutive_violations = 0;
  path.emplace_back(0.0, x);
  for (long long s = 0; s < n_steps; ++s) {
    field.eval_into(x, k1);
    tmp = x - 0.5 * dt * k1;
    field.eval_into(tmp, k2);
    tmp = x - 0.5 * dt * k2;
    field.eval_into(tmp, k3);
    tmp = x - dt * k3;
    field.eval_into(tmp, k4);
    x -= (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = static_cast<double>(s + 1) * dt;
    require_finite(x, 0, s);
    if (x.norm() > std::exp(-field.delta * t) * norm0 * (1.0 + 10.0 * dt)) {
      if (++consecutive_violations >= 3) {
        throw StepSizeTooLarge("deterministic flow violates the contraction bound; reduce dt");
      }
    } else {
      consecutive_violations = 0;
    }
    path.emplace_back(t, x);
  }
  return path;
}

std::vector<TrajectoryBatch> integrate_sde_from(const VectorFieldSpec& field,
                                                const LevyTriplet& triplet,
                                                const Eigen::MatrixXd& starts, double epsilon,
                                                const std::vector<double>& output_times,
                                                const SimOptions& opts) {
  check_stability(field, opts.dt);
  Eigen::VectorXd minus_b(field.dim);
  return run_em(triplet, starts, epsilon, output_times, opts,
                epsilon == 0.0 ? ProcessTag::X_zero : ProcessTag::X_eps,
                [&field](const Eigen::VectorXd& x, Eigen::VectorXd& out, long long) {
                  field.eval_into(x, out);
                  out = -out;
                });
}

std::vector<TrajectoryBatch> integrate_sde(const VectorFieldSpec& field,
                                           const LevyTriplet& triplet, const Eigen::VectorXd& x0,
                                           double epsilon,
                                           const std::vector<double>& output_times,
                                           const SimOptions& opts) {
  if (opts.n_traj < 1) throw ConfigInvalid("integrate_sde: n_traj must be >= 1");
  return integrate_sde_from(field, triplet, replicate_start(x0, opts.n_traj), epsilon,
                            output_times, opts);
}

std::vector<TrajectoryBatch> integrate_fw_linearization(const VectorFieldSpec& field,
                                                        const LevyTriplet& triplet,
                                                        const Eigen::VectorXd& x0,
                                                        const std::vector<double>& output_times,
                                                        const SimOptions& opts) {
  check_stability(field, opts.dt);
  const StepGrid grid = make_grid(output_times, opts.dt);
  const auto jacobians = path_jacobians(field, x0, grid.n_steps, opts.dt);
  const Eigen::MatrixXd starts = Eigen::MatrixXd::Zero(opts.n_traj, field.dim);
  auto batches = run_em(triplet, starts, 1.0, output_times, opts, ProcessTag::Y_fw,
                        [&jacobians](const Eigen::VectorXd& y, Eigen::VectorXd& out,
                                     long long step) {
                          out.noalias() = -(jacobians[static_cast<std::size_t>(step)] * y);
                        });
  return batches;
}

std::vector<TrajectoryBatch> integrate_ou_from(const VectorFieldSpec& field,
                                               const LevyTriplet& triplet,
                                               const Eigen::MatrixXd& starts,
                                               const std::vector<double>& output_times,
                                               const SimOptions& opts) {
  check_stability(field, opts.dt);
  const Eigen::MatrixXd j0 = field.jacobian(Eigen::VectorXd::Zero(field.dim));
  auto batches = run_em(triplet, starts, 1.0, output_times, opts, ProcessTag::O_hom,
                        [&j0](const Eigen::VectorXd& y, Eigen::VectorXd& out, long long) {
                          out.noalias() = -(j0 * y);
                        });
  return batches;
}

std::vector<TrajectoryBatch> integrate_ou(const VectorFieldSpec& field,
                                          const LevyTriplet& triplet, const Eigen::VectorXd& x0,
                                          const std::vector<double>& output_times,
                                          const SimOptions& opts) {
  return integrate_ou_from(field, triplet, replicate_start(x0, opts.n_traj), output_times, opts);
}

CoupledMoments coupled_difference(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                  const Eigen::VectorXd& x0, double epsilon, double t_end,
                                  const SimOptions& opts, const std::vector<double>& ps) {
  check_stability(field, opts.dt);
  const StepGrid grid = make_grid({t_end}, opts.dt);
  const auto jacobians = path_jacobians(field, x0, grid.n_steps, opts.dt);
  const std::uint64_t run_key = derive_stream_key(opts.master_seed, kSdeModuleId, opts.job_index);
  const auto n_traj = static_cast<std::size_t>(opts.n_traj);
  const int d = field.dim;

  std::vector<std::vector<double>> theta_pow(ps.size(), std::vector<double>(n_traj, 0.0));
  std::vector<std::vector<double>> delta_pow(ps.size(), std::vector<double>(n_traj, 0.0));

  parallel_for(n_traj, [&](std::size_t traj) {
    Eigen::VectorXd x_eps = x0, x_zero = x0;
    Eigen::VectorXd y_lin = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd b_eps(d), b_zero(d), inc(d);
    for (long long step = 0; step < grid.n_steps; ++step) {
      RngStream rng(run_key, traj, static_cast<std::uint64_t>(step));
      sample_increment_into(triplet, grid.dt, rng, inc);
      field.eval_into(x_eps, b_eps);
      field.eval_into(x_zero, b_zero);
      x_eps += -b_eps * grid.dt + epsilon * inc;
      x_zero += -b_zero * grid.dt;
      y_lin += -(jacobians[static_cast<std::size_t>(step)] * y_lin) * grid.dt + inc;
      require_finite(x_eps, static_cast<long long>(traj), step);
    }
    const double theta = (x_eps - x_zero).norm();
    const double delta = (x_eps - (x_zero + epsilon * y_lin)).norm();
    for (std::size_t k = 0; k < ps.size(); ++k) {
      theta_pow[k][traj] = std::pow(theta, ps[k]);
      delta_pow[k][traj] = std::pow(delta, ps[k]);
    }
  }, opts.n_workers);

  CoupledMoments moments;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    moments.theta_moments[ps[k]] = pairwise_sum(theta_pow[k]) / static_cast<double>(n_traj);
    moments.delta_moments[ps[k]] = pairwise_sum(delta_pow[k]) / static_cast<double>(n_traj);
  }
  return moments;
}

Eigen::MatrixXd invariant_measure_samples(const VectorFieldSpec& field,
                                          const LevyTriplet& triplet, double epsilon,
                                          InvariantMethod method, int n, double horizon,
                                          const SimOptions& opts) {
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(field.dim);
  if (method == InvariantMethod::ensemble_endpoints) {
    SimOptions local = opts;
    local.n_traj = n;
    const auto batches = integrate_sde(field, triplet, origin, epsilon, {horizon}, local);
    return batches.back().states;
  }
  // single long run: burn-in `horizon`, then snapshots every 2/delta
  const double spacing = 2.0 / std::max(field.delta, 1e-9);
  std::vector<double> times(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) times[static_cast<std::size_t>(i)] = horizon + i * spacing;
  SimOptions local = opts;
  local.n_traj = 1;
  const auto batches = integrate_sde(field, triplet, origin, epsilon, times, local);
  Eigen::MatrixXd cloud(n, field.dim);
  for (int i = 0; i < n; ++i) cloud.row(i) = batches[static_cast<std::size_t>(i)].states.row(0);
  return cloud;
}

}  // namespace cutofflab
