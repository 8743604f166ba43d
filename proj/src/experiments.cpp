#include "cutofflab/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "cutofflab/parallel.hpp"

namespace cutofflab {

namespace {

double resolve_dt(const VectorFieldSpec& field, double dt) {
  return dt > 0.0 ? dt : default_dt(field);
}

double resolve_horizon(const VectorFieldSpec& field, double horizon) {
  return horizon > 0.0 ? horizon : 20.0 / std::max(field.delta, 1e-9);
}

double norm_power(double x, double p) { return std::pow(x, p); }

/// job indexing: keep prerun (stationary starts) streams disjoint from the
/// shared main-run streams per epsilon
constexpr std::uint64_t kPrerunJobOffset = 1000;
constexpr std::uint64_t kMainJobOffset = 2000;
constexpr std::uint64_t kAuxJobOffset = 3000;

Eigen::MatrixXd stationary_starts(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                  double epsilon, int n, const SimulationBudget& budget,
                                  std::uint64_t job) {
  SimOptions opts;
  opts.dt = resolve_dt(field, budget.dt);
  opts.n_traj = n;
  opts.master_seed = budget.seed;
  opts.job_index = kPrerunJobOffset + job;
  const double horizon = resolve_horizon(field, budget.horizon);
  const auto batches = integrate_sde(field, triplet,
                                     Eigen::VectorXd::Zero(field.dim), epsilon, {horizon}, opts);
  return batches.back().states;
}

WpEstimate distance_between(const Eigen::MatrixXd& cloud_a, const Eigen::MatrixXd& cloud_b,
                            double p, const SimulationBudget& budget, std::uint64_t salt) {
  WpEstimateOptions wopts;
  wopts.size_cap = budget.wp_cap;
  wopts.reps = budget.wp_reps;
  wopts.seed = budget.seed ^ (salt * 0x9E3779B97F4A7C15ull);
  return wp_estimate(EmpiricalMeasure(cloud_a), EmpiricalMeasure(cloud_b), p, wopts);
}

}  // namespace

void validate_schedule(const CutoffSchedule& schedule, double p_star, double q, int ell) {
  if (schedule.epsilons.empty()) throw ConfigInvalid("schedule: empty epsilon list");
  for (std::size_t i = 1; i < schedule.epsilons.size(); ++i) {
    if (!(schedule.epsilons[i] < schedule.epsilons[i - 1])) {
      throw ConfigInvalid("schedule: epsilons must be strictly decreasing");
    }
  }
  for (double eps : schedule.epsilons) {
    if (!(eps > 0.0) || eps >= 1.0) {
      throw ConfigInvalid("schedule: epsilons must lie in (0,1)");
    }
  }
  for (std::size_t i = 1; i < schedule.epsilons.size(); ++i) {
    if (!(cutoff_time(q, ell, schedule.epsilons[i]) >
          cutoff_time(q, ell, schedule.epsilons[i - 1]))) {
      throw ConfigInvalid("schedule: cutoff times must increase along the epsilon list");
    }
  }
  if (!(schedule.w > 0.0)) throw ConfigInvalid("schedule: window size w must be positive");
  if (!(schedule.p > 0.0)) throw ConfigInvalid("schedule: p must be positive");
  if (!(schedule.p < p_star)) {
    throw ConfigInvalid("schedule: requires p < p_star (the declared finite moment order "
                        "of the noise)");
  }
}

double cutoff_time(double q, int ell, double epsilon) {
  const double log_term = std::abs(std::log(epsilon));
  return log_term / q + (ell - 1) * std::log(log_term) / q;
}

double kappa_profile(const CutoffParams& params, double r, double w) {
  return std::exp(params.q * (params.tau - r * w)) * std::pow(params.q, 1 - params.ell);
}

EmpiricalMeasure estimate_invariant_measure(const VectorFieldSpec& field,
                                            const LevyTriplet& triplet, double epsilon,
                                            InvariantMethod method, int n, double horizon,
                                            std::uint64_t seed, double dt) {
  SimOptions opts;
  opts.dt = resolve_dt(field, dt);
  opts.master_seed = seed;
  opts.job_index = kPrerunJobOffset;
  return EmpiricalMeasure(invariant_measure_samples(field, triplet, epsilon, method, n,
                                                    resolve_horizon(field, horizon), opts));
}

ErgodicReport ergodic_decay_check(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                  double epsilon, const Eigen::VectorXd& x0, double p,
                                  const std::vector<double>& time_grid,
                                  const SimulationBudget& budget) {
  const double p_eff = std::min(1.0, p);
  SimOptions opts;
  opts.dt = resolve_dt(field, budget.dt);
  opts.n_traj = budget.n_traj;
  opts.master_seed = budget.seed;
  opts.job_index = kMainJobOffset;

  const Eigen::MatrixXd starts =
      stationary_starts(field, triplet, epsilon, budget.n_traj, budget, 0);
  const Eigen::MatrixXd starts_b =
      stationary_starts(field, triplet, epsilon, budget.n_traj, budget, 1);

  const auto state_batches = integrate_sde(field, triplet, x0, epsilon, time_grid, opts);
  const auto stationary_batches =
      integrate_sde_from(field, triplet, starts, epsilon, time_grid, opts);

  // moment of mu_hat and the self-calibrated same-law floor
  const double mu_moment = empirical_moment(starts, p_eff);
  const double floor = distance_between(starts, starts_b, p, budget, 17).value;

  ErgodicReport report;
  report.tolerance = 3.0 * floor;
  report.pass = true;
  for (std::size_t k = 0; k < state_batches.size(); ++k) {
    ErgodicPoint point;
    point.t = state_batches[k].time;
    point.wp = distance_between(state_batches[k].states, stationary_batches[k].states, p,
                                budget, 100 + k).value;
    point.bound = std::exp(-p_eff * field.delta * point.t) *
                  (norm_power(x0.norm(), p_eff) + mu_moment);
    if (point.wp > point.bound + report.tolerance) report.pass = false;
    report.points.push_back(point);
  }
  return report;
}

ProfileVerdict profile_verdict(const CutoffParams& params, double p,
                               const EmpiricalMeasure* o_inf, std::uint64_t seed) {
  ProfileVerdict verdict;
  double theta_min = 0.0;
  for (double theta : params.positive_angles()) {
    theta_min = theta_min == 0.0 ? theta : std::min(theta_min, theta);
  }
  const double t_max = theta_min > 0.0 ? std::max(200.0, 400.0 * M_PI / theta_min) : 200.0;
  const OmegaLimitSet omega = omega_limit_set(params, t_max, 4096, 1e-6);
  verdict.omega_sphere = omega.is_sphere;
  verdict.omega_radius = omega.radius;
  verdict.omega_min_norm = omega.min_norm;
  verdict.omega_max_norm = omega.max_norm;
  verdict.non_resonant = !non_resonance_check(params.positive_angles(), 20, 1e-9).resonant;
  verdict.normal_growth = normal_growth_check(params, 1e-9);
  verdict.convention_note =
      "non-resonance read as: no nontrivial integer combination of the positive angles lies "
      "in 2*pi*Z; the displayed for-all form is unsatisfiable for generic angles";

  if (p >= 1.0) {
    verdict.granted = verdict.omega_sphere;
    return verdict;
  }
  // p < 1: Monte Carlo constancy of u -> W_p(lambda u + O_inf, O_inf)
  if (omega.max_norm - omega.min_norm <= 1e-9 * std::max(omega.max_norm, 1e-300) &&
      params.m == 1) {
    verdict.granted = true;  // omega is a single point
    return verdict;
  }
  if (o_inf == nullptr) {
    verdict.granted = verdict.omega_sphere;
    return verdict;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, stderr_acc = 0.0;
  int count = 0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (int j = 0; j < 4; ++j) {
      const Eigen::Index row = (omega.samples.rows() - 1) * j / 3;
      const Eigen::VectorXd u = omega.samples.row(row);
      EmpiricalMeasure shifted(o_inf->points.rowwise() + (lambda * u).transpose(),
                               o_inf->weights);
      WpEstimateOptions wopts;
      wopts.seed = seed ^ static_cast<std::uint64_t>(j * 41 + static_cast<int>(lambda * 4));
      const WpEstimate est = wp_estimate(shifted, *o_inf, p, wopts);
      lo = std::min(lo, est.value);
      hi = std::max(hi, est.value);
      stderr_acc += est.stderr_;
      ++count;
    }
  }
  const double joint = stderr_acc / count;
  verdict.granted = (hi - lo) <= 3.0 * joint * std::sqrt(2.0);
  return verdict;
}

std::vector<ProfilePoint> theoretical_profile(const CutoffParams& params, double p, double w,
                                              const std::vector<double>& r_grid,
                                              const ProfileVerdict& verdict,
                                              const EmpiricalMeasure* o_inf,
                                              std::uint64_t seed) {
  if (!verdict.granted) {
    throw NoProfile("profile verdict is negative: only window cutoff holds");
  }
  std::vector<ProfilePoint> points;
  points.reserve(r_grid.size());
  if (p >= 1.0) {
    for (double r : r_grid) {
      points.push_back({r, kappa_profile(params, r, w) * verdict.omega_radius, 0.0});
    }
    return points;
  }
  if (o_inf == nullptr) {
    throw NoProfile("p < 1 profile needs a sample of O_inf for the Monte Carlo evaluation");
  }
  const Eigen::VectorXd v = params.rotating_sum(0.0);  // representative omega point
  for (double r : r_grid) {
    const double kappa = kappa_profile(params, r, w);
    EmpiricalMeasure shifted(o_inf->points.rowwise() + (kappa * v).transpose(), o_inf->weights);
    WpEstimateOptions wopts;
    wopts.seed = seed ^ static_cast<std::uint64_t>(std::llround(r * 1e6));
    const WpEstimate est = wp_estimate(shifted, *o_inf, p, wopts);
    points.push_back({r, est.value, est.stderr_});
  }
  return points;
}

CutoffCurve cutoff_curve(const VectorFieldSpec& field, const LevyTriplet& triplet,
                         const Eigen::VectorXd& x0, const CutoffSchedule& schedule,
                         const CutoffParams& params, const SimulationBudget& budget,
                         const std::vector<ProfilePoint>* theory) {
  validate_schedule(schedule, triplet.p_star, params.q, params.ell);
  if (x0.norm() == 0.0) throw ConfigInvalid("cutoff_curve: x0 must be nonzero");
  const double p_exp = std::min(1.0, schedule.p);

  CutoffCurve curve;
  curve.p = schedule.p;
  curve.w = schedule.w;

  for (std::size_t e = 0; e < schedule.epsilons.size(); ++e) {
    const double eps = schedule.epsilons[e];
    const double t_eps = cutoff_time(params.q, params.ell, eps);
    std::vector<double> times;
    times.reserve(schedule.r_grid.size());
    for (double r : schedule.r_grid) times.push_back(std::max(0.0, t_eps + r * schedule.w));
    std::sort(times.begin(), times.end());

    SimOptions opts;
    opts.dt = resolve_dt(field, budget.dt);
    opts.n_traj = budget.n_traj;
    opts.master_seed = budget.seed;
    opts.job_index = kMainJobOffset + e;

    const Eigen::MatrixXd starts =
        stationary_starts(field, triplet, eps, budget.n_traj, budget, e);
    const auto state_batches = integrate_sde(field, triplet, x0, eps, times, opts);
    const auto stationary_batches =
        integrate_sde_from(field, triplet, starts, eps, times, opts);

    for (std::size_t k = 0; k < schedule.r_grid.size(); ++k) {
      const double r = schedule.r_grid[k];
      const double t_requested = std::max(0.0, t_eps + r * schedule.w);
      // match the sorted simulation output to this r
      const auto it = std::min_element(
          state_batches.begin(), state_batches.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.time - t_requested) < std::abs(b.time - t_requested);
          });
      const std::size_t idx = static_cast<std::size_t>(it - state_batches.begin());
      const WpEstimate est =
          distance_between(state_batches[idx].states, stationary_batches[idx].states,
                           schedule.p, budget, 1000 * (e + 1) + k);
      CurveEntry entry;
      entry.epsilon = eps;
      entry.r = r;
      entry.t = state_batches[idx].time;
      entry.wp_ratio = est.value / std::pow(eps, p_exp);
      entry.stderr_ = est.stderr_ / std::pow(eps, p_exp);
      if (theory != nullptr) {
        for (const auto& point : *theory) {
          if (std::abs(point.r - r) < 1e-12) entry.theory = point.value;
        }
      }
      curve.entries.push_back(entry);
    }
  }
  return curve;
}

ProfileFit profile_fit(const CutoffCurve& curve) {
  if (curve.entries.empty()) throw InsufficientSignal("profile_fit: empty curve");
  double eps_min = std::numeric_limits<double>::infinity();
  for (const auto& entry : curve.entries) eps_min = std::min(eps_min, entry.epsilon);

  std::vector<double> xs, ys;
  for (const auto& entry : curve.entries) {
    if (entry.epsilon == eps_min && entry.wp_ratio > 3.0 * entry.stderr_ &&
        entry.wp_ratio > 0.0) {
      xs.push_back(entry.r * curve.w);
      ys.push_back(std::log(entry.wp_ratio));
    }
  }
  if (xs.size() < 4) {
    throw InsufficientSignal("profile_fit: need at least 4 r-points above the noise floor");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double y_mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = intercept + slope * xs[i];
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
  }
  ProfileFit fit;
  fit.q_hat = -slope;
  fit.c_hat = std::exp(intercept);
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points_used = static_cast<int>(xs.size());
  return fit;
}

std::vector<MomentEntry> moments_cutoff(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                        const Eigen::VectorXd& x0, const CutoffSchedule& schedule,
                                        const CutoffParams& params,
                                        const SimulationBudget& budget) {
  validate_schedule(schedule, triplet.p_star, params.q, params.ell);
  std::vector<MomentEntry> entries;
  for (std::size_t e = 0; e < schedule.epsilons.size(); ++e) {
    const double eps = schedule.epsilons[e];
    const double t_eps = cutoff_time(params.q, params.ell, eps);
    std::vector<double> times;
    for (double r : schedule.r_grid) times.push_back(std::max(0.0, t_eps + r * schedule.w));
    std::sort(times.begin(), times.end());

    SimOptions opts;
    opts.dt = resolve_dt(field, budget.dt);
    opts.n_traj = budget.n_traj;
    opts.master_seed = budget.seed;
    opts.job_index = kAuxJobOffset + e;
    const auto batches = integrate_sde(field, triplet, x0, eps, times, opts);

    for (std::size_t k = 0; k < schedule.r_grid.size(); ++k) {
      const double r = schedule.r_grid[k];
      const double t_requested = std::max(0.0, t_eps + r * schedule.w);
      const auto it = std::min_element(
          batches.begin(), batches.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.time - t_requested) < std::abs(b.time - t_requested);
          });
      MomentEntry entry;
      entry.epsilon = eps;
      entry.r = r;
      entry.t = it->time;
      const Eigen::MatrixXd& states = it->states;
      const double denom = std::pow(eps, schedule.p);
      double mean = 0.0, mean_sq = 0.0;
      const double n = static_cast<double>(states.rows());
      for (Eigen::Index i = 0; i < states.rows(); ++i) {
        const double value = std::pow(states.row(i).norm(), schedule.p) / denom;
        mean += value;
        mean_sq += value * value;
      }
      mean /= n;
      mean_sq /= n;
      entry.moment_ratio = mean;
      entry.stderr_ = std::sqrt(std::max(mean_sq - mean * mean, 0.0) / n);
      entries.push_back(entry);
    }
  }
  return entries;
}

std::vector<FwErrorEntry> fw_error_decay(const VectorFieldSpec& field, const LevyTriplet& triplet,
                                         const Eigen::VectorXd& x0,
                                         const CutoffSchedule& schedule,
                                         const CutoffParams& params,
                                         const SimulationBudget& budget) {
  validate_schedule(schedule, triplet.p_star, params.q, params.ell);
  const double p = schedule.p;
  const double p_exp = std::min(1.0, p);
  const double horizon = resolve_horizon(field, budget.horizon);

  std::vector<FwErrorEntry> entries;
  for (std::size_t e = 0; e < schedule.epsilons.size(); ++e) {
    const double eps = schedule.epsilons[e];
    const double t_eps = cutoff_time(params.q, params.ell, eps);

    SimOptions opts;
    opts.dt = resolve_dt(field, budget.dt);
    opts.n_traj = budget.n_traj;
    opts.master_seed = budget.seed;
    opts.job_index = kAuxJobOffset + 100 + e;

    // coupled pathwise X-vs-Y moment at t_eps (domination bound on W_p)
    const CoupledMoments coupled =
        coupled_difference(field, triplet, x0, eps, t_eps, opts, {p});
    const double delta_moment = coupled.delta_moments.at(p);
    const double wp_xy =
        p >= 1.0 ? std::pow(delta_moment, 1.0 / p) : delta_moment;

    // mu^eps vs eps O_inf on shared streams
    SimOptions mu_opts = opts;
    mu_opts.job_index = kAuxJobOffset + 200 + e;
    const auto mu_batches = integrate_sde(field, triplet, Eigen::VectorXd::Zero(field.dim), eps,
                                          {horizon}, mu_opts);
    const auto ou_batches = integrate_ou(field, triplet, Eigen::VectorXd::Zero(field.dim),
                                         {horizon}, mu_opts);
    const Eigen::MatrixXd scaled_ou = eps * ou_batches.back().states;
    const WpEstimate mu_est =
        distance_between(scaled_ou, mu_batches.back().states, p, budget, 5000 + e);

    FwErrorEntry entry;
    entry.epsilon = eps;
    entry.t = t_eps;
    entry.wp_xy_over_eps = wp_xy / std::pow(eps, p_exp);
    entry.wp_mu_over_eps = mu_est.value / std::pow(eps, p_exp);
    entries.push_back(entry);
  }
  return entries;
}

std::vector<CollapsePoint> epsilon_collapse(const CutoffCurve& curve, double rel_tol) {
  std::vector<double> epsilons;
  for (const auto& entry : curve.entries) {
    if (std::find(epsilons.begin(), epsilons.end(), entry.epsilon) == epsilons.end()) {
      epsilons.push_back(entry.epsilon);
    }
  }
  std::sort(epsilons.begin(), epsilons.end());
  if (epsilons.size() < 2) return {};
  const double eps_a = epsilons[0], eps_b = epsilons[1];

  std::vector<CollapsePoint> points;
  for (const auto& entry : curve.entries) {
    if (entry.epsilon != eps_a) continue;
    for (const auto& other : curve.entries) {
      if (other.epsilon == eps_b && std::abs(other.r - entry.r) < 1e-12) {
        CollapsePoint point;
        point.r = entry.r;
        point.diff = std::abs(entry.wp_ratio - other.wp_ratio);
        point.joint_stderr = std::sqrt(entry.stderr_ * entry.stderr_ +
                                       other.stderr_ * other.stderr_);
        const double scale = std::max(std::abs(entry.wp_ratio), std::abs(other.wp_ratio));
        point.within =
            point.diff <= std::max(3.0 * point.joint_stderr, rel_tol * scale);
        points.push_back(point);
      }
    }
  }
  return points;
}

double oscillation_score(const CutoffCurve& curve, double r, double rel_tol) {
  std::vector<const CurveEntry*> at_r;
  for (const auto& entry : curve.entries) {
    if (std::abs(entry.r - r) < 1e-12) at_r.push_back(&entry);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < at_r.size(); ++i) {
    for (std::size_t j = i + 1; j < at_r.size(); ++j) {
      const double joint = std::sqrt(at_r[i]->stderr_ * at_r[i]->stderr_ +
                                     at_r[j]->stderr_ * at_r[j]->stderr_);
      const double scale =
          std::max(std::abs(at_r[i]->wp_ratio), std::abs(at_r[j]->wp_ratio));
      const double denom = std::max(joint, rel_tol * scale / 3.0);
      if (denom > 0.0) {
        worst = std::max(worst, std::abs(at_r[i]->wp_ratio - at_r[j]->wp_ratio) / denom);
      }
    }
  }
  return worst;
}

}  // namespace cutofflab
