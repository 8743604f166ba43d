// Acceptance suite. Each criterion prints exactly one PASS/FAIL line; the
// exit status is the number of failed criteria. Tolerances are pinned in
// code next to each check.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cutofflab/config.hpp"
#include "cutofflab/experiments.hpp"
#include "cutofflab/rng.hpp"
#include "support/oracles.hpp"

using namespace cutofflab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run_criterion(int index, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& err) {
    pass = false;
    detail = std::string("exception: ") + err.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(index, name, pass, detail, seconds);
}

VectorXd scalar(double x) {
  VectorXd v(1);
  v << x;
  return v;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

MatrixXd random_cloud(int n, int d, std::uint64_t key, double shift = 0.0) {
  RngStream rng(key, 0, 0);
  MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) pts(i, j) = shift + rng.normal();
  }
  return pts;
}

// ---- criterion 1: gaussian linear oracle, end to end ----

std::pair<bool, std::string> criterion_gaussian_oracle() {
  const double q = 1.0, x0 = 1.0;
  const auto field = linear_field(q * MatrixXd::Identity(1, 1));
  const auto triplet = brownian_triplet(1);
  CutoffSchedule schedule;
  schedule.epsilons = {0.1, 0.05, 0.025};
  schedule.r_grid = {-3, -2, -1, 0, 1, 2, 3, 4, 5};
  schedule.w = 1.0;
  schedule.p = 2.0;
  SimulationBudget budget;
  budget.n_traj = 100000;
  budget.dt = 2e-3;
  budget.seed = 101;

  const auto params = linear_cutoff_params(q * MatrixXd::Identity(1, 1), scalar(x0));
  const auto curve = cutoff_curve(field, triplet, scalar(x0), schedule, params, budget);

  double worst = 0.0, worst_r = 0.0, worst_eps = 0.0;
  for (const auto& entry : curve.entries) {
    const double mean = std::exp(-q * entry.t) * x0 / entry.epsilon;
    const double sd_t = std::sqrt(oracles::ou_variance(1.0, q, entry.t));
    const double sd_inf = 1.0 / std::sqrt(2.0 * q);
    const double oracle = oracles::gaussian_w2(mean, sd_t, 0.0, sd_inf);
    const double rel = std::abs(entry.wp_ratio - oracle) / oracle;
    if (rel > worst) {
      worst = rel;
      worst_r = entry.r;
      worst_eps = entry.epsilon;
    }
  }
  return {worst <= 0.05, "max rel err " + fmt(worst) + " at (eps=" + fmt(worst_eps) +
                             ", r=" + fmt(worst_r) + "), tol 5%"};
}

// ---- criterion 2: fput profile cutoff in d = 1, 2 ----

// Relative tolerance floor for comparisons against the eps -> 0 profile.
// Pilot-calibrated: at eps = 0.025, dt = 2e-3 the residual finite-eps
// deviation measured by differencing the two smallest epsilons stays below
// 3%; coupled estimators resolve it far beyond their statistical stderr, so
// a pure 3-sigma comparison against the asymptotic limit is unattainable
// for any consistent estimator.
constexpr double kProfileRelTol = 0.04;

std::pair<bool, std::string> criterion_fput_profile() {
  std::string detail;
  bool all_pass = true;
  for (int dim : {1, 2}) {
    const auto field = fput_field(dim);
    const auto triplet = brownian_triplet(dim);
    VectorXd x0 = VectorXd::Zero(dim);
    x0[0] = 1.0;
    CutoffSchedule schedule;
    schedule.epsilons = {0.05, 0.025};
    schedule.r_grid = {-2, -1, 0, 1, 2, 3, 4};
    schedule.w = 1.0;
    schedule.p = 2.0;
    SimulationBudget budget;
    budget.n_traj = dim == 1 ? 40000 : 30000;
    budget.dt = 2e-3;
    budget.seed = 202 + dim;

    const double r0 = default_domain_radius(field);
    const auto params = nonlinear_cutoff_params(field, x0, r0);
    const auto verdict = profile_verdict(params, schedule.p);
    if (!verdict.granted) return {false, "profile unexpectedly denied"};
    const auto theory =
        theoretical_profile(params, schedule.p, schedule.w, schedule.r_grid, verdict);
    const auto curve = cutoff_curve(field, triplet, x0, schedule, params, budget, &theory);

    const auto fit = profile_fit(curve);
    const bool fit_ok = std::abs(fit.q_hat - 1.0) <= 0.1;

    double worst_dev = 0.0;
    bool match_ok = true;
    for (const auto& entry : curve.entries) {
      if (entry.epsilon != 0.025 || !entry.theory) continue;
      const double dev = std::abs(entry.wp_ratio - *entry.theory);
      const double tol = std::max(3.0 * entry.stderr_, kProfileRelTol * *entry.theory);
      worst_dev = std::max(worst_dev, dev / *entry.theory);
      match_ok = match_ok && dev <= tol;
    }
    bool collapse_ok = true;
    for (const auto& point : epsilon_collapse(curve, kProfileRelTol)) {
      collapse_ok = collapse_ok && point.within;
    }

    const bool pass = fit_ok && match_ok && collapse_ok;
    all_pass = all_pass && pass;
    detail += "d" + std::to_string(dim) + ": q_hat=" + fmt(fit.q_hat) + " worst dev=" +
              fmt(100.0 * worst_dev) + "% (tol 4%) collapse=" +
              (collapse_ok ? "ok" : "FAIL") + "  ";
  }
  return {all_pass, detail};
}

// ---- criterion 3: shift linearity on builtin laws ----

std::pair<bool, std::string> criterion_shift_linearity() {
  const int n = 2048;
  RngStream rng(derive_stream_key(303, 1, 1), 0, 0);
  std::vector<MatrixXd> laws;
  laws.push_back(random_cloud(n, 1, 3031));
  laws.push_back(random_cloud(n, 2, 3032));
  {
    MatrixXd pts(n, 2);  // uniform square
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = 2.0 * rng.uniform() - 1.0;
      pts(i, 1) = 2.0 * rng.uniform() - 1.0;
    }
    laws.push_back(pts);
  }
  {
    MatrixXd pts = random_cloud(n, 2, 3033);  // bimodal
    for (int i = 0; i < n; i += 2) pts.row(i).array() += 3.0;
    laws.push_back(pts);
  }
  {
    MatrixXd pts(n, 1);  // centered exponential
    for (int i = 0; i < n; ++i) pts(i, 0) = rng.exponential() - 1.0;
    laws.push_back(pts);
  }

  const std::vector<std::pair<double, double>> shifts{
      {1.5, 0.0}, {0.0, 2.0}, {0.6, 0.8}, {0.1, 0.0}, {-2.0, 0.5}};

  int checked = 0, passed = 0;
  for (const auto& law : laws) {
    EmpiricalMeasure mu(law);
    for (const auto& [sx, sy] : shifts) {
      VectorXd u = VectorXd::Zero(mu.dim());
      u[0] = sx;
      if (mu.dim() > 1) u[1] = sy;
      else u[0] = (sx == 0.0 ? sy : sx);
      for (double p : {1.0, 2.0, 0.5}) {
        const auto report = verify_shift_linearity(mu, u, p);
        ++checked;
        if (report.pass) ++passed;
      }
    }
  }
  return {checked == passed,
          std::to_string(passed) + "/" + std::to_string(checked) + " instances in bounds"};
}

// ---- criterion 4: exact transport equals factorial brute force ----

std::pair<bool, std::string> criterion_brute_force() {
  RngStream rng(404, 0, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 6.0);
    const int d = 1 + static_cast<int>(rng.uniform() * 3.0);
    MatrixXd a(n, d), b(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
      }
    }
    for (double p : {0.5, 1.0, 2.0}) {
      MatrixXd cost(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          cost(i, j) = std::pow((a.row(i) - b.row(j)).norm(), p);
        }
      }
      const double brute = oracles::brute_force_assignment(cost) / n;
      const double expected = p >= 1.0 ? std::pow(brute, 1.0 / p) : brute;
      const double solved = wp_assignment(EmpiricalMeasure(a), EmpiricalMeasure(b), p).value;
      worst = std::max(worst, std::abs(solved - expected));
    }
  }
  return {worst <= 1e-12, "max |assignment - brute force| = " + fmt(worst)};
}

// ---- criterion 5: spectral extraction suite ----

std::pair<bool, std::string> criterion_spectral_suite() {
  struct Case {
    MatrixXd a;
    VectorXd w;
    double q;
    int ell;
    int m;
    std::vector<double> abs_thetas;
    bool defective;
  };
  std::vector<Case> suite;
  {
    MatrixXd a = MatrixXd::Identity(2, 2);
    suite.push_back({a, Eigen::Vector2d(1, 0), 1.0, 1, 1, {0.0}, false});
  }
  {
    MatrixXd a(2, 2);
    a << 1, 0, 0, 2;
    suite.push_back({a, Eigen::Vector2d(1, 1), 1.0, 1, 1, {0.0}, false});
    suite.push_back({a, Eigen::Vector2d(0, 1), 2.0, 1, 1, {0.0}, false});
  }
  {
    MatrixXd a(2, 2);
    a << 1, 2, -2, 1;
    suite.push_back({a, Eigen::Vector2d(1, 0), 1.0, 1, 2, {2.0, 2.0}, false});
  }
  {
    MatrixXd a(2, 2);
    a << 1, 1, 0, 1;
    suite.push_back({a, Eigen::Vector2d(0, 1), 1.0, 2, 1, {0.0}, true});
    suite.push_back({a, Eigen::Vector2d(1, 0), 1.0, 1, 1, {0.0}, false});
  }
  {
    MatrixXd a(3, 3);
    a << 1, 1, 0, 0, 1, 1, 0, 0, 1;
    suite.push_back({a, Eigen::Vector3d(0, 0, 1), 1.0, 3, 1, {0.0}, true});
  }
  {
    MatrixXd a(3, 3);
    a << 1, 1, 0, 0, 1, 0, 0, 0, 2;
    suite.push_back({a, Eigen::Vector3d(0, 1, 1), 1.0, 2, 1, {0.0}, true});
  }
  {
    MatrixXd a(3, 3);
    a << 1, 2, 0, -2, 1, 0, 0, 0, 0.5;
    suite.push_back({a, Eigen::Vector3d(1, 1, 1), 0.5, 1, 1, {0.0}, false});
  }
  {
    MatrixXd a(4, 4);
    a << 1, 1, 1, 0, -1, 1, 0, 1, 0, 0, 1, 1, 0, 0, -1, 1;
    VectorXd w(4);
    w << 0, 0, 1, 0;
    suite.push_back({a, w, 1.0, 2, 2, {1.0, 1.0}, true});
  }

  int index = 0;
  for (const auto& test : suite) {
    ++index;
    const auto params = linear_cutoff_params(test.a, test.w);
    if (std::abs(params.q - test.q) > 1e-9 || params.ell != test.ell || params.m != test.m) {
      return {false, "case " + std::to_string(index) + ": got (q=" + fmt(params.q) + ", ell=" +
                         std::to_string(params.ell) + ", m=" + std::to_string(params.m) + ")"};
    }
    std::vector<double> got;
    for (double theta : params.thetas) got.push_back(std::abs(theta));
    std::sort(got.begin(), got.end());
    std::vector<double> want = test.abs_thetas;
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < want.size(); ++k) {
      if (std::abs(got[k] - want[k]) > 1e-9) {
        return {false, "case " + std::to_string(index) + ": wrong angles"};
      }
    }
    const double t_max = 60.0;
    std::vector<double> grid;
    for (int i = 1; i <= 60; ++i) grid.push_back(t_max * i / 60.0);
    const double residual = verify_hg_limit(params, test.a, test.w, grid);
    const double bound = test.defective ? 10.0 / t_max : 1e-6;
    if (residual > bound) {
      return {false, "case " + std::to_string(index) + ": residual " + fmt(residual) +
                         " > " + fmt(bound)};
    }
  }
  return {true, "10/10 matrices: discrete data exact, residuals in bounds"};
}

// ---- criterion 6: oscillator dichotomy ----

std::pair<bool, std::string> criterion_oscillator() {
  MatrixXd noise_sqrt(2, 1);
  noise_sqrt << 0.0, 1.0;
  const auto triplet = brownian_triplet(noise_sqrt);
  VectorXd x0(2);
  x0 << 1.0, 0.0;

  // profile case: a = b = 1, c = 0, eta0 = 2 (pure rotation)
  const auto rotating = oscillator_field(oscillator_params(1.0, 1.0, 0.0, 2.0));
  CutoffSchedule schedule;
  schedule.epsilons = {0.05, 0.025};
  schedule.r_grid = {-2, -1, 0, 1, 2, 3, 4};
  schedule.w = 1.0;
  schedule.p = 2.0;
  SimulationBudget budget;
  budget.n_traj = 40000;
  budget.dt = 2e-3;
  budget.seed = 606;

  const auto params = nonlinear_cutoff_params(rotating, x0, default_domain_radius(rotating));
  const auto verdict = profile_verdict(params, schedule.p);
  if (!(verdict.granted && verdict.omega_sphere && verdict.normal_growth)) {
    return {false, "rotation case: profile wrongly denied"};
  }
  const auto theory =
      theoretical_profile(params, schedule.p, schedule.w, schedule.r_grid, verdict);
  const auto curve = cutoff_curve(rotating, triplet, x0, schedule, params, budget, &theory);
  double worst_dev = 0.0;
  bool match_ok = true;
  for (const auto& entry : curve.entries) {
    if (entry.epsilon != 0.025 || !entry.theory) continue;
    const double dev = std::abs(entry.wp_ratio - *entry.theory);
    const double tol = std::max(3.0 * entry.stderr_, kProfileRelTol * *entry.theory);
    worst_dev = std::max(worst_dev, dev / *entry.theory);
    match_ok = match_ok && dev <= tol;
  }

  // window-only case: a = 1, b = 2 breaks the equal-norm condition
  const auto lopsided = oscillator_field(oscillator_params(1.0, 2.0, 0.0, 2.0));
  const auto broken_params =
      nonlinear_cutoff_params(lopsided, x0, default_domain_radius(lopsided));
  const auto broken_verdict = profile_verdict(broken_params, schedule.p);
  if (broken_verdict.granted || broken_verdict.normal_growth) {
    return {false, "lopsided case: profile wrongly granted"};
  }
  CutoffSchedule osc_schedule;
  osc_schedule.epsilons = {0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
  osc_schedule.r_grid = {0.0};
  osc_schedule.w = 1.0;
  osc_schedule.p = 2.0;
  SimulationBudget osc_budget;
  osc_budget.n_traj = 30000;
  osc_budget.dt = 2e-3;
  osc_budget.seed = 607;
  const auto broken_curve =
      cutoff_curve(lopsided, triplet, x0, osc_schedule, broken_params, osc_budget);
  const double score = oscillation_score(broken_curve, 0.0, kProfileRelTol);

  const bool pass = match_ok && score > 3.0;
  return {pass, "profile case worst dev=" + fmt(100.0 * worst_dev) +
                    "% (tol 4%); oscillation score=" + fmt(score) + " (needs > 3)"};
}

// ---- criterion 7: coupled moment scaling and FW error decay ----

std::pair<bool, std::string> criterion_moment_scaling() {
  const auto field = fput_field(1);
  const auto triplet = brownian_triplet(1);
  SimOptions opts;
  opts.dt = 2e-3;
  opts.n_traj = 40000;
  opts.master_seed = 707;

  const std::vector<double> eps_list{0.1, 0.05, 0.025};
  std::vector<double> theta2;
  for (double eps : eps_list) {
    theta2.push_back(
        coupled_difference(field, triplet, scalar(1.0), eps, 1.0, opts, {2.0})
            .theta_moments.at(2.0));
  }
  const double slope =
      std::log(theta2.front() / theta2.back()) / std::log(eps_list.front() / eps_list.back());
  const bool slope_ok = std::abs(slope - 2.0) <= 0.1;

  CutoffSchedule schedule;
  schedule.epsilons = {0.1, 0.025};
  schedule.r_grid = {0.0};
  schedule.p = 2.0;
  SimulationBudget budget;
  budget.n_traj = 40000;
  budget.dt = 2e-3;
  budget.seed = 708;
  CutoffParams params;
  params.q = 1.0;
  params.ell = 1;
  params.m = 1;
  params.thetas = {0.0};
  params.vs = {scalar(1.0).cast<std::complex<double>>()};
  const auto entries = fw_error_decay(field, triplet, scalar(1.0), schedule, params, budget);
  const double decay = entries.front().wp_xy_over_eps / entries.back().wp_xy_over_eps;
  const bool decay_ok = decay >= 2.0;

  return {slope_ok && decay_ok,
          "log-log slope=" + fmt(slope) + " (2 +- 0.1); FW error decay x" + fmt(decay) +
              " (needs >= 2)"};
}

// ---- criterion 8: ergodic decay bound ----

std::pair<bool, std::string> criterion_ergodic_bound() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.5 * k);
  SimulationBudget budget;
  budget.n_traj = 30000;
  budget.dt = 2e-3;
  budget.seed = 808;

  const auto linear = linear_field(MatrixXd::Identity(1, 1));
  const auto report_linear =
      ergodic_decay_check(linear, brownian_triplet(1), 0.1, scalar(1.0), 2.0, grid, budget);

  const auto fput = fput_field(1);
  const auto report_fput =
      ergodic_decay_check(fput, brownian_triplet(1), 0.1, scalar(1.0), 2.0, grid, budget);

  return {report_linear.pass && report_fput.pass,
          std::string("linear: ") + (report_linear.pass ? "below bound" : "VIOLATED") +
              ", fput: " + (report_fput.pass ? "below bound" : "VIOLATED")};
}

// ---- criterion 9: alpha-stable regimes ----

std::pair<bool, std::string> criterion_stable() {
  const auto field = linear_field(MatrixXd::Identity(1, 1));

  // alpha = 1.5, p = 1: explicit profile through shift linearity
  const auto heavy = stable_projected_triplet(1.5, 1.0, VectorXd::Ones(1), 1.4);
  CutoffSchedule schedule;
  schedule.epsilons = {0.05, 0.025};
  schedule.r_grid = {0, 1, 2, 3, 4};
  schedule.w = 1.0;
  schedule.p = 1.0;
  SimulationBudget budget;
  budget.n_traj = 60000;
  budget.dt = 2e-3;
  budget.seed = 909;
  const auto params = linear_cutoff_params(MatrixXd::Identity(1, 1), scalar(1.0));
  const auto curve = cutoff_curve(field, heavy, scalar(1.0), schedule, params, budget);
  double worst = 0.0;
  for (const auto& entry : curve.entries) {
    if (entry.epsilon != 0.025) continue;
    const double theory = kappa_profile(params, entry.r, schedule.w) * 1.0;
    worst = std::max(worst, std::abs(entry.wp_ratio - theory) / theory);
  }
  const bool heavy_ok = worst <= 0.10;

  // alpha = 0.8, p = 0.5: two-sided band around |kappa v|^{1/2}
  const auto cauchyish = stable_projected_triplet(0.8, 1.0, VectorXd::Ones(1), 0.7);
  CutoffSchedule low_schedule = schedule;
  low_schedule.p = 0.5;
  SimulationBudget low_budget = budget;
  low_budget.n_traj = 30000;
  low_budget.seed = 910;
  const auto low_curve =
      cutoff_curve(field, cauchyish, scalar(1.0), low_schedule, params, low_budget);

  SimOptions ou_opts;
  ou_opts.dt = 2e-3;
  ou_opts.n_traj = 30000;
  ou_opts.master_seed = 911;
  const auto o_inf =
      integrate_ou(field, cauchyish, VectorXd::Zero(1), {20.0}, ou_opts).back().states;
  const double o_moment = empirical_moment(o_inf, 0.5);

  bool band_ok = true;
  std::string band_detail;
  for (const auto& entry : low_curve.entries) {
    if (entry.epsilon != 0.025) continue;
    const double kappa_v = kappa_profile(params, entry.r, low_schedule.w) * 1.0;
    const double upper = std::pow(kappa_v, 0.5);
    const double lower = std::max(upper - 2.0 * o_moment, 0.0);
    const double tol = 3.0 * entry.stderr_ + 0.02;
    if (entry.wp_ratio > upper + tol || entry.wp_ratio < lower - tol) {
      band_ok = false;
      band_detail = " band miss at r=" + fmt(entry.r) + " (" + fmt(entry.wp_ratio) +
                    " vs [" + fmt(lower) + ", " + fmt(upper) + "])";
    }
  }
  return {heavy_ok && band_ok, "alpha=1.5 worst rel err " + fmt(worst) +
                                   " (tol 10%); alpha=0.8 band " +
                                   (band_ok ? "held" : "violated") + band_detail};
}

// ---- criterion 10: byte-identical reruns ----

std::pair<bool, std::string> criterion_determinism() {
  namespace fs = std::filesystem;
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const fs::path dir_a = fs::temp_directory_path() / "cutofflab_accept_a";
  const fs::path dir_b = fs::temp_directory_path() / "cutofflab_accept_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  nlohmann::json j;
  j["field"] = {{"name", "linear"}, {"dim", 1}, {"matrix", {{1.0}}}};
  j["noise"] = {{"family", "brownian"}};
  j["x0"] = {1.0};
  j["schedule"] = {{"epsilons", {0.2, 0.1}}, {"r_grid", {-1.0, 0.0, 1.0, 2.0, 3.0}},
                   {"w", 1.0}, {"p", 2.0}};
  j["sim"] = {{"n_traj", 2000}, {"dt", 0.01}};
  j["master_seed"] = 1010;
  j["output_dir"] = dir_a.string();
  const auto config_a = ExperimentConfig::from_json(j);
  j["output_dir"] = dir_b.string();
  const auto config_b = ExperimentConfig::from_json(j);

  run_experiment(config_a, "cutoff");
  run_experiment(config_b, "cutoff");
  const bool same_curve = slurp(dir_a / "curve.csv") == slurp(dir_b / "curve.csv");
  const bool same_verdict = slurp(dir_a / "verdict.json") == slurp(dir_b / "verdict.json");
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  return {same_curve && same_verdict, same_curve && same_verdict
                                          ? "curve.csv and verdict.json byte-identical"
                                          : "outputs differ between reruns"};
}

}  // namespace

int main() {
  std::printf("cutofflab acceptance suite\n");
  run_criterion(1, "gaussian linear oracle", criterion_gaussian_oracle);
  run_criterion(2, "fput profile cutoff", criterion_fput_profile);
  run_criterion(3, "shift linearity", criterion_shift_linearity);
  run_criterion(4, "exact OT vs brute force", criterion_brute_force);
  run_criterion(5, "spectral extraction suite", criterion_spectral_suite);
  run_criterion(6, "oscillator dichotomy", criterion_oscillator);
  run_criterion(7, "moment scaling + FW decay", criterion_moment_scaling);
  run_criterion(8, "ergodic decay bound", criterion_ergodic_bound);
  run_criterion(9, "alpha-stable regimes", criterion_stable);
  run_criterion(10, "rerun determinism", criterion_determinism);
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
