#include "cutofflab/config.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cutofflab {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) return {};
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json p_star_to_json(double p_star) {
  if (std::isinf(p_star)) return "inf";
  return p_star;
}

double p_star_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigInvalid("noise.p_star: expected a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  const json& field = j.at("field");
  c.field_name = field.at("name").get<std::string>();
  c.dim = field.value("dim", 1);
  if (field.contains("matrix")) c.linear_matrix = matrix_from_json(field.at("matrix"));
  c.osc_a = field.value("a", 1.0);
  c.osc_b = field.value("b", 1.0);
  c.osc_c = field.value("c", 0.0);
  c.osc_eta0 = field.value("eta0", 0.0);
  c.osc_quartic = field.value("quartic", 0.0);

  const json& noise = j.at("noise");
  c.noise_family = noise.at("family").get<std::string>();
  if (noise.contains("sigma_sqrt")) c.sigma_sqrt = matrix_from_json(noise.at("sigma_sqrt"));
  if (noise.contains("drift")) c.drift = vector_from_json(noise.at("drift"));
  if (noise.contains("p_star")) c.p_star = p_star_from_json(noise.at("p_star"));
  c.cpp_rate = noise.value("rate", 1.0);
  c.cpp_jump_scale = noise.value("jump_scale", 1.0);
  c.stable_alpha = noise.value("alpha", 1.5);
  c.stable_scale = noise.value("scale", 1.0);
  c.stable_mode = noise.value("mode", std::string("isotropic"));
  if (noise.contains("projection")) c.stable_projection = vector_from_json(noise.at("projection"));

  c.x0 = vector_from_json(j.at("x0"));
  const json& schedule = j.at("schedule");
  c.schedule.epsilons = schedule.at("epsilons").get<std::vector<double>>();
  c.schedule.r_grid = schedule.at("r_grid").get<std::vector<double>>();
  c.schedule.w = schedule.value("w", 1.0);
  c.schedule.p = schedule.value("p", 2.0);

  if (j.contains("sim")) {
    const json& sim = j.at("sim");
    c.n_traj = sim.value("n_traj", 20000);
    c.dt = sim.value("dt", 0.0);
    c.horizon = sim.value("horizon", 0.0);
    c.r0 = sim.value("r0", 0.0);
    if (sim.contains("times")) c.times = sim.at("times").get<std::vector<double>>();
  }
  c.master_seed = j.value("master_seed", std::uint64_t{1});
  c.output_dir = j.value("output_dir", std::string("out"));
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  json field;
  field["name"] = field_name;
  field["dim"] = dim;
  if (linear_matrix.size() > 0) field["matrix"] = matrix_to_json(linear_matrix);
  if (field_name == "oscillator") {
    field["a"] = osc_a;
    field["b"] = osc_b;
    field["c"] = osc_c;
    field["eta0"] = osc_eta0;
    field["quartic"] = osc_quartic;
  }
  j["field"] = field;

  json noise;
  noise["family"] = noise_family;
  if (sigma_sqrt.size() > 0) noise["sigma_sqrt"] = matrix_to_json(sigma_sqrt);
  if (drift.size() > 0) noise["drift"] = vector_to_json(drift);
  noise["p_star"] = p_star_to_json(p_star);
  if (noise_family == "cpp") {
    noise["rate"] = cpp_rate;
    noise["jump_scale"] = cpp_jump_scale;
  }
  if (noise_family == "stable") {
    noise["alpha"] = stable_alpha;
    noise["scale"] = stable_scale;
    noise["mode"] = stable_mode;
    if (stable_projection.size() > 0) noise["projection"] = vector_to_json(stable_projection);
  }
  j["noise"] = noise;

  j["x0"] = vector_to_json(x0);
  json schedule_json;
  schedule_json["epsilons"] = schedule.epsilons;
  schedule_json["r_grid"] = schedule.r_grid;
  schedule_json["w"] = schedule.w;
  schedule_json["p"] = schedule.p;
  j["schedule"] = schedule_json;

  json sim;
  sim["n_traj"] = n_traj;
  sim["dt"] = dt;
  sim["horizon"] = horizon;
  sim["r0"] = r0;
  if (!times.empty()) sim["times"] = times;
  j["sim"] = sim;
  j["master_seed"] = master_seed;
  j["output_dir"] = output_dir;
  return j;
}

VectorFieldSpec ExperimentConfig::make_field() const {
  if (field_name == "fput") return fput_field(dim);
  if (field_name == "linear") {
    if (linear_matrix.size() == 0) throw ConfigInvalid("field: linear needs a matrix");
    return linear_field(linear_matrix);
  }
  if (field_name == "oscillator") {
    return oscillator_field(oscillator_params(osc_a, osc_b, osc_c, osc_eta0, osc_quartic));
  }
  throw ConfigInvalid("field: unknown name '" + field_name + "'");
}

LevyTriplet ExperimentConfig::make_triplet() const {
  const int d = make_field().dim;
  LevyTriplet t;
  if (noise_family == "brownian") {
    t = sigma_sqrt.size() > 0 ? brownian_triplet(sigma_sqrt) : brownian_triplet(d);
    if (!std::isinf(p_star)) t.p_star = p_star;
  } else if (noise_family == "cpp") {
    t = compound_poisson_triplet(d, cpp_rate, cpp_jump_scale,
                                 std::isinf(p_star) ? 1e9 : p_star);
  } else if (noise_family == "stable") {
    if (stable_mode == "projected") {
      if (stable_projection.size() == 0) {
        throw ConfigInvalid("noise: projected stable needs a projection vector");
      }
      t = stable_projected_triplet(stable_alpha, stable_scale, stable_projection, p_star);
    } else {
      t = stable_isotropic_triplet(d, stable_alpha, stable_scale, p_star);
    }
    if (sigma_sqrt.size() > 0) t.sigma_sqrt = sigma_sqrt;
  } else {
    throw ConfigInvalid("noise: unknown family '" + noise_family + "'");
  }
  if (drift.size() > 0) t.drift_a = drift;
  cutofflab::validate(t);
  return t;
}

SimulationBudget ExperimentConfig::make_budget() const {
  SimulationBudget budget;
  budget.n_traj = n_traj;
  budget.dt = dt;
  budget.horizon = horizon;
  budget.seed = master_seed;
  return budget;
}

void ExperimentConfig::validate() const {
  if (dim < 1) throw ConfigInvalid("field.dim: must be >= 1");
  if (x0.size() == 0) throw ConfigInvalid("x0: required");
  if (n_traj < 1) throw ConfigInvalid("sim.n_traj: must be >= 1");
  if (schedule.epsilons.empty()) throw ConfigInvalid("schedule.epsilons: required");
  for (std::size_t i = 1; i < schedule.epsilons.size(); ++i) {
    if (!(schedule.epsilons[i] < schedule.epsilons[i - 1])) {
      throw ConfigInvalid("schedule.epsilons: must be strictly decreasing");
    }
  }
  if (!(schedule.p > 0.0)) throw ConfigInvalid("schedule.p: must be positive");
  if (!(schedule.p < p_star)) {
    throw ConfigInvalid(
        "schedule.p: requires p < p_star (the declared finite moment order of the noise)");
  }
  const double guard_delta = field_name == "fput" ? 1.0 : 0.0;
  if (guard_delta > 0.0 && dt > 0.1 / guard_delta) {
    throw ConfigInvalid("sim.dt: exceeds the stability guard 0.1/delta");
  }
}

// ---- SHA-1 (for git-style content hashes of configs) ----

namespace {

struct Sha1State {
  std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                                 0xC3D2E1F0u};

  static std::uint32_t rol(std::uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

  void process(const unsigned char* block) {
    std::array<std::uint32_t, 80> w{};
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | ((~b) & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t temp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = temp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }
};

}  // namespace

std::string sha1_hex(const std::string& data) {
  Sha1State state;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  const std::size_t n = data.size();
  std::size_t i = 0;
  for (; i + 64 <= n; i += 64) state.process(bytes + i);

  unsigned char tail[128] = {0};
  const std::size_t rem = n - i;
  std::memcpy(tail, bytes + i, rem);
  tail[rem] = 0x80;
  const std::size_t tail_len = rem + 9 <= 64 ? 64 : 128;
  const std::uint64_t bit_len = static_cast<std::uint64_t>(n) * 8;
  for (int b = 0; b < 8; ++b) {
    tail[tail_len - 1 - b] = static_cast<unsigned char>(bit_len >> (8 * b));
  }
  state.process(tail);
  if (tail_len == 128) state.process(tail + 64);

  char out[41];
  std::snprintf(out, sizeof(out), "%08x%08x%08x%08x%08x", state.h[0], state.h[1], state.h[2],
                state.h[3], state.h[4]);
  return out;
}

std::string git_blob_hash(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  return sha1_hex(blob);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot open " + tmp.string() + " for writing");
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// ---- subcommand dispatch ----

namespace {

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("CUTOFFLAB_OUTPUT_DIR")) return env;
  return config.output_dir;
}

json params_to_json(const CutoffParams& params) {
  json j;
  j["q"] = params.q;
  j["ell"] = params.ell;
  j["m"] = params.m;
  j["thetas"] = params.thetas;
  json vs = json::array();
  for (const auto& v : params.vs) {
    json entry;
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      re.push_back(v[i].real());
      im.push_back(v[i].imag());
    }
    entry["re"] = re;
    entry["im"] = im;
    vs.push_back(entry);
  }
  j["vs"] = vs;
  j["tau"] = params.tau;
  if (params.tau_upper_bound) j["tau_upper_bound"] = *params.tau_upper_bound;
  return j;
}

json verdict_to_json(const ProfileVerdict& verdict) {
  json j;
  j["profile_granted"] = verdict.granted;
  j["omega_is_sphere"] = verdict.omega_sphere;
  j["omega_radius"] = verdict.omega_radius;
  j["omega_min_norm"] = verdict.omega_min_norm;
  j["omega_max_norm"] = verdict.omega_max_norm;
  j["non_resonant"] = verdict.non_resonant;
  j["normal_growth"] = verdict.normal_growth;
  j["non_resonance_convention"] = verdict.convention_note;
  return j;
}

struct OutputSet {
  std::vector<std::pair<std::filesystem::path, std::string>> files;

  void add(const std::filesystem::path& path, std::string content) {
    files.emplace_back(path, std::move(content));
  }
  void write_all() const {
    for (const auto& [path, content] : files) atomic_write(path, content);
  }
};

std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  row += '\n';
  return row;
}

/// Default output grid: geometric approach to t_eps plus the linear window.
std::vector<double> default_simulate_grid(const ExperimentConfig& config, double q, int ell) {
  std::vector<double> grid;
  const double t_eps = cutoff_time(q, ell, config.schedule.epsilons.front());
  for (double frac : {0.125, 0.25, 0.5, 0.75}) grid.push_back(t_eps * frac);
  for (double r : config.schedule.r_grid) {
    grid.push_back(std::max(0.0, t_eps + r * config.schedule.w));
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

json properties_report(std::uint64_t seed);

}  // namespace

int run_experiment(const ExperimentConfig& config, const std::string& subcommand) {
  const VectorFieldSpec field = config.make_field();
  const LevyTriplet triplet = config.make_triplet();
  const SimulationBudget budget = config.make_budget();
  const std::filesystem::path out_dir = resolve_output_dir(config);
  const double p = config.schedule.p;

  OutputSet outputs;
  const std::string config_dump = config.to_json().dump(2);
  {
    json manifest;
    manifest["artifact_version"] = kArtifactVersion;
    manifest["subcommand"] = subcommand;
    manifest["master_seed"] = config.master_seed;
    manifest["config"] = config.to_json();
    manifest["config_hash"] = git_blob_hash(config_dump);
    outputs.add(out_dir / "manifest.json", manifest.dump(2) + "\n");
  }

  auto spectral_params = [&]() {
    const double r0 = config.r0 > 0.0 ? config.r0 : default_domain_radius(field);
    FlowOptions flow;
    flow.dt = config.dt > 0.0 ? std::min(config.dt, 1e-3) : 1e-3;
    CutoffParams params = nonlinear_cutoff_params(field, config.x0, r0, flow);
    return std::make_pair(params, r0);
  };

  auto o_inf_cloud = [&]() {
    SimOptions opts;
    opts.dt = config.dt > 0.0 ? config.dt : default_dt(field);
    opts.n_traj = config.n_traj;
    opts.master_seed = config.master_seed;
    opts.job_index = 77;
    const double horizon = config.horizon > 0.0 ? config.horizon
                                                : 20.0 / std::max(field.delta, 1e-9);
    const auto batches = integrate_ou(field, triplet, Eigen::VectorXd::Zero(field.dim),
                                      {horizon}, opts);
    return EmpiricalMeasure(batches.back().states);
  };

  if (subcommand == "spectral") {
    const auto [params, r0] = spectral_params();
    EmpiricalMeasure o_inf;
    const EmpiricalMeasure* o_inf_ptr = nullptr;
    if (p < 1.0) {
      o_inf = o_inf_cloud();
      o_inf_ptr = &o_inf;
    }
    const ProfileVerdict verdict = profile_verdict(params, p, o_inf_ptr, config.master_seed);
    json j = params_to_json(params);
    j.update(verdict_to_json(verdict));
    j["r0"] = r0;
    outputs.add(out_dir / "verdict.json", j.dump(2) + "\n");
  } else if (subcommand == "simulate") {
    const auto [params, r0] = spectral_params();
    (void)r0;
    const std::vector<double> grid =
        config.times.empty() ? default_simulate_grid(config, params.q, params.ell)
                             : config.times;
    SimOptions opts;
    opts.dt = config.dt > 0.0 ? config.dt : default_dt(field);
    opts.n_traj = config.n_traj;
    opts.master_seed = config.master_seed;
    const auto batches =
        integrate_sde(field, triplet, config.x0, config.schedule.epsilons.front(), grid, opts);
    std::string csv = "time,trajectory_id";
    for (int c = 0; c < field.dim; ++c) csv += ",x" + std::to_string(c);
    csv += '\n';
    json moments = json::array();
    for (const auto& batch : batches) {
      for (Eigen::Index i = 0; i < batch.states.rows(); ++i) {
        std::vector<double> row{batch.time, static_cast<double>(i)};
        for (int c = 0; c < field.dim; ++c) row.push_back(batch.states(i, c));
        csv += csv_row(row);
      }
      json record;
      record["time"] = batch.time;
      record["mean_norm"] = [&] {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < batch.states.rows(); ++i) acc += batch.states.row(i).norm();
        return acc / static_cast<double>(batch.states.rows());
      }();
      record["moment_p"] = empirical_moment(batch.states, p);
      moments.push_back(record);
    }
    outputs.add(out_dir / "samples.csv", csv);
    json summary;
    summary["p"] = p;
    summary["epsilon"] = config.schedule.epsilons.front();
    summary["moments"] = moments;
    outputs.add(out_dir / "moments.json", summary.dump(2) + "\n");
  } else if (subcommand == "ergodic") {
    std::vector<double> grid = config.times;
    if (grid.empty()) {
      const double t_max = 2.5;
      for (int k = 0; k <= 10; ++k) grid.push_back(t_max * k / 10.0);
    }
    const ErgodicReport report = ergodic_decay_check(
        field, triplet, config.schedule.epsilons.front(), config.x0, p, grid, budget);
    std::string csv = "t,wp,bound\n";
    for (const auto& point : report.points) csv += csv_row({point.t, point.wp, point.bound});
    outputs.add(out_dir / "ergodic.csv", csv);
    json j;
    j["pass"] = report.pass;
    j["tolerance"] = report.tolerance;
    outputs.add(out_dir / "ergodic.json", j.dump(2) + "\n");
  } else if (subcommand == "cutoff") {
    const auto [params, r0] = spectral_params();
    EmpiricalMeasure o_inf;
    const EmpiricalMeasure* o_inf_ptr = nullptr;
    if (p < 1.0) {
      o_inf = o_inf_cloud();
      o_inf_ptr = &o_inf;
    }
    const ProfileVerdict verdict = profile_verdict(params, p, o_inf_ptr, config.master_seed);
    std::vector<ProfilePoint> theory;
    if (verdict.granted) {
      theory = theoretical_profile(params, p, config.schedule.w, config.schedule.r_grid, verdict,
                                   o_inf_ptr, config.master_seed);
    }
    const CutoffCurve curve = cutoff_curve(field, triplet, config.x0, config.schedule, params,
                                           budget, verdict.granted ? &theory : nullptr);

    std::string csv = "epsilon,r,t,wp_ratio,stderr,theory\n";
    for (const auto& entry : curve.entries) {
      csv += csv_row({entry.epsilon, entry.r, entry.t, entry.wp_ratio, entry.stderr_,
                      entry.theory.value_or(std::numeric_limits<double>::quiet_NaN())});
    }
    outputs.add(out_dir / "curve.csv", csv);

    json j = params_to_json(params);
    j.update(verdict_to_json(verdict));
    j["r0"] = r0;
    try {
      const ProfileFit fit = profile_fit(curve);
      j["fit"] = {{"q_hat", fit.q_hat}, {"c_hat", fit.c_hat}, {"r2", fit.r2},
                  {"points_used", fit.points_used}};
    } catch (const InsufficientSignal& err) {
      j["fit"] = {{"error", err.what()}};
    }
    json collapse = json::array();
    for (const auto& point : epsilon_collapse(curve)) {
      collapse.push_back({{"r", point.r}, {"diff", point.diff},
                          {"joint_stderr", point.joint_stderr}, {"within", point.within}});
    }
    j["collapse"] = collapse;
    json oscillation = json::array();
    for (double r : config.schedule.r_grid) {
      oscillation.push_back({{"r", r}, {"score", oscillation_score(curve, r)}});
    }
    j["oscillation"] = oscillation;
    outputs.add(out_dir / "verdict.json", j.dump(2) + "\n");
  } else if (subcommand == "moments") {
    const auto [params, r0] = spectral_params();
    (void)r0;
    const auto entries = moments_cutoff(field, triplet, config.x0, config.schedule, params,
                                        budget);
    std::string csv = "epsilon,r,t,moment_ratio,stderr\n";
    for (const auto& entry : entries) {
      csv += csv_row({entry.epsilon, entry.r, entry.t, entry.moment_ratio, entry.stderr_});
    }
    outputs.add(out_dir / "moments.csv", csv);
    json j;
    j["o_inf_moment_p"] = empirical_moment(o_inf_cloud().points, p);
    outputs.add(out_dir / "moments_summary.json", j.dump(2) + "\n");
  } else if (subcommand == "fw-error") {
    const auto [params, r0] = spectral_params();
    (void)r0;
    const auto entries = fw_error_decay(field, triplet, config.x0, config.schedule, params,
                                        budget);
    std::string csv = "epsilon,t,wp_xy_over_eps,wp_mu_over_eps\n";
    for (const auto& entry : entries) {
      csv += csv_row({entry.epsilon, entry.t, entry.wp_xy_over_eps, entry.wp_mu_over_eps});
    }
    outputs.add(out_dir / "fw_error.csv", csv);
  } else if (subcommand == "properties") {
    outputs.add(out_dir / "properties.json", properties_report(config.master_seed).dump(2) + "\n");
  } else {
    throw ConfigInvalid("unknown subcommand '" + subcommand + "'");
  }

  outputs.write_all();
  return 0;
}

// ---- distance-property verification report ----

namespace {

Eigen::MatrixXd gaussian_cloud(int n, int d, RngStream& rng) {
  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) pts(i, j) = rng.normal();
  }
  return pts;
}

json properties_report(std::uint64_t seed) {
  json report;
  RngStream rng(derive_stream_key(seed, 0x9409ull, 1), 0, 0);
  const int n = 512;

  // sample laws: gaussian d1/d2, uniform square, bimodal mixture, shifted exponential
  std::vector<Eigen::MatrixXd> laws;
  laws.push_back(gaussian_cloud(n, 1, rng));
  laws.push_back(gaussian_cloud(n, 2, rng));
  {
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = 2.0 * rng.uniform() - 1.0;
      pts(i, 1) = 2.0 * rng.uniform() - 1.0;
    }
    laws.push_back(pts);
  }
  {
    Eigen::MatrixXd pts = gaussian_cloud(n, 2, rng);
    for (int i = 0; i < n; ++i) {
      if (i % 2 == 0) pts.row(i).array() += 3.0;
    }
    laws.push_back(pts);
  }
  {
    Eigen::MatrixXd pts(n, 1);
    for (int i = 0; i < n; ++i) pts(i, 0) = rng.exponential() - 1.0;
    laws.push_back(pts);
  }

  bool shift_pass = true;
  json shift_cases = json::array();
  for (std::size_t k = 0; k < laws.size(); ++k) {
    EmpiricalMeasure mu(laws[k]);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(mu.dim());
    u[0] = 1.5;
    if (mu.dim() > 1) u[1] = -0.5;
    for (double p : {1.0, 2.0, 0.5}) {
      const ShiftLinearityReport r = verify_shift_linearity(mu, u, p);
      shift_pass = shift_pass && r.pass;
      shift_cases.push_back({{"law", k}, {"p", p}, {"lhs", r.lhs}, {"rhs", r.rhs},
                             {"lower", r.lower}, {"pass", r.pass}});
    }
  }
  report["shift_linearity"] = {{"pass", shift_pass}, {"cases", shift_cases}};

  EmpiricalMeasure mu1(gaussian_cloud(256, 2, rng));
  EmpiricalMeasure mu2(gaussian_cloud(256, 2, rng));
  Eigen::VectorXd u1(2), u2(2);
  u1 << 1.0, 2.0;
  u2 << -0.5, 0.25;
  bool th_pass = true;
  {
    const auto r1 = verify_translation_homogeneity(mu1, mu2, u1, u2, -2.0, 2.0);
    const auto r2 = verify_translation_homogeneity(mu1, mu2, u1, u2, 3.0, 0.5);
    th_pass = r1.pass && r2.pass;
    report["translation_homogeneity"] = {
        {"pass", th_pass},
        {"factor_p2_cminus2", r1.factor},
        {"factor_p05_c3", r2.factor}};
  }

  // metric axioms on random triples
  bool metric_pass = true;
  for (int trial = 0; trial < 10; ++trial) {
    EmpiricalMeasure a(gaussian_cloud(128, 2, rng));
    EmpiricalMeasure b(gaussian_cloud(128, 2, rng));
    EmpiricalMeasure c(gaussian_cloud(128, 2, rng));
    const double ab = wp_assignment(a, b, 2.0).value;
    const double ba = wp_assignment(b, a, 2.0).value;
    const double bc = wp_assignment(b, c, 2.0).value;
    const double ac = wp_assignment(a, c, 2.0).value;
    if (std::abs(ab - ba) > 1e-12 || ac > ab + bc + 1e-9) metric_pass = false;
  }
  report["metric_axioms"] = {{"pass", metric_pass}};

  // sliced is dominated by the exact distance
  bool domination_pass = true;
  for (int trial = 0; trial < 20; ++trial) {
    EmpiricalMeasure a(gaussian_cloud(64, 2, rng));
    EmpiricalMeasure b(gaussian_cloud(64, 2, rng));
    const double exact = wp_assignment(a, b, 2.0).value;
    const double sliced = wp_sliced(a, b, 2.0, 16, seed + trial).value;
    if (sliced > exact + 1e-12) domination_pass = false;
  }
  report["sliced_domination"] = {{"pass", domination_pass}};

  // convergence trend: distance between same-law samples decays with n and
  // the empirical moments approach each other
  {
    auto draw = [&](int count) {
      Eigen::MatrixXd pts(count, 1);
      for (int i = 0; i < count; ++i) pts(i, 0) = rng.normal();
      return EmpiricalMeasure(pts);
    };
    const EmpiricalMeasure small_a = draw(100), small_b = draw(100);
    const EmpiricalMeasure big_a = draw(10000), big_b = draw(10000);
    const double wp_small = wp_exact_1d(small_a, small_b, 2.0).value;
    const double wp_big = wp_exact_1d(big_a, big_b, 2.0).value;
    const double moment_gap_small =
        std::abs(empirical_moment_of(small_a, 2.0) - empirical_moment_of(small_b, 2.0));
    const double moment_gap_big =
        std::abs(empirical_moment_of(big_a, 2.0) - empirical_moment_of(big_b, 2.0));
    const bool pass = wp_big < wp_small && moment_gap_big < moment_gap_small;
    report["convergence_trend"] = {{"pass", pass},
                                   {"wp_n100", wp_small},
                                   {"wp_n10000", wp_big},
                                   {"moment_gap_n100", moment_gap_small},
                                   {"moment_gap_n10000", moment_gap_big}};
  }

  bool all_pass = shift_pass && th_pass && metric_pass && domination_pass &&
                  report["convergence_trend"]["pass"].get<bool>();
  report["pass"] = all_pass;
  return report;
}

}  // namespace

}  // namespace cutofflab

