#include "cutofflab/levy.hpp"

#include <cmath>

namespace cutofflab {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw InvalidAlpha("alpha must lie in (0,2], got " + std::to_string(alpha));
  }
}

}  // namespace

LevyTriplet brownian_triplet(const Eigen::MatrixXd& sigma_sqrt) {
  LevyTriplet t;
  t.dim = static_cast<int>(sigma_sqrt.rows());
  t.sigma_sqrt = sigma_sqrt;
  return t;
}

LevyTriplet brownian_triplet(int dim) {
  return brownian_triplet(Eigen::MatrixXd::Identity(dim, dim));
}

LevyTriplet stable_projected_triplet(double alpha, double scale,
                                     const Eigen::VectorXd& projection, double p_star) {
  LevyTriplet t;
  t.dim = static_cast<int>(projection.size());
  StableJumps jumps;
  jumps.alpha = alpha;
  jumps.scale = scale;
  jumps.isotropic = false;
  jumps.projection = projection;
  t.jump_spec = jumps;
  t.p_star = p_star;
  validate(t);
  return t;
}

LevyTriplet stable_isotropic_triplet(int dim, double alpha, double scale, double p_star) {
  LevyTriplet t;
  t.dim = dim;
  StableJumps jumps;
  jumps.alpha = alpha;
  jumps.scale = scale;
  jumps.isotropic = true;
  t.jump_spec = jumps;
  t.p_star = p_star;
  validate(t);
  return t;
}

LevyTriplet compound_poisson_triplet(int dim, double rate, double jump_scale, double p_star) {
  LevyTriplet t;
  t.dim = dim;
  CompoundPoissonJumps jumps;
  jumps.rate = rate;
  jumps.jump_sigma_sqrt = jump_scale * Eigen::MatrixXd::Identity(dim, dim);
  t.jump_spec = jumps;
  t.p_star = p_star;
  validate(t);
  return t;
}

void validate(const LevyTriplet& triplet) {
  if (triplet.dim <= 0) throw ConfigInvalid("noise: dimension must be positive");
  if (triplet.sigma_sqrt.size() > 0 && triplet.sigma_sqrt.rows() != triplet.dim) {
    throw ConfigInvalid("noise: sigma_sqrt row count does not match dimension");
  }
  if (triplet.drift_a.size() > 0 && triplet.drift_a.size() != triplet.dim) {
    throw ConfigInvalid("noise: drift vector length does not match dimension");
  }
  if (const auto* stable = std::get_if<StableJumps>(&triplet.jump_spec)) {
    check_alpha(stable->alpha);
    if (!(triplet.p_star < stable->alpha) && stable->alpha < 2.0) {
      throw ConfigInvalid("noise: stable jumps only have moments of order < alpha; "
                          "declare p_star < alpha");
    }
    if (!stable->isotropic && stable->projection.size() != triplet.dim) {
      throw ConfigInvalid("noise: stable projection vector length does not match dimension");
    }
    if (stable->isotropic && stable->shape_sqrt.size() > 0 &&
        stable->shape_sqrt.rows() != triplet.dim) {
      throw ConfigInvalid("noise: stable shape_sqrt row count does not match dimension");
    }
  }
  if (const auto* cpp = std::get_if<CompoundPoissonJumps>(&triplet.jump_spec)) {
    if (cpp->rate < 0.0) throw ConfigInvalid("noise: compound Poisson rate must be >= 0");
    if (cpp->jump_sigma_sqrt.rows() != triplet.dim) {
      throw ConfigInvalid("noise: jump_sigma_sqrt row count does not match dimension");
    }
  }
}

double sample_standard_stable(double alpha, RngStream& rng) {
  check_alpha(alpha);
  const double u = M_PI * (rng.uniform() - 0.5);  // (-pi/2, pi/2)
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(u);
  if (alpha == 2.0) return 2.0 * std::sin(u) * std::sqrt(w);
  // Chambers-Mallows-Stuck, symmetric case
  const double su = std::sin(alpha * u);
  const double cu = std::cos(u);
  const double tail = std::cos(u - alpha * u) / w;
  return su / std::pow(cu, 1.0 / alpha) * std::pow(tail, (1.0 - alpha) / alpha);
}

double sample_stable_subordinator(double alpha, RngStream& rng) {
  check_alpha(alpha);
  if (alpha == 2.0) return 1.0;  // degenerate mixing at the Gaussian endpoint
  const double rho = 0.5 * alpha;  // in (0,1)
  const double u = M_PI * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  // CMS with beta = 1; scaled so that E exp(-sW) = exp(-s^rho)
  const double zeta = -std::tan(M_PI * rho / 2.0);
  const double xi = std::atan(-zeta) / rho;
  const double x = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * rho)) *
                   std::sin(rho * (u + xi)) / std::pow(std::cos(u), 1.0 / rho) *
                   std::pow(std::cos(u - rho * (u + xi)) / w, (1.0 - rho) / rho);
  return std::pow(std::cos(M_PI * rho / 2.0), 1.0 / rho) * x;
}

void sample_increment_into(const LevyTriplet& triplet, double dt, RngStream& rng,
                           Eigen::Ref<Eigen::VectorXd> out) {
  if (!(dt > 0.0)) throw ConfigInvalid("sample_increment: dt must be positive");
  out.setZero();
  if (triplet.drift_a.size() > 0) out += triplet.drift_a * dt;
  if (triplet.has_gaussian()) {
    const double root_dt = std::sqrt(dt);
    Eigen::VectorXd xi(triplet.sigma_sqrt.cols());
    for (int i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
    out.noalias() += root_dt * (triplet.sigma_sqrt * xi);
  }
  if (const auto* cpp = std::get_if<CompoundPoissonJumps>(&triplet.jump_spec)) {
    const long long n_jumps = rng.poisson(cpp->rate * dt);
    if (n_jumps > 0) {
      Eigen::VectorXd xi(cpp->jump_sigma_sqrt.cols());
      for (long long j = 0; j < n_jumps; ++j) {
        for (int i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
        out.noalias() += cpp->jump_sigma_sqrt * xi;
      }
    }
  } else if (const auto* stable = std::get_if<StableJumps>(&triplet.jump_spec)) {
    const double amplitude = stable->scale * std::pow(dt, 1.0 / stable->alpha);
    if (!stable->isotropic) {
      out.noalias() += stable->projection *
                       (amplitude * sample_standard_stable(stable->alpha, rng));
    } else {
      const double mix = std::sqrt(2.0 * sample_stable_subordinator(stable->alpha, rng));
      Eigen::VectorXd xi(triplet.dim);
      for (int i = 0; i < triplet.dim; ++i) xi[i] = rng.normal();
      if (stable->shape_sqrt.size() > 0) {
        out.noalias() += (amplitude * mix) * (stable->shape_sqrt * xi);
      } else {
        out.noalias() += (amplitude * mix) * xi;
      }
    }
  }
}

Eigen::VectorXd sample_increment(const LevyTriplet& triplet, double dt, RngStream& rng) {
  Eigen::VectorXd out(triplet.dim);
  sample_increment_into(triplet, dt, rng, out);
  return out;
}

double empirical_moment(const Eigen::MatrixXd& samples, double p) {
  if (samples.rows() == 0) throw DegenerateInput("empirical_moment: empty sample");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    acc += std::pow(samples.row(i).norm(), p);
  }
  return acc / static_cast<double>(samples.rows());
}

}  // namespace cutofflab
