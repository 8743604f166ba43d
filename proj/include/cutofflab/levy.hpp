#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "cutofflab/errors.hpp"
#include "cutofflab/rng.hpp"

namespace cutofflab {

/// No jump part.
struct NoJumps {};

/// Compound Poisson jumps at the given rate with centered Gaussian jump
/// sizes mapped through jump_sigma_sqrt (d x k).
struct CompoundPoissonJumps {
  double rate = 1.0;
  Eigen::MatrixXd jump_sigma_sqrt;
};

/// Symmetric alpha-stable jumps, either isotropic (sub-Gaussian
/// representation sqrt(W) * sqrt(2) * A_sqrt xi with W a positive
/// (alpha/2)-stable factor) or projected onto a fixed direction with a
/// scalar stable driver. Scale convention: the unit-time one-dimensional
/// marginal has characteristic function exp(-(scale |u|)^alpha), so
/// alpha = 2 coincides with a Gaussian of variance 2 scale^2.
struct StableJumps {
  double alpha = 1.5;
  double scale = 1.0;
  bool isotropic = true;
  Eigen::VectorXd projection;   // used when !isotropic
  Eigen::MatrixXd shape_sqrt;   // optional A^{1/2} for isotropic mode; empty = I
};

using JumpSpec = std::variant<NoJumps, CompoundPoissonJumps, StableJumps>;

/// Characteristic triplet restricted to samplable families. p_star is the
/// declared moment order: the jump measure must integrate |z|^{p_star} over
/// {|z|>1}, which holds by construction for each family (stable requires
/// p_star < alpha; Gaussian-jump compound Poisson admits any finite order).
struct LevyTriplet {
  Eigen::VectorXd drift_a;      // may be empty for zero drift
  Eigen::MatrixXd sigma_sqrt;   // d x k factor of Sigma; may be empty
  JumpSpec jump_spec = NoJumps{};
  double p_star = std::numeric_limits<double>::infinity();
  int dim = 0;

  bool has_gaussian() const { return sigma_sqrt.size() > 0; }
};

/// Brownian triplet with the given d x k diffusion factor.
LevyTriplet brownian_triplet(const Eigen::MatrixXd& sigma_sqrt);
/// Isotropic Brownian in dimension d (Sigma = I).
LevyTriplet brownian_triplet(int dim);
/// Scalar stable driver projected onto `projection`.
LevyTriplet stable_projected_triplet(double alpha, double scale, const Eigen::VectorXd& projection,
                                     double p_star);
/// Isotropic stable noise in dimension d.
LevyTriplet stable_isotropic_triplet(int dim, double alpha, double scale, double p_star);
/// Compound Poisson with isotropic Gaussian jumps of the given scale.
LevyTriplet compound_poisson_triplet(int dim, double rate, double jump_scale, double p_star);

/// Validates family-specific constraints; throws InvalidAlpha/ConfigInvalid.
void validate(const LevyTriplet& triplet);

/// One increment L_{t+dt} - L_t drawn from the stream. Pure in (triplet, dt,
/// stream state); batches of trajectories may call this concurrently on
/// distinct streams.
Eigen::VectorXd sample_increment(const LevyTriplet& triplet, double dt, RngStream& rng);
void sample_increment_into(const LevyTriplet& triplet, double dt, RngStream& rng,
                           Eigen::Ref<Eigen::VectorXd> out);

/// Standard symmetric alpha-stable draw, scale 1.
double sample_standard_stable(double alpha, RngStream& rng);
/// Positive (alpha/2)-stable mixing factor W with E exp(-sW) = exp(-s^{alpha/2}).
double sample_stable_subordinator(double alpha, RngStream& rng);

/// Mean of |sample|^p over a sample cloud (rows are samples).
double empirical_moment(const Eigen::MatrixXd& samples, double p);

}  // namespace cutofflab
