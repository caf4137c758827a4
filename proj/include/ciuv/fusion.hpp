#pragma once

#include <span>
#include <vector>

#include "ciuv/core.hpp"
#include "ciuv/reliability.hpp"

namespace ciuv {

/// Per-source weights on the probability simplex: entries are nonnegative
/// and sum to 1 within 1e-9.
struct WeightAssignment {
    std::vector<double> weights;
};

/// Half-width of the error window used for confidence scoring,
/// in unified units. Must be positive.
struct ErrorThreshold {
    double value = 1.0;
};

/// Fused estimate with its error model and confidence P(|error| < e_T).
struct TruthEstimate {
    UnifiedView u_star;
    double mu_star = 0.0;
    double sigma2_star = 0.0;
    double confidence = 0.0;
    WeightAssignment weights;
};

/// True when w is a valid simplex vector (allowing tol slack on the sum).
bool is_valid_simplex(const WeightAssignment& w, double tol = 1e-9);

/// Uniform weights 1/m over m sources.
WeightAssignment uniform_weights(std::size_t m);

/// Weights proportional to 1/|mu|, favoring sources with small mean error.
/// Sources with mu = 0 split all the weight uniformly among themselves.
WeightAssignment weights_mu(std::span<const ReliabilityProfile> profiles);

/// Weights proportional to 1/sigma2; this minimizes the fused error
/// variance over the simplex. Zero-variance sources are handled like
/// zero-mu sources in weights_mu.
WeightAssignment weights_sigma(std::span<const ReliabilityProfile> profiles);

/// Elementwise min of the two assignments, renormalized. Falls back to
/// uniform weights when every minimum is zero.
WeightAssignment combine_weights(const WeightAssignment& w_mu, const WeightAssignment& w_sigma);

/// Weighted average of the views; the result is clamped into
/// [min view, max view] so it stays a convex combination under rounding.
UnifiedView fuse(std::span<const UnifiedView> views, const WeightAssignment& w);

struct FusedErrorParams {
    double mu_star = 0.0;
    double sigma2_star = 0.0;
};

/// Error model of the fused estimate: mean sum(w_i mu_i) and variance
/// sum(w_i^2 sigma2_i), assuming independent sources.
FusedErrorParams fused_error_params(std::span<const ReliabilityProfile> profiles,
                                    const WeightAssignment& w);

/// Standard normal CDF.
double normal_cdf(double x);

/// P(|e| < e_T) for e ~ N(mu_star, sigma2_star). A zero-variance model is a
/// point mass: returns 1 when |mu_star| < e_T, else 0.
double confidence(double mu_star, double sigma2_star, ErrorThreshold e_t);

/// Worst-case distance between any two convex combinations of the views
/// when all views are nonnegative: max |u_i|.
double worst_case_bound(std::span<const UnifiedView> views);

/// Full second-stage pipeline: min-combined weights from the profiles,
/// fused view, fused error model, confidence.
TruthEstimate estimate_truth(std::span<const UnifiedView> views,
                             std::span<const ReliabilityProfile> profiles, ErrorThreshold e_t);

} // namespace ciuv
