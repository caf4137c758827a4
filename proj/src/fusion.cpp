#include "ciuv/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace ciuv {

namespace {

// Weights proportional to 1/x_i, with the convention that x_i = 0 means a
// perfect source: the zero set splits all the weight uniformly. Equal to
// the cross-product form prod_{k != i} x_k normalized, but evaluating
// reciprocals keeps m-source inputs out of overflow range. Reciprocals that
// are themselves non-finite (x_i denormal-small) join the zero set.
WeightAssignment reciprocal_weights(const std::vector<double>& xs) {
    const std::size_t m = xs.size();
    std::vector<double> recip(m);
    std::size_t degenerate = 0;
    for (std::size_t i = 0; i < m; ++i) {
        recip[i] = 1.0 / xs[i];
        if (!std::isfinite(recip[i])) {
            ++degenerate;
        }
    }
    WeightAssignment out;
    out.weights.assign(m, 0.0);
    if (degenerate > 0) {
        const double share = 1.0 / static_cast<double>(degenerate);
        for (std::size_t i = 0; i < m; ++i) {
            if (!std::isfinite(recip[i])) {
                out.weights[i] = share;
            }
        }
        return out;
    }
    // Scale by the max before summing; identical inputs then normalize to
    // exactly 1/m, which the uniform-reduction contract depends on.
    const double top = *std::max_element(recip.begin(), recip.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        recip[i] /= top;
        sum += recip[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
        out.weights[i] = recip[i] / sum;
    }
    return out;
}

void require_lengths_match(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                              " vs " + std::to_string(b) + ")");
    }
}

} // namespace

bool is_valid_simplex(const WeightAssignment& w, double tol) {
    if (w.weights.empty()) {
        return false;
    }
    double sum = 0.0;
    for (double x : w.weights) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            return false;
        }
        sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
}

WeightAssignment uniform_weights(std::size_t m) {
    if (m == 0) {
        throw ValidationError("cannot build weights over zero sources");
    }
    WeightAssignment out;
    out.weights.assign(m, 1.0 / static_cast<double>(m));
    return out;
}

WeightAssignment weights_mu(std::span<const ReliabilityProfile> profiles) {
    if (profiles.empty()) {
        throw ValidationError("weights_mu needs at least one profile");
    }
    std::vector<double> abs_mu(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        abs_mu[i] = std::abs(profiles[i].mu);
    }
    return reciprocal_weights(abs_mu);
}

WeightAssignment weights_sigma(std::span<const ReliabilityProfile> profiles) {
    if (profiles.empty()) {
        throw ValidationError("weights_sigma needs at least one profile");
    }
    std::vector<double> sigma2(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (profiles[i].sigma2 < 0.0) {
            throw ValidationError("negative variance in profile '" + profiles[i].source_id + "'");
        }
        sigma2[i] = profiles[i].sigma2;
    }
    return reciprocal_weights(sigma2);
}

WeightAssignment combine_weights(const WeightAssignment& w_mu, const WeightAssignment& w_sigma) {
    require_lengths_match(w_mu.weights.size(), w_sigma.weights.size(), "combine_weights");
    const std::size_t m = w_mu.weights.size();
    std::vector<double> mins(m);
    double top = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mins[i] = std::min(w_mu.weights[i], w_sigma.weights[i]);
        top = std::max(top, mins[i]);
    }
    if (top == 0.0) {
        return uniform_weights(m);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mins[i] /= top;
        sum += mins[i];
    }
    WeightAssignment out;
    out.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.weights[i] = mins[i] / sum;
    }
    return out;
}

UnifiedView fuse(std::span<const UnifiedView> views, const WeightAssignment& w) {
    require_lengths_match(views.size(), w.weights.size(), "fuse");
    if (!is_valid_simplex(w)) {
        throw ValidationError("fuse requires a valid simplex weight vector");
    }
    double acc = 0.0;
    double lo = views[0].value;
    double hi = views[0].value;
    for (std::size_t i = 0; i < views.size(); ++i) {
        acc += w.weights[i] * views[i].value;
        lo = std::min(lo, views[i].value);
        hi = std::max(hi, views[i].value);
    }
    return UnifiedView{std::clamp(acc, lo, hi)};
}

FusedErrorParams fused_error_params(std::span<const ReliabilityProfile> profiles,
                                    const WeightAssignment& w) {
    require_lengths_match(profiles.size(), w.weights.size(), "fused_error_params");
    if (!is_valid_simplex(w)) {
        throw ValidationError("fused_error_params requires a valid simplex weight vector");
    }
    FusedErrorParams out;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        out.mu_star += w.weights[i] * profiles[i].mu;
        out.sigma2_star += w.weights[i] * w.weights[i] * profiles[i].sigma2;
    }
    return out;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048);
}

double confidence(double mu_star, double sigma2_star, ErrorThreshold e_t) {
    if (!(e_t.value > 0.0)) {
        throw ValidationError("error threshold must be positive");
    }
    if (sigma2_star < 0.0) {
        throw ValidationError("fused variance must be nonnegative");
    }
    if (sigma2_star == 0.0) {
        return std::abs(mu_star) < e_t.value ? 1.0 : 0.0;
    }
    const double sigma = std::sqrt(sigma2_star);
    return normal_cdf((e_t.value - mu_star) / sigma) - normal_cdf((-e_t.value - mu_star) / sigma);
}

double worst_case_bound(std::span<const UnifiedView> views) {
    if (views.empty()) {
        throw ValidationError("worst_case_bound needs at least one view");
    }
    double bound = 0.0;
    for (const UnifiedView& v : views) {
        bound = std::max(bound, distance(v, UnifiedView{0.0}));
    }
    return bound;
}

TruthEstimate estimate_truth(std::span<const UnifiedView> views,
                             std::span<const ReliabilityProfile> profiles, ErrorThreshold e_t) {
    require_lengths_match(views.size(), profiles.size(), "estimate_truth");
    const WeightAssignment w = combine_weights(weights_mu(profiles), weights_sigma(profiles));
    const FusedErrorParams params = fused_error_params(profiles, w);
    TruthEstimate est;
    est.u_star = fuse(views, w);
    est.mu_star = params.mu_star;
    est.sigma2_star = params.sigma2_star;
    est.confidence = confidence(params.mu_star, params.sigma2_star, e_t);
    est.weights = w;
    return est;
}

} // namespace ciuv
