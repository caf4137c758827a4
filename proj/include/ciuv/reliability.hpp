#pragma once

#include <random>
#include <span>
#include <vector>

#include "ciuv/core.hpp"

namespace ciuv {

/// Gaussian error model of one source: error = truth - answer follows
/// approximately N(mu, sigma2), estimated over sample_count probe questions.
struct ReliabilityProfile {
    std::string source_id;
    double mu = 0.0;
    double sigma2 = 0.0;
    std::size_t sample_count = 0;
};

/// How the per-question reference value is obtained when scoring probes.
enum class TruthMode {
    KnownTruth, ///< every probe question carries a ground truth
    ProxyMean,  ///< cross-source mean stands in for the unknown truth
    HistoricalPrior, ///< skip estimation, use externally supplied profiles
};

/// A batch of probe questions with a complete answer matrix: every source
/// answered every question exactly once.
struct ProbeSet {
    std::vector<Question> questions;
    std::vector<Report> reports;
    TruthMode truth_mode = TruthMode::KnownTruth;
    /// Consulted only in HistoricalPrior mode; must cover every source.
    std::vector<ReliabilityProfile> historical_priors;
};

/// Arithmetic mean of the answers, used as the stand-in truth when the
/// real one is unknown.
UnifiedView proxy_truth(std::span<const UnifiedView> answers);

/// Estimates one ReliabilityProfile per source from a probe set.
///
/// Per source, error samples are signed_diff(truth, answer) over all probe
/// questions; mu is their mean and sigma2 their population variance around
/// mu (divide by the sample count). Output order follows the sources' first
/// appearance in probes.reports.
///
/// Throws ValidationError on an incomplete answer matrix, duplicate
/// (source, question) reports, or a missing ground truth in KnownTruth mode.
std::vector<ReliabilityProfile> estimate_profiles(const ProbeSet& probes);

/// Draws count probe questions from the pool, uniformly without
/// replacement. count is clamped to the pool size.
std::vector<Question> sample_questions(std::span<const Question> pool, std::size_t count,
                                       std::mt19937_64& rng);

} // namespace ciuv
