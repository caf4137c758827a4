#pragma once

#include <span>
#include <vector>

#include "ciuv/core.hpp"
#include "ciuv/fusion.hpp"
#include "ciuv/reliability.hpp"

namespace ciuv {

/// Boundary to the answering sources. How stimulation is realized (reward,
/// penalty, ...) is the environment's business; the loop only relies on it
/// eventually producing more trustworthy answers.
class RespondentEnvironment {
public:
    virtual ~RespondentEnvironment() = default;

    /// Stable source listing; defines the canonical source order of a run.
    virtual std::vector<std::string> source_ids() const = 0;

    /// Answers every question with one report per source.
    virtual std::vector<Report> answer(std::span<const Question> questions) = 0;

    /// Requests that the listed sources answer more truthfully from the
    /// next round on. Replaces any previously pending request.
    virtual void apply_stimulation(std::span<const std::string> sources) = 0;
};

/// Loop thresholds: stop once confidence reaches acceptable_confidence (R),
/// or once the per-iteration confidence improvement drops below
/// min_improvement (D). max_iterations bounds the loop regardless.
struct StoppingConfig {
    double acceptable_confidence = 0.9;
    double min_improvement = 0.01;
    ErrorThreshold e_t{1.0};
    std::size_t max_iterations = 50;
};

/// One loop iteration: the estimate, the per-source confidences
/// P(|e_i| < e_T) under the degenerate weight w_i = 1, and which sources
/// were asked to improve afterwards. cost == stimulated.size().
struct IterationRecord {
    std::size_t iteration = 0;
    TruthEstimate estimate;
    std::vector<double> per_source_confidence;
    std::vector<std::string> stimulated;
    std::size_t cost = 0;
};

enum class StopDecision { AcceptR, StallD, Continue };
enum class StopReason { AcceptR, StallD, MaxIterations };

struct RunResult {
    TruthEstimate final_estimate;
    std::vector<IterationRecord> history;
    StopReason stop_reason = StopReason::MaxIterations;
};

/// Applies the stopping rule to the confidence history so far: accept when
/// the latest confidence reaches R; otherwise stall when there are at least
/// two entries and the latest improvement is below D.
StopDecision should_stop(std::span<const double> confidence_history, const StoppingConfig& stopping);

/// Runs the full estimate/verify/stimulate loop against the environment.
///
/// Each iteration samples n_probe_questions probes from the pool, estimates
/// per-source reliability, fuses the sources' answers to the target
/// question under min-combined weights, and scores the fused confidence.
/// While the loop continues, exactly the sources whose per-source
/// confidence improved by at least D are stimulated again; all others are
/// dropped permanently. Probe questions are scored against their ground
/// truths when every sampled probe carries one, otherwise against the
/// cross-source mean.
RunResult run_ciuv(RespondentEnvironment& env, const Question& target,
                   std::span<const Question> probe_pool, const StoppingConfig& stopping,
                   std::size_t n_probe_questions, std::uint64_t seed);

} // namespace ciuv
