#include "ciuv/orchestrator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ciuv/random.hpp"

namespace ciuv {

StopDecision should_stop(std::span<const double> confidence_history,
                         const StoppingConfig& stopping) {
    if (confidence_history.empty()) {
        throw ValidationError("should_stop needs a non-empty confidence history");
    }
    const double latest = confidence_history.back();
    if (latest >= stopping.acceptable_confidence) {
        return StopDecision::AcceptR;
    }
    if (confidence_history.size() >= 2) {
        const double previous = confidence_history[confidence_history.size() - 2];
        if (latest - previous < stopping.min_improvement) {
            return StopDecision::StallD;
        }
    }
    return StopDecision::Continue;
}

namespace {

void validate_stopping(const StoppingConfig& stopping) {
    if (!(stopping.acceptable_confidence > 0.0) || stopping.acceptable_confidence > 1.0) {
        throw ValidationError("acceptable confidence R must be in (0, 1]");
    }
    if (stopping.min_improvement < 0.0) {
        throw ValidationError("confidence improvement bound D must be nonnegative");
    }
    if (stopping.max_iterations == 0) {
        throw ValidationError("max_iterations must be positive");
    }
}

// Reorders profiles into the canonical source order, erroring on sources
// the environment answered for but never declared, or vice versa.
std::vector<ReliabilityProfile> align_profiles(std::vector<ReliabilityProfile> profiles,
                                               const std::vector<std::string>& sources) {
    if (profiles.size() != sources.size()) {
        throw ValidationError("environment answered for " + std::to_string(profiles.size()) +
                              " sources, expected " + std::to_string(sources.size()));
    }
    std::vector<ReliabilityProfile> out;
    out.reserve(sources.size());
    for (const std::string& s : sources) {
        auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const ReliabilityProfile& p) { return p.source_id == s; });
        if (it == profiles.end()) {
            throw ValidationError("environment did not answer for source '" + s + "'");
        }
        out.push_back(std::move(*it));
        profiles.erase(it);
    }
    return out;
}

} // namespace

RunResult run_ciuv(RespondentEnvironment& env, const Question& target,
                   std::span<const Question> probe_pool, const StoppingConfig& stopping,
                   std::size_t n_probe_questions, std::uint64_t seed) {
    validate_stopping(stopping);
    if (probe_pool.empty()) {
        throw ValidationError("probe pool must not be empty");
    }
    if (n_probe_questions == 0) {
        throw ValidationError("need at least one probe question per iteration");
    }
    const std::vector<std::string> sources = env.source_ids();
    if (sources.empty()) {
        throw ValidationError("environment has no sources");
    }
    for (const Question& q : probe_pool) {
        if (q.question_id == target.question_id) {
            throw ValidationError("target question '" + target.question_id +
                                  "' must not appear in the probe pool");
        }
    }

    std::mt19937_64 rng(seed);
    RunResult result;
    std::vector<double> confidence_history;
    std::vector<double> prev_per_source(sources.size(), 0.0); // e_i(0) = inf convention
    std::set<std::string> active(sources.begin(), sources.end());

    for (std::size_t iter = 0; iter < stopping.max_iterations; ++iter) {
        std::vector<Question> probes = sample_questions(probe_pool, n_probe_questions, rng);
        std::vector<Question> asked = probes;
        asked.push_back(target);
        const std::vector<Report> reports = env.answer(asked);

        ProbeSet probe_set;
        probe_set.questions = probes;
        probe_set.truth_mode = TruthMode::KnownTruth;
        for (const Question& q : probes) {
            if (!q.ground_truth) {
                probe_set.truth_mode = TruthMode::ProxyMean;
            }
        }
        std::map<std::string, double> target_answers;
        for (const Report& r : reports) {
            if (r.question_id == target.question_id) {
                if (!target_answers.emplace(r.source_id, r.answer.value).second) {
                    throw ValidationError("duplicate target answer from source '" + r.source_id + "'");
                }
            } else {
                probe_set.reports.push_back(r);
            }
        }
        std::vector<UnifiedView> views;
        views.reserve(sources.size());
        for (const std::string& s : sources) {
            auto it = target_answers.find(s);
            if (it == target_answers.end()) {
                throw ValidationError("source '" + s + "' did not answer the target question");
            }
            views.push_back(UnifiedView{it->second});
        }

        const std::vector<ReliabilityProfile> profiles =
            align_profiles(estimate_profiles(probe_set), sources);

        IterationRecord record;
        record.iteration = iter;
        record.estimate = estimate_truth(views, profiles, stopping.e_t);
        record.per_source_confidence.reserve(sources.size());
        for (const ReliabilityProfile& p : profiles) {
            record.per_source_confidence.push_back(confidence(p.mu, p.sigma2, stopping.e_t));
        }
        confidence_history.push_back(record.estimate.confidence);

        const StopDecision decision = should_stop(confidence_history, stopping);
        const bool last_allowed = iter + 1 == stopping.max_iterations;
        if (decision != StopDecision::Continue || last_allowed) {
            result.history.push_back(std::move(record));
            result.final_estimate = result.history.back().estimate;
            result.stop_reason = decision == StopDecision::AcceptR  ? StopReason::AcceptR
                                 : decision == StopDecision::StallD ? StopReason::StallD
                                                                    : StopReason::MaxIterations;
            return result;
        }

        // A source stays in the stimulation set only while its own
        // confidence keeps improving by at least D; dropped sources never
        // come back.
        std::vector<std::string> stimulated;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            const double improvement = record.per_source_confidence[i] - prev_per_source[i];
            if (active.contains(sources[i]) && improvement >= stopping.min_improvement) {
                stimulated.push_back(sources[i]);
            }
        }
        active = std::set<std::string>(stimulated.begin(), stimulated.end());
        env.apply_stimulation(stimulated);
        prev_per_source = record.per_source_confidence;
        record.stimulated = std::move(stimulated);
        record.cost = record.stimulated.size();
        result.history.push_back(std::move(record));
    }
    // max_iterations >= 1, so the loop always returns from inside.
    throw ValidationError("unreachable: loop ended without a stop decision");
}

} // namespace ciuv
