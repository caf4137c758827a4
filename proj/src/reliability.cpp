#include "ciuv/reliability.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ciuv/random.hpp"

namespace ciuv {

UnifiedView proxy_truth(std::span<const UnifiedView> answers) {
    if (answers.empty()) {
        throw ValidationError("proxy truth needs at least one answer");
    }
    double sum = 0.0;
    for (const UnifiedView& a : answers) {
        sum += a.value;
    }
    return UnifiedView{sum / static_cast<double>(answers.size())};
}

std::vector<ReliabilityProfile> estimate_profiles(const ProbeSet& probes) {
    if (probes.questions.empty()) {
        throw ValidationError("probe set has no questions");
    }
    std::set<std::string> question_ids;
    for (const Question& q : probes.questions) {
        if (!question_ids.insert(q.question_id).second) {
            throw ValidationError("duplicate question id '" + q.question_id + "' in probe set");
        }
    }

    // Sources in order of first appearance; answers keyed (source, question).
    std::vector<std::string> sources;
    std::map<std::string, std::map<std::string, double>> answers;
    for (const Report& r : probes.reports) {
        if (!question_ids.contains(r.question_id)) {
            throw ValidationError("report for unknown question '" + r.question_id + "'");
        }
        auto [it, inserted] = answers[r.source_id].emplace(r.question_id, r.answer.value);
        (void)it;
        if (!inserted) {
            throw ValidationError("duplicate report for source '" + r.source_id +
                                  "', question '" + r.question_id + "'");
        }
        if (answers[r.source_id].size() == 1) {
            sources.push_back(r.source_id);
        }
    }
    if (sources.empty()) {
        throw ValidationError("probe set has no reports");
    }
    for (const std::string& s : sources) {
        if (answers[s].size() != probes.questions.size()) {
            throw ValidationError("incomplete answer matrix: source '" + s + "' answered " +
                                  std::to_string(answers[s].size()) + " of " +
                                  std::to_string(probes.questions.size()) + " questions");
        }
    }

    if (probes.truth_mode == TruthMode::HistoricalPrior) {
        std::vector<ReliabilityProfile> out;
        out.reserve(sources.size());
        for (const std::string& s : sources) {
            auto it = std::find_if(probes.historical_priors.begin(), probes.historical_priors.end(),
                                   [&](const ReliabilityProfile& p) { return p.source_id == s; });
            if (it == probes.historical_priors.end()) {
                throw ValidationError("no historical prior supplied for source '" + s + "'");
            }
            out.push_back(*it);
        }
        return out;
    }

    // Reference value per question: the known ground truth, or the
    // cross-source mean when unknown.
    std::map<std::string, double> truth_by_question;
    for (const Question& q : probes.questions) {
        if (probes.truth_mode == TruthMode::KnownTruth) {
            if (!q.ground_truth) {
                throw ValidationError("question '" + q.question_id +
                                      "' has no ground truth in KnownTruth mode");
            }
            truth_by_question[q.question_id] = q.ground_truth->value;
        } else {
            std::vector<UnifiedView> views;
            views.reserve(sources.size());
            for (const std::string& s : sources) {
                views.push_back(UnifiedView{answers[s].at(q.question_id)});
            }
            truth_by_question[q.question_id] = proxy_truth(views).value;
        }
    }

    std::vector<ReliabilityProfile> out;
    out.reserve(sources.size());
    for (const std::string& s : sources) {
        // Welford over the per-question error samples truth - answer.
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t n = 0;
        for (const Question& q : probes.questions) {
            const double e = signed_diff(UnifiedView{truth_by_question.at(q.question_id)},
                                         UnifiedView{answers[s].at(q.question_id)});
            ++n;
            const double delta = e - mean;
            mean += delta / static_cast<double>(n);
            m2 += delta * (e - mean);
        }
        out.push_back(ReliabilityProfile{s, mean, m2 / static_cast<double>(n), n});
    }
    return out;
}

std::vector<Question> sample_questions(std::span<const Question> pool, std::size_t count,
                                       std::mt19937_64& rng) {
    if (pool.empty()) {
        throw ValidationError("question pool is empty");
    }
    const std::vector<std::size_t> idx = sample_indices(rng, pool.size(), std::min(count, pool.size()));
    std::vector<Question> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(pool[i]);
    }
    return out;
}

} // namespace ciuv
