#include "ciuv/simworld.hpp"

#include <algorithm>
#include <cmath>

#include "ciuv/random.hpp"

namespace ciuv {

namespace {

void validate_improvement(const ImprovementConfig& cfg) {
    if (!(cfg.if_factor > 0.0)) {
        throw ValidationError("improvement factor must be positive");
    }
    if (!(cfg.a > 0.0 && cfg.a < 1.0)) {
        throw ValidationError("improvement base a must be in (0, 1)");
    }
}

} // namespace

std::vector<SourceSpec> inject_adversaries(std::vector<SourceSpec> specs,
                                           const AdversaryConfig& adv) {
    if (adv.mv > specs.size()) {
        throw ValidationError("cannot manipulate " + std::to_string(adv.mv) + " of " +
                              std::to_string(specs.size()) + " sources");
    }
    if (!(adv.mf > 0.0)) {
        throw ValidationError("manipulation factor must be positive");
    }
    std::mt19937_64 rng(adv.seed);
    for (std::size_t i : sample_indices(rng, specs.size(), adv.mv)) {
        specs[i].malicious = true;
    }
    return specs;
}

double improvement_ratio(std::size_t step, const ImprovementConfig& cfg) {
    validate_improvement(cfg);
    if (step == 0) {
        throw ValidationError("improvement steps are counted from 1");
    }
    const double exponent = cfg.exponent_sign == ExponentSign::NegativeDecay
                                ? -cfg.if_factor * static_cast<double>(step)
                                : cfg.if_factor * static_cast<double>(step);
    return std::clamp(1.0 - cfg.a * std::exp(exponent), 0.0, 1.0);
}

double improved_answer(double previous, double truth, double ratio) {
    return truth + ratio * (previous - truth);
}

double honest_answer(const SourceSpec& spec, double truth, std::mt19937_64& rng) {
    if (spec.error_sigma < 0.0) {
        throw ValidationError("error sigma must be nonnegative");
    }
    const double error = spec.error_mu + spec.error_sigma * standard_normal(rng);
    return truth - error;
}

SimulatedEnvironment::SimulatedEnvironment(std::vector<SourceSpec> specs,
                                           std::map<std::string, double> truths,
                                           ImprovementConfig improvement,
                                           double manipulation_factor, std::uint64_t seed)
    : specs_(std::move(specs)),
      truths_(std::move(truths)),
      improvement_(improvement),
      manipulation_factor_(manipulation_factor),
      rng_(seed),
      scale_(specs_.size(), 1.0),
      last_answers_(specs_.size()) {
    validate_improvement(improvement_);
    if (specs_.empty()) {
        throw ValidationError("environment needs at least one source");
    }
    if (!(manipulation_factor_ > 0.0)) {
        throw ValidationError("manipulation factor must be positive");
    }
    std::set<std::string> ids;
    for (const SourceSpec& s : specs_) {
        if (!ids.insert(s.source_id).second) {
            throw ValidationError("duplicate source id '" + s.source_id + "'");
        }
    }
}

std::vector<std::string> SimulatedEnvironment::source_ids() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const SourceSpec& s : specs_) {
        out.push_back(s.source_id);
    }
    return out;
}

std::vector<Report> SimulatedEnvironment::answer(std::span<const Question> questions) {
    ++round_;
    double ratio = 1.0;
    if (round_ >= 2 && !pending_.empty()) {
        ratio = improvement_ratio(round_ - 1, improvement_);
        for (std::size_t i = 0; i < specs_.size(); ++i) {
            if (pending_.contains(specs_[i].source_id)) {
                scale_[i] *= ratio;
            }
        }
    }

    std::vector<Report> reports;
    reports.reserve(questions.size() * specs_.size());
    for (const Question& q : questions) {
        const auto truth_it = truths_.find(q.question_id);
        if (truth_it == truths_.end()) {
            throw ValidationError("environment does not know question '" + q.question_id + "'");
        }
        const double truth = truth_it->second;
        for (std::size_t i = 0; i < specs_.size(); ++i) {
            const SourceSpec& spec = specs_[i];
            const bool stimulated = pending_.contains(spec.source_id);
            double value;
            const auto prev_it = last_answers_[i].find(q.question_id);
            if (stimulated && prev_it != last_answers_[i].end()) {
                value = improved_answer(prev_it->second, truth, ratio);
            } else {
                const double honest = honest_answer(spec, truth, rng_);
                const double reported = spec.malicious ? manipulation_factor_ * honest : honest;
                value = truth + scale_[i] * (reported - truth);
            }
            last_answers_[i][q.question_id] = value;
            reports.push_back(Report{spec.source_id, q.question_id, UnifiedView{value}});
        }
    }
    pending_.clear();
    return reports;
}

void SimulatedEnvironment::apply_stimulation(std::span<const std::string> sources) {
    pending_.clear();
    for (const std::string& s : sources) {
        if (std::none_of(specs_.begin(), specs_.end(),
                         [&](const SourceSpec& spec) { return spec.source_id == s; })) {
            throw ValidationError("cannot stimulate unknown source '" + s + "'");
        }
        pending_.insert(s);
    }
}

double SimulatedEnvironment::error_scale(const std::string& source_id) const {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (specs_[i].source_id == source_id) {
            return scale_[i];
        }
    }
    throw ValidationError("unknown source '" + source_id + "'");
}

} // namespace ciuv
