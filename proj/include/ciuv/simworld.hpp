#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ciuv/orchestrator.hpp"

namespace ciuv {

/// Behavior of one simulated source: answers carry Gaussian error
/// N(error_mu, error_sigma^2) around the truth; malicious sources
/// additionally multiply what they report by the manipulation factor.
struct SourceSpec {
    std::string source_id;
    double error_mu = 0.0;
    double error_sigma = 0.0;
    bool malicious = false;
};

/// mv sources get marked malicious at random; a malicious source reports
/// mf times its honest value.
struct AdversaryConfig {
    std::size_t mv = 0;
    double mf = 1.0;
    std::uint64_t seed = 0;
};

/// Direction of the exponent in the per-step improvement ratio
/// 1 - a * exp(sign * if * step). NegativeDecay makes improvement fastest
/// on the first step and lets it taper off; LiteralPositive accelerates it
/// instead and is kept for comparison runs.
enum class ExponentSign { NegativeDecay, LiteralPositive };

struct ImprovementConfig {
    double if_factor = 0.2;
    double a = 0.1;
    ExponentSign exponent_sign = ExponentSign::NegativeDecay;
};

/// Marks mv distinct random sources malicious (seeded; same seed, same
/// selection). Throws when mv exceeds the source count.
std::vector<SourceSpec> inject_adversaries(std::vector<SourceSpec> specs,
                                           const AdversaryConfig& adv);

/// Fraction of the distance-to-truth that survives improvement step n
/// (n = 1 for the first stimulated round), clamped into [0, 1].
double improvement_ratio(std::size_t step, const ImprovementConfig& cfg);

/// Moves an answer toward the truth, keeping its side: the new distance is
/// ratio times the old one.
double improved_answer(double previous, double truth, double ratio);

/// One honest answer draw: truth minus an error sampled from the spec's
/// Gaussian model.
double honest_answer(const SourceSpec& spec, double truth, std::mt19937_64& rng);

/// Simulated respondents over a fixed set of questions with known truths.
///
/// Unstimulated sources redraw from their error model on every round.
/// A stimulated source re-answering a question moves its previous answer
/// toward the truth by the current improvement ratio; on questions it has
/// not seen, it draws from its error model shrunk by the improvements
/// accumulated so far. Instances are owned by one run at a time.
class SimulatedEnvironment : public RespondentEnvironment {
public:
    SimulatedEnvironment(std::vector<SourceSpec> specs, std::map<std::string, double> truths,
                         ImprovementConfig improvement, double manipulation_factor,
                         std::uint64_t seed);

    std::vector<std::string> source_ids() const override;
    std::vector<Report> answer(std::span<const Question> questions) override;
    void apply_stimulation(std::span<const std::string> sources) override;

    /// Remaining error fraction of one source (1 until first stimulated).
    double error_scale(const std::string& source_id) const;
    std::size_t rounds() const { return round_; }

private:
    std::vector<SourceSpec> specs_;
    std::map<std::string, double> truths_;
    ImprovementConfig improvement_;
    double manipulation_factor_;
    std::mt19937_64 rng_;
    std::size_t round_ = 0;
    std::vector<double> scale_;
    std::vector<std::map<std::string, double>> last_answers_;
    std::set<std::string> pending_;
};

} // namespace ciuv
