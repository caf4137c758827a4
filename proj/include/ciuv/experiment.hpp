#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ciuv/simworld.hpp"

namespace ciuv {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything one experiment run depends on. Field names double as the
/// config-file keys.
struct ScenarioConfig {
    std::size_t mv = 0;           ///< sources manipulated
    double mf = 1.0;              ///< manipulation factor
    double if_factor = 0.2;       ///< improvement factor
    double a = 0.1;               ///< improvement base
    double e_t = 1.0;             ///< confidence window half-width
    double r = 0.9;               ///< acceptable confidence
    double d = 0.01;              ///< minimum confidence improvement
    std::uint64_t seed = 1;       ///< master seed
    std::size_t k = 3;            ///< top-k for the K-sources baseline
    std::size_t n_probe_questions = 10;
    std::size_t max_iterations = 50;
    std::size_t n_trials = 10;
    ExponentSign exponent_sign = ExponentSign::NegativeDecay;
    bool include_ground_truth_view = false;
    std::size_t n_questions = 20; ///< target questions per trial
};

/// Parses flat key=value text ('#' comments and blank lines allowed).
/// Unknown keys and malformed values raise ConfigError.
ScenarioConfig parse_scenario_config(std::istream& in);
ScenarioConfig load_scenario_config(const std::string& path);

/// Canonical key=value serialization, one field per line.
std::string scenario_to_text(const ScenarioConfig& config);

/// One-line space-separated echo of the effective config.
std::string scenario_summary(const ScenarioConfig& config);

/// Factor sweep, e.g. {"mv", {3, 6, 9, 12}}. Valid factors: mv, mf,
/// if_factor.
struct SweepSpec {
    std::string factor;
    std::vector<double> values;
};

/// Parses "mv=3,6,9,12" style sweep arguments.
SweepSpec parse_sweep(const std::string& text);

/// Aggregated error of one method at one sweep point: the stored series
/// holds |estimate - truth| per (trial, question) in run order, and the
/// statistics are its mean and population standard deviation.
struct ResultRow {
    std::string sweep_key;              ///< "none" when not sweeping
    std::optional<double> sweep_value;
    std::string method;                 ///< CIUV, Mean, Median, Voting, K-sources
    double mean_error = 0.0;
    double std_dev = 0.0;
    std::string scenario;
    std::vector<double> errors;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    /// One JSON object per line: every iteration of every run.
    std::string trajectory_jsonl;
    /// Plot series keyed by file name (written under plotdata/).
    std::map<std::string, std::string> plot_files;
};

/// Runs the full grid: for every sweep point and trial, synthesizes the
/// world, injects adversaries, evaluates the five methods on every target
/// question, and aggregates. Deterministic for a fixed config.
ExperimentOutput run_experiment(const ScenarioConfig& config,
                                const std::optional<SweepSpec>& sweep = std::nullopt);

std::string results_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(std::istream& in);

/// mean and population standard deviation of a series.
std::pair<double, double> series_stats(const std::vector<double>& xs);

} // namespace ciuv
