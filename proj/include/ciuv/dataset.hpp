#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ciuv/reliability.hpp"
#include "ciuv/simworld.hpp"

namespace ciuv {

/// Malformed file content; the message carries row/column positions.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structurally valid file that violates the expected schema.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-view error statistics the synthetic world is parameterized with:
/// name, mean error, standard deviation (all relative to the designated
/// ground-truth view, which carries 0/0).
struct ViewStats {
    std::string name;
    double mean_error = 0.0;
    double std_dev = 0.0;
};

/// The 13 growth-rate views and their error statistics. GDP_PA is the
/// designated ground-truth view.
const std::array<ViewStats, 13>& table1_view_stats();

inline constexpr const char* kGroundTruthView = "GDP_PA";

/// Yearly level statistics, one column per view, with explicit gaps.
/// Years are strictly increasing; column names and order are fixed by the
/// CSV schema.
struct LevelTable {
    std::vector<int> years;
    std::vector<std::string> column_names;
    /// values[c][y]: column c, year index y; nullopt marks a gap.
    std::vector<std::vector<std::optional<double>>> values;

    std::size_t column_index(const std::string& name) const;
};

/// Year-over-year growth rates in percentage points; one fewer year than
/// the level table it came from, gaps already filled.
struct GrowthTable {
    std::vector<int> years;
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> values;
};

/// One accounting-identity check: aggregate minus the sum of its
/// components for one year.
struct IdentityResidual {
    int year = 0;
    std::string aggregate;
    double residual = 0.0;
    bool flagged = false;
};

struct IdentityReport {
    std::vector<IdentityResidual> residuals;
    bool any_flagged() const;
};

struct LoadResult {
    LevelTable table;
    IdentityReport identities;
};

/// Parses a level CSV and checks the three accounting identities
/// (GDP_EA = FCE+GCF+NE, GDP_IA = NPT+WC+DFA+BB, GDP_PA = FI+SI+TI) for
/// every year whose components are all present. A residual is flagged when
/// |residual| > tolerance * |aggregate|.
LoadResult load_and_validate(const std::string& path, double tolerance = 0.005);
LoadResult load_and_validate(std::istream& in, double tolerance = 0.005);

/// Serializes a level table back into the CSV schema.
std::string to_csv(const LevelTable& table);

/// Converts levels to year-over-year growth rates,
/// 100 * (level(y) - level(y-1)) / level(y-1). A growth value that cannot
/// be computed is filled with the previous year's growth of the same view;
/// a gap in the first growth year is an error, as is a zero base level.
GrowthTable to_growth_rates(const LevelTable& levels);

struct SynthesisOptions {
    double truth_min = 0.0;
    double truth_max = 15.0;
    /// Sign applied to each view's mean error, keyed by view name;
    /// views not listed use +1.
    std::vector<std::pair<std::string, double>> error_signs;
};

struct SyntheticData {
    ProbeSet probes;
    std::vector<SourceSpec> sources;
};

/// Generates n_questions ground truths uniform over the configured range
/// and one answer per view with that view's Gaussian error. The
/// ground-truth view reproduces the truth exactly.
SyntheticData synthesize_table1(std::uint64_t seed, std::size_t n_questions,
                                const SynthesisOptions& options = {});

/// Long-format report rows: question_id,source_id,value.
std::vector<Report> load_reports_csv(std::istream& in);
/// Truth rows: question_id,truth.
std::vector<Question> load_truths_csv(std::istream& in);

std::string reports_to_csv(std::span<const Report> reports);
std::string truths_to_csv(std::span<const Question> questions);

/// Shortest decimal form of x that parses back to exactly x.
std::string csv_number(double x);

} // namespace ciuv
