#include "ciuv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ciuv/random.hpp"

namespace ciuv {

namespace {

constexpr std::array<const char*, 14> kLevelHeader = {"year", "FCE", "GCF", "NE",  "GDP_EA",
                                                      "NPT",  "WC",  "DFA", "BB",  "GDP_IA",
                                                      "FI",   "SI",  "TI",  "GDP_PA"};

struct Identity {
    const char* aggregate;
    std::vector<const char*> components;
};

const std::vector<Identity>& identities() {
    static const std::vector<Identity> kIdentities = {
        {"GDP_EA", {"FCE", "GCF", "NE"}},
        {"GDP_IA", {"NPT", "WC", "DFA", "BB"}},
        {"GDP_PA", {"FI", "SI", "TI"}},
    };
    return kIdentities;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_number(const std::string& text, std::size_t row, std::size_t col) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(value)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse '" + text + "' as a number");
    }
    return value;
}

} // namespace

std::string csv_number(double x) {
    // Shortest decimal form that parses back to the same double.
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

const std::array<ViewStats, 13>& table1_view_stats() {
    static const std::array<ViewStats, 13> kStats = {{
        {"FCE", 2.4069, 1.5291},
        {"GCF", 3.8193, 2.9389},
        {"NE", 33.6287, 34.5794},
        {"GDP_EA", 1.2462, 0.9685},
        {"NPT", 3.9390, 3.4461},
        {"WC", 4.1153, 5.3371},
        {"DFA", 3.6984, 2.3672},
        {"BB", 10.7253, 14.3010},
        {"GDP_IA", 3.0893, 3.6595},
        {"FI", 4.8382, 3.2961},
        {"SI", 1.6570, 1.1663},
        {"TI", 2.6926, 1.9201},
        {"GDP_PA", 0.0, 0.0},
    }};
    return kStats;
}

std::size_t LevelTable::column_index(const std::string& name) const {
    const auto it = std::find(column_names.begin(), column_names.end(), name);
    if (it == column_names.end()) {
        throw ValidationError("unknown column '" + name + "'");
    }
    return static_cast<std::size_t>(it - column_names.begin());
}

bool IdentityReport::any_flagged() const {
    return std::any_of(residuals.begin(), residuals.end(),
                       [](const IdentityResidual& r) { return r.flagged; });
}

LoadResult load_and_validate(const std::string& path, double tolerance) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return load_and_validate(in, tolerance);
}

LoadResult load_and_validate(std::istream& in, double tolerance) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty file: header row required");
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() != kLevelHeader.size()) {
        throw SchemaError("expected " + std::to_string(kLevelHeader.size()) + " columns, found " +
                          std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != kLevelHeader[i]) {
            throw SchemaError("column " + std::to_string(i + 1) + " is '" + header[i] +
                              "', expected '" + kLevelHeader[i] + "'");
        }
    }

    LevelTable table;
    table.column_names.assign(kLevelHeader.begin() + 1, kLevelHeader.end());
    table.values.resize(table.column_names.size());

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != kLevelHeader.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(kLevelHeader.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        const double year_value = parse_number(fields[0], row, 1);
        const int year = static_cast<int>(year_value);
        if (static_cast<double>(year) != year_value) {
            throw ParseError("row " + std::to_string(row) + ", column 1: year must be an integer");
        }
        if (!table.years.empty() && year <= table.years.back()) {
            throw SchemaError("row " + std::to_string(row) + ": years must be strictly increasing");
        }
        table.years.push_back(year);
        for (std::size_t c = 0; c < table.column_names.size(); ++c) {
            const std::string& field = fields[c + 1];
            if (field.empty()) {
                table.values[c].push_back(std::nullopt);
            } else {
                table.values[c].push_back(parse_number(field, row, c + 2));
            }
        }
    }

    LoadResult result;
    result.table = std::move(table);
    const LevelTable& t = result.table;
    for (const Identity& id : identities()) {
        const std::size_t agg = t.column_index(id.aggregate);
        for (std::size_t y = 0; y < t.years.size(); ++y) {
            if (!t.values[agg][y]) {
                continue;
            }
            double sum = 0.0;
            bool complete = true;
            for (const char* comp : id.components) {
                const auto& cell = t.values[t.column_index(comp)][y];
                if (!cell) {
                    complete = false;
                    break;
                }
                sum += *cell;
            }
            if (!complete) {
                continue;
            }
            IdentityResidual r;
            r.year = t.years[y];
            r.aggregate = id.aggregate;
            r.residual = *t.values[agg][y] - sum;
            r.flagged = std::abs(r.residual) > tolerance * std::abs(*t.values[agg][y]);
            result.identities.residuals.push_back(r);
        }
    }
    return result;
}

std::string to_csv(const LevelTable& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kLevelHeader.size(); ++i) {
        out << (i ? "," : "") << kLevelHeader[i];
    }
    out << '\n';
    for (std::size_t y = 0; y < table.years.size(); ++y) {
        out << table.years[y];
        for (std::size_t c = 0; c < table.column_names.size(); ++c) {
            out << ',';
            if (table.values[c][y]) {
                out << csv_number(*table.values[c][y]);
            }
        }
        out << '\n';
    }
    return out.str();
}

GrowthTable to_growth_rates(const LevelTable& levels) {
    if (levels.years.size() < 2) {
        throw ValidationError("need at least two years of levels to compute growth rates");
    }
    GrowthTable growth;
    growth.years.assign(levels.years.begin() + 1, levels.years.end());
    growth.column_names = levels.column_names;
    growth.values.resize(levels.column_names.size());
    for (std::size_t c = 0; c < levels.column_names.size(); ++c) {
        std::vector<std::optional<double>> raw;
        raw.reserve(growth.years.size());
        for (std::size_t y = 1; y < levels.years.size(); ++y) {
            const auto& curr = levels.values[c][y];
            const auto& prev = levels.values[c][y - 1];
            if (curr && prev) {
                if (*prev == 0.0) {
                    throw ValidationError("zero base level for '" + levels.column_names[c] +
                                          "' in year " + std::to_string(levels.years[y - 1]));
                }
                raw.push_back(100.0 * (*curr - *prev) / *prev);
            } else {
                raw.push_back(std::nullopt);
            }
        }
        // Gaps inherit the previous year's growth rate.
        for (std::size_t y = 0; y < raw.size(); ++y) {
            if (!raw[y]) {
                if (y == 0) {
                    throw ValidationError("cannot fill growth gap for '" + levels.column_names[c] +
                                          "' in first growth year " + std::to_string(growth.years[0]));
                }
                raw[y] = *raw[y - 1];
            }
            growth.values[c].push_back(*raw[y]);
        }
    }
    return growth;
}

SyntheticData synthesize_table1(std::uint64_t seed, std::size_t n_questions,
                                const SynthesisOptions& options) {
    if (n_questions == 0) {
        throw ValidationError("need at least one question to synthesize");
    }
    if (!(options.truth_max > options.truth_min)) {
        throw ValidationError("truth range must be non-degenerate");
    }

    SyntheticData data;
    for (const ViewStats& vs : table1_view_stats()) {
        double sign = 1.0;
        for (const auto& [name, s] : options.error_signs) {
            if (name == vs.name) {
                if (s != 1.0 && s != -1.0) {
                    throw ValidationError("error sign for '" + name + "' must be +1 or -1");
                }
                sign = s;
            }
        }
        data.sources.push_back(SourceSpec{vs.name, sign * vs.mean_error, vs.std_dev, false});
    }
    for (const auto& [name, s] : options.error_signs) {
        (void)s;
        if (std::none_of(data.sources.begin(), data.sources.end(),
                         [&name = name](const SourceSpec& src) { return src.source_id == name; })) {
            throw ValidationError("error sign given for unknown view '" + name + "'");
        }
    }

    std::mt19937_64 rng(seed);
    data.probes.truth_mode = TruthMode::KnownTruth;
    const int width = static_cast<int>(std::to_string(n_questions).size());
    for (std::size_t q = 0; q < n_questions; ++q) {
        char id[32];
        std::snprintf(id, sizeof(id), "q%0*zu", width, q + 1);
        const double truth =
            options.truth_min + uniform_double(rng) * (options.truth_max - options.truth_min);
        data.probes.questions.push_back(Question{id, UnifiedView{truth}});
        for (const SourceSpec& src : data.sources) {
            data.probes.reports.push_back(
                Report{src.source_id, id, UnifiedView{honest_answer(src, truth, rng)}});
        }
    }
    return data;
}

std::vector<Report> load_reports_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{
                                       "question_id", "source_id", "value"}) {
        throw SchemaError("reports CSV must start with header 'question_id,source_id,value'");
    }
    std::vector<Report> reports;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw ParseError("row " + std::to_string(row) + ": expected 3 fields");
        }
        reports.push_back(Report{fields[1], fields[0], UnifiedView{parse_number(fields[2], row, 3)}});
    }
    return reports;
}

std::vector<Question> load_truths_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"question_id", "truth"}) {
        throw SchemaError("truths CSV must start with header 'question_id,truth'");
    }
    std::vector<Question> questions;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw ParseError("row " + std::to_string(row) + ": expected 2 fields");
        }
        questions.push_back(Question{fields[0], UnifiedView{parse_number(fields[1], row, 2)}});
    }
    return questions;
}

std::string reports_to_csv(std::span<const Report> reports) {
    std::ostringstream out;
    out << "question_id,source_id,value\n";
    for (const Report& r : reports) {
        out << r.question_id << ',' << r.source_id << ',' << csv_number(r.answer.value) << '\n';
    }
    return out.str();
}

std::string truths_to_csv(std::span<const Question> questions) {
    std::ostringstream out;
    out << "question_id,truth\n";
    for (const Question& q : questions) {
        if (!q.ground_truth) {
            throw ValidationError("question '" + q.question_id + "' has no truth to serialize");
        }
        out << q.question_id << ',' << csv_number(q.ground_truth->value) << '\n';
    }
    return out.str();
}

} // namespace ciuv
