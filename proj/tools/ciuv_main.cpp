#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "ciuv/baselines.hpp"
#include "ciuv/dataset.hpp"
#include "ciuv/experiment.hpp"
#include "ciuv/fusion.hpp"

namespace {

int run_validate(const std::string& path, double tolerance) {
    const ciuv::LoadResult result = ciuv::load_and_validate(path, tolerance);
    std::cout << "years: " << result.table.years.size() << ", identity checks: "
              << result.identities.residuals.size() << '\n';
    for (const ciuv::IdentityResidual& r : result.identities.residuals) {
        std::cout << r.year << ',' << r.aggregate << ',' << ciuv::csv_number(r.residual) << ','
                  << (r.flagged ? "FLAGGED" : "ok") << '\n';
    }
    if (result.identities.any_flagged()) {
        std::cerr << "identity violations found\n";
        return 1;
    }
    return 0;
}

int run_fuse(const std::string& reports_path, const std::string& truths_path, double e_t,
             bool verbose) {
    std::ifstream reports_in(reports_path);
    if (!reports_in) {
        throw ciuv::ParseError("cannot open '" + reports_path + "'");
    }
    std::ifstream truths_in(truths_path);
    if (!truths_in) {
        throw ciuv::ParseError("cannot open '" + truths_path + "'");
    }
    const std::vector<ciuv::Report> reports = ciuv::load_reports_csv(reports_in);
    const std::vector<ciuv::Question> truths = ciuv::load_truths_csv(truths_in);

    std::map<std::string, double> truth_by_question;
    for (const ciuv::Question& q : truths) {
        truth_by_question[q.question_id] = q.ground_truth->value;
    }
    std::vector<std::string> question_order;
    std::map<std::string, std::map<std::string, double>> by_question;
    for (const ciuv::Report& r : reports) {
        if (!by_question.contains(r.question_id)) {
            question_order.push_back(r.question_id);
        }
        by_question[r.question_id][r.source_id] = r.answer.value;
    }

    ciuv::ProbeSet probes;
    probes.truth_mode = ciuv::TruthMode::KnownTruth;
    std::vector<std::string> target_questions;
    for (const std::string& qid : question_order) {
        if (truth_by_question.contains(qid)) {
            probes.questions.push_back(
                ciuv::Question{qid, ciuv::UnifiedView{truth_by_question.at(qid)}});
        } else {
            target_questions.push_back(qid);
        }
    }
    if (probes.questions.empty()) {
        throw ciuv::ValidationError("no question in the reports has a known truth");
    }
    for (const ciuv::Report& r : reports) {
        if (truth_by_question.contains(r.question_id)) {
            probes.reports.push_back(r);
        }
    }
    // With every truth known, re-estimate all questions.
    if (target_questions.empty()) {
        target_questions = question_order;
    }

    const std::vector<ciuv::ReliabilityProfile> profiles = ciuv::estimate_profiles(probes);
    std::vector<std::string> sources;
    for (const ciuv::ReliabilityProfile& p : profiles) {
        sources.push_back(p.source_id);
    }

    std::cout << "question_id,estimate,mu_star,sigma2_star,confidence\n";
    for (const std::string& qid : target_questions) {
        std::vector<ciuv::UnifiedView> views;
        for (const std::string& s : sources) {
            const auto& answers = by_question.at(qid);
            const auto it = answers.find(s);
            if (it == answers.end()) {
                throw ciuv::ValidationError("source '" + s + "' did not answer question '" + qid +
                                            "'");
            }
            views.push_back(ciuv::UnifiedView{it->second});
        }
        const ciuv::TruthEstimate est =
            ciuv::estimate_truth(views, profiles, ciuv::ErrorThreshold{e_t});
        std::cout << qid << ',' << ciuv::csv_number(est.u_star.value) << ','
                  << ciuv::csv_number(est.mu_star) << ',' << ciuv::csv_number(est.sigma2_star)
                  << ',' << ciuv::csv_number(est.confidence) << '\n';
        if (verbose) {
            std::cerr << qid << " worst_case_bound=" << ciuv::csv_number(ciuv::worst_case_bound(views))
                      << '\n';
            for (std::size_t i = 0; i < sources.size(); ++i) {
                std::cerr << "  " << sources[i] << " weight="
                          << ciuv::csv_number(est.weights.weights[i]) << " mu="
                          << ciuv::csv_number(profiles[i].mu) << " sigma2="
                          << ciuv::csv_number(profiles[i].sigma2) << '\n';
            }
        }
    }
    return 0;
}

int run_synth(std::uint64_t seed, std::size_t questions, const std::string& reports_path,
              const std::string& truths_path) {
    const ciuv::SyntheticData data = ciuv::synthesize_table1(seed, questions);
    std::ofstream reports_out(reports_path);
    if (!reports_out) {
        throw ciuv::ValidationError("cannot write '" + reports_path + "'");
    }
    reports_out << ciuv::reports_to_csv(data.probes.reports);
    std::ofstream truths_out(truths_path);
    if (!truths_out) {
        throw ciuv::ValidationError("cannot write '" + truths_path + "'");
    }
    truths_out << ciuv::truths_to_csv(data.probes.questions);
    std::cout << "wrote " << data.probes.reports.size() << " reports for " << questions
              << " questions to " << reports_path << " / " << truths_path << '\n';
    return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::optional<std::string>& sweep_arg,
                       const std::string& out_dir) {
    const ciuv::ScenarioConfig config = ciuv::load_scenario_config(config_path);
    std::optional<ciuv::SweepSpec> sweep;
    if (sweep_arg) {
        sweep = ciuv::parse_sweep(*sweep_arg);
    }
    const ciuv::ExperimentOutput output = ciuv::run_experiment(config, sweep);

    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "plotdata");
    {
        std::ofstream out(fs::path(out_dir) / "results.csv");
        out << ciuv::results_to_csv(output.rows);
    }
    {
        std::ofstream out(fs::path(out_dir) / "trajectory.jsonl");
        out << output.trajectory_jsonl;
    }
    for (const auto& [name, content] : output.plot_files) {
        std::ofstream out(fs::path(out_dir) / "plotdata" / name);
        out << content;
    }
    for (const ciuv::ResultRow& row : output.rows) {
        std::cout << row.sweep_key << '=';
        std::cout << (row.sweep_value ? ciuv::csv_number(*row.sweep_value) : std::string("-"));
        std::cout << ' ' << row.method << " mean_error=" << ciuv::csv_number(row.mean_error)
                  << " std_dev=" << ciuv::csv_number(row.std_dev) << '\n';
    }
    std::cout << "results written to " << out_dir << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truth discovery from conflicting views: fusion engine and experiment harness"};
    app.require_subcommand(1);

    std::string levels_path;
    double tolerance = 0.005;
    CLI::App* validate = app.add_subcommand("validate", "Check a level CSV against the "
                                                        "accounting identities");
    validate->add_option("levels", levels_path, "level statistics CSV")->required();
    validate->add_option("--tolerance", tolerance, "relative identity tolerance");

    std::string reports_path;
    std::string truths_path;
    double e_t = 1.0;
    bool verbose = false;
    CLI::App* fuse = app.add_subcommand("fuse", "Fuse reported views using truth-backed "
                                                "questions for reliability estimation");
    fuse->add_option("reports", reports_path, "long-format reports CSV")->required();
    fuse->add_option("truths", truths_path, "question truths CSV")->required();
    fuse->add_option("--e-t", e_t, "confidence window half-width");
    fuse->add_flag("--verbose", verbose, "print weights and bounds to stderr");

    std::uint64_t seed = 1;
    std::size_t questions = 20;
    std::string synth_reports = "reports.csv";
    std::string synth_truths = "truths.csv";
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic report/truth data set");
    synth->add_option("--seed", seed, "generator seed")->required();
    synth->add_option("--questions", questions, "number of questions");
    synth->add_option("--out-reports", synth_reports, "reports output path");
    synth->add_option("--out-truths", synth_truths, "truths output path");

    std::string config_path;
    std::string out_dir = ".";
    std::string sweep_text;
    CLI::App* experiment = app.add_subcommand("experiment", "Run the comparison experiment grid");
    experiment->add_option("--config", config_path, "key=value scenario config")->required();
    experiment->add_option("--sweep", sweep_text, "factor sweep, e.g. mv=3,6,9,12");
    experiment->add_option("--out-dir", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            return run_validate(levels_path, tolerance);
        }
        if (*fuse) {
            return run_fuse(reports_path, truths_path, e_t, verbose);
        }
        if (*synth) {
            return run_synth(seed, questions, synth_reports, synth_truths);
        }
        if (*experiment) {
            std::optional<std::string> sweep_arg;
            if (!sweep_text.empty()) {
                sweep_arg = sweep_text;
            }
            return run_experiment_cmd(config_path, sweep_arg, out_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
