#pragma once

#include "cmms/dataset.hpp"
#include "cmms/solver.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cmms {

inline constexpr int kReportSchemaVersion = 1;

/// Percentage of positions where pred and truth agree.
double accuracy(const Labels& pred, const Labels& truth);

/// Entry c is the accuracy over samples whose true class is c. Throws
/// DataError if some class in [0, num_classes) has no samples in truth.
std::vector<double> per_class_accuracy(const Labels& pred, const Labels& truth, int num_classes);

struct Report {
    int schema_version = kReportSchemaVersion;
    std::string task;
    std::string mode;      // uda, sda-homo, sda-hetero
    std::string method;    // variant name
    std::optional<double> accuracy;
    std::optional<double> initial_accuracy;  // label initializer alone
    std::vector<int> class_labels;           // original value per entry below
    std::vector<double> per_class_accuracy;  // classes present in the truth
    std::optional<double> mean_per_class;
    int iterations_run = 0;
    bool converged = false;
    Eigen::Index effective_dim = 0;
    double lambda1 = 1.0;
    std::vector<double> objective_trace;
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;
    std::vector<int> predictions;   // original label values, target order
    std::uint64_t seed = 0;
    std::string input_fingerprint;
    nlohmann::json config;
    double wall_time_s = 0.0;

    bool operator==(const Report&) const = default;
};

/// Fills predictions and every accuracy field. Truth may be absent, in which
/// case accuracies stay empty. Per-class entries cover classes present in
/// the truth only.
void score_report(Report& report, const Labels& predicted, const std::optional<Labels>& truth,
                  const Labels& initial, const std::vector<int>& class_values);

/// Copies run statistics from a fitted state.
void record_state(Report& report, const ModelState& state);

nlohmann::json hyperparams_to_json(const Hyperparams& hyper);
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams defaults = {});

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// One JSON document per line.
void write_reports(const std::filesystem::path& path, const std::vector<Report>& reports);
std::vector<Report> read_reports(const std::filesystem::path& path);

/// Accuracy table, rows = tasks in first-seen order, columns = methods in
/// first-seen order, plus an Average row when there is more than one task.
std::string summary_csv(const std::vector<Report>& reports);

std::string fingerprint_hex(std::uint64_t value);

struct AblationOptions {
    std::string task = "task";
    std::uint64_t seed = 0;
    nlohmann::json config;   // echoed into every report
    FitOptions fit;
};

/// One fit per variant on the same standardized inputs. Target labels, when
/// present, are used only for scoring.
std::vector<Report> run_ablation(const Dataset& source, const Dataset& target, const Hyperparams& hyper,
                                 const std::vector<Variant>& variants, const AblationOptions& options = {});

}  // namespace cmms
