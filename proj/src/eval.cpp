#include "cmms/eval.hpp"

#include "cmms/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace cmms {

double accuracy(const Labels& pred, const Labels& truth) {
    if (pred.size() != truth.size()) {
        throw DataError("accuracy: " + std::to_string(pred.size()) + " predictions for " +
                        std::to_string(truth.size()) + " labels");
    }
    if (truth.empty()) {
        throw DataError("accuracy: no samples");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        hits += pred[i] == truth[i] ? 1 : 0;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<double> per_class_accuracy(const Labels& pred, const Labels& truth, int num_classes) {
    if (pred.size() != truth.size()) {
        throw DataError("per_class_accuracy: length mismatch");
    }
    std::vector<std::size_t> hits(static_cast<std::size_t>(num_classes), 0);
    std::vector<std::size_t> totals(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int c = truth[i];
        if (c < 0 || c >= num_classes) {
            throw DataError("per_class_accuracy: class index " + std::to_string(c) + " out of range");
        }
        ++totals[static_cast<std::size_t>(c)];
        hits[static_cast<std::size_t>(c)] += pred[i] == c ? 1 : 0;
    }
    std::vector<double> out;
    for (int c = 0; c < num_classes; ++c) {
        const auto total = totals[static_cast<std::size_t>(c)];
        if (total == 0) {
            throw DataError("per_class_accuracy: class index " + std::to_string(c) + " absent from truth");
        }
        out.push_back(100.0 * static_cast<double>(hits[static_cast<std::size_t>(c)]) /
                      static_cast<double>(total));
    }
    return out;
}

void score_report(Report& report, const Labels& predicted, const std::optional<Labels>& truth,
                  const Labels& initial, const std::vector<int>& class_values) {
    report.predictions.clear();
    for (int y : predicted) {
        report.predictions.push_back(class_values[static_cast<std::size_t>(y)]);
    }
    report.class_labels.clear();
    report.per_class_accuracy.clear();
    report.accuracy.reset();
    report.initial_accuracy.reset();
    report.mean_per_class.reset();
    if (!truth) {
        return;
    }
    report.accuracy = accuracy(predicted, *truth);
    if (!initial.empty()) {
        report.initial_accuracy = accuracy(initial, *truth);
    }
    // Restrict to classes present in the truth so absent classes do not
    // distort the mean.
    std::map<int, int> remap;
    for (int y : *truth) {
        remap.emplace(y, 0);
    }
    int next = 0;
    for (auto& [cls, idx] : remap) {
        idx = next++;
        report.class_labels.push_back(class_values[static_cast<std::size_t>(cls)]);
    }
    Labels sub_truth;
    Labels sub_pred;
    for (std::size_t i = 0; i < truth->size(); ++i) {
        sub_truth.push_back(remap[(*truth)[i]]);
        const auto it = remap.find(predicted[i]);
        sub_pred.push_back(it == remap.end() ? -1 : it->second);
    }
    report.per_class_accuracy = per_class_accuracy(sub_pred, sub_truth, next);
    double sum = 0.0;
    for (double a : report.per_class_accuracy) {
        sum += a;
    }
    report.mean_per_class = sum / static_cast<double>(report.per_class_accuracy.size());
}

void record_state(Report& report, const ModelState& state) {
    report.iterations_run = state.iteration;
    report.converged = state.converged;
    report.effective_dim = state.effective_d;
    report.lambda1 = state.lambda1;
    report.objective_trace = state.objective_trace;
    report.history = state.history;
    report.warnings = state.warnings;
}

nlohmann::json hyperparams_to_json(const Hyperparams& hyper) {
    return {
        {"alpha", hyper.alpha},
        {"beta", hyper.beta},
        {"gamma", hyper.gamma},
        {"dim", hyper.dim},
        {"k", hyper.k},
        {"max_iter", hyper.max_iter},
        {"tol", hyper.tol},
        {"variant", to_string(hyper.variant)},
        {"reestimate_delta", hyper.reestimate_delta},
    };
}

Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams h) {
    h.alpha = j.value("alpha", h.alpha);
    h.beta = j.value("beta", h.beta);
    h.gamma = j.value("gamma", h.gamma);
    h.dim = j.value("dim", h.dim);
    h.k = j.value("k", h.k);
    h.max_iter = j.value("max_iter", h.max_iter);
    h.tol = j.value("tol", h.tol);
    if (j.contains("variant")) {
        h.variant = parse_variant(j.at("variant").get<std::string>());
    }
    h.reestimate_delta = j.value("reestimate_delta", h.reestimate_delta);
    return h;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const Report& r) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : r.history) {
        history.push_back({{"iteration", h.iteration},
                           {"objective", h.objective},
                           {"changed_assignments", h.changed_assignments},
                           {"empty_clusters", h.empty_clusters},
                           {"lambda1", h.lambda1}});
    }
    return {
        {"schema_version", r.schema_version},
        {"task", r.task},
        {"mode", r.mode},
        {"method", r.method},
        {"accuracy", optional_json(r.accuracy)},
        {"initial_accuracy", optional_json(r.initial_accuracy)},
        {"class_labels", r.class_labels},
        {"per_class_accuracy", r.per_class_accuracy},
        {"mean_per_class", optional_json(r.mean_per_class)},
        {"iterations_run", r.iterations_run},
        {"converged", r.converged},
        {"effective_dim", r.effective_dim},
        {"lambda1", r.lambda1},
        {"objective_trace", r.objective_trace},
        {"history", history},
        {"warnings", r.warnings},
        {"predictions", r.predictions},
        {"seed", r.seed},
        {"input_fingerprint", r.input_fingerprint},
        {"config", r.config},
        {"wall_time_s", r.wall_time_s},
    };
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
        throw DataError("report: unsupported schema_version " + std::to_string(r.schema_version));
    }
    r.task = j.at("task").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.accuracy = optional_from(j, "accuracy");
    r.initial_accuracy = optional_from(j, "initial_accuracy");
    r.class_labels = j.at("class_labels").get<std::vector<int>>();
    r.per_class_accuracy = j.at("per_class_accuracy").get<std::vector<double>>();
    r.mean_per_class = optional_from(j, "mean_per_class");
    r.iterations_run = j.at("iterations_run").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.effective_dim = j.at("effective_dim").get<Eigen::Index>();
    r.lambda1 = j.at("lambda1").get<double>();
    r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    for (const auto& h : j.at("history")) {
        r.history.push_back({h.at("iteration").get<int>(), h.at("objective").get<double>(),
                             h.at("changed_assignments").get<int>(), h.at("empty_clusters").get<int>(),
                             h.at("lambda1").get<double>()});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.predictions = j.at("predictions").get<std::vector<int>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.input_fingerprint = j.at("input_fingerprint").get<std::string>();
    r.config = j.at("config");
    r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
}

void write_reports(const std::filesystem::path& path, const std::vector<Report>& reports) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    for (const auto& r : reports) {
        out << to_json(r).dump() << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::vector<Report> read_reports(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<Report> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(report_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ": malformed report at line " + std::to_string(line_no) +
                            ": " + e.what());
        }
    }
    return out;
}

std::string summary_csv(const std::vector<Report>& reports) {
    std::vector<std::string> tasks;
    std::vector<std::string> methods;
    std::map<std::pair<std::string, std::string>, double> cells;
    auto remember = [](std::vector<std::string>& list, const std::string& v) {
        if (std::find(list.begin(), list.end(), v) == list.end()) {
            list.push_back(v);
        }
    };
    for (const auto& r : reports) {
        remember(tasks, r.task);
        remember(methods, r.method);
        if (r.accuracy) {
            cells[{r.task, r.method}] = *r.accuracy;
        }
    }
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "task";
    for (const auto& m : methods) {
        out << ',' << m;
    }
    out << '\n';
    for (const auto& t : tasks) {
        out << t;
        for (const auto& m : methods) {
            out << ',';
            if (const auto it = cells.find({t, m}); it != cells.end()) {
                out << it->second;
            }
        }
        out << '\n';
    }
    if (tasks.size() > 1) {
        out << "Average";
        for (const auto& m : methods) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& t : tasks) {
                if (const auto it = cells.find({t, m}); it != cells.end()) {
                    sum += it->second;
                    ++count;
                }
            }
            out << ',';
            if (count == tasks.size()) {
                out << sum / static_cast<double>(count);
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string fingerprint_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::vector<Report> run_ablation(const Dataset& source, const Dataset& target, const Hyperparams& hyper,
                                 const std::vector<Variant>& variants, const AblationOptions& options) {
    if (variants.empty()) {
        throw ConfigError("run_ablation: no variants requested");
    }
    const std::string fp =
        fingerprint_hex(fingerprint(source) ^ (fingerprint(target) * 1099511628211ULL));
    std::vector<Report> reports;
    for (Variant v : variants) {
        Hyperparams h = hyper;
        h.variant = v;
        const auto start = std::chrono::steady_clock::now();
        const FitResult fit = fit_uda(source, target, h, options.fit);
        Report r;
        r.task = options.task;
        r.mode = "uda";
        r.method = to_string(v);
        r.seed = options.seed;
        r.input_fingerprint = fp;
        r.config = options.config;
        r.config["hyperparams"] = hyperparams_to_json(h);
        record_state(r, fit.state);
        score_report(r, fit.predicted, target.labels, fit.initial, source.class_values);
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace cmms
