#include "cmms/cli.hpp"

#include "cmms/dataset.hpp"
#include "cmms/errors.hpp"
#include "cmms/eval.hpp"
#include "cmms/semi.hpp"
#include "cmms/threads.hpp"
#include "cmms/verify/acceptance.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cmms::cli {

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::uda: return "uda";
        case Mode::sda_homo: return "sda-homo";
        case Mode::sda_hetero: return "sda-hetero";
        case Mode::ablate: return "ablate";
        case Mode::selftest: return "selftest";
    }
    return "unknown";
}

namespace {

Mode parse_mode(const std::string& name) {
    for (Mode m : {Mode::uda, Mode::sda_homo, Mode::sda_hetero, Mode::ablate, Mode::selftest}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ConfigError("unknown mode '" + name + "'");
}

bool semi_supervised(Mode mode) { return mode == Mode::sda_homo || mode == Mode::sda_hetero; }

std::vector<Variant> parse_variant_list(const std::string& text) {
    std::vector<Variant> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse_variant(item));
        }
    }
    return out;
}

}  // namespace

void RunConfig::validate() const {
    hyper.validate();
    if (mode == Mode::selftest) {
        return;
    }
    auto require = [this](const std::filesystem::path& p, const char* flag) {
        if (p.empty()) {
            throw ConfigError(to_string(mode) + " needs " + flag);
        }
    };
    require(source, "--source");
    require(source_labels, "--source-labels");
    require(target, "--target");
    if (semi_supervised(mode)) {
        require(target_labels, "--target-labels");
        if (per_class < 1) {
            throw ConfigError("--per-class must be at least 1");
        }
    }
    if (pca && *pca < 1) {
        throw ConfigError("--pca must be at least 1");
    }
    if (init != "ridge" && init != "centroid") {
        throw ConfigError("--init must be 'ridge' or 'centroid', got '" + init + "'");
    }
    if (out.empty()) {
        throw ConfigError("--out must not be empty");
    }
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json variants = nlohmann::json::array();
    for (Variant v : c.variants) {
        variants.push_back(to_string(v));
    }
    nlohmann::json j = hyperparams_to_json(c.hyper);
    j["mode"] = to_string(c.mode);
    j["source"] = c.source.generic_string();
    j["source_labels"] = c.source_labels.generic_string();
    j["target"] = c.target.generic_string();
    j["target_labels"] = c.target_labels.generic_string();
    j["zscore"] = c.zscore;
    j["pca"] = c.pca ? nlohmann::json(*c.pca) : nlohmann::json(nullptr);
    j["per_class"] = c.per_class;
    j["seed"] = c.seed;
    j["out"] = c.out.generic_string();
    j["task"] = c.task;
    j["init"] = c.init;
    j["variants"] = variants;
    return j;
}

void apply_config_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    static const std::vector<std::string> known = {
        "mode", "source", "source_labels", "target", "target_labels", "alpha", "beta", "gamma",
        "dim", "k", "max_iter", "tol", "variant", "reestimate_delta", "zscore", "pca", "per_class",
        "seed", "out", "task", "init", "variants"};
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw ConfigError("unknown config key '" + item.key() + "'");
        }
    }
    try {
        if (j.contains("mode") && parse_mode(j.at("mode").get<std::string>()) != c.mode) {
            throw ConfigError("config file is for mode '" + j.at("mode").get<std::string>() +
                              "' but the command is '" + to_string(c.mode) + "'");
        }
        c.hyper = hyperparams_from_json(j, c.hyper);
        auto path = [&j](const char* key, std::filesystem::path& dst) {
            if (j.contains(key)) {
                dst = j.at(key).get<std::string>();
            }
        };
        path("source", c.source);
        path("source_labels", c.source_labels);
        path("target", c.target);
        path("target_labels", c.target_labels);
        path("out", c.out);
        c.zscore = j.value("zscore", c.zscore);
        if (j.contains("pca")) {
            c.pca = j.at("pca").is_null() ? std::nullopt : std::optional<int>(j.at("pca").get<int>());
        }
        c.per_class = j.value("per_class", c.per_class);
        c.seed = j.value("seed", c.seed);
        c.task = j.value("task", c.task);
        c.init = j.value("init", c.init);
        if (j.contains("variants")) {
            c.variants.clear();
            for (const auto& v : j.at("variants")) {
                c.variants.push_back(parse_variant(v.get<std::string>()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
}

namespace {

// Raw flag values; an option only counts when it appeared on the command line.
struct Flags {
    std::string config;
    std::string source, source_labels, target, target_labels, out, task, init, variant, variants;
    double alpha = 0.0, beta = 0.0, gamma = 0.0, tol = 0.0;
    int dim = 0, k = 0, max_iter = 0, pca = 0, per_class = 0;
    std::uint64_t seed = 0;
    bool no_zscore = false;
    bool reestimate_delta = false;
    std::string benchmark_data;
};

void add_run_options(CLI::App& sub, Flags& f, Mode mode) {
    sub.add_option("--config", f.config, "JSON file with settings; flags take precedence");
    sub.add_option("--source", f.source, "source features (.csv or .bin)");
    sub.add_option("--source-labels", f.source_labels, "source labels, one integer per line");
    sub.add_option("--target", f.target, "target features (.csv or .bin)");
    sub.add_option("--target-labels", f.target_labels,
                   semi_supervised(mode) ? "target labels (needed for the split)"
                                         : "target labels, used for scoring only");
    sub.add_option("--alpha", f.alpha, "weight of the clustering term (default 0.1)");
    sub.add_option("--beta", f.beta, "weight of the projection regularizer (default 0.1)");
    sub.add_option("--gamma", f.gamma, "weight of the manifold terms (default 5.0)");
    sub.add_option("--dim", f.dim, "subspace dimension d (default 100)");
    sub.add_option("--k", f.k, "neighborhood size (default 10)");
    sub.add_option("--max-iter", f.max_iter, "maximum iterations T (default 10)");
    sub.add_option("--tol", f.tol, "relative objective tolerance (default 1e-6)");
    sub.add_option("--variant", f.variant, "full, cm, rm, pa, ds or op (default full)");
    sub.add_flag("--reestimate-delta", f.reestimate_delta, "recompute the neighbor scale every iteration");
    sub.add_option("--pca", f.pca, "reduce features to this many principal components");
    sub.add_flag("--no-zscore", f.no_zscore, "skip per-domain standardization");
    sub.add_option("--seed", f.seed, "seed for the labeled split (default 0)");
    sub.add_option("--out", f.out, "output directory (default cmms-out)");
    sub.add_option("--task", f.task, "task name in reports");
    sub.add_option("--init", f.init, "initial labels: ridge or centroid (default ridge)");
    if (semi_supervised(mode)) {
        sub.add_option("--per-class", f.per_class, "labeled target samples per class (default 3)");
    }
    if (mode == Mode::ablate) {
        sub.add_option("--variants", f.variants, "comma-separated variants (default all)");
    }
}

void apply_flags(RunConfig& c, const Flags& f, const CLI::App& sub) {
    auto given = [&sub](const char* name) { return sub.count(name) > 0; };
    if (given("--source")) c.source = f.source;
    if (given("--source-labels")) c.source_labels = f.source_labels;
    if (given("--target")) c.target = f.target;
    if (given("--target-labels")) c.target_labels = f.target_labels;
    if (given("--alpha")) c.hyper.alpha = f.alpha;
    if (given("--beta")) c.hyper.beta = f.beta;
    if (given("--gamma")) c.hyper.gamma = f.gamma;
    if (given("--dim")) c.hyper.dim = f.dim;
    if (given("--k")) c.hyper.k = f.k;
    if (given("--max-iter")) c.hyper.max_iter = f.max_iter;
    if (given("--tol")) c.hyper.tol = f.tol;
    if (given("--variant")) c.hyper.variant = parse_variant(f.variant);
    if (given("--reestimate-delta")) c.hyper.reestimate_delta = true;
    if (given("--pca")) c.pca = f.pca;
    if (given("--no-zscore")) c.zscore = false;
    if (given("--seed")) c.seed = f.seed;
    if (given("--out")) c.out = f.out;
    if (given("--task")) c.task = f.task;
    if (given("--init")) c.init = f.init;
    if (sub.get_option_no_throw("--per-class") && given("--per-class")) c.per_class = f.per_class;
    if (sub.get_option_no_throw("--variants") && given("--variants")) c.variants = parse_variant_list(f.variants);
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
}

}  // namespace

ParseResult parse_config(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"CMMS domain adaptation: class centroid matching with local manifold self-learning",
                 "cmms"};
    app.require_subcommand(1, 1);
    Flags flags;
    const std::vector<std::pair<Mode, const char*>> commands = {
        {Mode::uda, "unsupervised adaptation"},
        {Mode::sda_homo, "semi-supervised adaptation, shared feature space"},
        {Mode::sda_hetero, "semi-supervised adaptation, different feature spaces"},
        {Mode::ablate, "run several variants on one task"},
    };
    for (const auto& [mode, help] : commands) {
        add_run_options(*app.add_subcommand(to_string(mode), help), flags, mode);
    }
    CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance checks on synthetic data");
    selftest->add_option("--benchmark-data", flags.benchmark_data,
                         "directory with benchmark features for the optional reproduction check");

    if (args.empty()) {
        err << app.help();
        return {std::nullopt, kUsage};
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return {std::nullopt, kOk};
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << "run 'cmms " << (subs.empty() ? "" : subs.front()->get_name() + " ") << "--help' for usage\n";
        return {std::nullopt, kUsage};
    }

    const CLI::App* sub = app.get_subcommands().front();
    RunConfig config;
    try {
        config.mode = parse_mode(sub->get_name());
        if (config.mode == Mode::selftest) {
            if (sub->count("--benchmark-data") > 0) {
                config.benchmark_data = flags.benchmark_data;
            }
            return {config, kOk};
        }
        if (sub->count("--config") > 0) {
            config.config_file = flags.config;
            apply_config_json(config, read_config_file(flags.config));
        }
        apply_flags(config, flags, *sub);
        config.validate();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return {std::nullopt, kConfig};
    }
    return {config, kOk};
}

namespace {

struct Inputs {
    Dataset source;
    Dataset target;
    std::string fingerprint;
};

Inputs load_inputs(const RunConfig& c) {
    Inputs in;
    in.source = load_features(c.source, format_from_path(c.source));
    attach_labels(in.source, load_label_values(c.source_labels));
    in.source.name = c.source.stem().string();
    in.target = load_features(c.target, format_from_path(c.target));
    if (!c.target_labels.empty()) {
        attach_labels(in.target, load_label_values(c.target_labels), in.source.class_values);
    } else {
        in.target.class_values = in.source.class_values;
    }
    in.target.name = c.target.stem().string();
    validate(in.source);
    validate(in.target);
    in.fingerprint =
        fingerprint_hex(fingerprint(in.source) ^ (fingerprint(in.target) * 1099511628211ULL));
    return in;
}

Dataset with_features(const Dataset& d, Eigen::MatrixXd features) {
    Dataset out = d;
    out.features = std::move(features);
    return out;
}

// Per-domain standardization, then PCA: joint over both domains when they
// share a feature space, per domain otherwise.
void preprocess(const RunConfig& c, Dataset& source, Dataset& target) {
    const bool shared = c.mode != Mode::sda_hetero;
    if (shared && source.num_dims() != target.num_dims()) {
        throw DataError("source has " + std::to_string(source.num_dims()) + " features and target " +
                        std::to_string(target.num_dims()) + "; use sda-hetero for different feature spaces");
    }
    if (c.zscore) {
        source = zscore(source);
        target = zscore(target);
    }
    if (!c.pca) {
        return;
    }
    if (shared) {
        Dataset joint;
        joint.features.resize(source.num_samples() + target.num_samples(), source.num_dims());
        joint.features << source.features, target.features;
        const PcaResult reduced = pca(joint, *c.pca);
        source = with_features(source, reduced.reduced.features.topRows(source.num_samples()));
        target = with_features(target, reduced.reduced.features.bottomRows(target.num_samples()));
    } else {
        source = pca(source, *c.pca).reduced;
        target = pca(target, *c.pca).reduced;
    }
}

LabelInitializer initializer_for(const RunConfig& c) {
    return c.init == "centroid" ? centroid_initializer() : ridge_initializer();
}

std::string task_name(const RunConfig& c) {
    return c.task.empty() ? c.source.stem().string() + "->" + c.target.stem().string() : c.task;
}

void write_predictions(const std::filesystem::path& path, const std::vector<Eigen::Index>& rows,
                       const std::vector<int>& values) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "row,prediction\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << rows[i] << ',' << values[i] << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

int run_checked(const RunConfig& c, std::ostream& out) {
    if (c.mode == Mode::selftest) {
        return acceptance::run_and_print(out, c.benchmark_data) ? kOk : kSelftestFailed;
    }
    c.validate();
    Inputs in = load_inputs(c);
    preprocess(c, in.source, in.target);

    const nlohmann::json resolved = to_json(c);
    std::vector<Report> reports;
    std::vector<Eigen::Index> prediction_rows;

    if (c.mode == Mode::uda || c.mode == Mode::ablate) {
        AblationOptions options;
        options.task = task_name(c);
        options.seed = c.seed;
        options.config = resolved;
        options.fit.initializer = initializer_for(c);
        std::vector<Variant> variants = {c.hyper.variant};
        if (c.mode == Mode::ablate) {
            variants = c.variants.empty() ? all_variants() : c.variants;
        }
        reports = run_ablation(in.source, in.target, c.hyper, variants, options);
        for (Eigen::Index i = 0; i < in.target.num_samples(); ++i) {
            prediction_rows.push_back(i);
        }
    } else {
        const auto start = std::chrono::steady_clock::now();
        const SdaSplit split = split_sda(in.target, c.per_class, c.seed);
        SemiOptions options;
        options.fit.initializer = initializer_for(c);
        const SemiResult fit = c.mode == Mode::sda_homo
                                   ? fit_sda_homogeneous(in.source, split, c.hyper, options)
                                   : fit_sda_heterogeneous(in.source, split, c.hyper, options);
        Report r;
        r.task = task_name(c);
        r.mode = to_string(c.mode);
        r.method = to_string(c.hyper.variant);
        r.seed = c.seed;
        r.input_fingerprint = in.fingerprint;
        r.config = resolved;
        r.config["hyperparams"] = hyperparams_to_json(c.hyper);
        record_state(r, fit.state.base);
        score_report(r, fit.predicted, split.unlabeled.labels, fit.initial, in.source.class_values);
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        reports.push_back(std::move(r));
        prediction_rows = split.unlabeled_indices;
    }
    for (auto& r : reports) {
        r.input_fingerprint = in.fingerprint;
    }

    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) {
        throw IoError("cannot create output directory " + c.out.string() + ": " + ec.message());
    }
    write_reports(c.out / "reports.jsonl", reports);
    const std::string summary = summary_csv(reports);
    {
        std::ofstream csv(c.out / "summary.csv");
        csv << summary;
        if (!csv) {
            throw IoError("cannot write " + (c.out / "summary.csv").string());
        }
    }
    if (c.mode != Mode::ablate) {
        write_predictions(c.out / "predictions.csv", prediction_rows, reports.front().predictions);
    }
    out << summary;
    return kOk;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        return run_checked(config, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kData;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kData;
    } catch (const NumericalError& e) {
        err << "solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

int main_entry(int argc, char** argv) {
    try {
        configure_threads_from_env();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    const std::vector<std::string> args(argv + 1, argv + argc);
    const ParseResult parsed = parse_config(args, std::cout, std::cerr);
    if (!parsed.config) {
        return parsed.exit_code;
    }
    return run(*parsed.config, std::cout, std::cerr);
}

}  // namespace cmms::cli
