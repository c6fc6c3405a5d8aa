#include "cmms/semi.hpp"

#include "cmms/errors.hpp"
#include "engine.hpp"

#include <algorithm>

namespace cmms {

namespace {

constexpr double kDegenerateTrace = 1e-12;

void check_split(const Dataset& source, const SdaSplit& split) {
    validate(source);
    if (!source.labels) {
        throw DataError("semi-supervised fit: source has no labels");
    }
    if (split.labeled.num_samples() > 0) {
        validate(split.labeled);
        if (!split.labeled.labels) {
            throw DataError("semi-supervised fit: labeled target samples carry no labels");
        }
    }
    validate(split.unlabeled);
    if (split.labeled.num_samples() > 0 && split.labeled.num_dims() != split.unlabeled.num_dims()) {
        throw DataError("semi-supervised fit: labeled and unlabeled target dimensions differ");
    }
}

Eigen::MatrixXd stack_target(const SdaSplit& split) {
    Eigen::MatrixXd t(split.labeled.num_samples() + split.unlabeled.num_samples(),
                      split.unlabeled.num_dims());
    if (split.labeled.num_samples() > 0) {
        t.topRows(split.labeled.num_samples()) = split.labeled.features;
    }
    t.bottomRows(split.unlabeled.num_samples()) = split.unlabeled.features;
    return t;
}

Labels labeled_labels(const SdaSplit& split) {
    return split.labeled.labels ? *split.labeled.labels : Labels{};
}

SemiResult finish(detail::EngineSetup setup, const Hyperparams& hyper, const SemiOptions& options,
                  Labels initial_unlabeled) {
    const Eigen::Index n_l = setup.consts.n_l;
    SemiResult result;
    result.state.G_l = setup.g_init.topRows(n_l);
    result.state.base = detail::run_engine(std::move(setup), hyper, options.fit.print_warnings);
    result.state.lambda1 = result.state.base.lambda1;
    result.state.lambda2 = result.state.base.lambda2;
    const auto& g_t = result.state.base.G_t;
    result.predicted = argmax_rows(g_t.bottomRows(g_t.rows() - n_l));
    result.initial = std::move(initial_unlabeled);
    return result;
}

double start_lambda(const SemiOptions& options) {
    const double l1 = options.pinned_lambda1.value_or(options.initial_lambda1);
    if (!(l1 >= 0.0 && l1 <= 1.0)) {
        throw ConfigError("lambda1 must lie in [0, 1]");
    }
    return l1;
}

}  // namespace

std::pair<double, double> update_lambda(const Eigen::MatrixXd& p, const Eigen::MatrixXd& x_source,
                                        const Eigen::MatrixXd& e_source,
                                        const Eigen::MatrixXd& x_labeled,
                                        const Eigen::MatrixXd& e_labeled, const Eigen::MatrixXd& f) {
    const Eigen::MatrixXd source_centroids = p.transpose() * (x_source * e_source);
    Eigen::MatrixXd labeled_centroids = Eigen::MatrixXd::Zero(f.rows(), f.cols());
    if (x_labeled.cols() > 0) {
        labeled_centroids = p.transpose() * (x_labeled * e_labeled);
    }
    const Eigen::MatrixXd j = source_centroids - labeled_centroids;
    const Eigen::MatrixXd m = f - labeled_centroids;
    const double denom = j.squaredNorm();
    if (denom < kDegenerateTrace) {
        return {0.5, 0.5};
    }
    const double lambda1 = std::clamp(j.cwiseProduct(m).sum() / denom, 0.0, 1.0);
    return {lambda1, 1.0 - lambda1};
}

Eigen::MatrixXd block_diagonal_columns(const Eigen::MatrixXd& source_rows,
                                       const Eigen::MatrixXd& target_rows) {
    const Eigen::Index m_s = source_rows.cols();
    const Eigen::Index m_t = target_rows.cols();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m_s + m_t, source_rows.rows() + target_rows.rows());
    x.topLeftCorner(m_s, source_rows.rows()) = source_rows.transpose();
    x.bottomRightCorner(m_t, target_rows.rows()) = target_rows.transpose();
    return x;
}

SemiResult fit_sda_homogeneous(const Dataset& source, const SdaSplit& split, const Hyperparams& hyper,
                               const SemiOptions& options) {
    hyper.validate();
    check_split(source, split);
    if (source.num_dims() != split.unlabeled.num_dims()) {
        throw DataError("fit_sda_homogeneous: source has " + std::to_string(source.num_dims()) +
                        " features, target has " + std::to_string(split.unlabeled.num_dims()));
    }
    const double lambda1 = start_lambda(options);
    const Eigen::MatrixXd target = stack_target(split);
    const Labels labeled = labeled_labels(split);
    const int num_classes = source.num_classes();

    Eigen::MatrixXd x(source.num_dims(), source.num_samples() + target.rows());
    x << source.features.transpose(), target.transpose();

    // Initial classifier sees the source plus the labeled target samples.
    Dataset train;
    train.class_values = source.class_values;
    train.features.resize(source.num_samples() + split.labeled.num_samples(), source.num_dims());
    train.features.topRows(source.num_samples()) = source.features;
    if (split.labeled.num_samples() > 0) {
        train.features.bottomRows(split.labeled.num_samples()) = split.labeled.features;
    }
    Labels train_labels = *source.labels;
    train_labels.insert(train_labels.end(), labeled.begin(), labeled.end());
    train.labels = std::move(train_labels);
    const Labels initial = options.fit.initializer(train, split.unlabeled.features);

    detail::EngineSetup setup{
        assemble_standard_form(std::move(x), *source.labels, target.rows(), labeled, num_classes),
        Eigen::MatrixXd::Zero(target.rows(), num_classes), target, lambda1,
        !options.pinned_lambda1.has_value()};
    setup.g_init.topRows(split.labeled.num_samples()) = one_hot(labeled, num_classes);
    setup.g_init.bottomRows(split.unlabeled.num_samples()) = one_hot(initial, num_classes);
    return finish(std::move(setup), hyper, options, initial);
}

SemiResult fit_sda_heterogeneous(const Dataset& source, const SdaSplit& split,
                                 const Hyperparams& hyper, const SemiOptions& options) {
    hyper.validate();
    check_split(source, split);
    if (split.labeled.num_samples() == 0) {
        throw DataError("fit_sda_heterogeneous: needs labeled target samples to initialize");
    }
    const double lambda1 = start_lambda(options);
    const Eigen::MatrixXd target = stack_target(split);
    const Labels labeled = labeled_labels(split);
    const int num_classes = source.num_classes();

    Dataset train = split.labeled;
    train.class_values = source.class_values;
    const Labels initial = options.fit.initializer(train, split.unlabeled.features);

    detail::EngineSetup setup{
        assemble_standard_form(block_diagonal_columns(source.features, target), *source.labels,
                               target.rows(), labeled, num_classes),
        Eigen::MatrixXd::Zero(target.rows(), num_classes), target, lambda1,
        !options.pinned_lambda1.has_value()};
    setup.g_init.topRows(split.labeled.num_samples()) = one_hot(labeled, num_classes);
    setup.g_init.bottomRows(split.unlabeled.num_samples()) = one_hot(initial, num_classes);

    SemiResult result = finish(std::move(setup), hyper, options, initial);
    const auto& p = result.state.base.P;
    result.state.P_source = p.topRows(source.num_dims());
    result.state.P_target = p.bottomRows(split.unlabeled.num_dims());
    return result;
}

}  // namespace cmms
