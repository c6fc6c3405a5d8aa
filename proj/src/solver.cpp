#include "cmms/solver.hpp"

#include "cmms/errors.hpp"
#include "engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cmms {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 6> kVariantNames{{
    {Variant::full, "full"},
    {Variant::cm, "cm"},
    {Variant::rm, "rm"},
    {Variant::pa, "pa"},
    {Variant::ds, "ds"},
    {Variant::op, "op"},
}};

}  // namespace

std::string to_string(Variant v) {
    for (const auto& [variant, name] : kVariantNames) {
        if (variant == v) {
            return std::string(name);
        }
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    for (const auto& [variant, label] : kVariantNames) {
        if (label == name) {
            return variant;
        }
    }
    throw ConfigError("unknown variant '" + std::string(name) + "' (expected full, cm, rm, pa, ds or op)");
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> variants{Variant::cm, Variant::rm, Variant::pa,
                                               Variant::ds, Variant::op, Variant::full};
    return variants;
}

void Hyperparams::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
    require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
    require(dim >= 1, "dim must be >= 1");
    require(k >= 1, "k must be >= 1");
    require(max_iter >= 1, "max_iter must be >= 1");
    require(std::isfinite(tol) && tol >= 0.0, "tol must be >= 0");
}

double Hyperparams::effective_gamma() const {
    return variant == Variant::cm ? 0.0 : gamma;
}

Eigen::MatrixXd ConstantMatrices::centering() const {
    const Eigen::Index total = n();
    return Eigen::MatrixXd::Identity(total, total) -
           Eigen::MatrixXd::Constant(total, total, 1.0 / static_cast<double>(total));
}

Eigen::MatrixXd ConstantMatrices::V() const {
    return v_diag.asDiagonal();
}

void ConstantMatrices::set_balance(double lambda1, double lambda2) {
    E.topRows(n_s) = lambda1 * E_source;
    E.middleRows(n_s, n_l) = lambda2 * E_labeled;
}

Eigen::MatrixXd centroid_selector(const Labels& labels, int num_classes) {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        ++counts[static_cast<std::size_t>(y)];
    }
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        e(static_cast<Eigen::Index>(i), labels[i]) = 1.0 / counts[static_cast<std::size_t>(labels[i])];
    }
    return e;
}

ConstantMatrices assemble_standard_form(Eigen::MatrixXd x, const Labels& source_labels,
                                        Eigen::Index n_t, const Labels& labeled_target,
                                        int num_classes) {
    ConstantMatrices c;
    c.n_s = static_cast<Eigen::Index>(source_labels.size());
    c.n_t = n_t;
    c.n_l = static_cast<Eigen::Index>(labeled_target.size());
    c.num_classes = num_classes;
    if (x.cols() != c.n_s + c.n_t) {
        throw DataError("assemble: X has " + std::to_string(x.cols()) + " columns, expected " +
                        std::to_string(c.n_s + c.n_t));
    }
    if (c.n_l > c.n_t) {
        throw DataError("assemble: more labeled target samples than target samples");
    }
    c.X = std::move(x);
    c.source_lap = source_laplacian(source_labels, num_classes);
    c.E_source = centroid_selector(source_labels, num_classes);
    c.E_labeled = centroid_selector(labeled_target, num_classes);
    c.E = Eigen::MatrixXd::Zero(c.n(), num_classes);
    c.set_balance(1.0, 0.0);
    c.v_diag = Eigen::VectorXd::Zero(c.n());
    c.v_diag.tail(c.n_t).setOnes();

    const Eigen::MatrixXd centered = c.X.colwise() - c.X.rowwise().mean();
    c.total_scatter = centered * centered.transpose();
    c.target_gram = c.target_cols() * c.target_cols().transpose();
    c.source_scatter = c.source_lap.scatter(c.source_cols());
    return c;
}

ConstantMatrices assemble_constants(const Dataset& source, const Dataset& target) {
    validate(source);
    validate(target);
    if (!source.labels) {
        throw DataError("assemble_constants: source dataset '" + source.name + "' has no labels");
    }
    if (source.num_dims() != target.num_dims()) {
        throw DataError("assemble_constants: source has " + std::to_string(source.num_dims()) +
                        " features, target has " + std::to_string(target.num_dims()));
    }
    Eigen::MatrixXd x(source.num_dims(), source.num_samples() + target.num_samples());
    x << source.features.transpose(), target.features.transpose();
    return assemble_standard_form(std::move(x), *source.labels, target.num_samples(), {},
                                  source.num_classes());
}

Eigen::MatrixXd one_hot(const Labels& labels, int num_classes) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        g(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return g;
}

Labels argmax_rows(const Eigen::MatrixXd& m) {
    Labels out(static_cast<std::size_t>(m.rows()), 0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < m.cols(); ++j) {
            if (m(i, j) > m(i, best)) {
                best = j;
            }
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

Eigen::MatrixXd init_labels(const Dataset& source, const Dataset& target,
                            const LabelInitializer& initializer) {
    if (!source.labels) {
        throw DataError("init_labels: source has no labels");
    }
    if (source.num_dims() != target.num_dims()) {
        throw DataError("init_labels: source and target feature dimensions differ");
    }
    return one_hot(initializer(source, target.features), source.num_classes());
}

Eigen::MatrixXd build_R(const Eigen::MatrixXd& e, const Eigen::VectorXd& v_diag,
                        const Eigen::MatrixXd& g_t, double alpha) {
    const Eigen::Index n = e.rows();
    const Eigen::Index n_t = g_t.rows();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, e.cols());
    g.bottomRows(n_t) = g_t;
    const Eigen::MatrixXd vg = v_diag.asDiagonal() * g;
    const Eigen::MatrixXd n_mat = e + alpha * vg;
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(e.cols(), e.cols()) + alpha * g.transpose() * g;
    const Eigen::MatrixXd k_inv_nt = k.llt().solve(n_mat.transpose());
    Eigen::MatrixXd r = e * e.transpose();
    r.diagonal() += alpha * v_diag;
    r -= n_mat * k_inv_nt;
    return 0.5 * (r + r.transpose());
}

Eigen::MatrixXd centroid_scatter(const ConstantMatrices& consts, const Eigen::MatrixXd& g_t,
                                 double alpha) {
    const int c = consts.num_classes;
    const Eigen::MatrixXd xe = consts.X * consts.E;
    const Eigen::MatrixXd xn = xe + alpha * (consts.target_cols() * g_t);
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(c, c) + alpha * g_t.transpose() * g_t;
    Eigen::MatrixXd out = xe * xe.transpose() + alpha * consts.target_gram;
    out -= xn * k.llt().solve(xn.transpose());
    return 0.5 * (out + out.transpose());
}

TargetTerm target_term_for(Variant v) {
    switch (v) {
        case Variant::full:
        case Variant::cm:
            return TargetTerm::adaptive;
        case Variant::pa:
        case Variant::op:
            return TargetTerm::fixed;
        case Variant::ds:
            return TargetTerm::class_scatter;
        case Variant::rm:
            return TargetTerm::none;
    }
    return TargetTerm::none;
}

Eigen::MatrixXd manifold_scatter(const ConstantMatrices& consts, const ManifoldState& manifold) {
    Eigen::MatrixXd out = 2.0 * consts.source_scatter;
    switch (manifold.term) {
        case TargetTerm::adaptive:
        case TargetTerm::fixed: {
            const Eigen::MatrixXd xl = consts.target_cols() * manifold.graph.laplacian;
            out.noalias() += 2.0 * xl * consts.target_cols().transpose();
            break;
        }
        case TargetTerm::class_scatter:
            out += 2.0 * manifold.pseudo_lap->scatter(consts.target_cols());
            break;
        case TargetTerm::none:
            break;
    }
    return 0.5 * (out + out.transpose());
}

EigResult update_P(const ConstantMatrices& consts, const Eigen::MatrixXd& manifold,
                   const Eigen::MatrixXd& g_t, const Hyperparams& hyper) {
    Eigen::MatrixXd a = centroid_scatter(consts, g_t, hyper.alpha);
    a += hyper.effective_gamma() * manifold;
    a.diagonal().array() += hyper.beta;
    return gen_eig_smallest(a, consts.total_scatter, hyper.dim);
}

Eigen::MatrixXd update_F(const Eigen::MatrixXd& p, const ConstantMatrices& consts,
                         const Eigen::MatrixXd& g_t, double alpha) {
    const int c = consts.num_classes;
    const Eigen::MatrixXd rhs = p.transpose() * (consts.X * consts.E) +
                                alpha * (p.transpose() * consts.target_cols()) * g_t;
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(c, c) + alpha * g_t.transpose() * g_t;
    // F K = rhs with K symmetric positive definite.
    return k.llt().solve(rhs.transpose()).transpose();
}

Eigen::MatrixXd update_G(const Eigen::MatrixXd& projected_target, const Eigen::MatrixXd& f) {
    const Eigen::Index n_t = projected_target.cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_t, f.cols());
    for (Eigen::Index i = 0; i < n_t; ++i) {
        Eigen::Index best = 0;
        double best_dist = (projected_target.col(i) - f.col(0)).squaredNorm();
        for (Eigen::Index j = 1; j < f.cols(); ++j) {
            const double dist = (projected_target.col(i) - f.col(j)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        g(i, best) = 1.0;
    }
    return g;
}

ObjectiveTerms objective_terms(const ModelState& state, const ConstantMatrices& consts,
                               const Hyperparams& hyper) {
    const double gamma = hyper.effective_gamma();
    const Eigen::MatrixXd z = state.P.transpose() * consts.X;
    const auto z_t = z.rightCols(consts.n_t);

    ObjectiveTerms t;
    t.centroid = (z * consts.E - state.F).squaredNorm();
    t.cluster = hyper.alpha * (z_t - state.F * state.G_t.transpose()).squaredNorm();
    t.regularizer = hyper.beta * state.P.squaredNorm();
    t.source_manifold = gamma * 2.0 * consts.source_lap.quadratic(z.leftCols(consts.n_s));
    switch (state.manifold.term) {
        case TargetTerm::adaptive:
        case TargetTerm::fixed: {
            const auto& graph = state.manifold.graph;
            const Eigen::MatrixXd zl = z_t * graph.laplacian;
            t.target_manifold = gamma * 2.0 * zl.cwiseProduct(z_t).sum();
            t.similarity = gamma * graph.delta * graph.similarity.squaredNorm();
            break;
        }
        case TargetTerm::class_scatter:
            t.target_manifold = gamma * 2.0 * state.manifold.pseudo_lap->quadratic(z_t);
            break;
        case TargetTerm::none:
            break;
    }
    return t;
}

double objective(const ModelState& state, const ConstantMatrices& consts, const Hyperparams& hyper) {
    return objective_terms(state, consts, hyper).total();
}

FitResult fit_uda(const Dataset& source, const Dataset& target, const Hyperparams& hyper,
                  const FitOptions& options) {
    hyper.validate();
    detail::EngineSetup setup{assemble_constants(source, target), {}, target.features, 1.0, false};
    const Labels initial = options.initializer(source, target.features);
    setup.g_init = one_hot(initial, source.num_classes());
    FitResult result;
    result.state = detail::run_engine(std::move(setup), hyper, options.print_warnings);
    result.predicted = argmax_rows(result.state.G_t);
    result.initial = initial;
    return result;
}

}  // namespace cmms
