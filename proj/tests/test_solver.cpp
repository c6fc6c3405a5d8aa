#include "doctest.h"
#include "helpers.hpp"

#include "cmms/errors.hpp"
#include "cmms/eval.hpp"
#include "cmms/solver.hpp"
#include "cmms/synthetic.hpp"
#include "cmms/verify/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>

using namespace cmms;

namespace {

struct Instance {
    Dataset source;
    Dataset target;
    ConstantMatrices consts;
};

Instance random_instance(std::mt19937_64& rng, Eigen::Index n_s, Eigen::Index n_t, Eigen::Index m, int classes) {
    Instance in;
    in.source = testing::labeled_dataset(testing::random_matrix(rng, n_s, m), testing::random_labels(rng, n_s, classes),
                                         classes);
    in.target.features = testing::random_matrix(rng, n_t, m) + Eigen::MatrixXd::Constant(n_t, m, 0.3);
    in.target.class_values = in.source.class_values;
    in.consts = assemble_constants(in.source, in.target);
    return in;
}

std::vector<int> random_assignment(std::mt19937_64& rng, Eigen::Index n, int classes) {
    std::vector<int> a(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> pick(0, classes - 1);
    for (auto& v : a) {
        v = pick(rng);
    }
    return a;
}

Eigen::MatrixXd one_hot_of(const std::vector<int>& a, int classes) {
    return one_hot(Labels(a.begin(), a.end()), classes);
}

FitOptions quiet() {
    FitOptions o;
    o.print_warnings = false;
    return o;
}

void check_non_increasing(const std::vector<double>& trace) {
    for (std::size_t r = 1; r < trace.size(); ++r) {
        CHECK(trace[r] <= trace[r - 1] + 1e-9 * std::abs(trace[r - 1]));
    }
}

// Two tight, well separated classes in 5-D.
Dataset separable(std::mt19937_64& rng, int per_class, double offset) {
    Eigen::MatrixXd x = testing::random_matrix(rng, 2 * per_class, 5, 0.3);
    Labels y;
    for (int i = 0; i < 2 * per_class; ++i) {
        const int c = i % 2;
        y.push_back(c);
        x(i, 0) += c == 0 ? -5.0 : 5.0;
        x(i, 1) += offset;
    }
    return testing::labeled_dataset(x, y, 2);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("hyperparameter defaults follow the published settings") {
    const Hyperparams h;
    CHECK(h.dim == 100);
    CHECK(h.gamma == 5.0);
    CHECK(h.k == 10);
    CHECK(h.max_iter == 10);
    CHECK(h.alpha == 0.1);
    CHECK(h.beta == 0.1);
    CHECK(h.variant == Variant::full);
    CHECK_FALSE(h.reestimate_delta);
}

TEST_CASE("hyperparameter validation") {
    auto bad = [](auto mutate) {
        Hyperparams h;
        mutate(h);
        return h;
    };
    CHECK_NOTHROW(Hyperparams{}.validate());
    CHECK_THROWS_AS(bad([](Hyperparams& h) { h.alpha = -1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](Hyperparams& h) { h.beta = -0.1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](Hyperparams& h) { h.gamma = -5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](Hyperparams& h) { h.dim = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](Hyperparams& h) { h.k = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](Hyperparams& h) { h.max_iter = 0; }).validate(), ConfigError);
    Hyperparams cm;
    cm.variant = Variant::cm;
    CHECK(cm.effective_gamma() == 0.0);
    CHECK(Hyperparams{}.effective_gamma() == 5.0);
}

TEST_CASE("variant names round trip") {
    CHECK(all_variants().size() == 6);
    for (Variant v : all_variants()) {
        CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK(to_string(all_variants().back()) == "full");
    CHECK_THROWS_AS(parse_variant("bogus"), ConfigError);
}

TEST_CASE("constants for two source samples and one target sample") {
    Dataset s = testing::labeled_dataset(Eigen::MatrixXd(2, 1), {0, 0}, 1);
    s.features << 1.0, 3.0;
    Dataset t;
    t.features = Eigen::MatrixXd::Constant(1, 1, 7.0);
    const ConstantMatrices c = assemble_constants(s, t);
    CHECK(c.E.isApprox(Eigen::Vector3d(0.5, 0.5, 0.0)));
    CHECK(c.V() == Eigen::Vector3d(0, 0, 1).asDiagonal().toDenseMatrix());
    CHECK(c.n_s == 2);
    CHECK(c.n_t == 1);
    CHECK(c.n_l == 0);
}

TEST_CASE("constant matrices on a random instance") {
    std::mt19937_64 rng(1);
    const Instance in = random_instance(rng, 20, 15, 6, 3);
    const ConstantMatrices& c = in.consts;
    CHECK((c.E.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd class_means = c.X * c.E;
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
        int count = 0;
        for (Eigen::Index i = 0; i < 20; ++i) {
            if ((*in.source.labels)[static_cast<std::size_t>(i)] == k) {
                mean += in.source.features.row(i).transpose();
                ++count;
            }
        }
        CHECK((class_means.col(k) - mean / count).norm() < 1e-12);
    }
    const Eigen::MatrixXd h = c.centering();
    CHECK((h * Eigen::VectorXd::Ones(35)).norm() < 1e-12);
    CHECK((c.total_scatter - c.X * h * c.X.transpose()).norm() < 1e-10);
    CHECK((c.target_gram - c.target_cols() * c.target_cols().transpose()).norm() < 1e-10);
    CHECK((c.source_scatter - c.source_cols() * c.source_lap.matrix() * c.source_cols().transpose()).norm() < 1e-10);
    CHECK(c.v_diag.head(20).isZero(0.0));
    CHECK(c.v_diag.tail(15).isOnes(0.0));
}

TEST_CASE("constant assembly preconditions") {
    std::mt19937_64 rng(2);
    Instance in = random_instance(rng, 10, 10, 4, 2);
    Dataset wide = in.target;
    wide.features = Eigen::MatrixXd::Zero(10, 5);
    CHECK_THROWS_AS(assemble_constants(in.source, wide), DataError);
    Dataset unlabeled = in.source;
    unlabeled.labels.reset();
    CHECK_THROWS_AS(assemble_constants(unlabeled, in.target), DataError);
}

TEST_CASE("centroid selector leaves absent classes empty") {
    const Eigen::MatrixXd e = centroid_selector({0, 2, 2}, 3);
    CHECK(e(0, 0) == 1.0);
    CHECK(e.col(1).isZero(0.0));
    CHECK(e(1, 2) == 0.5);
    CHECK(e(2, 2) == 0.5);
}

TEST_CASE("initial labels on a separable shift are perfect") {
    std::mt19937_64 rng(3);
    const Dataset s = separable(rng, 20, 0.0);
    const Dataset t = separable(rng, 20, 0.5);
    const Eigen::MatrixXd g = init_labels(s, t);
    CHECK(accuracy(argmax_rows(g), *t.labels) == 100.0);
    CHECK(accuracy(centroid_initializer()(s, t.features), *t.labels) == 100.0);
}

TEST_CASE("argmax ties go to the lower class index") {
    Eigen::MatrixXd scores(2, 3);
    scores << 0.5, 0.5, 0.1, 0.2, 0.7, 0.7;
    CHECK(argmax_rows(scores) == Labels{0, 1});
}

TEST_CASE("ridge initializer agrees with the normal equations") {
    std::mt19937_64 rng(4);
    for (const auto& [n, m] : {std::pair{90, 6}, std::pair{12, 30}}) {
        const int classes = 3;
        Eigen::MatrixXd x = testing::random_matrix(rng, n, m);
        const Labels y = testing::random_labels(rng, n, classes);
        for (int i = 0; i < n; ++i) {
            x(i, y[static_cast<std::size_t>(i)]) += 3.0;
        }
        const Dataset train = testing::labeled_dataset(x, y, classes);
        const Eigen::MatrixXd target = testing::random_matrix(rng, 40, m) * 2.0;
        const Labels got = ridge_initializer(1.0)(train, target);
        CHECK(got == oracle::ridge_predict(x, y, classes, 1.0, target));
    }
}

TEST_CASE("ridge initializer survives a degenerate system") {
    const Dataset train = testing::labeled_dataset(Eigen::MatrixXd::Ones(6, 3), {0, 1, 0, 1, 0, 1}, 2);
    const Labels got = ridge_initializer(0.0)(train, Eigen::MatrixXd::Ones(4, 3));
    REQUIRE(got.size() == 4);
    for (int v : got) {
        CHECK((v == 0 || v == 1));
    }
}

TEST_CASE("R vanishes when alpha is zero") {
    std::mt19937_64 rng(5);
    const Instance in = random_instance(rng, 12, 9, 4, 3);
    const Eigen::MatrixXd g = one_hot_of(random_assignment(rng, 9, 3), 3);
    CHECK(build_R(in.consts.E, in.consts.v_diag, g, 0.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace of R equals the centroid and cluster terms at the optimal F") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const Instance in = random_instance(rng, 15, 12, 5, 3);
        const std::vector<int> a = random_assignment(rng, 12, 3);
        const Eigen::MatrixXd g = one_hot_of(a, 3);
        const double alpha = 0.1 + 0.3 * trial;
        const Eigen::MatrixXd p = testing::random_matrix(rng, 5, 3);
        const Eigen::MatrixXd r = build_R(in.consts.E, in.consts.v_diag, g, alpha);
        const double lhs = (p.transpose() * in.consts.X * r * in.consts.X.transpose() * p).trace();
        const Eigen::MatrixXd f = update_F(p, in.consts, g, alpha);
        const Eigen::MatrixXd z = p.transpose() * in.consts.X;
        const double rhs =
            oracle::centroid_cluster_value(z * in.consts.E, z.rightCols(12), a, alpha, f);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));

        CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
        CHECK((centroid_scatter(in.consts, g, alpha) - in.consts.X * r * in.consts.X.transpose()).norm() < 1e-9);
    }
}

TEST_CASE("with no manifold or centroid terms P spans the top-variance directions") {
    std::mt19937_64 rng(7);
    Instance in = random_instance(rng, 25, 20, 6, 2);
    Hyperparams h;
    h.alpha = 0.0;
    h.gamma = 0.0;
    h.dim = 2;
    const Eigen::MatrixXd g = one_hot_of(random_assignment(rng, 20, 2), 2);
    // With alpha = 0 the R term vanishes, leaving beta I against X H X^T.
    const EigResult r = update_P(in.consts, Eigen::MatrixXd::Zero(6, 6), g, h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(in.consts.total_scatter);
    const Eigen::MatrixXd top = es.eigenvectors().rightCols(2);
    const Eigen::MatrixXd q = r.vectors.householderQr().householderQ() * Eigen::MatrixXd::Identity(6, 2);
    CHECK((top - q * (q.transpose() * top)).norm() < 1e-8);
    CHECK((r.vectors.transpose() * in.consts.total_scatter * r.vectors - Eigen::MatrixXd::Identity(2, 2)).norm() <
          1e-6);
}

TEST_CASE("P update is minimal among random feasible frames") {
    std::mt19937_64 rng(8);
    Instance in = random_instance(rng, 15, 15, 12, 3);
    Hyperparams h;
    h.dim = 3;
    const Eigen::MatrixXd g = one_hot_of(random_assignment(rng, 15, 3), 3);
    const Eigen::MatrixXd w = testing::random_matrix(rng, 12, 12);
    const Eigen::MatrixXd manifold = w * w.transpose();
    const EigResult r = update_P(in.consts, manifold, g, h);
    const Eigen::MatrixXd a = centroid_scatter(in.consts, g, h.alpha) + h.gamma * manifold +
                              h.beta * Eigen::MatrixXd::Identity(12, 12);
    const double best = (r.vectors.transpose() * a * r.vectors).trace();
    for (int f = 0; f < 500; ++f) {
        const Eigen::MatrixXd y = oracle::random_feasible_frame(in.consts.total_scatter, 3, rng);
        CHECK(best <= (y.transpose() * a * y).trace() * (1.0 + 1e-9));
    }
}

TEST_CASE("F is the projected source means when alpha is zero") {
    std::mt19937_64 rng(9);
    const Instance in = random_instance(rng, 14, 10, 5, 3);
    const Eigen::MatrixXd p = testing::random_matrix(rng, 5, 2);
    const Eigen::MatrixXd g = one_hot_of(random_assignment(rng, 10, 3), 3);
    CHECK((update_F(p, in.consts, g, 0.0) - p.transpose() * in.consts.X * in.consts.E).norm() < 1e-12);
}

TEST_CASE("F tends to the cluster means for large alpha") {
    std::mt19937_64 rng(10);
    const Instance in = random_instance(rng, 14, 12, 5, 3);
    std::vector<int> a = random_assignment(rng, 12, 3);
    a[0] = 0;
    a[1] = 1;
    a[2] = 2;
    const Eigen::MatrixXd p = testing::random_matrix(rng, 5, 2);
    const Eigen::MatrixXd f = update_F(p, in.consts, one_hot_of(a, 3), 1e6);
    const Eigen::MatrixXd z_t = p.transpose() * in.consts.target_cols();
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
        int count = 0;
        for (int j = 0; j < 12; ++j) {
            if (a[static_cast<std::size_t>(j)] == c) {
                mean += z_t.col(j);
                ++count;
            }
        }
        CHECK((f.col(c) - mean / count).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("F has zero gradient") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Instance in = random_instance(rng, 16, 14, 6, 3);
        const std::vector<int> a = random_assignment(rng, 14, 3);
        const Eigen::MatrixXd p = testing::random_matrix(rng, 6, 3);
        const double alpha = 0.05 + 0.2 * trial;
        const Eigen::MatrixXd f = update_F(p, in.consts, one_hot_of(a, 3), alpha);
        const Eigen::MatrixXd z = p.transpose() * in.consts.X;
        const Eigen::MatrixXd grad =
            oracle::centroid_cluster_gradient(z * in.consts.E, z.rightCols(14), a, alpha, f);
        CHECK(grad.cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("G picks the nearest centroid") {
    Eigen::MatrixXd f(2, 2);
    f << 0, 10, 0, 10;
    Eigen::MatrixXd z(2, 2);
    z << 1, 5, 1, 5;  // (1,1) is near cluster 0; (5,5) is equidistant
    const Eigen::MatrixXd g = update_G(z, f);
    CHECK(g(0, 0) == 1.0);
    CHECK(g(1, 0) == 1.0);
    CHECK(g.rowwise().sum().isOnes(0.0));
}

TEST_CASE("G matches an exhaustive scan") {
    std::mt19937_64 rng(12);
    const Eigen::MatrixXd z = testing::random_matrix(rng, 3, 50);
    const Eigen::MatrixXd f = testing::random_matrix(rng, 3, 4);
    CHECK(argmax_rows(update_G(z, f)) == Labels(oracle::nearest_column(z, f)));
}

TEST_CASE("objective of the zero state is zero") {
    std::mt19937_64 rng(13);
    const Instance in = random_instance(rng, 10, 10, 4, 2);
    ModelState s;
    s.P = Eigen::MatrixXd::Zero(4, 2);
    s.F = Eigen::MatrixXd::Zero(2, 2);
    s.G_t = one_hot_of(random_assignment(rng, 10, 2), 2);
    s.manifold.term = TargetTerm::fixed;
    s.manifold.graph.similarity = SparseMatrix(10, 10);
    s.manifold.graph.laplacian = SparseMatrix(10, 10);
    CHECK(objective(s, in.consts, Hyperparams{}) == 0.0);
}

TEST_CASE("doubling P quadruples the regularizer") {
    std::mt19937_64 rng(14);
    const Instance in = random_instance(rng, 10, 10, 4, 2);
    ModelState s;
    s.P = testing::random_matrix(rng, 4, 2);
    s.F = testing::random_matrix(rng, 2, 2);
    s.G_t = one_hot_of(random_assignment(rng, 10, 2), 2);
    s.manifold.term = TargetTerm::none;
    const double once = objective_terms(s, in.consts, Hyperparams{}).regularizer;
    s.P *= 2.0;
    CHECK(objective_terms(s, in.consts, Hyperparams{}).regularizer == doctest::Approx(4.0 * once));
}

TEST_CASE("objective matches the naive evaluation for every target term") {
    std::mt19937_64 rng(15);
    const int classes = 3;
    for (TargetTerm term : {TargetTerm::adaptive, TargetTerm::fixed, TargetTerm::class_scatter, TargetTerm::none}) {
        const Instance in = random_instance(rng, 18, 16, 5, classes);
        const std::vector<int> a = random_assignment(rng, 16, classes);
        Hyperparams h;
        h.alpha = 0.7;
        h.beta = 0.3;
        h.gamma = 2.0;
        ModelState s;
        s.P = testing::random_matrix(rng, 5, 3);
        s.F = testing::random_matrix(rng, 3, classes);
        s.G_t = one_hot_of(a, classes);
        s.manifold.term = term;
        const Eigen::MatrixXd dists = pairwise_sq_dists(in.target.features);
        oracle::TargetKind kind = oracle::TargetKind::none;
        Eigen::MatrixXd s_dense;
        double delta = 0.0;
        if (term == TargetTerm::adaptive || term == TargetTerm::fixed) {
            delta = estimate_delta(dists, 4);
            s.manifold.graph = make_target_graph(dists, 4, delta);
            if (term == TargetTerm::fixed) {
                s.manifold.graph.similarity = heat_kernel_similarity(dists, 4);
                s.manifold.graph.laplacian = laplacian_from_similarity(s.manifold.graph.similarity);
            }
            s_dense = Eigen::MatrixXd(s.manifold.graph.similarity);
            kind = oracle::TargetKind::graph;
        } else if (term == TargetTerm::class_scatter) {
            s.manifold.pseudo_lap = source_laplacian(Labels(a.begin(), a.end()), classes, true);
            kind = oracle::TargetKind::pseudo_classes;
        }
        oracle::Problem prob;
        prob.X = in.consts.X;
        prob.source_labels = *in.source.labels;
        prob.num_classes = classes;
        prob.alpha = h.alpha;
        prob.beta = h.beta;
        prob.gamma = h.gamma;
        const double naive = oracle::objective(prob, s.P, s.F, a, kind, s_dense, delta);
        const double fast = objective(s, in.consts, h);
        CHECK(std::abs(fast - naive) <= 1e-10 * std::abs(naive));
    }
}

TEST_CASE("projected source centroids are the columns of P^T X E") {
    std::mt19937_64 rng(16);
    const Instance in = random_instance(rng, 21, 9, 5, 3);
    const Eigen::MatrixXd p = testing::random_matrix(rng, 5, 2);
    const Eigen::MatrixXd centroids = p.transpose() * in.consts.X * in.consts.E;
    const Eigen::MatrixXd z_s = p.transpose() * in.consts.source_cols();
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
        int count = 0;
        for (Eigen::Index i = 0; i < 21; ++i) {
            if ((*in.source.labels)[static_cast<std::size_t>(i)] == c) {
                mean += z_s.col(i);
                ++count;
            }
        }
        CHECK((centroids.col(c) - mean / count).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("identical source and target with separable classes") {
    std::mt19937_64 rng(17);
    const Dataset s = separable(rng, 25, 0.0);
    Dataset t = s;
    Hyperparams h;
    h.dim = 3;
    const FitResult fit = fit_uda(s, t, h, quiet());
    CHECK(accuracy(fit.predicted, *t.labels) == 100.0);
}

TEST_CASE("shifted Gaussian task beats its initializer") {
    synthetic::GaussianTask task;
    task.shift = 2.5;
    const auto pair = synthetic::shifted_gaussians(3, task);
    Hyperparams h;
    h.dim = 2;
    const FitResult fit = fit_uda(pair.source, pair.target, h, quiet());
    const double acc = accuracy(fit.predicted, *pair.target.labels);
    CHECK(acc >= 95.0);
    CHECK(acc > accuracy(fit.initial, *pair.target.labels));
}

TEST_CASE("fits descend and keep the constraint for every variant with a descent guarantee") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto pair = synthetic::random_instance(seed);
        for (Variant v : {Variant::full, Variant::cm, Variant::rm, Variant::pa, Variant::op}) {
            Hyperparams h;
            h.dim = 4;
            h.k = 5;
            h.tol = 0.0;
            h.variant = v;
            const FitResult fit = fit_uda(pair.source, pair.target, h, quiet());
            check_non_increasing(fit.state.objective_trace);
            const ConstantMatrices c = assemble_constants(pair.source, pair.target);
            const Eigen::Index d = fit.state.P.cols();
            CHECK((fit.state.P.transpose() * c.total_scatter * fit.state.P - Eigen::MatrixXd::Identity(d, d)).norm() <
                  1e-6 * d);
            CHECK(fit.state.G_t.rowwise().sum().isOnes(0.0));
            CHECK(fit.state.history.size() == fit.state.objective_trace.size());
        }
    }
}

TEST_CASE("variant structure of the target term") {
    const auto pair = synthetic::random_instance(9);
    Hyperparams h;
    h.dim = 3;
    h.k = 5;
    h.max_iter = 3;
    h.tol = 0.0;

    h.variant = Variant::op;
    const FitResult op = fit_uda(pair.source, pair.target, h, quiet());
    const Eigen::MatrixXd original = pairwise_sq_dists(pair.target.features);
    const TargetGraph initial = make_target_graph(original, 5, estimate_delta(original, 5));
    CHECK(Eigen::MatrixXd(op.state.manifold.graph.similarity) == Eigen::MatrixXd(initial.similarity));

    h.variant = Variant::pa;
    const FitResult pa = fit_uda(pair.source, pair.target, h, quiet());
    CHECK(Eigen::MatrixXd(pa.state.manifold.graph.similarity) ==
          Eigen::MatrixXd(heat_kernel_similarity(original, 5)));

    h.variant = Variant::rm;
    const FitResult rm = fit_uda(pair.source, pair.target, h, quiet());
    CHECK(rm.state.manifold.term == TargetTerm::none);

    h.variant = Variant::ds;
    const FitResult ds = fit_uda(pair.source, pair.target, h, quiet());
    REQUIRE(ds.state.manifold.pseudo_lap.has_value());
    CHECK(ds.state.manifold.pseudo_lap->labels == argmax_rows(ds.state.G_t));

    h.variant = Variant::full;
    const FitResult full = fit_uda(pair.source, pair.target, h, quiet());
    CHECK(full.state.manifold.graph.delta == doctest::Approx(estimate_delta(original, 5)));
}

TEST_CASE("full with gamma zero equals cm exactly") {
    const auto pair = synthetic::random_instance(5);
    Hyperparams h;
    h.dim = 3;
    h.k = 5;
    h.gamma = 0.0;
    const FitResult full = fit_uda(pair.source, pair.target, h, quiet());
    h.gamma = 5.0;
    h.variant = Variant::cm;
    const FitResult cm = fit_uda(pair.source, pair.target, h, quiet());
    CHECK(full.predicted == cm.predicted);
    CHECK(full.state.P == cm.state.P);
    CHECK(full.state.objective_trace == cm.state.objective_trace);
}

TEST_CASE("permuting the target permutes the predictions") {
    synthetic::GaussianTask task;
    task.shift = 1.0;
    const auto pair = synthetic::shifted_gaussians(11, task);
    Hyperparams h;
    h.dim = 2;
    const FitResult base = fit_uda(pair.source, pair.target, h, quiet());

    std::mt19937_64 rng(3);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pair.target.num_samples()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const Dataset shuffled = select_rows(pair.target, order);
    const FitResult moved = fit_uda(pair.source, shuffled, h, quiet());
    for (std::size_t i = 0; i < order.size(); ++i) {
        CHECK(moved.predicted[i] == base.predicted[static_cast<std::size_t>(order[i])]);
    }
}

TEST_CASE("empty clusters are tolerated and logged") {
    // Target drawn from class 0 only, so the other clusters stay empty.
    std::mt19937_64 rng(18);
    const Dataset s = separable(rng, 20, 0.0);
    Dataset t;
    t.features = testing::random_matrix(rng, 15, 5, 0.3);
    t.features.col(0).array() -= 5.0;
    t.class_values = s.class_values;
    Hyperparams h;
    h.dim = 2;
    h.k = 4;
    const FitResult fit = fit_uda(s, t, h, quiet());
    CHECK(fit.state.history.front().empty_clusters == 1);
    CHECK(fit.state.F.allFinite());
    bool logged = false;
    for (const auto& w : fit.state.warnings) {
        logged = logged || w.find("empty target cluster") != std::string::npos;
    }
    CHECK(logged);
}

TEST_CASE("oversized subspace is reduced with a warning") {
    const auto pair = synthetic::random_instance(2);
    Hyperparams h;
    h.k = 5;
    h.dim = 500;
    const FitResult fit = fit_uda(pair.source, pair.target, h, quiet());
    CHECK(fit.state.effective_d <= pair.source.num_dims());
    CHECK_FALSE(fit.state.warnings.empty());
}

TEST_CASE("neighborhood larger than the target is a configuration error") {
    std::mt19937_64 rng(19);
    const Dataset s = separable(rng, 10, 0.0);
    const Dataset t = separable(rng, 4, 0.0);
    Hyperparams h;
    h.dim = 2;
    h.k = 7;
    CHECK_THROWS_AS(fit_uda(s, t, h, quiet()), ConfigError);
    h.variant = Variant::rm;
    CHECK_NOTHROW(fit_uda(s, t, h, quiet()));
}

TEST_CASE("fits are deterministic") {
    const auto pair = synthetic::random_instance(6);
    Hyperparams h;
    h.dim = 5;
    h.k = 6;
    const FitResult a = fit_uda(pair.source, pair.target, h, quiet());
    const FitResult b = fit_uda(pair.source, pair.target, h, quiet());
    CHECK(a.state.P == b.state.P);
    CHECK(a.state.objective_trace == b.state.objective_trace);
    CHECK(a.predicted == b.predicted);
}

}  // TEST_SUITE
