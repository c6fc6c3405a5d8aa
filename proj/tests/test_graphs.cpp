#include "doctest.h"
#include "helpers.hpp"

#include "cmms/errors.hpp"
#include "cmms/graphs.hpp"
#include "cmms/verify/oracles.hpp"

#include <Eigen/Eigenvalues>

using namespace cmms;

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().minCoeff();
}

void check_similarity_rows(const SparseMatrix& s, int k) {
    const Eigen::MatrixXd dense(s);
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        CHECK(dense.row(i).minCoeff() >= 0.0);
        CHECK(dense.row(i).maxCoeff() <= 1.0);
        CHECK(std::abs(dense.row(i).sum() - 1.0) <= 1e-10);
        CHECK((dense.row(i).array() != 0.0).count() <= k);
        CHECK(dense(i, i) == 0.0);
    }
}

// Random point of the simplex on a random support of at most k entries
// (excluding i).
Eigen::RowVectorXd random_sparse_row(std::mt19937_64& rng, Eigen::Index n, Eigen::Index i, int k) {
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) {
            candidates.push_back(j);
        }
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const int size = std::uniform_int_distribution<int>(1, k)(rng);
    std::exponential_distribution<double> expo(1.0);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    double total = 0.0;
    for (int j = 0; j < size; ++j) {
        const double w = expo(rng);
        row(candidates[static_cast<std::size_t>(j)]) = w;
        total += w;
    }
    return row / total;
}

}  // namespace

TEST_SUITE("graphs") {

TEST_CASE("source Laplacian of two same-class samples") {
    const SourceLaplacian l = source_laplacian({0, 0}, 1);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    CHECK(l.matrix().isApprox(expected));
    CHECK(l.class_sizes == std::vector<int>{2});
}

TEST_CASE("source Laplacian with singleton classes is zero") {
    CHECK(source_laplacian({0, 1, 2}, 3).matrix().isZero(0.0));
}

TEST_CASE("source Laplacian matches the weighted double sum") {
    std::mt19937_64 rng(1);
    const Labels y = testing::random_labels(rng, 12, 3);
    const SourceLaplacian l = source_laplacian(y, 3);
    const Eigen::MatrixXd lm = l.matrix();
    const Eigen::MatrixXd w = oracle::same_class_weights(y);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::RowVectorXd x = testing::random_matrix(rng, 1, 12);
        const double quad = (x * lm * x.transpose())(0, 0);
        const double pairs = oracle::weighted_pair_sum(x, w);
        CHECK(std::abs(quad - pairs) <= 1e-10 * std::abs(pairs));
    }
    CHECK(lm.isApprox(lm.transpose()));
    CHECK(lm.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(min_eigenvalue(lm) >= -1e-9);

    const Eigen::MatrixXd z = testing::random_matrix(rng, 4, 12);
    CHECK((l.scatter(z) - z * lm * z.transpose()).norm() < 1e-10);
    CHECK(std::abs(l.quadratic(z) - (z * lm * z.transpose()).trace()) < 1e-10);
}

TEST_CASE("source Laplacian rejects empty classes unless allowed") {
    CHECK_THROWS_AS(source_laplacian({0, 0, 2}, 3), DataError);
    const SourceLaplacian l = source_laplacian({0, 0, 2}, 3, true);
    CHECK(l.class_sizes == std::vector<int>{2, 0, 1});
    CHECK_THROWS_AS(source_laplacian({0, 3}, 3), DataError);
}

TEST_CASE("pairwise distances") {
    Eigen::MatrixXd p(2, 2);
    p << 0, 0, 3, 4;
    CHECK(pairwise_sq_dists(p)(0, 1) == 25.0);
    CHECK(pairwise_sq_dists(Eigen::MatrixXd::Constant(4, 3, 2.5)).isZero(0.0));

    std::mt19937_64 rng(2);
    const Eigen::MatrixXd x = testing::random_matrix(rng, 6, 4);
    const Eigen::MatrixXd d = pairwise_sq_dists(x);
    CHECK((d - oracle::pairwise_sq_dists(x)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d == d.transpose());
    CHECK(d.diagonal().isZero(0.0));
    CHECK(d.minCoeff() >= 0.0);
    CHECK_THROWS_AS(pairwise_sq_dists(Eigen::MatrixXd::Ones(1, 3)), DataError);
}

TEST_CASE("nearest neighbors skip self and break ties by index") {
    Eigen::MatrixXd d(4, 4);
    d << 0, 1, 1, 2,
         1, 0, 3, 1,
         1, 3, 0, 5,
         2, 1, 5, 0;
    CHECK(nearest_neighbors(d, 0, 2) == std::vector<Eigen::Index>{1, 2});
    CHECK(nearest_neighbors(d, 1, 3) == std::vector<Eigen::Index>{0, 3, 2});
}

TEST_CASE("neighbor scale with equal distances is zero") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(5, 5, 2.0);
    d.diagonal().setZero();
    CHECK(estimate_delta(d, 2) == 0.0);
}

TEST_CASE("neighbor scale of rows sorted as (1, 2, 3) with k = 2") {
    // Every row holds the off-diagonal distances {1, 2, 3}.
    Eigen::MatrixXd d(4, 4);
    d << 0, 1, 2, 3,
         1, 0, 3, 2,
         2, 3, 0, 1,
         3, 2, 1, 0;
    CHECK(estimate_delta(d, 2) == doctest::Approx(1.5));
}

TEST_CASE("neighbor scale matches a sorted-row oracle and checks k") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 15, 3));
    for (int k = 1; k <= 13; ++k) {
        CHECK(estimate_delta(d, k) == doctest::Approx(oracle::estimate_delta(d, k)).epsilon(1e-12));
        CHECK(estimate_delta(d, k) >= 0.0);
    }
    CHECK_THROWS_AS(estimate_delta(d, 14), DataError);
    CHECK_THROWS_AS(estimate_delta(d, 0), DataError);
}

TEST_CASE("equal nearest distances give uniform weights") {
    // Row 0: three neighbors at distance 1, the rest far away.
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(6, 6, 9.0);
    d.diagonal().setZero();
    for (int j = 1; j <= 3; ++j) {
        d(0, j) = d(j, 0) = 1.0;
    }
    const Eigen::MatrixXd s(update_similarity(d, 3, 0.7));
    for (int j = 1; j <= 3; ++j) {
        CHECK(s(0, j) == doctest::Approx(1.0 / 3.0));
    }
    check_similarity_rows(update_similarity(d, 3, 0.7), 3);
}

TEST_CASE("k = 1 puts all weight on the nearest neighbor") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 8, 2));
    const Eigen::MatrixXd s(update_similarity(d, 1, 0.5));
    for (Eigen::Index i = 0; i < 8; ++i) {
        CHECK(s(i, nearest_neighbors(d, i, 1).front()) == 1.0);
    }
}

TEST_CASE("adaptive rows match the simplex projection oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 10, 3));
        const double delta = trial < 10 ? estimate_delta(d, 4) : 0.05 * (trial - 9);
        const SparseMatrix s = update_similarity(d, 4, delta);
        check_similarity_rows(s, 4);
        const Eigen::MatrixXd dense(s);
        for (Eigen::Index i = 0; i < 10; ++i) {
            CHECK((dense.row(i) - oracle::similarity_row(d, i, 4, delta)).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("adaptive rows beat random sparse rows") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        const int k = 3 + trial;
        const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 20, 4));
        const double delta = estimate_delta(d, k);
        const Eigen::MatrixXd s(update_similarity(d, k, delta));
        const Eigen::Index i = trial;
        const double best = oracle::similarity_row_cost(d, i, s.row(i), delta);
        for (int r = 0; r < 1000; ++r) {
            const Eigen::RowVectorXd row = random_sparse_row(rng, 20, i, k);
            CHECK(best <= oracle::similarity_row_cost(d, i, row, delta) + 1e-12);
        }
    }
}

TEST_CASE("tiny neighbor scale falls back to uniform weights") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 9, 2));
    const Eigen::MatrixXd s(update_similarity(d, 3, 0.0));
    for (Eigen::Index i = 0; i < 9; ++i) {
        for (Eigen::Index j : nearest_neighbors(d, i, 3)) {
            CHECK(s(i, j) == doctest::Approx(1.0 / 3.0));
        }
    }
    check_similarity_rows(update_similarity(d, 3, 1e-13), 3);
}

TEST_CASE("similarity update rejects bad input and is repeatable") {
    std::mt19937_64 rng(8);
    Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 30, 3));
    const Eigen::MatrixXd a(update_similarity(d, 5, 0.3));
    const Eigen::MatrixXd b(update_similarity(d, 5, 0.3));
    CHECK(a == b);
    CHECK_THROWS_AS(update_similarity(d, 30, 0.3), DataError);
    d(2, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(update_similarity(d, 5, 0.3), DataError);
}

TEST_CASE("heat kernel rows are stochastic and decrease with distance") {
    std::mt19937_64 rng(9);
    const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 25, 3));
    const SparseMatrix s = heat_kernel_similarity(d, 6);
    check_similarity_rows(s, 6);
    const Eigen::MatrixXd dense(s);
    for (Eigen::Index i = 0; i < 25; ++i) {
        const auto nn = nearest_neighbors(d, i, 6);
        CHECK((dense.row(i).array() > 0.0).count() == 6);
        for (std::size_t j = 1; j < nn.size(); ++j) {
            CHECK(dense(i, nn[j - 1]) >= dense(i, nn[j]));
        }
    }
}

TEST_CASE("Laplacian of a two-node graph") {
    SparseMatrix s(2, 2);
    s.insert(0, 1) = 1.0;
    s.insert(1, 0) = 1.0;
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK(Eigen::MatrixXd(laplacian_from_similarity(s)) == expected);
}

TEST_CASE("Laplacian of an empty graph is zero") {
    SparseMatrix s(4, 4);
    CHECK(Eigen::MatrixXd(laplacian_from_similarity(s)).isZero(0.0));
}

TEST_CASE("Laplacian quadratic form matches the pair sum") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 15, 3));
        const SparseMatrix s = update_similarity(d, 4, estimate_delta(d, 4));
        const Eigen::MatrixXd l(laplacian_from_similarity(s));
        const Eigen::MatrixXd sd(s);
        const Eigen::MatrixXd sym = 0.5 * (sd + sd.transpose());

        CHECK(l.isApprox(l.transpose()));
        CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
        CHECK(min_eigenvalue(l) >= -1e-9);

        const Eigen::RowVectorXd x = testing::random_matrix(rng, 1, 15);
        const double quad = (x * l * x.transpose())(0, 0);
        CHECK(std::abs(quad - oracle::weighted_pair_sum(x, sym)) <= 1e-10 * std::abs(quad));

        // sum_ij ||z_i - z_j||^2 S_bar_ij = 2 tr(Z L Z^T)
        const Eigen::MatrixXd z = testing::random_matrix(rng, 3, 15);
        const double pairs = 2.0 * oracle::weighted_pair_sum(z, sym);
        const double trace = 2.0 * (z * l * z.transpose()).trace();
        CHECK(std::abs(pairs - trace) <= 1e-9 * std::abs(trace));
    }
}

TEST_CASE("target graph bundles similarity, Laplacian and scale") {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd d = pairwise_sq_dists(testing::random_matrix(rng, 12, 2));
    const TargetGraph g = make_target_graph(d, 3, 0.25);
    CHECK(g.k == 3);
    CHECK(g.delta == 0.25);
    CHECK(Eigen::MatrixXd(g.laplacian) == Eigen::MatrixXd(laplacian_from_similarity(g.similarity)));
    check_similarity_rows(g.similarity, 3);
}

}  // TEST_SUITE
