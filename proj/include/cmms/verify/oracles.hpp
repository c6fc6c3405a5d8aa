#pragma once

// Slow reference implementations used to check the library. None of these
// call into the code they check; they work from the defining formulas with
// plain loops, sorts and generic dense solvers.

#include "cmms/dataset.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace cmms::oracle {

/// Euclidean projection onto {s >= 0, sum s = 1} by bisection on the
/// threshold tau in sum max(v - tau, 0) = 1.
Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v);

/// Dense row i of the adaptive-neighbor similarity: the minimizer of
/// sum_j a_j s_j + delta sum_j s_j^2 over the simplex supported on the k
/// nearest off-diagonal entries (ties by lower index). Uniform weights when
/// delta <= 1e-12.
Eigen::RowVectorXd similarity_row(const Eigen::MatrixXd& dists, Eigen::Index i, int k, double delta);

/// sum_j a_j s_j + delta sum_j s_j^2 for row i.
double similarity_row_cost(const Eigen::MatrixXd& dists, Eigen::Index i,
                           const Eigen::RowVectorXd& row, double delta);

/// Squared distances between rows, one entry at a time.
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& points);

/// Neighbor scale from fully sorted off-diagonal rows.
double estimate_delta(const Eigen::MatrixXd& dists, int k);

/// 1/2 sum_ij W_ij ||z_i - z_j||^2 over the columns of z.
double weighted_pair_sum(const Eigen::MatrixXd& z, const Eigen::MatrixXd& w);

/// W_ij = 1/n_c when samples i and j share class c, 0 otherwise.
Eigen::MatrixXd same_class_weights(const Labels& labels);

/// A joined problem described by its raw ingredients.
struct Problem {
    Eigen::MatrixXd X;            // m x n, source columns then target columns
    Labels source_labels;         // n_s entries
    Labels labeled_labels;        // leading n_l target columns
    int num_classes = 0;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

enum class TargetKind { graph, pseudo_classes, none };

/// The full objective evaluated term by term with loops. For the graph kind
/// `similarity` is the n_t x n_t (possibly asymmetric) S and delta its
/// weight; for pseudo_classes the target term is the within-class double sum
/// over `assignment`.
double objective(const Problem& problem, const Eigen::MatrixXd& p, const Eigen::MatrixXd& f,
                 const std::vector<int>& assignment, TargetKind kind,
                 const Eigen::MatrixXd& similarity, double delta);

/// ||c - F||^2 + alpha ||Z_t - F G^T||^2 with c the d x C anchor and the
/// one-hot G given by assignment.
double centroid_cluster_value(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& z_t,
                              const std::vector<int>& assignment, double alpha,
                              const Eigen::MatrixXd& f);

/// Central-difference gradient of centroid_cluster_value with respect to F.
Eigen::MatrixXd centroid_cluster_gradient(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& z_t,
                                          const std::vector<int>& assignment, double alpha,
                                          const Eigen::MatrixXd& f, double step = 1e-4);

/// Grid point in {0, step, 2 step, ..., 1} minimizing ||l a + (1 - l) b - f||^2.
double lambda_grid_search(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const Eigen::MatrixXd& f, double step = 1e-4);

/// Random m x d frame Y rescaled to Y (Y^T B Y)^(-1/2), so Y^T B Y = I.
Eigen::MatrixXd random_feasible_frame(const Eigen::MatrixXd& b, Eigen::Index d, std::mt19937_64& rng);

/// Finite generalized eigenvalues of (A, B), ascending, from the
/// nonsymmetric standard problem A^-1 B (eigenvalues mu, pi = 1/mu for
/// mu > cutoff).
Eigen::VectorXd pencil_values(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double cutoff = 1e-10);

/// One-vs-rest ridge on {0,1} targets with an unpenalized bias, solved from
/// the augmented normal equations, then argmax with the lowest index on ties.
/// Rows of train and target are samples.
Labels ridge_predict(const Eigen::MatrixXd& train, const Labels& labels, int num_classes,
                     double ridge, const Eigen::MatrixXd& target);

/// Nearest column of f for every column of z, scanning every pair.
std::vector<int> nearest_column(const Eigen::MatrixXd& z, const Eigen::MatrixXd& f);

}  // namespace cmms::oracle
