#pragma once

#include "cmms/dataset.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace cmms {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Below this the adaptive-neighbor weights degenerate and each row falls
/// back to uniform weights on its k nearest neighbors.
inline constexpr double kDeltaFloor = 1e-12;

/// Class-normalized Laplacian of a labeled sample set:
///   L_ii = 1 - 1/n_c,  L_ij = -1/n_c for i != j in the same class c,  0 otherwise.
/// Equivalently I minus the block averaging operator, so X L X^T is the
/// within-class scatter. The dense form is only built on request.
struct SourceLaplacian {
    Labels labels;
    std::vector<int> class_sizes;

    int num_classes() const { return static_cast<int>(class_sizes.size()); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(labels.size()); }

    Eigen::MatrixXd matrix() const;

    /// X L X^T for X with one sample per column.
    Eigen::MatrixXd scatter(const Eigen::MatrixXd& columns) const;

    /// tr(Z L Z^T) for Z with one sample per column.
    double quadratic(const Eigen::MatrixXd& columns) const;
};

/// Throws DataError on an empty class unless allow_empty is set, in which
/// case empty classes contribute nothing.
SourceLaplacian source_laplacian(const Labels& labels, int num_classes, bool allow_empty = false);

/// Learned target similarity and its Laplacian.
struct TargetGraph {
    SparseMatrix similarity;  // row-stochastic, <= k nonzeros per row, zero diagonal
    SparseMatrix laplacian;   // D - (S + S^T)/2
    double delta = 0.0;
    int k = 0;
};

/// Squared Euclidean distances between the rows of points.
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& points);

/// Column indices of the `count` smallest off-diagonal entries of row i,
/// ascending by (distance, index).
std::vector<Eigen::Index> nearest_neighbors(const Eigen::MatrixXd& dists, Eigen::Index i,
                                            Eigen::Index count);

/// Average gap between the (k+1)-th neighbor and the k nearest, the scale at
/// which every row keeps exactly k neighbors. Self-distances are excluded.
/// Throws DataError unless 1 <= k <= n - 2.
double estimate_delta(const Eigen::MatrixXd& dists, int k);

/// Closed-form adaptive-neighbor rows: each row is the Euclidean projection
/// of -A_i / (2 delta) onto the probability simplex supported on its k
/// nearest neighbors. With delta <= kDeltaFloor the rows are uniform over
/// those neighbors.
SparseMatrix update_similarity(const Eigen::MatrixXd& dists, int k, double delta);

/// Row-normalized heat-kernel weights on the k nearest neighbors, bandwidth
/// equal to the mean k-nearest squared distance.
SparseMatrix heat_kernel_similarity(const Eigen::MatrixXd& dists, int k);

/// Symmetrized graph Laplacian D - S_bar with S_bar = (S + S^T)/2.
SparseMatrix laplacian_from_similarity(const SparseMatrix& similarity);

/// Builds S from distances with update_similarity and attaches its Laplacian.
TargetGraph make_target_graph(const Eigen::MatrixXd& dists, int k, double delta);

}  // namespace cmms
