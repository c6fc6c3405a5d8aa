#pragma once

#include "cmms/dataset.hpp"
#include "cmms/solver.hpp"

#include <optional>
#include <utility>

namespace cmms {

/// Semi-supervised run state. The base state's G_t holds the labeled target
/// rows first; those rows equal G_l throughout.
struct SemiState {
    double lambda1 = 0.5;
    double lambda2 = 0.5;
    ModelState base;
    Eigen::MatrixXd G_l;       // n_l x C, fixed
    Eigen::MatrixXd P_source;  // heterogeneous only: rows of P acting on source features
    Eigen::MatrixXd P_target;  // heterogeneous only
};

/// Best convex weight between source class centroids and labeled target
/// class centroids as an anchor for F:
///   lambda1 = clip(tr(J M^T) / tr(J^T J), 0, 1),  lambda2 = 1 - lambda1
/// with J = P^T X_s E_s - P^T X_l E_l and M = F - P^T X_l E_l. Returns
/// (0.5, 0.5) when tr(J^T J) < 1e-12. Samples are columns of x_source and
/// x_labeled.
std::pair<double, double> update_lambda(const Eigen::MatrixXd& p, const Eigen::MatrixXd& x_source,
                                        const Eigen::MatrixXd& e_source,
                                        const Eigen::MatrixXd& x_labeled,
                                        const Eigen::MatrixXd& e_labeled, const Eigen::MatrixXd& f);

struct SemiOptions {
    FitOptions fit;
    /// Holds lambda1 fixed (lambda2 = 1 - lambda1) instead of updating it.
    std::optional<double> pinned_lambda1;
    /// Starting lambda1 when not pinned.
    double initial_lambda1 = 0.5;
};

struct SemiResult {
    SemiState state;
    Labels predicted;   // unlabeled target samples, in split order
    Labels initial;     // initializer output on the unlabeled samples
};

/// Shared projection for source and target; labeled target samples anchor the
/// centroids and keep their labels.
SemiResult fit_sda_homogeneous(const Dataset& source, const SdaSplit& split, const Hyperparams& hyper,
                               const SemiOptions& options = {});

/// Separate projections for source and target feature spaces, stacked into a
/// single block problem X = diag(X_s, X_t), P = [P_s; P_t]. The initial
/// assignment comes from a classifier trained on the labeled target samples.
SemiResult fit_sda_heterogeneous(const Dataset& source, const SdaSplit& split,
                                 const Hyperparams& hyper, const SemiOptions& options = {});

/// Block-diagonal joined data for two feature spaces, one sample per column.
Eigen::MatrixXd block_diagonal_columns(const Eigen::MatrixXd& source_rows,
                                       const Eigen::MatrixXd& target_rows);

}  // namespace cmms
