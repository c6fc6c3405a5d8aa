#pragma once

#include "cmms/dataset.hpp"
#include "cmms/graphs.hpp"
#include "cmms/numerics.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmms {

/// Ablation variants. `full` is the complete method; the others drop or
/// replace the target manifold term.
enum class Variant {
    full,  // adaptive neighbors learned in the projected space
    cm,    // centroid matching only: gamma = 0
    rm,    // target manifold term removed, source term kept
    pa,    // fixed heat-kernel k-NN graph from the original space
    ds,    // intra-class scatter of the current pseudo-labels
    op,    // adaptive graph learned once in the original space, then frozen
};

std::string to_string(Variant v);
Variant parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

struct Hyperparams {
    double alpha = 0.1;
    double beta = 0.1;
    double gamma = 5.0;
    int dim = 100;
    int k = 10;
    int max_iter = 10;
    double tol = 1e-6;
    Variant variant = Variant::full;
    bool reestimate_delta = false;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
    /// gamma as seen by the updates (zero for the `cm` variant).
    double effective_gamma() const;
};

/// Constant pieces of the joined problem over n = n_s + n_t samples.
///
/// Target columns are ordered labeled-first: the leading n_l target samples
/// carry known labels (zero in the unsupervised case). The centroid selector
/// is E = [lambda1 E_s; lambda2 E_l; 0], rebuilt by set_balance().
struct ConstantMatrices {
    Eigen::MatrixXd X;        // m x n, one sample per column, source first
    Eigen::MatrixXd E;        // n x C
    Eigen::VectorXd v_diag;   // diagonal of V: 0 on source, 1 on target
    Eigen::MatrixXd E_source; // n_s x C, 1/n_s^c on class-c rows
    Eigen::MatrixXd E_labeled;// n_l x C
    Eigen::Index n_s = 0;
    Eigen::Index n_t = 0;
    Eigen::Index n_l = 0;
    int num_classes = 0;
    SourceLaplacian source_lap;

    Eigen::MatrixXd total_scatter;   // X H X^T
    Eigen::MatrixXd target_gram;     // X_t X_t^T
    Eigen::MatrixXd source_scatter;  // X_s L_s X_s^T

    Eigen::Index n() const { return n_s + n_t; }
    Eigen::Index m() const { return X.rows(); }
    auto source_cols() const { return X.leftCols(n_s); }
    auto target_cols() const { return X.rightCols(n_t); }
    auto labeled_cols() const { return X.middleCols(n_s, n_l); }

    /// H = I - (1/n) 1 1^T.
    Eigen::MatrixXd centering() const;
    Eigen::MatrixXd V() const;

    void set_balance(double lambda1, double lambda2);
};

/// Centroid selector for labeled samples: column c holds 1/n^c on class-c
/// rows. Classes without samples leave their column zero.
Eigen::MatrixXd centroid_selector(const Labels& labels, int num_classes);

/// Joined constants from column-major data X (m x n, source first).
ConstantMatrices assemble_standard_form(Eigen::MatrixXd x, const Labels& source_labels,
                                        Eigen::Index n_t, const Labels& labeled_target,
                                        int num_classes);

/// Homogeneous unsupervised case: X = [X_s, X_t].
ConstantMatrices assemble_constants(const Dataset& source, const Dataset& target);

/// Maps training samples and target features to dense class predictions.
using LabelInitializer =
    std::function<Labels(const Dataset& train, const Eigen::MatrixXd& target_features)>;

/// One-vs-rest ridge regression on {0,1} targets with an unpenalized bias.
LabelInitializer ridge_initializer(double ridge = 1.0);
/// Nearest class mean in input space.
LabelInitializer centroid_initializer();

Eigen::MatrixXd one_hot(const Labels& labels, int num_classes);
/// Row-wise argmax, lowest index on ties.
Labels argmax_rows(const Eigen::MatrixXd& m);

/// Initial target assignment; the default is ridge_initializer().
Eigen::MatrixXd init_labels(const Dataset& source, const Dataset& target,
                            const LabelInitializer& initializer = ridge_initializer());

/// Dense n x n R with tr(P^T X R X^T P) equal to the centroid and clustering
/// terms minimized over F:
///   R = E E^T + alpha V - N K^-1 N^T,  N = E + alpha V G,  K = I_C + alpha G^T G
/// where G = [0; G_t].
Eigen::MatrixXd build_R(const Eigen::MatrixXd& e, const Eigen::VectorXd& v_diag,
                        const Eigen::MatrixXd& g_t, double alpha);

/// X R X^T assembled from m x C and m x m pieces without forming R.
Eigen::MatrixXd centroid_scatter(const ConstantMatrices& consts, const Eigen::MatrixXd& g_t,
                                 double alpha);

/// How the target part of the manifold term is represented in a run.
enum class TargetTerm { adaptive, fixed, class_scatter, none };
TargetTerm target_term_for(Variant v);

/// Target-side manifold structure carried across iterations.
struct ManifoldState {
    TargetTerm term = TargetTerm::adaptive;
    TargetGraph graph;                           // adaptive and fixed
    std::optional<SourceLaplacian> pseudo_lap;   // class_scatter
};

/// X L X^T with L = diag(2 L_s, 2 L_t).
Eigen::MatrixXd manifold_scatter(const ConstantMatrices& consts, const ManifoldState& manifold);

/// Minimizer of tr(P^T (X R X^T + gamma X L X^T + beta I) P) subject to
/// P^T X H X^T P = I.
EigResult update_P(const ConstantMatrices& consts, const Eigen::MatrixXd& manifold,
                   const Eigen::MatrixXd& g_t, const Hyperparams& hyper);

/// F = (P^T X E + alpha P^T X V G)(alpha G^T G + I_C)^-1.
Eigen::MatrixXd update_F(const Eigen::MatrixXd& p, const ConstantMatrices& consts,
                         const Eigen::MatrixXd& g_t, double alpha);

/// Nearest-centroid assignment of projected target samples (columns of
/// projected_target) to the columns of F.
Eigen::MatrixXd update_G(const Eigen::MatrixXd& projected_target, const Eigen::MatrixXd& f);

struct ObjectiveTerms {
    double centroid = 0.0;        // ||P^T X E - F||^2
    double cluster = 0.0;         // alpha ||P^T X V - F G^T||^2
    double regularizer = 0.0;     // beta ||P||^2
    double source_manifold = 0.0; // gamma 2 tr(P^T X_s L_s X_s^T P)
    double target_manifold = 0.0; // gamma 2 tr(P^T X_t L_t X_t^T P)
    double similarity = 0.0;      // gamma delta ||S||^2

    double total() const {
        return centroid + cluster + regularizer + source_manifold + target_manifold + similarity;
    }
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    int changed_assignments = 0;
    int empty_clusters = 0;
    double lambda1 = 1.0;

    bool operator==(const IterationRecord&) const = default;
};

struct ModelState {
    Eigen::MatrixXd P;     // m x d
    Eigen::MatrixXd F;     // d x C
    Eigen::MatrixXd G_t;   // n_t x C one-hot
    ManifoldState manifold;
    std::vector<double> objective_trace;
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;
    int iteration = 0;
    Eigen::Index effective_d = 0;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    bool converged = false;
};

ObjectiveTerms objective_terms(const ModelState& state, const ConstantMatrices& consts,
                               const Hyperparams& hyper);
double objective(const ModelState& state, const ConstantMatrices& consts, const Hyperparams& hyper);

struct FitOptions {
    LabelInitializer initializer = ridge_initializer();
    /// Emit warnings to stderr as they happen, in addition to ModelState::warnings.
    bool print_warnings = true;
};

struct FitResult {
    ModelState state;
    Labels predicted;   // dense class per target sample
    Labels initial;     // initializer output, for baselines
};

/// Unsupervised adaptation. Inputs are expected standardized.
FitResult fit_uda(const Dataset& source, const Dataset& target, const Hyperparams& hyper,
                  const FitOptions& options = {});

}  // namespace cmms
