#include "engine.hpp"

#include "cmms/errors.hpp"
#include "cmms/semi.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace cmms::detail {

namespace {

int count_changes(const Eigen::MatrixXd& before, const Eigen::MatrixXd& after) {
    int changed = 0;
    for (Eigen::Index i = 0; i < before.rows(); ++i) {
        if (before.row(i) != after.row(i)) {
            ++changed;
        }
    }
    return changed;
}

int count_empty(const Eigen::MatrixXd& g) {
    int empty = 0;
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        if (g.col(c).sum() == 0.0) {
            ++empty;
        }
    }
    return empty;
}

SourceLaplacian pseudo_laplacian(const Eigen::MatrixXd& g_t) {
    return source_laplacian(argmax_rows(g_t), static_cast<int>(g_t.cols()), true);
}

}  // namespace

ModelState run_engine(EngineSetup setup, const Hyperparams& hyper, bool print_warnings) {
    auto& consts = setup.consts;
    const Eigen::Index n_l = consts.n_l;

    ModelState state;
    auto warn = [&](const std::string& message) {
        state.warnings.push_back(message);
        if (print_warnings) {
            std::cerr << "warning: " << message << '\n';
        }
    };

    state.G_t = setup.g_init;
    const Eigen::MatrixXd g_labeled = state.G_t.topRows(n_l);
    state.lambda1 = setup.lambda1;
    state.lambda2 = 1.0 - setup.lambda1;
    consts.set_balance(state.lambda1, state.lambda2);

    auto& manifold = state.manifold;
    manifold.term = target_term_for(hyper.variant);
    if (manifold.term == TargetTerm::adaptive || manifold.term == TargetTerm::fixed) {
        if (hyper.k > consts.n_t - 2) {
            throw ConfigError("k = " + std::to_string(hyper.k) + " is too large for " +
                              std::to_string(consts.n_t) + " target samples (need k <= n_t - 2)");
        }
        const Eigen::MatrixXd original = pairwise_sq_dists(setup.target_original);
        const double delta = estimate_delta(original, hyper.k);
        if (delta <= kDeltaFloor) {
            warn("neighbor scale delta is " + std::to_string(delta) +
                 "; using uniform weights on the k nearest neighbors");
        }
        if (hyper.variant == Variant::pa) {
            manifold.graph.similarity = heat_kernel_similarity(original, hyper.k);
            manifold.graph.laplacian = laplacian_from_similarity(manifold.graph.similarity);
            manifold.graph.delta = delta;
            manifold.graph.k = hyper.k;
        } else {
            manifold.graph = make_target_graph(original, hyper.k, delta);
        }
    } else if (manifold.term == TargetTerm::class_scatter) {
        manifold.pseudo_lap = pseudo_laplacian(state.G_t);
    }

    for (int it = 1; it <= hyper.max_iter; ++it) {
        const Eigen::MatrixXd scatter = manifold_scatter(consts, manifold);
        EigResult eig = update_P(consts, scatter, state.G_t, hyper);
        if (eig.effective_d < eig.requested_d && state.effective_d != eig.effective_d) {
            warn("subspace dimension reduced from " + std::to_string(eig.requested_d) + " to " +
                 std::to_string(eig.effective_d) + " (rank of the centered scatter)");
        }
        if (eig.effective_d == 0) {
            throw NumericalError("projection has no admissible direction (centered data has rank 0)");
        }
        state.effective_d = eig.effective_d;
        state.P = std::move(eig.vectors);

        state.F = update_F(state.P, consts, state.G_t, hyper.alpha);

        if (setup.update_lambda) {
            const auto [l1, l2] =
                update_lambda(state.P, consts.source_cols(), consts.E_source, consts.labeled_cols(),
                              consts.E_labeled, state.F);
            state.lambda1 = l1;
            state.lambda2 = l2;
            consts.set_balance(l1, l2);
        }

        const Eigen::MatrixXd projected_target = state.P.transpose() * consts.target_cols();
        Eigen::MatrixXd g_new = update_G(projected_target, state.F);
        g_new.topRows(n_l) = g_labeled;
        const int changed = count_changes(state.G_t, g_new);
        state.G_t = std::move(g_new);

        switch (manifold.term) {
            case TargetTerm::adaptive: {
                const Eigen::MatrixXd dists = pairwise_sq_dists(projected_target.transpose());
                const double delta =
                    hyper.reestimate_delta ? estimate_delta(dists, hyper.k) : manifold.graph.delta;
                manifold.graph = make_target_graph(dists, hyper.k, delta);
                break;
            }
            case TargetTerm::class_scatter:
                manifold.pseudo_lap = pseudo_laplacian(state.G_t);
                break;
            case TargetTerm::fixed:
            case TargetTerm::none:
                break;
        }

        const double value = objective(state, consts, hyper);
        const int empty = count_empty(state.G_t);
        if (empty > 0) {
            warn("iteration " + std::to_string(it) + ": " + std::to_string(empty) +
                 " empty target cluster(s)");
        }
        state.history.push_back({it, value, changed, empty, state.lambda1});
        state.iteration = it;

        const bool first = state.objective_trace.empty();
        const double previous = first ? 0.0 : state.objective_trace.back();
        state.objective_trace.push_back(value);
        if (changed == 0) {
            state.converged = true;
            break;
        }
        if (!first && previous - value < hyper.tol * std::abs(previous)) {
            state.converged = true;
            break;
        }
    }
    return state;
}

}  // namespace cmms::detail
