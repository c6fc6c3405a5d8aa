#pragma once

#include "cmms/solver.hpp"

namespace cmms::detail {

struct EngineSetup {
    ConstantMatrices consts;
    Eigen::MatrixXd g_init;          // n_t x C, labeled rows first
    Eigen::MatrixXd target_original; // n_t rows in the original target space
    double lambda1 = 1.0;
    bool update_lambda = false;
};

/// Alternating minimization over P, F, (lambda), G_t and the target graph.
ModelState run_engine(EngineSetup setup, const Hyperparams& hyper, bool print_warnings);

}  // namespace cmms::detail
