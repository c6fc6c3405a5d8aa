#pragma once

#include <Eigen/Dense>

namespace cmms {

/// Eigen-decomposition of a symmetric matrix.
struct SymEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns, matching values
};

/// Solution of the pencil A p = pi B p restricted to the d smallest pi.
struct EigResult {
    Eigen::MatrixXd vectors;  // m x effective_d, p^T B p = 1
    Eigen::VectorXd values;   // ascending generalized eigenvalues
    Eigen::Index requested_d = 0;
    Eigen::Index effective_d = 0;
};

/// Directions of the whitened pencil below this value are treated as lying
/// in the null space of B.
inline constexpr double kPencilCutoff = 1e-10;

/// Max |M - M^T| relative to max(1, max |M|).
double asymmetry(const Eigen::MatrixXd& m);

/// Flips each column so that its entry of largest magnitude is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors);

/// Throws DataError if m is not square and symmetric within 1e-8.
SymEig sym_eig(const Eigen::MatrixXd& m);

/// Smallest-d generalized eigenpairs of the symmetric-definite pencil (A, B),
/// A positive definite and B positive semidefinite.
///
/// A = L L^T is factored, the whitened matrix L^-1 B L^-T is decomposed, and
/// its largest eigenvalues nu are mapped back through pi = 1/nu,
/// p = L^-T v / sqrt(nu). Directions with nu <= kPencilCutoff have pi = inf
/// and cannot satisfy p^T B p = 1, so they are dropped: effective_d may come
/// back smaller than d. Throws NumericalError when A is not positive
/// definite.
EigResult gen_eig_smallest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index d);

}  // namespace cmms
