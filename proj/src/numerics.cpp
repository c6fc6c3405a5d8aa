#include "cmms/numerics.hpp"

#include "cmms/errors.hpp"

#include <cmath>
#include <string>

namespace cmms {

double asymmetry(const Eigen::MatrixXd& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index arg = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, j) < 0.0) {
            vectors.col(j) *= -1.0;
        }
    }
}

SymEig sym_eig(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw DataError("sym_eig: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected square");
    }
    if (asymmetry(m) > 1e-8) {
        throw DataError("sym_eig: matrix is not symmetric");
    }
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("sym_eig: eigen-decomposition did not converge");
    }
    SymEig out{solver.eigenvalues(), solver.eigenvectors()};
    canonicalize_signs(out.vectors);
    return out;
}

EigResult gen_eig_smallest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index d) {
    if (d < 1) {
        throw DataError("gen_eig_smallest: d must be >= 1");
    }
    const Eigen::Index m = a.rows();
    if (a.cols() != m || b.rows() != m || b.cols() != m) {
        throw DataError("gen_eig_smallest: A and B must be square of equal size");
    }
    if (asymmetry(a) > 1e-8 || asymmetry(b) > 1e-8) {
        throw DataError("gen_eig_smallest: pencil matrices must be symmetric");
    }

    const Eigen::MatrixXd a_sym = 0.5 * (a + a.transpose());
    Eigen::LLT<Eigen::MatrixXd> chol(a_sym);
    if (chol.info() != Eigen::Success) {
        throw NumericalError("gen_eig_smallest: A is not positive definite (Cholesky failed)");
    }
    const auto lower = chol.matrixL();

    // M = L^-1 B L^-T
    Eigen::MatrixXd whitened = lower.solve(0.5 * (b + b.transpose()));
    whitened = lower.solve(whitened.transpose()).eval();
    whitened = 0.5 * (whitened + whitened.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(whitened);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("gen_eig_smallest: whitened eigen-decomposition did not converge");
    }
    const Eigen::VectorXd& nu = solver.eigenvalues();  // ascending

    const Eigen::Index wanted = std::min(d, m);
    Eigen::Index kept = 0;
    while (kept < wanted && nu(m - 1 - kept) > kPencilCutoff) {
        ++kept;
    }

    EigResult out;
    out.requested_d = d;
    out.effective_d = kept;
    out.values.resize(kept);
    Eigen::MatrixXd v(m, kept);
    for (Eigen::Index j = 0; j < kept; ++j) {
        const Eigen::Index src = m - 1 - j;
        out.values(j) = 1.0 / nu(src);
        v.col(j) = solver.eigenvectors().col(src) / std::sqrt(nu(src));
    }
    out.vectors = lower.transpose().solve(v);
    canonicalize_signs(out.vectors);
    return out;
}

}  // namespace cmms
