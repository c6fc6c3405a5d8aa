#include "cmms/errors.hpp"
#include "cmms/solver.hpp"

#include <iostream>

namespace cmms {

namespace {

Labels nearest_centroid(const Dataset& train, const Eigen::MatrixXd& target) {
    const int num_classes = train.num_classes();
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(num_classes, train.num_dims());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(num_classes);
    for (Eigen::Index i = 0; i < train.num_samples(); ++i) {
        const int y = (*train.labels)[static_cast<std::size_t>(i)];
        means.row(y) += train.features.row(i);
        counts(y) += 1.0;
    }
    Eigen::MatrixXd scores(target.rows(), num_classes);
    for (int c = 0; c < num_classes; ++c) {
        if (counts(c) > 0.0) {
            means.row(c) /= counts(c);
            scores.col(c) = -(target.rowwise() - means.row(c)).rowwise().squaredNorm();
        } else {
            scores.col(c).setConstant(-std::numeric_limits<double>::infinity());
        }
    }
    return argmax_rows(scores);
}

void check_train(const Dataset& train, const Eigen::MatrixXd& target) {
    if (!train.labels) {
        throw DataError("label initializer: training set has no labels");
    }
    if (train.num_dims() != target.cols()) {
        throw DataError("label initializer: training and target feature dimensions differ");
    }
}

}  // namespace

LabelInitializer ridge_initializer(double ridge) {
    return [ridge](const Dataset& train, const Eigen::MatrixXd& target) -> Labels {
        check_train(train, target);
        const Eigen::Index n = train.num_samples();
        const Eigen::Index m = train.num_dims();
        const Eigen::MatrixXd y = one_hot(*train.labels, train.num_classes());

        const Eigen::RowVectorXd x_mean = train.features.colwise().mean();
        const Eigen::RowVectorXd y_mean = y.colwise().mean();
        const Eigen::MatrixXd xc = train.features.rowwise() - x_mean;
        const Eigen::MatrixXd yc = y.rowwise() - y_mean;

        // Primal (m x m) or dual (n x n) normal equations, whichever is smaller.
        Eigen::MatrixXd weights;
        bool ok = true;
        if (m <= n) {
            Eigen::MatrixXd gram = xc.transpose() * xc;
            gram.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            ok = ldlt.info() == Eigen::Success;
            if (ok) {
                weights = ldlt.solve(xc.transpose() * yc);
            }
        } else {
            Eigen::MatrixXd gram = xc * xc.transpose();
            gram.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            ok = ldlt.info() == Eigen::Success;
            if (ok) {
                weights = xc.transpose() * ldlt.solve(yc);
            }
        }
        if (!ok || !weights.allFinite()) {
            std::cerr << "warning: ridge normal equations are singular; "
                         "falling back to nearest class centroid\n";
            return nearest_centroid(train, target);
        }
        const Eigen::MatrixXd scores = ((target.rowwise() - x_mean) * weights).rowwise() + y_mean;
        return argmax_rows(scores);
    };
}

LabelInitializer centroid_initializer() {
    return [](const Dataset& train, const Eigen::MatrixXd& target) -> Labels {
        check_train(train, target);
        return nearest_centroid(train, target);
    };
}

}  // namespace cmms
