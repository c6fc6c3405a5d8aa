#include "cmms/verify/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace cmms::oracle {

Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v) {
    auto excess = [&v](double tau) { return (v.array() - tau).max(0.0).sum() - 1.0; };
    double lo = v.minCoeff() - 1.0;  // excess(lo) >= 0
    double hi = v.maxCoeff();        // excess(hi) = -1
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Eigen::VectorXd s = (v.array() - 0.5 * (lo + hi)).max(0.0);
    // Bisection leaves the sum off by a few ulps; spread the remainder over
    // the support so the row is exactly stochastic up to rounding.
    const Eigen::Index support = (s.array() > 0.0).count();
    if (support > 0) {
        const double fix = (1.0 - s.sum()) / static_cast<double>(support);
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            if (s(j) > 0.0) {
                s(j) += fix;
            }
        }
    }
    return s;
}

namespace {

std::vector<Eigen::Index> sorted_neighbors(const Eigen::MatrixXd& dists, Eigen::Index i) {
    std::vector<Eigen::Index> order;
    for (Eigen::Index j = 0; j < dists.cols(); ++j) {
        if (j != i) {
            order.push_back(j);
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dists(i, a) < dists(i, b); });
    return order;
}

}  // namespace

Eigen::RowVectorXd similarity_row(const Eigen::MatrixXd& dists, Eigen::Index i, int k, double delta) {
    const std::vector<Eigen::Index> order = sorted_neighbors(dists, i);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dists.cols());
    if (delta <= 1e-12) {
        for (int j = 0; j < k; ++j) {
            row(order[static_cast<std::size_t>(j)]) = 1.0 / k;
        }
        return row;
    }
    Eigen::VectorXd v(k);
    for (int j = 0; j < k; ++j) {
        v(j) = -dists(i, order[static_cast<std::size_t>(j)]) / (2.0 * delta);
    }
    const Eigen::VectorXd s = simplex_projection(v);
    for (int j = 0; j < k; ++j) {
        row(order[static_cast<std::size_t>(j)]) = s(j);
    }
    return row;
}

double similarity_row_cost(const Eigen::MatrixXd& dists, Eigen::Index i,
                           const Eigen::RowVectorXd& row, double delta) {
    double cost = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (j != i) {
            cost += dists(i, j) * row(j) + delta * row(j) * row(j);
        }
    }
    return cost;
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double sum = 0.0;
            for (Eigen::Index c = 0; c < points.cols(); ++c) {
                const double diff = points(i, c) - points(j, c);
                sum += diff * diff;
            }
            d(i, j) = sum;
        }
    }
    return d;
}

double estimate_delta(const Eigen::MatrixXd& dists, int k) {
    const Eigen::Index n = dists.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                row.push_back(dists(i, j));
            }
        }
        std::sort(row.begin(), row.end());
        double head = 0.0;
        for (int j = 0; j < k; ++j) {
            head += row[static_cast<std::size_t>(j)];
        }
        total += 0.5 * k * row[static_cast<std::size_t>(k)] - 0.5 * head;
    }
    return total / static_cast<double>(n);
}

double weighted_pair_sum(const Eigen::MatrixXd& z, const Eigen::MatrixXd& w) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.cols(); ++i) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            if (w(i, j) != 0.0) {
                sum += w(i, j) * (z.col(i) - z.col(j)).squaredNorm();
            }
        }
    }
    return 0.5 * sum;
}

Eigen::MatrixXd same_class_weights(const Labels& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto size = std::count(labels.begin(), labels.end(), labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) {
                w(i, j) = 1.0 / static_cast<double>(size);
            }
        }
    }
    return w;
}

namespace {

// Column c: sum over class-c columns of z divided by the class size, zero
// when the class is absent.
Eigen::MatrixXd class_means(const Eigen::MatrixXd& z, const Labels& labels, int num_classes) {
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(z.rows(), num_classes);
    for (int c = 0; c < num_classes; ++c) {
        int count = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) {
                means.col(c) += z.col(static_cast<Eigen::Index>(i));
                ++count;
            }
        }
        if (count > 0) {
            means.col(c) /= count;
        }
    }
    return means;
}

}  // namespace

double objective(const Problem& problem, const Eigen::MatrixXd& p, const Eigen::MatrixXd& f,
                 const std::vector<int>& assignment, TargetKind kind,
                 const Eigen::MatrixXd& similarity, double delta) {
    const auto n_s = static_cast<Eigen::Index>(problem.source_labels.size());
    const auto n_l = static_cast<Eigen::Index>(problem.labeled_labels.size());
    const Eigen::Index n_t = problem.X.cols() - n_s;
    const Eigen::Index d = p.cols();

    Eigen::MatrixXd z(d, problem.X.cols());
    for (Eigen::Index i = 0; i < problem.X.cols(); ++i) {
        for (Eigen::Index r = 0; r < d; ++r) {
            double sum = 0.0;
            for (Eigen::Index q = 0; q < problem.X.rows(); ++q) {
                sum += p(q, r) * problem.X(q, i);
            }
            z(r, i) = sum;
        }
    }
    const Eigen::MatrixXd z_s = z.leftCols(n_s);
    const Eigen::MatrixXd z_t = z.rightCols(n_t);

    Eigen::MatrixXd anchor = problem.lambda1 * class_means(z_s, problem.source_labels, problem.num_classes);
    if (n_l > 0) {
        anchor += problem.lambda2 *
                  class_means(z_t.leftCols(n_l), problem.labeled_labels, problem.num_classes);
    }
    double total = centroid_cluster_value(anchor, z_t, assignment, problem.alpha, f);

    double p_norm = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            p_norm += p(i, j) * p(i, j);
        }
    }
    total += problem.beta * p_norm;
    total += problem.gamma * 2.0 * weighted_pair_sum(z_s, same_class_weights(problem.source_labels));

    switch (kind) {
        case TargetKind::graph: {
            const Eigen::MatrixXd sym = 0.5 * (similarity + similarity.transpose());
            double s_norm = 0.0;
            for (Eigen::Index i = 0; i < similarity.rows(); ++i) {
                for (Eigen::Index j = 0; j < similarity.cols(); ++j) {
                    s_norm += similarity(i, j) * similarity(i, j);
                }
            }
            total += problem.gamma * (2.0 * weighted_pair_sum(z_t, sym) + delta * s_norm);
            break;
        }
        case TargetKind::pseudo_classes:
            total += problem.gamma * 2.0 * weighted_pair_sum(z_t, same_class_weights(assignment));
            break;
        case TargetKind::none:
            break;
    }
    return total;
}

double centroid_cluster_value(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& z_t,
                              const std::vector<int>& assignment, double alpha,
                              const Eigen::MatrixXd& f) {
    double centroid = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            const double diff = anchor(i, c) - f(i, c);
            centroid += diff * diff;
        }
    }
    double cluster = 0.0;
    for (Eigen::Index j = 0; j < z_t.cols(); ++j) {
        const int c = assignment[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < z_t.rows(); ++i) {
            const double diff = z_t(i, j) - f(i, c);
            cluster += diff * diff;
        }
    }
    return centroid + alpha * cluster;
}

Eigen::MatrixXd centroid_cluster_gradient(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& z_t,
                                          const std::vector<int>& assignment, double alpha,
                                          const Eigen::MatrixXd& f, double step) {
    Eigen::MatrixXd grad(f.rows(), f.cols());
    Eigen::MatrixXd probe = f;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            probe(i, c) = f(i, c) + step;
            const double up = centroid_cluster_value(anchor, z_t, assignment, alpha, probe);
            probe(i, c) = f(i, c) - step;
            const double down = centroid_cluster_value(anchor, z_t, assignment, alpha, probe);
            probe(i, c) = f(i, c);
            grad(i, c) = (up - down) / (2.0 * step);
        }
    }
    return grad;
}

double lambda_grid_search(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const Eigen::MatrixXd& f, double step) {
    const auto points = static_cast<long>(std::llround(1.0 / step));
    double best = 0.0;
    double best_value = std::numeric_limits<double>::infinity();
    for (long g = 0; g <= points; ++g) {
        const double lambda = static_cast<double>(g) * step;
        const double value = (lambda * a + (1.0 - lambda) * b - f).squaredNorm();
        if (value < best_value) {
            best_value = value;
            best = lambda;
        }
    }
    return best;
}

Eigen::MatrixXd random_feasible_frame(const Eigen::MatrixXd& b, Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd y(b.rows(), d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            y(i, j) = normal(rng);
        }
    }
    // A second whitening pass removes most of the rounding left by the first
    // when B is badly conditioned.
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::MatrixXd gram = y.transpose() * b * y;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
        if (es.eigenvalues().minCoeff() <= 0.0) {
            throw std::runtime_error("random_feasible_frame: frame meets the null space of B");
        }
        y = y * es.operatorInverseSqrt();
    }
    return y;
}

Eigen::VectorXd pencil_values(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double cutoff) {
    const Eigen::MatrixXd m = a.partialPivLu().solve(b);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<double> values;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double mu = es.eigenvalues()(i).real();
        if (mu > cutoff) {
            values.push_back(1.0 / mu);
        }
    }
    std::sort(values.begin(), values.end());
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Labels ridge_predict(const Eigen::MatrixXd& train, const Labels& labels, int num_classes,
                     double ridge, const Eigen::MatrixXd& target) {
    const Eigen::Index n = train.rows();
    const Eigen::Index m = train.cols();
    Eigen::MatrixXd z(n, m + 1);
    z << train, Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, num_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    }
    Eigen::MatrixXd normal = z.transpose() * z;
    for (Eigen::Index j = 0; j < m; ++j) {
        normal(j, j) += ridge;
    }
    const Eigen::MatrixXd w = normal.fullPivLu().solve(z.transpose() * y);

    Eigen::MatrixXd zt(target.rows(), m + 1);
    zt << target, Eigen::VectorXd::Ones(target.rows());
    const Eigen::MatrixXd scores = zt * w;
    Labels out(static_cast<std::size_t>(target.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < num_classes; ++c) {
            if (scores(i, c) > scores(i, best)) {
                best = c;
            }
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

std::vector<int> nearest_column(const Eigen::MatrixXd& z, const Eigen::MatrixXd& f) {
    std::vector<int> out(static_cast<std::size_t>(z.cols()));
    for (Eigen::Index i = 0; i < z.cols(); ++i) {
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            double dist = 0.0;
            for (Eigen::Index r = 0; r < z.rows(); ++r) {
                const double diff = z(r, i) - f(r, c);
                dist += diff * diff;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(c);
            }
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

}  // namespace cmms::oracle
