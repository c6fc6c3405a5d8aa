#include "cmms/graphs.hpp"

#include "cmms/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace cmms {

namespace {

using RowEntries = std::vector<std::pair<Eigen::Index, double>>;

SparseMatrix from_rows(Eigen::Index n, const std::vector<RowEntries>& rows) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const auto& [j, v] : rows[static_cast<std::size_t>(i)]) {
            triplets.emplace_back(i, j, v);
        }
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return s;
}

void check_square(const Eigen::MatrixXd& dists, const char* who) {
    if (dists.rows() != dists.cols()) {
        throw DataError(std::string(who) + ": distance matrix must be square");
    }
}

// Per-class means of the columns, one column per class.
Eigen::MatrixXd class_means(const SourceLaplacian& lap, const Eigen::MatrixXd& columns) {
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(columns.rows(), lap.num_classes());
    for (Eigen::Index i = 0; i < lap.size(); ++i) {
        means.col(lap.labels[static_cast<std::size_t>(i)]) += columns.col(i);
    }
    for (int c = 0; c < lap.num_classes(); ++c) {
        if (lap.class_sizes[static_cast<std::size_t>(c)] > 0) {
            means.col(c) /= lap.class_sizes[static_cast<std::size_t>(c)];
        }
    }
    return means;
}

}  // namespace

SourceLaplacian source_laplacian(const Labels& labels, int num_classes, bool allow_empty) {
    SourceLaplacian lap;
    lap.labels = labels;
    lap.class_sizes.assign(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) {
            throw DataError("source_laplacian: label index " + std::to_string(y) + " out of range");
        }
        ++lap.class_sizes[static_cast<std::size_t>(y)];
    }
    if (!allow_empty) {
        for (int c = 0; c < num_classes; ++c) {
            if (lap.class_sizes[static_cast<std::size_t>(c)] == 0) {
                throw DataError("source_laplacian: class index " + std::to_string(c) + " is empty");
            }
        }
    }
    return lap;
}

Eigen::MatrixXd SourceLaplacian::matrix() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        const double inv = 1.0 / class_sizes[static_cast<std::size_t>(c)];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (labels[static_cast<std::size_t>(j)] == c) {
                l(i, j) = (i == j ? 1.0 : 0.0) - inv;
            }
        }
    }
    return l;
}

Eigen::MatrixXd SourceLaplacian::scatter(const Eigen::MatrixXd& columns) const {
    const Eigen::MatrixXd means = class_means(*this, columns);
    Eigen::MatrixXd centered = columns;
    for (Eigen::Index i = 0; i < size(); ++i) {
        centered.col(i) -= means.col(labels[static_cast<std::size_t>(i)]);
    }
    return centered * centered.transpose();
}

double SourceLaplacian::quadratic(const Eigen::MatrixXd& columns) const {
    const Eigen::MatrixXd means = class_means(*this, columns);
    double total = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) {
        total += (columns.col(i) - means.col(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    if (n < 2) {
        throw DataError("pairwise_sq_dists: need at least 2 points");
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(i, j) = (points.row(i) - points.row(j)).squaredNorm();
        }
    }
    out.triangularView<Eigen::StrictlyLower>() = out.transpose();
    return out;
}

std::vector<Eigen::Index> nearest_neighbors(const Eigen::MatrixXd& dists, Eigen::Index i,
                                            Eigen::Index count) {
    const Eigen::Index n = dists.cols();
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) {
            idx.push_back(j);
        }
    }
    count = std::min<Eigen::Index>(count, static_cast<Eigen::Index>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double da = dists(i, a);
        const double db = dists(i, b);
        return da < db || (da == db && a < b);
    });
    idx.resize(static_cast<std::size_t>(count));
    return idx;
}

double estimate_delta(const Eigen::MatrixXd& dists, int k) {
    check_square(dists, "estimate_delta");
    const Eigen::Index n = dists.rows();
    if (k < 1 || k > n - 2) {
        throw DataError("estimate_delta: k = " + std::to_string(k) + " needs 1 <= k <= n - 2 with n = " +
                        std::to_string(n));
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto nn = nearest_neighbors(dists, i, k + 1);
        double head = 0.0;
        for (int j = 0; j < k; ++j) {
            head += dists(i, nn[static_cast<std::size_t>(j)]);
        }
        total += 0.5 * k * dists(i, nn[static_cast<std::size_t>(k)]) - 0.5 * head;
    }
    return std::max(0.0, total / static_cast<double>(n));
}

SparseMatrix update_similarity(const Eigen::MatrixXd& dists, int k, double delta) {
    check_square(dists, "update_similarity");
    const Eigen::Index n = dists.rows();
    if (k < 1 || k > n - 1) {
        throw DataError("update_similarity: k = " + std::to_string(k) + " needs 1 <= k <= n - 1 with n = " +
                        std::to_string(n));
    }
    if (!dists.allFinite()) {
        throw DataError("update_similarity: non-finite distance");
    }
    std::vector<RowEntries> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto nn = nearest_neighbors(dists, i, k);
        auto& row = rows[static_cast<std::size_t>(i)];
        if (delta <= kDeltaFloor) {
            for (Eigen::Index j : nn) {
                row.emplace_back(j, 1.0 / k);
            }
            continue;
        }
        // Shrink the support until the farthest kept neighbor has positive
        // weight; s = k is the unclipped closed form.
        int support = k;
        double mean = 0.0;
        for (; support > 1; --support) {
            double sum = 0.0;
            for (int j = 0; j < support; ++j) {
                sum += dists(i, nn[static_cast<std::size_t>(j)]);
            }
            mean = sum / support;
            const double last = dists(i, nn[static_cast<std::size_t>(support - 1)]);
            if (1.0 / support + (mean - last) / (2.0 * delta) > 0.0) {
                break;
            }
        }
        if (support == 1) {
            row.emplace_back(nn[0], 1.0);
            continue;
        }
        for (int j = 0; j < support; ++j) {
            const Eigen::Index col = nn[static_cast<std::size_t>(j)];
            row.emplace_back(col, 1.0 / support + (mean - dists(i, col)) / (2.0 * delta));
        }
    }
    return from_rows(n, rows);
}

SparseMatrix heat_kernel_similarity(const Eigen::MatrixXd& dists, int k) {
    check_square(dists, "heat_kernel_similarity");
    const Eigen::Index n = dists.rows();
    if (k < 1 || k > n - 1) {
        throw DataError("heat_kernel_similarity: k out of range");
    }
    std::vector<std::vector<Eigen::Index>> neighbors(static_cast<std::size_t>(n));
    double bandwidth = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        neighbors[static_cast<std::size_t>(i)] = nearest_neighbors(dists, i, k);
        for (Eigen::Index j : neighbors[static_cast<std::size_t>(i)]) {
            bandwidth += dists(i, j);
        }
    }
    bandwidth /= static_cast<double>(n) * k;
    if (bandwidth <= 0.0) {
        bandwidth = 1.0;
    }
    std::vector<RowEntries> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& nn = neighbors[static_cast<std::size_t>(i)];
        // Shift by the nearest distance so the largest weight is exp(0).
        const double base = dists(i, nn.front());
        double total = 0.0;
        for (Eigen::Index j : nn) {
            const double w = std::exp(-(dists(i, j) - base) / bandwidth);
            rows[static_cast<std::size_t>(i)].emplace_back(j, w);
            total += w;
        }
        for (auto& entry : rows[static_cast<std::size_t>(i)]) {
            entry.second /= total;
        }
    }
    return from_rows(n, rows);
}

SparseMatrix laplacian_from_similarity(const SparseMatrix& similarity) {
    const SparseMatrix transposed = similarity.transpose();
    SparseMatrix sym = 0.5 * (similarity + transposed);
    const Eigen::VectorXd degree = sym * Eigen::VectorXd::Ones(sym.cols());
    SparseMatrix lap = -sym;
    for (Eigen::Index i = 0; i < lap.rows(); ++i) {
        lap.coeffRef(i, i) += degree(i);
    }
    lap.prune(0.0);
    lap.makeCompressed();
    return lap;
}

TargetGraph make_target_graph(const Eigen::MatrixXd& dists, int k, double delta) {
    TargetGraph g;
    g.k = k;
    g.delta = delta;
    g.similarity = update_similarity(dists, k, delta);
    g.laplacian = laplacian_from_similarity(g.similarity);
    return g;
}

}  // namespace cmms
