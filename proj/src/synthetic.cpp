#include "cmms/synthetic.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <random>

namespace cmms::synthetic {

namespace {

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = normal(rng);
        }
    }
    return m;
}

// ambient x latent with orthonormal columns.
Eigen::MatrixXd orthonormal_map(std::mt19937_64& rng, int ambient, int latent) {
    const Eigen::MatrixXd g = gaussian_matrix(rng, ambient, latent);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(ambient, latent);
}

Dataset labeled(Eigen::MatrixXd features, Labels labels, int classes, std::string name) {
    Dataset d;
    d.features = std::move(features);
    d.labels = std::move(labels);
    d.class_values.resize(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
        d.class_values[static_cast<std::size_t>(c)] = c + 1;
    }
    d.name = std::move(name);
    return d;
}

}  // namespace

DomainPair shifted_gaussians(std::uint64_t seed, const GaussianTask& task) {
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd embed = orthonormal_map(rng, task.ambient_dim, task.latent_dim);

    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(task.classes, task.latent_dim);
    for (int c = 0; c < task.classes; ++c) {
        const double angle = 2.0 * std::numbers::pi * c / task.classes;
        centers(c, 0) = task.class_radius * std::cos(angle);
        if (task.latent_dim > 1) {
            centers(c, 1) = task.class_radius * std::sin(angle);
        }
    }
    Eigen::RowVectorXd direction = gaussian_matrix(rng, 1, task.latent_dim);
    direction.normalize();
    const Eigen::RowVectorXd offset = task.shift * task.spread * direction;

    auto draw = [&](int per_class, const Eigen::RowVectorXd& translate, const std::string& name) {
        const int n = per_class * task.classes;
        Eigen::MatrixXd latent = gaussian_matrix(rng, n, task.latent_dim, task.spread);
        Labels labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int c = i % task.classes;
            labels[static_cast<std::size_t>(i)] = c;
            latent.row(i) += centers.row(c) + translate;
        }
        Eigen::MatrixXd x = latent * embed.transpose() +
                            gaussian_matrix(rng, n, task.ambient_dim, task.noise);
        return labeled(std::move(x), std::move(labels), task.classes, name);
    };
    DomainPair pair;
    pair.source = draw(task.source_per_class, Eigen::RowVectorXd::Zero(task.latent_dim), "gauss-source");
    pair.target = draw(task.target_per_class, offset, "gauss-target");
    return pair;
}

DomainPair half_moons(std::uint64_t seed, const MoonsTask& task) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> latent_noise(0.0, task.latent_noise);
    const Eigen::MatrixXd embed = orthonormal_map(rng, task.ambient_dim, 2);

    auto draw = [&](int per_class, double dx, double dy, double angle, const std::string& name) {
        const int n = 2 * per_class;
        Eigen::MatrixXd latent(n, 2);
        Labels labels(static_cast<std::size_t>(n));
        const double ca = std::cos(angle);
        const double sa = std::sin(angle);
        for (int i = 0; i < n; ++i) {
            const int c = i % 2;
            const double t = std::numbers::pi * unit(rng);
            double x = c == 0 ? std::cos(t) : 1.0 - std::cos(t);
            double y = c == 0 ? std::sin(t) : 0.5 - std::sin(t);
            x += latent_noise(rng);
            y += latent_noise(rng);
            latent(i, 0) = ca * x - sa * y + dx;
            latent(i, 1) = sa * x + ca * y + dy;
            labels[static_cast<std::size_t>(i)] = c;
        }
        Eigen::MatrixXd features = latent * embed.transpose() +
                                   gaussian_matrix(rng, n, task.ambient_dim, task.ambient_noise);
        return labeled(std::move(features), std::move(labels), 2, name);
    };
    DomainPair pair;
    pair.source = draw(task.source_per_class, 0.0, 0.0, 0.0, "moons-source");
    pair.target = draw(task.target_per_class, task.shift, task.shift, task.rotation, "moons-target");
    return pair;
}

DomainPair random_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform_int = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int n_s = uniform_int(30, 120);
    const int n_t = uniform_int(30, 120);
    const int m = uniform_int(10, 60);
    const int classes = uniform_int(2, 5);

    const Eigen::MatrixXd means = gaussian_matrix(rng, classes, m, 1.5);
    const Eigen::RowVectorXd shift = gaussian_matrix(rng, 1, m, 0.5);
    auto draw = [&](int n, const Eigen::RowVectorXd& translate, const std::string& name) {
        Eigen::MatrixXd x = gaussian_matrix(rng, n, m);
        Labels labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            // Cycle through classes first so every class is populated.
            const int c = i < classes ? i : uniform_int(0, classes - 1);
            labels[static_cast<std::size_t>(i)] = c;
            x.row(i) += means.row(c) + translate;
        }
        return labeled(std::move(x), std::move(labels), classes, name);
    };
    DomainPair pair;
    pair.source = draw(n_s, Eigen::RowVectorXd::Zero(m), "random-source");
    pair.target = draw(n_t, shift, "random-target");
    return pair;
}

DomainPair heterogeneous_gaussians(std::uint64_t seed, int source_dim, int target_dim, int classes,
                                   int per_class) {
    // One latent axis per class; class c is centered at 4 e_c.
    const int latent_dim = classes;
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd source_map = gaussian_matrix(rng, source_dim, latent_dim);
    const Eigen::MatrixXd target_map = gaussian_matrix(rng, target_dim, latent_dim);

    auto draw = [&](const Eigen::MatrixXd& map, const std::string& name) {
        const int n = per_class * classes;
        Eigen::MatrixXd latent = gaussian_matrix(rng, n, latent_dim);
        Labels labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int c = i % classes;
            labels[static_cast<std::size_t>(i)] = c;
            latent(i, c) += 4.0;
        }
        Eigen::MatrixXd x = latent * map.transpose() + gaussian_matrix(rng, n, map.rows(), 0.3);
        return labeled(std::move(x), std::move(labels), classes, name);
    };
    DomainPair pair;
    pair.source = draw(source_map, "hetero-source");
    pair.target = draw(target_map, "hetero-target");
    return pair;
}

}  // namespace cmms::synthetic
