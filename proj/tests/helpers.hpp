#pragma once

#include "cmms/dataset.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

namespace testing {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                     double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = normal(rng);
        }
    }
    return m;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n) {
    const Eigen::MatrixXd q = random_matrix(rng, n, n);
    return q * q.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

/// Labels 0..classes-1, each class present at least once.
inline cmms::Labels random_labels(std::mt19937_64& rng, Eigen::Index n, int classes) {
    cmms::Labels y(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> pick(0, classes - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = i < classes ? static_cast<int>(i) : pick(rng);
    }
    return y;
}

inline cmms::Dataset labeled_dataset(Eigen::MatrixXd features, cmms::Labels labels, int classes) {
    cmms::Dataset d;
    d.features = std::move(features);
    d.labels = std::move(labels);
    for (int c = 0; c < classes; ++c) {
        d.class_values.push_back(c + 1);
    }
    return d;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("cmms-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace testing
