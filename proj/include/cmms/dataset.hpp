#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cmms {

/// Labels are dense class indices in [0, C). The original label values from
/// disk live in Dataset::class_values, so class c prints as class_values[c].
using Labels = std::vector<int>;

struct Dataset {
    Eigen::MatrixXd features;            // n x m, one sample per row
    std::optional<Labels> labels;        // length n when present
    std::vector<int> class_values;       // original value of each dense class
    std::string name;

    Eigen::Index num_samples() const { return features.rows(); }
    Eigen::Index num_dims() const { return features.cols(); }
    int num_classes() const { return static_cast<int>(class_values.size()); }
    bool has_labels() const { return labels.has_value(); }
};

/// Labeled/unlabeled partition of a target domain for semi-supervised runs.
struct SdaSplit {
    Dataset labeled;
    Dataset unlabeled;
    int per_class_count = 0;
    std::vector<Eigen::Index> labeled_indices;    // rows of the original target
    std::vector<Eigen::Index> unlabeled_indices;
};

struct PcaResult {
    Dataset reduced;
    Eigen::MatrixXd basis;   // m x out_dim, orthonormal columns
    Eigen::RowVectorXd mean; // subtracted before projection
    Eigen::VectorXd variances; // variance along each basis column, descending
};

enum class FeatureFormat { csv, bin };

/// Picks bin for a ".bin" extension, csv otherwise.
FeatureFormat format_from_path(const std::filesystem::path& path);

Dataset load_features(const std::filesystem::path& path, FeatureFormat format);

/// One integer per line; returns raw (original) values.
std::vector<int> load_label_values(const std::filesystem::path& path);

void save_features(const std::filesystem::path& path, const Eigen::MatrixXd& features,
                   FeatureFormat format);
void save_label_values(const std::filesystem::path& path, const std::vector<int>& values);

/// Maps raw label values to dense indices using a sorted class table. Values
/// missing from the table raise DataError.
Labels encode_labels(const std::vector<int>& values, const std::vector<int>& class_values);

/// Sorted distinct values.
std::vector<int> class_table(const std::vector<int>& values);

/// Attaches raw labels, building the class table from them unless one is
/// supplied (use the source table for the target so indices agree).
void attach_labels(Dataset& d, const std::vector<int>& values,
                   const std::optional<std::vector<int>>& class_values = std::nullopt);

/// Throws DataError when the dataset is empty, has non-finite entries, or
/// labels out of range or of the wrong length.
void validate(const Dataset& d);

/// Number of samples per class, length num_classes().
std::vector<int> class_counts(const Dataset& d);

/// Per-column standardization with population statistics. Columns whose std
/// does not exceed 1e-12 become all-zero.
Dataset zscore(const Dataset& d);

/// Projection onto the top out_dim principal components of the centered data.
PcaResult pca(const Dataset& d, Eigen::Index out_dim);

/// Draws per_class labeled samples from every class, deterministic in seed.
SdaSplit split_sda(const Dataset& d, int per_class, std::uint64_t seed);

/// Rows of d selected by index, labels carried along.
Dataset select_rows(const Dataset& d, const std::vector<Eigen::Index>& rows);

/// FNV-1a over shape and raw bytes of features and labels.
std::uint64_t fingerprint(const Dataset& d);

}  // namespace cmms
