#include "cmms/dataset.hpp"

#include "cmms/errors.hpp"
#include "cmms/numerics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace cmms {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'M', 'M', 'S'};
constexpr std::uint32_t kBinVersion = 1;

std::string where(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", col " + std::to_string(col);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T to_little_endian(T value) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    } else {
        return value;
    }
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw DataError(std::string("truncated binary header: missing ") + what);
    }
    return to_little_endian(value);
}

template <typename T>
void write_pod(std::ostream& out, T value) {
    value = to_little_endian(value);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) {
            continue;
        }
        ++rows;
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = body.find(',', start);
            const std::string_view field =
                trim(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start));
            ++col;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
                throw DataError(path.string() + ": cannot parse '" + std::string(field) + "' at " +
                                where(rows, col));
            }
            if (!std::isfinite(v)) {
                throw DataError(path.string() + ": non-finite value at " + where(rows, col));
            }
            values.push_back(v);
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (cols == 0) {
            cols = col;
        } else if (col != cols) {
            throw DataError(path.string() + ": dimension mismatch at row " + std::to_string(rows) +
                            ": expected " + std::to_string(cols) + " columns, got " +
                            std::to_string(col));
        }
    }
    if (rows == 0) {
        throw DataError(path.string() + ": no rows");
    }
    Dataset d;
    d.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    d.name = path.stem().string();
    return d;
}

Dataset load_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size())) {
        throw DataError(path.string() + ": no rows");
    }
    if (magic != kMagic) {
        throw DataError(path.string() + ": bad magic, expected CMMS");
    }
    const auto version = read_pod<std::uint32_t>(in, "version");
    if (version != kBinVersion) {
        throw DataError(path.string() + ": unsupported version " + std::to_string(version));
    }
    const auto n = read_pod<std::uint64_t>(in, "n");
    const auto m = read_pod<std::uint64_t>(in, "m");
    if (n == 0) {
        throw DataError(path.string() + ": no rows");
    }
    if (m == 0) {
        throw DataError(path.string() + ": zero columns");
    }
    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < m; ++j) {
            double v = 0.0;
            if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
                throw DataError(path.string() + ": dimension mismatch, payload ends at " +
                                where(i + 1, j + 1));
            }
            v = to_little_endian(v);
            if (!std::isfinite(v)) {
                throw DataError(path.string() + ": non-finite value at " + where(i + 1, j + 1));
            }
            d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw DataError(path.string() + ": dimension mismatch, trailing bytes after " +
                        std::to_string(n) + "x" + std::to_string(m) + " payload");
    }
    d.name = path.stem().string();
    return d;
}

}  // namespace

FeatureFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".bin" ? FeatureFormat::bin : FeatureFormat::csv;
}

Dataset load_features(const std::filesystem::path& path, FeatureFormat format) {
    return format == FeatureFormat::bin ? load_bin(path) : load_csv(path);
}

std::vector<int> load_label_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<int> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) {
            continue;
        }
        int v = 0;
        const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc() || ptr != body.data() + body.size()) {
            throw DataError(path.string() + ": cannot parse label '" + std::string(body) + "' at " +
                            where(line_no, 1));
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw DataError(path.string() + ": no rows");
    }
    return out;
}

void save_features(const std::filesystem::path& path, const Eigen::MatrixXd& features,
                   FeatureFormat format) {
    if (format == FeatureFormat::bin) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out.write(kMagic.data(), kMagic.size());
        write_pod<std::uint32_t>(out, kBinVersion);
        write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(features.rows()));
        write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(features.cols()));
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            for (Eigen::Index j = 0; j < features.cols(); ++j) {
                write_pod<double>(out, features(i, j));
            }
        }
        if (!out) {
            throw IoError("write failed: " + path.string());
        }
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        for (Eigen::Index j = 0; j < features.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << features(i, j);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void save_label_values(const std::filesystem::path& path, const std::vector<int>& values) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    for (int v : values) {
        out << v << '\n';
    }
}

std::vector<int> class_table(const std::vector<int>& values) {
    std::vector<int> table(values);
    std::sort(table.begin(), table.end());
    table.erase(std::unique(table.begin(), table.end()), table.end());
    return table;
}

Labels encode_labels(const std::vector<int>& values, const std::vector<int>& class_values) {
    Labels out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto it = std::lower_bound(class_values.begin(), class_values.end(), values[i]);
        if (it == class_values.end() || *it != values[i]) {
            throw DataError("label " + std::to_string(values[i]) + " at row " + std::to_string(i + 1) +
                            " is not a known class");
        }
        out.push_back(static_cast<int>(it - class_values.begin()));
    }
    return out;
}

void attach_labels(Dataset& d, const std::vector<int>& values,
                   const std::optional<std::vector<int>>& class_values) {
    if (static_cast<Eigen::Index>(values.size()) != d.num_samples()) {
        throw DataError("label count " + std::to_string(values.size()) + " does not match " +
                        std::to_string(d.num_samples()) + " feature rows");
    }
    d.class_values = class_values ? *class_values : class_table(values);
    d.labels = encode_labels(values, d.class_values);
}

void validate(const Dataset& d) {
    if (d.num_samples() < 1 || d.num_dims() < 1) {
        throw DataError("dataset '" + d.name + "' is empty");
    }
    if (!d.features.allFinite()) {
        for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
            for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
                if (!std::isfinite(d.features(i, j))) {
                    throw DataError("dataset '" + d.name + "': non-finite value at " +
                                    where(static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1)));
                }
            }
        }
    }
    if (d.labels) {
        if (static_cast<Eigen::Index>(d.labels->size()) != d.num_samples()) {
            throw DataError("dataset '" + d.name + "': label count does not match rows");
        }
        for (int y : *d.labels) {
            if (y < 0 || y >= d.num_classes()) {
                throw DataError("dataset '" + d.name + "': label index out of range");
            }
        }
    }
}

std::vector<int> class_counts(const Dataset& d) {
    std::vector<int> counts(static_cast<std::size_t>(d.num_classes()), 0);
    if (d.labels) {
        for (int y : *d.labels) {
            ++counts[static_cast<std::size_t>(y)];
        }
    }
    return counts;
}

Dataset zscore(const Dataset& d) {
    const Eigen::Index n = d.num_samples();
    if (n < 2) {
        throw DataError("zscore needs at least 2 samples, got " + std::to_string(n));
    }
    Dataset out = d;
    const Eigen::RowVectorXd mean = d.features.colwise().mean();
    out.features.rowwise() -= mean;
    const Eigen::RowVectorXd std_dev =
        (out.features.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
    for (Eigen::Index j = 0; j < out.features.cols(); ++j) {
        if (std_dev(j) > 1e-12) {
            out.features.col(j) /= std_dev(j);
        } else {
            out.features.col(j).setZero();
        }
    }
    return out;
}

PcaResult pca(const Dataset& d, Eigen::Index out_dim) {
    const Eigen::Index n = d.num_samples();
    const Eigen::Index m = d.num_dims();
    if (out_dim < 1 || out_dim > std::min(n - 1, m)) {
        throw DataError("pca: out_dim " + std::to_string(out_dim) + " outside [1, " +
                        std::to_string(std::min(n - 1, m)) + "]");
    }
    PcaResult out;
    out.mean = d.features.colwise().mean();
    const Eigen::MatrixXd centered = d.features.rowwise() - out.mean;
    const double inv_n = 1.0 / static_cast<double>(n);

    out.basis.resize(m, out_dim);
    out.variances.resize(out_dim);
    if (m <= n) {
        const SymEig eig = sym_eig(inv_n * centered.transpose() * centered);
        for (Eigen::Index j = 0; j < out_dim; ++j) {
            out.basis.col(j) = eig.vectors.col(m - 1 - j);
            out.variances(j) = eig.values(m - 1 - j);
        }
    } else {
        // Gram route: right singular vectors from the n x n inner-product matrix.
        const SymEig eig = sym_eig(inv_n * centered * centered.transpose());
        for (Eigen::Index j = 0; j < out_dim; ++j) {
            const double lambda = eig.values(n - 1 - j);
            out.variances(j) = lambda;
            Eigen::VectorXd dir = centered.transpose() * eig.vectors.col(n - 1 - j);
            out.basis.col(j) = dir / dir.norm();
        }
        canonicalize_signs(out.basis);
    }
    out.reduced = d;
    out.reduced.features = centered * out.basis;
    return out;
}

Dataset select_rows(const Dataset& d, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.name = d.name;
    out.class_values = d.class_values;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), d.num_dims());
    Labels labels;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = d.features.row(rows[i]);
        if (d.labels) {
            labels.push_back((*d.labels)[static_cast<std::size_t>(rows[i])]);
        }
    }
    if (d.labels) {
        out.labels = std::move(labels);
    }
    return out;
}

SdaSplit split_sda(const Dataset& d, int per_class, std::uint64_t seed) {
    if (!d.labels) {
        throw DataError("split_sda: dataset '" + d.name + "' has no labels");
    }
    if (per_class < 1) {
        throw DataError("split_sda: per_class must be >= 1, got " + std::to_string(per_class));
    }
    const int num_classes = d.num_classes();
    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < d.labels->size(); ++i) {
        members[static_cast<std::size_t>((*d.labels)[i])].push_back(static_cast<Eigen::Index>(i));
    }
    std::mt19937_64 rng(seed);
    std::vector<bool> is_labeled(static_cast<std::size_t>(d.num_samples()), false);
    for (int c = 0; c < num_classes; ++c) {
        auto& idx = members[static_cast<std::size_t>(c)];
        if (static_cast<int>(idx.size()) <= per_class) {
            throw DataError("split_sda: class " + std::to_string(d.class_values[static_cast<std::size_t>(c)]) +
                            " has " + std::to_string(idx.size()) + " samples, need more than " +
                            std::to_string(per_class));
        }
        // Partial Fisher-Yates; the first per_class slots become the labeled draw.
        for (int j = 0; j < per_class; ++j) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(j), idx.size() - 1);
            std::swap(idx[static_cast<std::size_t>(j)], idx[pick(rng)]);
            is_labeled[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] = true;
        }
    }
    SdaSplit split;
    split.per_class_count = per_class;
    for (Eigen::Index i = 0; i < d.num_samples(); ++i) {
        (is_labeled[static_cast<std::size_t>(i)] ? split.labeled_indices : split.unlabeled_indices).push_back(i);
    }
    split.labeled = select_rows(d, split.labeled_indices);
    split.unlabeled = select_rows(d, split.unlabeled_indices);
    split.labeled.name = d.name + "/labeled";
    split.unlabeled.name = d.name + "/unlabeled";
    return split;
}

std::uint64_t fingerprint(const Dataset& d) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    const std::array<std::int64_t, 2> shape{d.features.rows(), d.features.cols()};
    mix(shape.data(), sizeof(shape));
    mix(d.features.data(), static_cast<std::size_t>(d.features.size()) * sizeof(double));
    if (d.labels) {
        mix(d.labels->data(), d.labels->size() * sizeof(int));
    }
    return h;
}

}  // namespace cmms
