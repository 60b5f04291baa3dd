#pragma once

#include "distbrush/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace distbrush {

using PointId = std::uint32_t;

/// n x M feature matrix stored row-major, with optional ground-truth labels.
class Dataset {
public:
    Dataset() = default;

    /// Validates: n >= 2, dim >= 1, finite entries, labels sized n.
    Dataset(std::size_t n, std::size_t dim, std::vector<double> values,
            std::optional<std::vector<int>> labels = std::nullopt);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    double at(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool has_labels() const noexcept { return labels_.has_value(); }
    const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }

    double squared_distance(std::size_t i, std::size_t j) const;

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::optional<std::vector<int>> labels_;
};

/// 2D layout row-aligned with a Dataset.
struct Projection {
    std::vector<Point2> positions;

    std::size_t size() const noexcept { return positions.size(); }
};

enum class DataFormat { Csv, Json };

/// Picks the format from the file extension (.json, otherwise CSV).
DataFormat format_from_path(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset_csv(const std::string& text);
Dataset parse_dataset_json(const std::string& text);

std::string dataset_to_csv(const Dataset& data);
std::string dataset_to_json(const Dataset& data);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

Projection load_projection(const std::filesystem::path& path);
Projection parse_projection_csv(const std::string& text);
std::string projection_to_csv(const Projection& proj);
void save_projection(const Projection& proj, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Exact k-nearest-neighbor lists (Euclidean), ties broken by ascending index.
class KnnIndex {
public:
    KnnIndex() = default;
    KnnIndex(std::size_t n, std::size_t k, std::vector<PointId> neighbors);

    std::size_t size() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }

    /// Row i ordered by ascending distance from i, excluding i.
    std::span<const PointId> neighbors(std::size_t i) const { return {neighbors_.data() + i * k_, k_}; }
    const std::vector<PointId>& flat() const noexcept { return neighbors_; }

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<PointId> neighbors_;
};

KnnIndex build_knn(const Dataset& data, std::size_t k);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// FNV-1a over the bytes; stable across platforms.
std::uint64_t content_hash(std::string_view bytes);
std::string hex64(std::uint64_t v);

} // namespace distbrush
