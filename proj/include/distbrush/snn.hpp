#pragma once

#include "distbrush/dataset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace distbrush {

/// One nonzero entry of a sparse similarity row.
struct SimEntry {
    PointId other;
    std::uint64_t score;
};

/// Shared-nearest-neighbor similarity over a kNN graph, plus per-point density.
///
/// Raw scores are integers: every neighbor shared between p (at 1-based rank m)
/// and q (at rank n) contributes (k+1-m)(k+1-n). The maximum, reached when both
/// ordered lists coincide, is k(k+1)(2k+1)/6. Rows are stored sparsely and
/// sorted by the other point's index; pairs that share no neighbor are implicit
/// zeros. Self-similarity is excluded from density.
class SnnModel {
public:
    SnnModel() = default;
    SnnModel(std::size_t k, std::vector<std::vector<SimEntry>> rows);

    std::size_t size() const noexcept { return rows_.size(); }
    std::size_t k() const noexcept { return k_; }
    std::uint64_t sim_max() const noexcept { return simMax_; }

    /// Raw score; 0 for pairs without a shared neighbor and for p == q.
    std::uint64_t sim(PointId p, PointId q) const;
    std::span<const SimEntry> row(PointId p) const { return rows_[p]; }

    const std::vector<double>& density() const noexcept { return density_; }
    const std::vector<double>& density_norm() const noexcept { return densityNorm_; }

    std::size_t nonzeros() const noexcept;

private:
    std::size_t k_ = 0;
    std::uint64_t simMax_ = 0;
    std::vector<std::vector<SimEntry>> rows_;
    std::vector<double> density_;
    std::vector<double> densityNorm_;
};

constexpr std::uint64_t snn_sim_max(std::uint64_t k) { return k * (k + 1) * (2 * k + 1) / 6; }

/// Direct evaluation for one pair from the neighbor lists.
std::uint64_t snn_similarity(const KnnIndex& index, PointId p, PointId q);

SnnModel build_snn_model(const KnnIndex& index);

/// sim(p,q) / simMax, in [0,1].
double normalized_sim(const SnnModel& model, PointId p, PointId q);

} // namespace distbrush
