#include "distbrush/snn.hpp"
#include "distbrush/error.hpp"

#include <algorithm>

namespace distbrush {

namespace {

void check_pair(std::size_t n, PointId p, PointId q) {
    if (p >= n || q >= n) {
        throw IndexError("point index out of range: (" + std::to_string(p) + ", " + std::to_string(q) +
                         ") with n = " + std::to_string(n));
    }
    if (p == q) {
        throw ParameterError("similarity is undefined for p == q (" + std::to_string(p) + ")");
    }
}

} // namespace

SnnModel::SnnModel(std::size_t k, std::vector<std::vector<SimEntry>> rows)
    : k_(k), simMax_(snn_sim_max(k)), rows_(std::move(rows)) {
    const std::size_t n = rows_.size();
    density_.assign(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        std::uint64_t total = 0;
        for (const SimEntry& e : rows_[p]) {
            total += e.score;
        }
        density_[p] = static_cast<double>(total);
    }
    densityNorm_.assign(n, 1.0);
    if (n > 0) {
        const auto [lo, hi] = std::minmax_element(density_.begin(), density_.end());
        const double range = *hi - *lo;
        if (range > 0.0) {
            for (std::size_t p = 0; p < n; ++p) {
                densityNorm_[p] = (density_[p] - *lo) / range;
            }
        }
    }
}

std::uint64_t SnnModel::sim(PointId p, PointId q) const {
    check_pair(rows_.size(), p, q);
    const auto& r = rows_[p];
    auto it = std::lower_bound(r.begin(), r.end(), q, [](const SimEntry& e, PointId id) { return e.other < id; });
    return (it != r.end() && it->other == q) ? it->score : 0;
}

std::size_t SnnModel::nonzeros() const noexcept {
    std::size_t total = 0;
    for (const auto& r : rows_) {
        total += r.size();
    }
    return total;
}

std::uint64_t snn_similarity(const KnnIndex& index, PointId p, PointId q) {
    check_pair(index.size(), p, q);
    const std::uint64_t k = index.k();
    const auto np = index.neighbors(p);
    const auto nq = index.neighbors(q);
    std::uint64_t total = 0;
    for (std::uint64_t m = 0; m < k; ++m) {
        for (std::uint64_t r = 0; r < k; ++r) {
            if (np[m] == nq[r]) {
                // 0-based ranks: (k+1-(m+1)) = k-m.
                total += (k - m) * (k - r);
            }
        }
    }
    return total;
}

SnnModel build_snn_model(const KnnIndex& index) {
    const std::size_t n = index.size();
    const std::size_t k = index.k();

    // Reverse lists: for each point a, every (q, rank) with q's rank-th neighbor == a.
    std::vector<std::vector<std::pair<PointId, std::uint32_t>>> holders(n);
    for (std::size_t q = 0; q < n; ++q) {
        const auto nq = index.neighbors(q);
        for (std::size_t r = 0; r < k; ++r) {
            holders[nq[r]].emplace_back(static_cast<PointId>(q), static_cast<std::uint32_t>(r));
        }
    }

    std::vector<std::vector<SimEntry>> rows(n);
    std::vector<std::uint64_t> acc(n, 0);
    std::vector<PointId> touched;
    for (std::size_t p = 0; p < n; ++p) {
        const auto np = index.neighbors(p);
        for (std::size_t m = 0; m < k; ++m) {
            const std::uint64_t wp = k - m;
            for (const auto& [q, r] : holders[np[m]]) {
                if (q == p) {
                    continue;
                }
                if (acc[q] == 0) {
                    touched.push_back(q);
                }
                acc[q] += wp * (k - r);
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = rows[p];
        row.reserve(touched.size());
        for (PointId q : touched) {
            row.push_back({q, acc[q]});
            acc[q] = 0;
        }
        touched.clear();
    }
    return SnnModel(k, std::move(rows));
}

double normalized_sim(const SnnModel& model, PointId p, PointId q) {
    return static_cast<double>(model.sim(p, q)) / static_cast<double>(model.sim_max());
}

} // namespace distbrush
