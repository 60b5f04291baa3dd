#include "distbrush/seeds.hpp"
#include "distbrush/error.hpp"

#include <algorithm>

namespace distbrush {

std::vector<PointId> covered_points(std::span<const Point2> livePositions, const Painter& painter) {
    if (!(painter.radius > 0.0)) {
        throw ParameterError("painter radius must be positive");
    }
    std::vector<PointId> out;
    for (std::size_t i = 0; i < livePositions.size(); ++i) {
        if (distance(livePositions[i], painter.center) <= painter.radius) {
            out.push_back(static_cast<PointId>(i));
        }
    }
    return out;
}

SeedSet select_seeds(const SnnModel& model, const ClosenessParams& params, std::span<const PointId> covered) {
    if (covered.empty()) {
        throw EmptyCoverError("painter covers no points");
    }
    const auto& dens = model.density();
    PointId best = covered.front();
    for (PointId p : covered) {
        if (p >= model.size()) {
            throw IndexError("covered index " + std::to_string(p) + " out of range");
        }
        if (dens[p] > dens[best] || (dens[p] == dens[best] && p < best)) {
            best = p;
        }
    }
    SeedSet seeds;
    seeds.center = best;
    seeds.members = cluster_cut(model, params, best, covered);
    seeds.members.push_back(best);
    std::sort(seeds.members.begin(), seeds.members.end());
    seeds.members.erase(std::unique(seeds.members.begin(), seeds.members.end()), seeds.members.end());
    return seeds;
}

} // namespace distbrush
