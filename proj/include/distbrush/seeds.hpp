#pragma once

#include "distbrush/closeness.hpp"
#include "distbrush/geometry.hpp"

#include <span>
#include <vector>

namespace distbrush {

/// Disc under the pointer that covers points.
struct Painter {
    Point2 center;
    double radius = 1.0;
};

/// Indices (ascending) whose live position lies within the painter disc.
std::vector<PointId> covered_points(std::span<const Point2> livePositions, const Painter& painter);

struct SeedSet {
    PointId center = 0;
    /// Ascending indices; always contains `center`.
    std::vector<PointId> members;
};

/// Picks the densest covered point and keeps the covered points that clear
/// the thetaIn cut against it. Density ties go to the lowest index.
SeedSet select_seeds(const SnnModel& model, const ClosenessParams& params, std::span<const PointId> covered);

} // namespace distbrush
