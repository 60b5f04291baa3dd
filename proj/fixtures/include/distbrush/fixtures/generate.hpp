#pragma once

#include "distbrush/dataset.hpp"

#include <cstdint>
#include <vector>

namespace distbrush::fixtures {

enum class FixtureKind { TwoBlobs, ThreeBlobs, HypersphereShells, GridLattice };

const char* to_string(FixtureKind k);

/// Lengths are in units of sigma, the RMS radius of one cluster.
///
/// Cluster centers sit on a regular simplex in the hidden dimensions (2..M-1),
/// `separation` apart. In the first two coordinates, which form the projection,
/// the centers are only `projectedOffset` apart, so the 2D view overlaps more
/// than the full space does.
struct FixtureSpec {
    FixtureKind kind = FixtureKind::TwoBlobs;
    std::size_t nPerCluster = 50;
    std::size_t M = 10;
    double separation = 10.0;
    double projectedOffset = 1.0;
    /// Only used by shells and lattices; blob kinds fix it at 2 or 3.
    std::size_t clusters = 2;
    /// Radial jitter of shell points.
    double shellNoise = 0.01;
    std::uint64_t seed = 1;

    std::size_t cluster_count() const;
    void validate() const;
};

struct Fixture {
    Dataset data;
    Projection projection;
    std::vector<int> truth;
    std::vector<std::vector<double>> centers;
    /// Silhouette of the truth labels in the full space.
    double silhouette = 0.0;
};

/// Seeded and deterministic. Blob and shell kinds must reach silhouette 0.5.
Fixture generate(const FixtureSpec& spec);

/// Settings used by the end-to-end tests for the easy (2 clusters) and hard (3) tasks.
FixtureSpec easy_task_spec();
FixtureSpec hard_task_spec();

} // namespace distbrush::fixtures
