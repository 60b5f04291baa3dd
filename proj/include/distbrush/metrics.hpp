#pragma once

#include "distbrush/dataset.hpp"
#include "distbrush/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace distbrush {

struct QualityScores {
    double trustworthiness = 0.0;
    double continuity = 0.0;
    std::size_t kEval = 0;
};

/// Trustworthiness penalizes 2D neighbors that are not MD neighbors by their
/// MD rank excess; continuity does the same with the roles swapped. Ranks are
/// 1-based with ties broken by ascending index.
QualityScores trust_continuity(const Dataset& data, std::span<const Point2> positions, std::size_t kEval = 20);

struct ClusteringScores {
    /// Adjusted mutual information, max(H_truth, H_pred) normalization.
    double ami = 0.0;
    double arand = 0.0;
    double vmeasure = 0.0;
    double homogeneity = 0.0;
    double completeness = 0.0;
    /// Fraction of points with predicted label -1 (excluded from the scores).
    double unassignedFraction = 0.0;
};

ClusteringScores clustering_scores(std::span<const int> predicted, std::span<const int> truth);

/// Mean silhouette over points whose label is not -1. Singleton classes score 0.
double silhouette(const Dataset& data, std::span<const int> labels);
double silhouette(std::span<const Point2> positions, std::span<const int> labels);

/// Translates and uniformly scales the layout so its longer side spans [0, 1].
std::vector<Point2> normalize_unit_square(std::span<const Point2> positions);

/// Normalizes, then redraws ceil(proportion * n) uniformly chosen rows from an
/// isotropic Gaussian centered on (0.5, 0.5) with per-axis sigma 0.166.
std::vector<Point2> distort_projection(std::span<const Point2> positions, double proportion, std::uint64_t seed);

inline constexpr double kDistortionSigma = 0.166;

} // namespace distbrush
