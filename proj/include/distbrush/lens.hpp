#pragma once

#include "distbrush/closeness.hpp"
#include "distbrush/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace distbrush {

/// Tunables for lens construction. Lengths are in layout units unless noted.
struct LensConfig {
    int gridResolution = 64;
    /// Contour level as a fraction of the density grid maximum.
    double alphaFraction = 0.15;
    /// KDE bandwidth as a fraction of the brush bounding-box diagonal.
    double bandwidthFactor = 0.25;
    /// Absolute bandwidth floor.
    double minBandwidth = 1e-3;
    /// Outer margin as a fraction of the inner polygon diameter.
    double marginFraction = 0.2;
    /// Absolute margin floor.
    double minMargin = 1e-3;
    /// Inner vertices closer than this fraction of the diameter are merged.
    double vertexMergeFraction = 0.02;

    void validate() const;
};

/// Gaussian KDE sampled on resolution x resolution grid nodes.
struct DensityGrid {
    int resolution = 0;
    Point2 origin;
    double cellSize = 0.0;
    std::vector<double> values; // row-major, index iy * resolution + ix

    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * resolution + ix]; }
    Point2 node(int ix, int iy) const { return {origin.x + ix * cellSize, origin.y + iy * cellSize}; }
    double max_value() const;
};

/// Grid spans the bounding box of `points` padded by 3 * bandwidth on each side.
DensityGrid kde_grid(std::span<const Point2> points, int resolution, double bandwidth);

/// Closed iso-contour loops at `alpha`. Cells outside the grid count as zero so
/// every loop closes.
std::vector<Polygon> marching_squares(const DensityGrid& grid, double alpha);

/// Counterclockwise hull without collinear vertices (Andrew's monotone chain).
Polygon convex_hull(std::span<const Point2> points);

/// Regular polygon, counterclockwise, first vertex on the +x axis.
Polygon regular_polygon(Point2 center, double radius, int sides);

struct InnerBoundary {
    Polygon polygon;
    double bandwidth = 0.0;
    /// Positions (indices into the input span) left outside the polygon.
    std::vector<std::size_t> outliers;
};

/// Convex hull of the alpha-level density contour of the brushed positions.
/// When the contour splits, the loop around `anchor` (else the largest) is kept.
InnerBoundary build_inner(std::span<const Point2> brushPositions, std::optional<Point2> anchor,
                          const LensConfig& config);

struct OuterBoundary {
    Polygon polygon;
    /// Outward unit bisector of each inner corner's exterior angle.
    std::vector<Point2> bisectors;
};

/// Offsets every inner corner by `margin` along its exterior bisector.
OuterBoundary build_outer(std::span<const Point2> inner, double margin);

struct Lens {
    Polygon inner;
    Polygon outer;
    double margin = 0.0;
    std::vector<Point2> bisectors;
    Point2 centroid;
    double innerDiameter = 0.0;
};

/// Validates the inner polygon and assembles the outer boundary around it.
Lens make_lens(Polygon inner, double margin);

/// margin = max(marginFraction * diameter, minMargin).
double lens_margin(std::span<const Point2> inner, const LensConfig& config);

struct RelocationRay {
    Point2 direction;
    Point2 innerHit;
    Point2 outerHit;
};

/// Direction interpolated between the two corner bisectors whose angular
/// sector (about the centroid) contains p; hits are where the ray from the
/// centroid along that direction leaves each boundary.
/// Throws DegenerateError when p coincides with the centroid.
RelocationRay relocation_ray(const Lens& lens, Point2 p);

/// Ray from the centroid along an explicit unit direction.
RelocationRay relocation_ray_along(const Lens& lens, Point2 direction);

enum class RelocationClass : std::uint8_t { Untouched, StayInside, PullIn, PushOut, AnnulusPlace };

const char* to_string(RelocationClass c);

struct Relocation {
    PointId index;
    Point2 from;
    Point2 to;
};

struct RelocationPlan {
    /// One entry per point.
    std::vector<RelocationClass> classOf;
    /// Every point that moves, ascending by index.
    std::vector<Relocation> moves;
    /// Moves whose origin lies outside the outer boundary.
    std::vector<Relocation> traces;
};

/// Targets per neighbor class:
///   Member outside inner      -> StayInside, back onto the inner boundary.
///   TrueNeighbor outside inner -> PullIn, strictly inside at radial fraction 1/(1 + d/diam).
///   NonNeighbor inside outer   -> PushOut, margin/2 beyond the outer boundary.
///   Uncertain                  -> AnnulusPlace between the boundaries by closeness,
///                                 unless outside outer with closeness < thetaOut.
RelocationPlan build_plan(const Lens& lens, const ClosenessResult& closeness, const ClosenessParams& params,
                          std::span<const Point2> livePositions);

void apply_plan(const RelocationPlan& plan, std::span<Point2> livePositions);

} // namespace distbrush
