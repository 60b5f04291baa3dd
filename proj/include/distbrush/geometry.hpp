#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace distbrush {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;

    Point2& operator+=(Point2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline Point2 normalized(Point2 a) {
    const double len = norm(a);
    return len > 0.0 ? a * (1.0 / len) : Point2{1.0, 0.0};
}

// Counterclockwise vertex list; the closing edge is implicit.
using Polygon = std::vector<Point2>;

/// Signed area, positive for counterclockwise order.
double signed_area(std::span<const Point2> poly);

/// Area centroid. Falls back to the vertex mean for zero-area input.
Point2 polygon_centroid(std::span<const Point2> poly);

/// Largest vertex-to-vertex distance.
double polygon_diameter(std::span<const Point2> poly);

/// True for a counterclockwise, strictly convex polygon with at least 3 vertices.
bool is_convex_ccw(std::span<const Point2> poly);

/// Point-in-convex-polygon test with an absolute tolerance. Points within
/// `tol` of the boundary count as inside.
bool convex_contains(std::span<const Point2> poly, Point2 p, double tol = 0.0);

/// Strict interior test: distance to every edge line must exceed `tol`.
bool convex_contains_strict(std::span<const Point2> poly, Point2 p, double tol = 0.0);

/// Even-odd point-in-polygon test for arbitrary simple loops.
bool loop_contains(std::span<const Point2> loop, Point2 p);

/// Exit parameter t of the ray origin + t*dir (t >= 0) from a convex polygon
/// that contains origin. Returns the smallest positive crossing.
double ray_exit(std::span<const Point2> poly, Point2 origin, Point2 dir);

/// True when no two non-adjacent edges intersect.
bool is_simple(std::span<const Point2> poly);

} // namespace distbrush
