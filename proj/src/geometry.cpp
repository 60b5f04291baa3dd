#include "distbrush/geometry.hpp"

#include <algorithm>
#include <limits>

namespace distbrush {

double signed_area(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * twice;
}

Point2 polygon_centroid(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n == 0) {
        return {};
    }
    // Shift to the first vertex so large offsets do not cancel.
    const Point2 base = poly[0];
    double twiceArea = 0.0;
    Point2 acc{};
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i] - base;
        const Point2 b = poly[(i + 1) % n] - base;
        const double c = cross(a, b);
        twiceArea += c;
        acc += (a + b) * c;
    }
    if (std::abs(twiceArea) <= std::numeric_limits<double>::epsilon() * 16.0) {
        Point2 mean{};
        for (const Point2& p : poly) {
            mean += p;
        }
        return mean * (1.0 / static_cast<double>(n));
    }
    return base + acc * (1.0 / (3.0 * twiceArea));
}

double polygon_diameter(std::span<const Point2> poly) {
    double best = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            best = std::max(best, distance(poly[i], poly[j]));
        }
    }
    return best;
}

bool is_convex_ccw(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % n];
        const Point2 c = poly[(i + 2) % n];
        if (cross(b - a, c - b) <= 0.0) {
            return false;
        }
    }
    // Total turning of exactly one revolution rules out star-shaped windings.
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 e0 = poly[(i + 1) % n] - poly[i];
        const Point2 e1 = poly[(i + 2) % n] - poly[(i + 1) % n];
        turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    return std::abs(turning - 2.0 * M_PI) < 1e-6;
}

namespace {

// Signed distance of p to the line through edge (a,b); positive on the left.
double edge_side(Point2 a, Point2 b, Point2 p) {
    const Point2 e = b - a;
    const double len = norm(e);
    if (len == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return cross(e, p - a) / len;
}

} // namespace

bool convex_contains(std::span<const Point2> poly, Point2 p, double tol) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (edge_side(poly[i], poly[(i + 1) % n], p) < -tol) {
            return false;
        }
    }
    return n >= 3;
}

bool convex_contains_strict(std::span<const Point2> poly, Point2 p, double tol) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (edge_side(poly[i], poly[(i + 1) % n], p) <= tol) {
            return false;
        }
    }
    return n >= 3;
}

bool loop_contains(std::span<const Point2> loop, Point2 p) {
    bool inside = false;
    const std::size_t n = loop.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = loop[i];
        const Point2 b = loop[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xCross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xCross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

double ray_exit(std::span<const Point2> poly, Point2 origin, Point2 dir) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 e = poly[(i + 1) % n] - a;
        // Outward normal of a counterclockwise edge.
        const Point2 outward{e.y, -e.x};
        const double rate = dot(dir, outward);
        if (rate <= 0.0) {
            continue;
        }
        const double t = dot(a - origin, outward) / rate;
        best = std::min(best, std::max(t, 0.0));
    }
    return best;
}

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) {
        return true;
    }
    return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
           (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

} // namespace

bool is_simple(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                continue;
            }
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

} // namespace distbrush
