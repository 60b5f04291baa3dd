#include "distbrush/lens.hpp"
#include "distbrush/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace distbrush {

void LensConfig::validate() const {
    if (gridResolution < 8) {
        throw ParameterError("grid resolution must be at least 8");
    }
    if (!(alphaFraction > 0.0 && alphaFraction < 1.0)) {
        throw ParameterError("alphaFraction must lie in (0, 1)");
    }
    if (!(bandwidthFactor > 0.0)) {
        throw ParameterError("bandwidthFactor must be positive");
    }
    if (!(minBandwidth > 0.0)) {
        throw ParameterError("minBandwidth must be positive");
    }
    if (!(marginFraction > 0.0)) {
        throw ParameterError("marginFraction must be positive");
    }
    if (!(minMargin > 0.0)) {
        throw ParameterError("minMargin must be positive");
    }
    if (!(vertexMergeFraction >= 0.0 && vertexMergeFraction < 0.5)) {
        throw ParameterError("vertexMergeFraction must lie in [0, 0.5)");
    }
}

double DensityGrid::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

DensityGrid kde_grid(std::span<const Point2> points, int resolution, double bandwidth) {
    if (!(bandwidth > 0.0)) {
        throw ParameterError("bandwidth must be positive");
    }
    if (resolution < 8) {
        throw ParameterError("grid resolution must be at least 8");
    }
    if (points.empty()) {
        throw ParameterError("kde_grid needs at least one point");
    }
    Point2 lo = points[0];
    Point2 hi = points[0];
    for (const Point2& p : points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double pad = 3.0 * bandwidth;
    const double side = std::max(hi.x - lo.x, hi.y - lo.y) + 2.0 * pad;
    const Point2 mid = (lo + hi) * 0.5;

    DensityGrid grid;
    grid.resolution = resolution;
    grid.cellSize = side / (resolution - 1);
    grid.origin = mid - Point2{side * 0.5, side * 0.5};
    grid.values.assign(static_cast<std::size_t>(resolution) * resolution, 0.0);

    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const Point2 node = grid.node(ix, iy);
            double s = 0.0;
            for (const Point2& p : points) {
                const Point2 d = node - p;
                s += std::exp(-dot(d, d) * inv2h2);
            }
            grid.values[static_cast<std::size_t>(iy) * resolution + ix] = s;
        }
    }
    return grid;
}

namespace {

// Grid with a ring of zero-valued nodes around it, so contours always close.
struct PaddedField {
    const DensityGrid& grid;
    int size; // nodes per side

    explicit PaddedField(const DensityGrid& g) : grid(g), size(g.resolution + 2) {}

    double value(int ix, int iy) const {
        if (ix <= 0 || iy <= 0 || ix >= size - 1 || iy >= size - 1) {
            return 0.0;
        }
        return grid.at(ix - 1, iy - 1);
    }

    Point2 node(int ix, int iy) const { return grid.node(ix - 1, iy - 1); }
};

enum Edge : int { Bottom, Right, Top, Left };

using EdgeKey = std::uint64_t;

EdgeKey edge_key(int size, int ix, int iy, Edge e) {
    // Horizontal edges are keyed by their left node, vertical ones by the bottom node.
    switch (e) {
    case Bottom:
        return 2 * (static_cast<EdgeKey>(iy) * size + ix);
    case Top:
        return 2 * (static_cast<EdgeKey>(iy + 1) * size + ix);
    case Left:
        return 2 * (static_cast<EdgeKey>(iy) * size + ix) + 1;
    case Right:
        return 2 * (static_cast<EdgeKey>(iy) * size + ix + 1) + 1;
    }
    return 0;
}

Point2 edge_point(const PaddedField& f, int ix, int iy, Edge e, double alpha) {
    int ax = ix, ay = iy, bx = ix, by = iy;
    switch (e) {
    case Bottom:
        bx = ix + 1;
        break;
    case Top:
        ay = by = iy + 1;
        bx = ix + 1;
        break;
    case Left:
        by = iy + 1;
        break;
    case Right:
        ax = bx = ix + 1;
        by = iy + 1;
        break;
    }
    const double va = f.value(ax, ay);
    const double vb = f.value(bx, by);
    const double t = std::clamp((alpha - va) / (vb - va), 0.0, 1.0);
    const Point2 a = f.node(ax, ay);
    const Point2 b = f.node(bx, by);
    return a + (b - a) * t;
}

} // namespace

std::vector<Polygon> marching_squares(const DensityGrid& grid, double alpha) {
    if (!(alpha > 0.0)) {
        throw ParameterError("contour level must be positive");
    }
    if (grid.max_value() < alpha) {
        throw EmptyContourError("contour level exceeds the grid maximum");
    }
    const PaddedField field(grid);
    const int size = field.size;

    struct Segment {
        EdgeKey a;
        EdgeKey b;
    };
    std::vector<Segment> segments;
    std::unordered_map<EdgeKey, Point2> points;
    std::unordered_map<EdgeKey, std::array<int, 2>> incident;

    auto add = [&](int ix, int iy, Edge e0, Edge e1) {
        const EdgeKey k0 = edge_key(size, ix, iy, e0);
        const EdgeKey k1 = edge_key(size, ix, iy, e1);
        if (!points.count(k0)) {
            points.emplace(k0, edge_point(field, ix, iy, e0, alpha));
        }
        if (!points.count(k1)) {
            points.emplace(k1, edge_point(field, ix, iy, e1, alpha));
        }
        const int id = static_cast<int>(segments.size());
        segments.push_back({k0, k1});
        for (EdgeKey k : {k0, k1}) {
            auto [it, fresh] = incident.try_emplace(k, std::array<int, 2>{-1, -1});
            (it->second[0] < 0 ? it->second[0] : it->second[1]) = id;
        }
    };

    for (int iy = 0; iy < size - 1; ++iy) {
        for (int ix = 0; ix < size - 1; ++ix) {
            const double bl = field.value(ix, iy);
            const double br = field.value(ix + 1, iy);
            const double tr = field.value(ix + 1, iy + 1);
            const double tl = field.value(ix, iy + 1);
            const int code = (bl >= alpha ? 1 : 0) | (br >= alpha ? 2 : 0) | (tr >= alpha ? 4 : 0) |
                             (tl >= alpha ? 8 : 0);
            const bool centerIn = (bl + br + tr + tl) * 0.25 >= alpha;
            switch (code) {
            case 0:
            case 15:
                break;
            case 1:
            case 14:
                add(ix, iy, Left, Bottom);
                break;
            case 2:
            case 13:
                add(ix, iy, Bottom, Right);
                break;
            case 3:
            case 12:
                add(ix, iy, Left, Right);
                break;
            case 4:
            case 11:
                add(ix, iy, Right, Top);
                break;
            case 6:
            case 9:
                add(ix, iy, Bottom, Top);
                break;
            case 7:
            case 8:
                add(ix, iy, Left, Top);
                break;
            case 5: // bl, tr inside
                if (centerIn) {
                    add(ix, iy, Bottom, Right);
                    add(ix, iy, Left, Top);
                } else {
                    add(ix, iy, Left, Bottom);
                    add(ix, iy, Right, Top);
                }
                break;
            case 10: // br, tl inside
                if (centerIn) {
                    add(ix, iy, Left, Bottom);
                    add(ix, iy, Right, Top);
                } else {
                    add(ix, iy, Bottom, Right);
                    add(ix, iy, Left, Top);
                }
                break;
            default:
                break;
            }
        }
    }

    std::vector<Polygon> loops;
    std::vector<char> used(segments.size(), 0);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) {
            continue;
        }
        Polygon loop;
        const EdgeKey start = segments[s].a;
        EdgeKey cur = segments[s].b;
        int seg = static_cast<int>(s);
        used[s] = 1;
        loop.push_back(points.at(start));
        while (cur != start) {
            loop.push_back(points.at(cur));
            const auto& inc = incident.at(cur);
            const int next = inc[0] == seg ? inc[1] : inc[0];
            if (next < 0 || used[next]) {
                break; // open chain; cannot happen with the zero border
            }
            used[next] = 1;
            seg = next;
            cur = segments[next].a == cur ? segments[next].b : segments[next].a;
        }
        if (loop.size() >= 3) {
            loops.push_back(std::move(loop));
        }
    }
    if (loops.empty()) {
        throw EmptyContourError("no contour loops at this level");
    }
    return loops;
}

Polygon convex_hull(std::span<const Point2> points) {
    std::vector<Point2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        throw DegenerateError("convex hull needs at least 3 distinct points");
    }
    Polygon hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point2& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) {
        throw DegenerateError("all points are collinear");
    }
    return hull;
}

Polygon regular_polygon(Point2 center, double radius, int sides) {
    Polygon poly;
    poly.reserve(static_cast<std::size_t>(sides));
    for (int i = 0; i < sides; ++i) {
        const double a = 2.0 * M_PI * i / sides;
        poly.push_back(center + Point2{std::cos(a), std::sin(a)} * radius);
    }
    return poly;
}

namespace {

// Merges runs of vertices closer than minEdge; keeps the hull convex.
Polygon merge_close_vertices(const Polygon& hull, double minEdge) {
    if (minEdge <= 0.0 || hull.size() <= 3) {
        return hull;
    }
    Polygon kept;
    kept.push_back(hull[0]);
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (distance(hull[i], kept.back()) >= minEdge) {
            kept.push_back(hull[i]);
        }
    }
    while (kept.size() > 3 && distance(kept.back(), kept.front()) < minEdge) {
        kept.pop_back();
    }
    if (kept.size() < 3) {
        return hull;
    }
    try {
        return convex_hull(kept);
    } catch (const DegenerateError&) {
        return hull;
    }
}

double bbox_diagonal(std::span<const Point2> pts) {
    Point2 lo = pts[0];
    Point2 hi = pts[0];
    for (const Point2& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    return distance(lo, hi);
}

} // namespace

InnerBoundary build_inner(std::span<const Point2> brushPositions, std::optional<Point2> anchor,
                          const LensConfig& config) {
    config.validate();
    if (brushPositions.empty()) {
        throw ParameterError("inner boundary needs at least one brushed point");
    }
    InnerBoundary out;
    out.bandwidth = std::max(config.bandwidthFactor * bbox_diagonal(brushPositions), config.minBandwidth);

    Point2 mean{};
    for (const Point2& p : brushPositions) {
        mean += p;
    }
    mean = mean * (1.0 / static_cast<double>(brushPositions.size()));

    if (brushPositions.size() < 3) {
        out.polygon = regular_polygon(mean, out.bandwidth, 12);
    } else {
        const DensityGrid grid = kde_grid(brushPositions, config.gridResolution, out.bandwidth);
        const auto loops = marching_squares(grid, config.alphaFraction * grid.max_value());
        const Polygon* chosen = nullptr;
        if (anchor) {
            for (const Polygon& loop : loops) {
                if (loop_contains(loop, *anchor)) {
                    chosen = &loop;
                    break;
                }
            }
        }
        if (!chosen) {
            double bestArea = -1.0;
            for (const Polygon& loop : loops) {
                const double a = std::abs(signed_area(loop));
                if (a > bestArea) {
                    bestArea = a;
                    chosen = &loop;
                }
            }
        }
        try {
            Polygon hull = convex_hull(*chosen);
            out.polygon = merge_close_vertices(hull, config.vertexMergeFraction * polygon_diameter(hull));
        } catch (const DegenerateError&) {
            out.polygon = regular_polygon(mean, out.bandwidth, 12);
        }
    }
    for (std::size_t i = 0; i < brushPositions.size(); ++i) {
        if (!convex_contains(out.polygon, brushPositions[i])) {
            out.outliers.push_back(i);
        }
    }
    return out;
}

OuterBoundary build_outer(std::span<const Point2> inner, double margin) {
    if (!(margin > 0.0)) {
        throw ParameterError("margin must be positive");
    }
    if (!is_convex_ccw(inner)) {
        throw GeometryError("inner boundary must be a convex counterclockwise polygon");
    }
    const std::size_t n = inner.size();
    OuterBoundary out;
    out.polygon.resize(n);
    out.bisectors.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Point2 prev = inner[(j + n - 1) % n];
        const Point2 cur = inner[j];
        const Point2 next = inner[(j + 1) % n];
        const Point2 ePrev = normalized(cur - prev);
        const Point2 eNext = normalized(next - cur);
        const Point2 nPrev{ePrev.y, -ePrev.x};
        const Point2 nNext{eNext.y, -eNext.x};
        const Point2 b = normalized(nPrev + nNext);
        out.bisectors[j] = b;
        out.polygon[j] = cur + b * margin;
    }
    if (!is_convex_ccw(out.polygon)) {
        throw GeometryError("corner offset produced a non-convex outer boundary");
    }
    return out;
}

double lens_margin(std::span<const Point2> inner, const LensConfig& config) {
    return std::max(config.marginFraction * polygon_diameter(inner), config.minMargin);
}

Lens make_lens(Polygon inner, double margin) {
    OuterBoundary outer = build_outer(inner, margin);
    Lens lens;
    lens.centroid = polygon_centroid(inner);
    lens.innerDiameter = polygon_diameter(inner);
    lens.inner = std::move(inner);
    lens.outer = std::move(outer.polygon);
    lens.bisectors = std::move(outer.bisectors);
    lens.margin = margin;
    return lens;
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Angle of b measured counterclockwise from a, in [0, 2pi).
double ccw_from(double a, double b) {
    double d = std::fmod(b - a, kTwoPi);
    if (d < 0.0) {
        d += kTwoPi;
    }
    return d;
}

RelocationRay ray_from_centroid(const Lens& lens, Point2 dir) {
    RelocationRay ray;
    ray.direction = dir;
    ray.innerHit = lens.centroid + dir * ray_exit(lens.inner, lens.centroid, dir);
    ray.outerHit = lens.centroid + dir * ray_exit(lens.outer, lens.centroid, dir);
    return ray;
}

} // namespace

RelocationRay relocation_ray(const Lens& lens, Point2 p) {
    const Point2 rel = p - lens.centroid;
    if (rel.x == 0.0 && rel.y == 0.0) {
        throw DegenerateError("relocation direction is undefined at the lens centroid");
    }
    const std::size_t n = lens.inner.size();
    const double phi = std::atan2(rel.y, rel.x);
    const auto cornerAngle = [&](std::size_t j) {
        const Point2 v = lens.inner[j % n] - lens.centroid;
        return std::atan2(v.y, v.x);
    };
    const double base = cornerAngle(0);
    const double target = ccw_from(base, phi);

    // Corner angles increase counterclockwise around the centroid.
    std::size_t j = 0;
    double lo = 0.0;
    double hi = kTwoPi;
    for (std::size_t c = 0; c < n; ++c) {
        const double a0 = c == 0 ? 0.0 : ccw_from(base, cornerAngle(c));
        const double a1 = c + 1 == n ? kTwoPi : ccw_from(base, cornerAngle(c + 1));
        if (target >= a0 && target < a1) {
            j = c;
            lo = a0;
            hi = a1;
            break;
        }
    }
    const double s = hi > lo ? (target - lo) / (hi - lo) : 0.0;
    const Point2 b0 = lens.bisectors[j];
    const Point2 b1 = lens.bisectors[(j + 1) % n];
    const double beta0 = std::atan2(b0.y, b0.x);
    const double turn = ccw_from(beta0, std::atan2(b1.y, b1.x));
    const double beta = beta0 + s * turn;
    return ray_from_centroid(lens, {std::cos(beta), std::sin(beta)});
}

RelocationRay relocation_ray_along(const Lens& lens, Point2 direction) {
    return ray_from_centroid(lens, normalized(direction));
}

const char* to_string(RelocationClass c) {
    switch (c) {
    case RelocationClass::Untouched:
        return "Untouched";
    case RelocationClass::StayInside:
        return "StayInside";
    case RelocationClass::PullIn:
        return "PullIn";
    case RelocationClass::PushOut:
        return "PushOut";
    case RelocationClass::AnnulusPlace:
        return "AnnulusPlace";
    }
    return "?";
}

RelocationPlan build_plan(const Lens& lens, const ClosenessResult& closeness, const ClosenessParams& params,
                          std::span<const Point2> livePositions) {
    params.validate();
    const std::size_t n = livePositions.size();
    if (closeness.values.size() != n || closeness.classes.size() != n) {
        throw AlignmentError("closeness result does not match the number of points");
    }
    RelocationPlan plan;
    plan.classOf.assign(n, RelocationClass::Untouched);

    const double diam = lens.innerDiameter > 0.0 ? lens.innerDiameter : 1.0;
    // Back-projected members stay this far inside the boundary, relative to the ray length.
    constexpr double kInset = 1e-6;

    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = livePositions[i];
        const NeighborClass cls = closeness.classes[i];
        const bool inInner = convex_contains(lens.inner, p);
        const bool inOuter = convex_contains(lens.outer, p);

        RelocationClass action = RelocationClass::Untouched;
        switch (cls) {
        case NeighborClass::Member:
            action = inInner ? RelocationClass::Untouched : RelocationClass::StayInside;
            break;
        case NeighborClass::TrueNeighbor:
            action = inInner ? RelocationClass::Untouched : RelocationClass::PullIn;
            break;
        case NeighborClass::NonNeighbor:
            action = inOuter ? RelocationClass::PushOut : RelocationClass::Untouched;
            break;
        case NeighborClass::Uncertain:
            action = (inOuter || closeness.values[i] >= params.thetaOut) ? RelocationClass::AnnulusPlace
                                                                         : RelocationClass::Untouched;
            break;
        }
        if (action == RelocationClass::Untouched) {
            continue;
        }

        const bool atCentroid = p == lens.centroid;
        const RelocationRay ray = atCentroid ? relocation_ray_along(lens, {1.0, 0.0}) : relocation_ray(lens, p);
        Point2 target;
        switch (action) {
        case RelocationClass::StayInside:
            target = lens.centroid + (ray.innerHit - lens.centroid) * (1.0 - kInset);
            break;
        case RelocationClass::PullIn: {
            const double d = distance(ray.innerHit, p);
            const double f = 1.0 / (1.0 + d / diam);
            target = lens.centroid + (ray.innerHit - lens.centroid) * f;
            break;
        }
        case RelocationClass::PushOut:
            target = ray.outerHit + ray.direction * (lens.margin * 0.5);
            break;
        case RelocationClass::AnnulusPlace: {
            const double close = closeness.values[i];
            double t;
            if (params.thetaOut >= 1.0) {
                t = close < 1.0 ? 1.0 : 0.0;
            } else {
                t = std::clamp((1.0 - close) / (1.0 - params.thetaOut), 0.0, 1.0);
            }
            target = ray.innerHit + (ray.outerHit - ray.innerHit) * t;
            break;
        }
        case RelocationClass::Untouched:
            break;
        }
        plan.classOf[i] = action;
        const Relocation move{static_cast<PointId>(i), p, target};
        plan.moves.push_back(move);
        if (!inOuter && (action == RelocationClass::PullIn || action == RelocationClass::AnnulusPlace)) {
            plan.traces.push_back(move);
        }
    }
    return plan;
}

void apply_plan(const RelocationPlan& plan, std::span<Point2> livePositions) {
    for (const Relocation& m : plan.moves) {
        if (m.index >= livePositions.size()) {
            throw IndexError("plan refers to point " + std::to_string(m.index) + " beyond the layout");
        }
        livePositions[m.index] = m.to;
    }
}

} // namespace distbrush
