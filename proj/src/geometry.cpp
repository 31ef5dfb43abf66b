#include "textspot/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "textspot/error.hpp"

namespace textspot {
namespace {

Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double norm(Point a) { return std::hypot(a.x, a.y); }

double distance_to_segment(Point p, Point s0, Point s1) {
    const Point d = s1 - s0;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return norm(p - s0);
    const double t = std::clamp(dot(p - s0, d) / len2, 0.0, 1.0);
    return norm(p - (s0 + d * t));
}

int sign_with_eps(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

AxisAlignedBox ring_box(std::span<const Point> ring) {
    AxisAlignedBox box{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
    for (const Point& p : ring) {
        box.x_min = std::min(box.x_min, p.x);
        box.y_min = std::min(box.y_min, p.y);
        box.x_max = std::max(box.x_max, p.x);
        box.y_max = std::max(box.y_max, p.y);
    }
    return box;
}

// Crossing-number test; boundary points are handled by the caller.
bool strictly_inside(Point p, std::span<const Point> ring) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = ring[j];
        const Point b = ring[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

enum class Location { kOutside, kInside, kBoundarySameDirection, kBoundaryOppositeDirection };

Location locate_fragment(Point mid, Point direction, std::span<const Point> ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point q0 = ring[i];
        const Point q1 = ring[(i + 1) % n];
        if (distance_to_segment(mid, q0, q1) <= kCoincidenceEps) {
            return dot(direction, q1 - q0) > 0.0 ? Location::kBoundarySameDirection
                                                 : Location::kBoundaryOppositeDirection;
        }
    }
    return strictly_inside(mid, ring) ? Location::kInside : Location::kOutside;
}

// Parameters in [0, 1] along p0->p1 where the edge meets the boundary of `ring`.
void split_parameters(Point p0, Point p1, std::span<const Point> ring, std::vector<double>& ts) {
    const Point d = p1 - p0;
    const double len = norm(d);
    const double len2 = len * len;
    const double t_eps = kCoincidenceEps / len;
    auto add = [&](double t) {
        if (t > -t_eps && t < 1.0 + t_eps) ts.push_back(std::clamp(t, 0.0, 1.0));
    };
    auto project = [&](Point q) { return dot(q - p0, d) / len2; };

    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point q0 = ring[i];
        const Point q1 = ring[(i + 1) % n];
        const double o0 = cross(d, q0 - p0) / len;
        const double o1 = cross(d, q1 - p0) / len;
        const bool on0 = std::abs(o0) <= kCoincidenceEps;
        const bool on1 = std::abs(o1) <= kCoincidenceEps;
        if (on0 || on1) {
            if (on0) add(project(q0));
            if (on1) add(project(q1));
            continue;
        }
        if ((o0 > 0.0) == (o1 > 0.0)) continue;
        const double s = o0 / (o0 - o1);
        add(project(q0 + (q1 - q0) * s));
    }
}

// Green's-theorem contribution of the parts of `ring`'s boundary that bound
// the intersection with `other`. Shared same-direction edges are claimed by
// exactly one side of the pair via `claim_shared_edges`.
double boundary_contribution(std::span<const Point> ring, std::span<const Point> other, Point origin,
                             bool claim_shared_edges) {
    double twice_area = 0.0;
    std::vector<double> ts;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point p0 = ring[i] - origin;
        const Point p1 = ring[(i + 1) % n] - origin;
        const Point d = p1 - p0;
        if (norm(d) == 0.0) continue;

        ts.assign({0.0, 1.0});
        split_parameters(ring[i], ring[(i + 1) % n], other, ts);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return b - a <= 1e-15; }),
                 ts.end());

        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            const double ta = ts[k];
            const double tb = ts[k + 1];
            if (tb <= ta) continue;
            const Point mid = ring[i] + (ring[(i + 1) % n] - ring[i]) * (0.5 * (ta + tb));
            const Location loc = locate_fragment(mid, d, other);
            const bool take = loc == Location::kInside ||
                              (claim_shared_edges && loc == Location::kBoundarySameDirection);
            if (!take) continue;
            const Point a = p0 + d * ta;
            const Point b = p0 + d * tb;
            twice_area += cross(a, b);
        }
    }
    return twice_area;
}

double ring_intersection_area(std::span<const Point> a, const AxisAlignedBox& box_a,
                              std::span<const Point> b, const AxisAlignedBox& box_b) {
    if (!box_a.overlaps(box_b)) return 0.0;
    // Evaluate in a canonical operand order so that the result is bitwise symmetric.
    const bool swap = std::lexicographical_compare(
        b.begin(), b.end(), a.begin(), a.end(),
        [](Point l, Point r) { return l.x < r.x || (l.x == r.x && l.y < r.y); });
    if (swap) std::swap(a, b);
    const Point origin{std::min(box_a.x_min, box_b.x_min), std::min(box_a.y_min, box_b.y_min)};
    const double twice = boundary_contribution(a, b, origin, true) + boundary_contribution(b, a, origin, false);
    const double area = 0.5 * twice;
    // Result can never exceed either operand; clamp rounding excess.
    const double cap = std::min(std::abs(signed_area(a)), std::abs(signed_area(b)));
    return std::clamp(area, 0.0, cap);
}

}  // namespace

bool AxisAlignedBox::overlaps(const AxisAlignedBox& other) const noexcept {
    return x_min < other.x_max && other.x_min < x_max && y_min < other.y_max && other.y_min < y_max;
}

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
    for (const Point& p : vertices_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite polygon coordinate");
    }
}

Polygon Polygon::from_flat(std::span<const double> coords) {
    if (coords.size() % 2 != 0) throw GeometryError("odd number of polygon coordinates");
    if (coords.size() < 6) throw GeometryError("polygon needs at least 6 coordinates");
    std::vector<Point> pts;
    pts.reserve(coords.size() / 2);
    for (std::size_t i = 0; i < coords.size(); i += 2) pts.push_back({coords[i], coords[i + 1]});
    return Polygon(std::move(pts));
}

double signed_area(std::span<const Point> ring) noexcept {
    if (ring.size() < 3) return 0.0;
    // Shift to the first vertex to limit cancellation for far-from-origin rings.
    const Point o = ring[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) twice += cross(ring[i] - o, ring[i + 1] - o);
    return 0.5 * twice;
}

double polygon_area(const Polygon& p) noexcept { return std::abs(signed_area(p.vertices())); }

AxisAlignedBox bounding_box(const Polygon& p) noexcept { return ring_box(p.vertices()); }

bool segments_intersect(Point a0, Point a1, Point b0, Point b1, double eps) noexcept {
    if (distance_to_segment(a0, b0, b1) <= eps || distance_to_segment(a1, b0, b1) <= eps ||
        distance_to_segment(b0, a0, a1) <= eps || distance_to_segment(b1, a0, a1) <= eps) {
        return true;
    }
    const int s0 = sign_with_eps(cross(a1 - a0, b0 - a0), 0.0);
    const int s1 = sign_with_eps(cross(a1 - a0, b1 - a0), 0.0);
    const int s2 = sign_with_eps(cross(b1 - b0, a0 - b0), 0.0);
    const int s3 = sign_with_eps(cross(b1 - b0, a1 - b0), 0.0);
    return s0 * s1 < 0 && s2 * s3 < 0;
}

bool is_simple(std::span<const Point> ring) noexcept {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a0 = ring[i];
        const Point a1 = ring[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point b0 = ring[j];
            const Point b1 = ring[(j + 1) % n];
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges may only share their common vertex; a collinear
                // fold-back overlaps along a segment.
                const Point da = a1 - a0;
                const Point db = b1 - b0;
                const double scale = norm(da) * norm(db);
                if (scale == 0.0) return false;
                if (std::abs(cross(da, db)) <= kCoincidenceEps * scale && dot(da, db) < 0.0) return false;
                if (n == 3) continue;
                // With n > 3, the far endpoints must stay clear of the other edge.
                const Point far_a = (j == i + 1) ? a0 : a1;
                const Point far_b = (j == i + 1) ? b1 : b0;
                if (distance_to_segment(far_a, b0, b1) <= kCoincidenceEps ||
                    distance_to_segment(far_b, a0, a1) <= kCoincidenceEps) {
                    return false;
                }
                continue;
            }
            if (segments_intersect(a0, a1, b0, b1)) return false;
        }
    }
    return true;
}

NormalizedPolygon normalize_polygon(const Polygon& p) {
    std::vector<Point> out;
    out.reserve(p.size());
    for (const Point& v : p.vertices()) {
        if (out.empty() || norm(v - out.back()) > kCoincidenceEps) out.push_back(v);
    }
    while (out.size() > 1 && norm(out.front() - out.back()) <= kCoincidenceEps) out.pop_back();
    if (out.size() < 3) throw GeometryError("degenerate polygon");
    if (signed_area(out) < 0.0) std::reverse(out.begin(), out.end());
    const bool simple = is_simple(out);
    return {Polygon(std::move(out)), !simple};
}

PreparedPolygon::PreparedPolygon(const Polygon& p) {
    NormalizedPolygon n = normalize_polygon(p);
    area_ = signed_area(n.polygon.vertices());
    if (!(area_ > 0.0)) throw GeometryError("degenerate polygon");
    if (n.self_intersecting) throw GeometryError("non-simple polygon");
    box_ = ring_box(n.polygon.vertices());
    vertices_ = n.polygon.vertices();
}

double polygon_intersection_area(const PreparedPolygon& a, const PreparedPolygon& b) noexcept {
    return ring_intersection_area(a.vertices(), a.box(), b.vertices(), b.box());
}

double polygon_intersection_area(const Polygon& a, const Polygon& b) {
    const NormalizedPolygon na = normalize_polygon(a);
    const NormalizedPolygon nb = normalize_polygon(b);
    if (na.self_intersecting || nb.self_intersecting) throw GeometryError("non-simple polygon");
    const auto& va = na.polygon.vertices();
    const auto& vb = nb.polygon.vertices();
    return ring_intersection_area(va, ring_box(va), vb, ring_box(vb));
}

double iou(const PreparedPolygon& a, const PreparedPolygon& b) {
    const double inter = polygon_intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (!(uni > 0.0)) throw GeometryError("degenerate pair");
    return std::clamp(inter / uni, 0.0, 1.0);
}

double iou(const Polygon& a, const Polygon& b) {
    const NormalizedPolygon na = normalize_polygon(a);
    const NormalizedPolygon nb = normalize_polygon(b);
    const double area_a = polygon_area(na.polygon);
    const double area_b = polygon_area(nb.polygon);
    if (!(area_a + area_b > 0.0)) throw GeometryError("degenerate pair");
    if (na.self_intersecting || nb.self_intersecting) throw GeometryError("non-simple polygon");
    const auto& va = na.polygon.vertices();
    const auto& vb = nb.polygon.vertices();
    const double inter = ring_intersection_area(va, ring_box(va), vb, ring_box(vb));
    const double uni = area_a + area_b - inter;
    if (!(uni > 0.0)) throw GeometryError("degenerate pair");
    return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace textspot
