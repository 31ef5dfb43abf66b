#pragma once

/// @file geometry.hpp
/// Polygon primitives and arbitrary-vertex polygon IoU.
///
/// Coordinates are pixels in double precision. Two points closer than
/// kCoincidenceEps are treated as the same point. Inputs of either winding
/// are accepted; every area/IoU routine works on a counter-clockwise copy.

#include <span>
#include <vector>

namespace textspot {

inline constexpr double kCoincidenceEps = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;

    constexpr bool operator==(const Point&) const = default;
};

struct AxisAlignedBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }
    bool overlaps(const AxisAlignedBox& other) const noexcept;

    constexpr bool operator==(const AxisAlignedBox&) const = default;
};

/// Ordered vertex ring, implicitly closed. Holds at least three finite
/// vertices; anything stronger (distinct vertices, simplicity, orientation)
/// is established by normalize_polygon.
class Polygon {
public:
    /// Throws GeometryError for fewer than 3 vertices or non-finite coordinates.
    explicit Polygon(std::vector<Point> vertices);

    /// Builds from a flat [x1, y1, x2, y2, ...] list (COCO segmentation ring).
    static Polygon from_flat(std::span<const double> coords);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }

    bool operator==(const Polygon&) const = default;

private:
    std::vector<Point> vertices_;
};

double signed_area(std::span<const Point> ring) noexcept;

/// Absolute shoelace area.
double polygon_area(const Polygon& p) noexcept;

AxisAlignedBox bounding_box(const Polygon& p) noexcept;

bool segments_intersect(Point a0, Point a1, Point b0, Point b1, double eps = kCoincidenceEps) noexcept;

/// True when no two edges meet except adjacent edges at their shared vertex.
bool is_simple(std::span<const Point> ring) noexcept;

struct NormalizedPolygon {
    Polygon polygon;
    bool self_intersecting = false;
};

/// Drops consecutive duplicates (cyclically) and orients counter-clockwise.
/// Self-intersection is reported, not repaired. Throws GeometryError
/// "degenerate polygon" if fewer than 3 distinct vertices remain.
NormalizedPolygon normalize_polygon(const Polygon& p);

/// A normalized, simple polygon with positive area and cached extents.
/// This is what the clipping routines operate on; build once, reuse for
/// every pairing.
class PreparedPolygon {
public:
    /// Throws GeometryError: "degenerate polygon" (too few distinct vertices
    /// or zero area) or "non-simple polygon".
    explicit PreparedPolygon(const Polygon& p);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    double area() const noexcept { return area_; }
    const AxisAlignedBox& box() const noexcept { return box_; }

private:
    std::vector<Point> vertices_;
    double area_ = 0.0;
    AxisAlignedBox box_;
};

double polygon_intersection_area(const PreparedPolygon& a, const PreparedPolygon& b) noexcept;

/// Throws GeometryError "non-simple polygon" when either input self-intersects.
double polygon_intersection_area(const Polygon& a, const Polygon& b);

double iou(const PreparedPolygon& a, const PreparedPolygon& b);

/// Throws GeometryError "degenerate pair" when the union has zero area.
double iou(const Polygon& a, const Polygon& b);

}  // namespace textspot
