#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace floorset {

using Coord = std::int64_t;

struct Point {
  Coord x = 0;
  Coord y = 0;
  auto operator<=>(const Point&) const = default;
};

/// Real-valued point. Used for terminals (half-grid positions), block
/// centers and placements produced by the annealer.
struct PointD {
  double x = 0.0;
  double y = 0.0;
  auto operator<=>(const PointD&) const = default;
};

/// Half-open integer rectangle [xl, xh) x [yl, yh).
struct Rect {
  Coord xl = 0;
  Coord yl = 0;
  Coord xh = 0;
  Coord yh = 0;

  Coord width() const { return xh - xl; }
  Coord height() const { return yh - yl; }
  Coord area() const { return width() * height(); }
  PointD center() const { return {(xl + xh) / 2.0, (yl + yh) / 2.0}; }
  auto operator<=>(const Rect&) const = default;
};

struct FixedOutline {
  Coord width = 0;
  Coord height = 0;

  Coord area() const { return width * height; }
  Coord perimeter() const { return 2 * (width + height); }
  bool operator==(const FixedOutline&) const = default;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by merge_adjacent when the union is not a valid partition shape.
class MergeError : public GeometryError {
 public:
  enum class Kind { NotAbutted, Hole, Pinch };
  MergeError(Kind kind, const std::string& what) : GeometryError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Axis-aligned simple polygon on the integer grid.
///
/// Construction normalizes the vertex list: collinear vertices are dropped,
/// the orientation is made counter-clockwise and the list is rotated so it
/// starts at the lexicographically smallest (x, y) vertex. Two polygons
/// covering the same region therefore compare equal.
class RectilinearPolygon {
 public:
  RectilinearPolygon() = default;
  explicit RectilinearPolygon(std::vector<Point> vertices);

  static RectilinearPolygon rectangle(Coord x, Coord y, Coord w, Coord h);
  static RectilinearPolygon from_rect(const Rect& r) {
    return rectangle(r.xl, r.yl, r.width(), r.height());
  }

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  Rect bbox() const;

  RectilinearPolygon translated(Coord dx, Coord dy) const;

  bool operator==(const RectilinearPolygon&) const = default;

 private:
  std::vector<Point> vertices_;
};

Coord polygon_area(const RectilinearPolygon& poly);

/// Bounding-box width over height.
double bbox_aspect(const RectilinearPolygon& poly);

/// Mirror across the line y = x.
RectilinearPolygon transpose(const RectilinearPolygon& poly);

/// Horizontal-slab decomposition into disjoint rectangles.
std::vector<Rect> decompose(const RectilinearPolygon& poly);

Coord overlap_area(const RectilinearPolygon& a, const RectilinearPolygon& b);

/// Total length of boundary shared by two interior-disjoint polygons.
/// Throws GeometryError if the interiors overlap.
Coord shared_edge(const RectilinearPolygon& a, const RectilinearPolygon& b);

/// Union of two abutted polygons. Throws MergeError when the inputs do not
/// share an edge or when the union would contain a hole or a pinch vertex.
RectilinearPolygon merge_adjacent(const RectilinearPolygon& a, const RectilinearPolygon& b);

bool is_rectangle(const RectilinearPolygon& poly);

inline double manhattan_distance(PointD a, PointD b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline PointD bbox_center(const RectilinearPolygon& poly) { return poly.bbox().center(); }

/// True when the two polygons are equal up to translation and one of the
/// eight axis-aligned rotations/reflections.
bool congruent(const RectilinearPolygon& a, const RectilinearPolygon& b);

/// Position along the outline perimeter, measured counter-clockwise from
/// (0, 0). The point must lie on the perimeter.
double perimeter_position(const FixedOutline& outline, PointD p);
PointD point_at_perimeter(const FixedOutline& outline, double s);
/// Shortest distance between two perimeter positions travelling along the
/// outline.
double perimeter_distance(const FixedOutline& outline, double s0, double s1);
bool on_perimeter(const FixedOutline& outline, PointD p);

}  // namespace floorset
