#include "floorset/geometry.hpp"

#include <map>
#include <numeric>

namespace floorset {

namespace {

struct Segment {
  Point a;
  Point b;
  bool horizontal() const { return a.y == b.y; }
};

bool collinear(const Point& p, const Point& q, const Point& r) {
  return (p.x == q.x && q.x == r.x) || (p.y == q.y && q.y == r.y);
}

// q lies strictly between p and r on their common line.
bool between(const Point& p, const Point& q, const Point& r) {
  if (p.x == q.x && q.x == r.x) return (p.y < q.y && q.y < r.y) || (r.y < q.y && q.y < p.y);
  return (p.x < q.x && q.x < r.x) || (r.x < q.x && q.x < p.x);
}

Coord twice_signed_area(const std::vector<Point>& v) {
  Coord acc = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    acc += p.x * q.y - q.x * p.y;
  }
  return acc;
}

bool segments_touch(const Segment& s, const Segment& t) {
  const Coord sx0 = std::min(s.a.x, s.b.x), sx1 = std::max(s.a.x, s.b.x);
  const Coord sy0 = std::min(s.a.y, s.b.y), sy1 = std::max(s.a.y, s.b.y);
  const Coord tx0 = std::min(t.a.x, t.b.x), tx1 = std::max(t.a.x, t.b.x);
  const Coord ty0 = std::min(t.a.y, t.b.y), ty1 = std::max(t.a.y, t.b.y);
  return sx0 <= tx1 && tx0 <= sx1 && sy0 <= ty1 && ty0 <= sy1;
}

std::vector<Segment> edges_of(const std::vector<Point>& v) {
  std::vector<Segment> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({v[i], v[(i + 1) % v.size()]});
  return out;
}

Coord interval_overlap(Coord a0, Coord a1, Coord b0, Coord b1) {
  if (a0 > a1) std::swap(a0, a1);
  if (b0 > b1) std::swap(b0, b1);
  return std::max<Coord>(0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

RectilinearPolygon::RectilinearPolygon(std::vector<Point> v) {
  // Drop repeated points, including the closing duplicate.
  std::vector<Point> pts;
  pts.reserve(v.size());
  for (const auto& p : v) {
    if (pts.empty() || pts.back() != p) pts.push_back(p);
  }
  while (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point& p = pts[i];
    const Point& q = pts[(i + 1) % pts.size()];
    if (p.x != q.x && p.y != q.y) throw GeometryError("polygon edge is not axis-aligned");
    if (p.x < 0 || p.y < 0) throw GeometryError("polygon has a negative coordinate");
  }

  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point& p = pts[(i + pts.size() - 1) % pts.size()];
      const Point& q = pts[i];
      const Point& r = pts[(i + 1) % pts.size()];
      if (!collinear(p, q, r)) continue;
      if (!between(p, q, r)) throw GeometryError("polygon folds back on itself");
      pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
  }
  if (pts.size() < 4 || pts.size() % 2 != 0) {
    throw GeometryError("rectilinear polygon needs an even vertex count >= 4");
  }

  const Coord area2 = twice_signed_area(pts);
  if (area2 == 0) throw GeometryError("polygon has zero area");
  if (area2 < 0) std::reverse(pts.begin(), pts.end());

  const auto edges = edges_of(pts);
  const std::size_t n = edges.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(edges[i], edges[j])) throw GeometryError("polygon is not simple");
    }
  }

  const auto first = std::min_element(pts.begin(), pts.end());
  std::rotate(pts.begin(), first, pts.end());
  vertices_ = std::move(pts);
}

RectilinearPolygon RectilinearPolygon::rectangle(Coord x, Coord y, Coord w, Coord h) {
  if (w <= 0 || h <= 0) throw GeometryError("rectangle must have positive size");
  return RectilinearPolygon({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
}

Rect RectilinearPolygon::bbox() const {
  if (vertices_.empty()) return {};
  Rect r{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const auto& p : vertices_) {
    r.xl = std::min(r.xl, p.x);
    r.yl = std::min(r.yl, p.y);
    r.xh = std::max(r.xh, p.x);
    r.yh = std::max(r.yh, p.y);
  }
  return r;
}

RectilinearPolygon RectilinearPolygon::translated(Coord dx, Coord dy) const {
  std::vector<Point> pts = vertices_;
  for (auto& p : pts) {
    p.x += dx;
    p.y += dy;
  }
  return RectilinearPolygon(std::move(pts));
}

Coord polygon_area(const RectilinearPolygon& poly) {
  if (poly.empty()) throw GeometryError("empty polygon");
  return twice_signed_area(poly.vertices()) / 2;
}

double bbox_aspect(const RectilinearPolygon& poly) {
  const Rect b = poly.bbox();
  if (b.height() <= 0) throw GeometryError("degenerate bounding box");
  return static_cast<double>(b.width()) / static_cast<double>(b.height());
}

RectilinearPolygon transpose(const RectilinearPolygon& poly) {
  std::vector<Point> pts;
  pts.reserve(poly.size());
  for (const auto& p : poly.vertices()) pts.push_back({p.y, p.x});
  return RectilinearPolygon(std::move(pts));
}

std::vector<Rect> decompose(const RectilinearPolygon& poly) {
  const auto& v = poly.vertices();
  std::vector<Coord> ys;
  for (const auto& p : v) ys.push_back(p.y);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  std::vector<Segment> verticals;
  for (const auto& e : edges_of(v)) {
    if (!e.horizontal()) verticals.push_back(e);
  }

  std::vector<Rect> out;
  std::vector<Coord> xs;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const Coord y0 = ys[k], y1 = ys[k + 1];
    xs.clear();
    for (const auto& e : verticals) {
      if (std::min(e.a.y, e.b.y) <= y0 && std::max(e.a.y, e.b.y) >= y1) xs.push_back(e.a.x);
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) out.push_back({xs[i], y0, xs[i + 1], y1});
  }
  return out;
}

Coord overlap_area(const RectilinearPolygon& a, const RectilinearPolygon& b) {
  const Rect ba = a.bbox(), bb = b.bbox();
  if (ba.xh <= bb.xl || bb.xh <= ba.xl || ba.yh <= bb.yl || bb.yh <= ba.yl) return 0;
  Coord total = 0;
  const auto ra = decompose(a);
  const auto rb = decompose(b);
  for (const auto& r : ra) {
    for (const auto& s : rb) {
      const Coord w = std::min(r.xh, s.xh) - std::max(r.xl, s.xl);
      const Coord h = std::min(r.yh, s.yh) - std::max(r.yl, s.yl);
      if (w > 0 && h > 0) total += w * h;
    }
  }
  return total;
}

Coord shared_edge(const RectilinearPolygon& a, const RectilinearPolygon& b) {
  if (overlap_area(a, b) > 0) throw GeometryError("polygons overlap");
  Coord total = 0;
  const auto ea = edges_of(a.vertices());
  const auto eb = edges_of(b.vertices());
  for (const auto& s : ea) {
    for (const auto& t : eb) {
      if (s.horizontal() != t.horizontal()) continue;
      if (s.horizontal()) {
        // Opposite travel direction means the interiors sit on opposite sides.
        if (s.a.y != t.a.y || (s.b.x - s.a.x > 0) == (t.b.x - t.a.x > 0)) continue;
        total += interval_overlap(s.a.x, s.b.x, t.a.x, t.b.x);
      } else {
        if (s.a.x != t.a.x || (s.b.y - s.a.y > 0) == (t.b.y - t.a.y > 0)) continue;
        total += interval_overlap(s.a.y, s.b.y, t.a.y, t.b.y);
      }
    }
  }
  return total;
}

RectilinearPolygon merge_adjacent(const RectilinearPolygon& a, const RectilinearPolygon& b) {
  if (shared_edge(a, b) == 0) throw MergeError(MergeError::Kind::NotAbutted, "polygons are not abutted");

  std::vector<Coord> xs, ys;
  for (const auto* poly : {&a, &b}) {
    for (const auto& p : poly->vertices()) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  const std::size_t nx = xs.size() - 1, ny = ys.size() - 1;
  std::vector<char> filled(nx * ny, 0);
  auto cell = [&](std::size_t i, std::size_t j) -> char& { return filled[j * nx + i]; };
  auto index_of = [](const std::vector<Coord>& axis, Coord c) {
    return static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), c) - axis.begin());
  };
  for (const auto* poly : {&a, &b}) {
    for (const auto& r : decompose(*poly)) {
      for (std::size_t i = index_of(xs, r.xl); i < index_of(xs, r.xh); ++i) {
        for (std::size_t j = index_of(ys, r.yl); j < index_of(ys, r.yh); ++j) cell(i, j) = 1;
      }
    }
  }
  auto occupied = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(nx) || j >= static_cast<std::ptrdiff_t>(ny)) {
      return false;
    }
    return cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) != 0;
  };

  // Boundary edges directed with the interior on the left.
  const std::size_t stride = ny + 1;
  auto key = [stride](std::size_t i, std::size_t j) { return i * stride + j; };
  std::map<std::size_t, std::size_t> next;
  std::size_t edge_count = 0;
  auto add_edge = [&](std::size_t from, std::size_t to) {
    if (!next.emplace(from, to).second) {
      throw MergeError(MergeError::Kind::Pinch, "union touches itself at a vertex");
    }
    ++edge_count;
  };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (!cell(i, j)) continue;
      const auto si = static_cast<std::ptrdiff_t>(i), sj = static_cast<std::ptrdiff_t>(j);
      if (!occupied(si, sj - 1)) add_edge(key(i, j), key(i + 1, j));
      if (!occupied(si + 1, sj)) add_edge(key(i + 1, j), key(i + 1, j + 1));
      if (!occupied(si, sj + 1)) add_edge(key(i + 1, j + 1), key(i, j + 1));
      if (!occupied(si - 1, sj)) add_edge(key(i, j + 1), key(i, j));
    }
  }

  std::vector<Point> loop;
  const std::size_t start = next.begin()->first;
  std::size_t cur = start;
  do {
    loop.push_back({xs[cur / stride], ys[cur % stride]});
    cur = next.at(cur);
  } while (cur != start && loop.size() <= edge_count);
  if (loop.size() != edge_count) {
    throw MergeError(MergeError::Kind::Hole, "union encloses a hole");
  }
  return RectilinearPolygon(std::move(loop));
}

bool is_rectangle(const RectilinearPolygon& poly) { return poly.size() == 4; }

bool congruent(const RectilinearPolygon& a, const RectilinearPolygon& b) {
  if (a.size() != b.size() || polygon_area(a) != polygon_area(b)) return false;
  const Rect bb = b.bbox();
  const RectilinearPolygon target = b.translated(-bb.xl, -bb.yl);
  for (int t = 0; t < 8; ++t) {
    std::vector<Point> pts;
    pts.reserve(a.size());
    for (auto p : a.vertices()) {
      if (t & 1) p.x = -p.x;
      if (t & 2) p.y = -p.y;
      if (t & 4) std::swap(p.x, p.y);
      pts.push_back(p);
    }
    Coord minx = pts[0].x, miny = pts[0].y;
    for (const auto& p : pts) {
      minx = std::min(minx, p.x);
      miny = std::min(miny, p.y);
    }
    for (auto& p : pts) {
      p.x -= minx;
      p.y -= miny;
    }
    if (RectilinearPolygon(std::move(pts)) == target) return true;
  }
  return false;
}

double perimeter_position(const FixedOutline& outline, PointD p) {
  const double w = static_cast<double>(outline.width);
  const double h = static_cast<double>(outline.height);
  if (p.y == 0.0 && p.x >= 0.0 && p.x < w) return p.x;
  if (p.x == w && p.y >= 0.0 && p.y < h) return w + p.y;
  if (p.y == h && p.x > 0.0 && p.x <= w) return w + h + (w - p.x);
  if (p.x == 0.0 && p.y > 0.0 && p.y <= h) return 2.0 * w + h + (h - p.y);
  throw GeometryError("point is not on the outline perimeter");
}

PointD point_at_perimeter(const FixedOutline& outline, double s) {
  const double w = static_cast<double>(outline.width);
  const double h = static_cast<double>(outline.height);
  const double per = 2.0 * (w + h);
  s = std::fmod(s, per);
  if (s < 0) s += per;
  if (s < w) return {s, 0.0};
  if (s < w + h) return {w, s - w};
  if (s < 2.0 * w + h) return {w - (s - w - h), h};
  return {0.0, h - (s - 2.0 * w - h)};
}

double perimeter_distance(const FixedOutline& outline, double s0, double s1) {
  const double per = static_cast<double>(outline.perimeter());
  const double d = std::abs(s0 - s1);
  return std::min(d, per - d);
}

bool on_perimeter(const FixedOutline& outline, PointD p) {
  const double w = static_cast<double>(outline.width);
  const double h = static_cast<double>(outline.height);
  const bool in_x = p.x >= 0.0 && p.x <= w;
  const bool in_y = p.y >= 0.0 && p.y <= h;
  return (in_x && (p.y == 0.0 || p.y == h)) || (in_y && (p.x == 0.0 || p.x == w));
}

}  // namespace floorset
