#include "floorset/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace floorset {

namespace {

struct Extent {
  double xl, yl, xh, yh;
};

Extent extent(const std::vector<PointD>& v) {
  Extent e{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : v) {
    e.xl = std::min(e.xl, p.x);
    e.yl = std::min(e.yl, p.y);
    e.xh = std::max(e.xh, p.x);
    e.yh = std::max(e.yh, p.y);
  }
  return e;
}

double signed_area(const std::vector<PointD>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return s / 2.0;
}

// Translate to the origin, orient counter-clockwise and start at the
// lowest-leftmost vertex so equal shapes give equal vertex lists.
std::vector<PointD> normalized(std::vector<PointD> v, double tol) {
  const Extent e = extent(v);
  for (auto& p : v) p = {p.x - e.xl, p.y - e.yl};
  if (signed_area(v) < 0) std::reverse(v.begin(), v.end());
  auto less = [tol](const PointD& a, const PointD& b) {
    if (std::abs(a.x - b.x) > tol) return a.x < b.x;
    return a.y < b.y - tol;
  };
  std::rotate(v.begin(), std::min_element(v.begin(), v.end(), less), v.end());
  return v;
}

bool same_vertices(const std::vector<PointD>& a, const std::vector<PointD>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].x - b[i].x) > tol || std::abs(a[i].y - b[i].y) > tol) return false;
  }
  return true;
}

const PlacedShape& at(const Placement& placement, int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= placement.size()) {
    throw std::out_of_range("constraint references unknown block " + std::to_string(id));
  }
  return placement[static_cast<std::size_t>(id)];
}

}  // namespace

PlacedShape PlacedShape::from_polygon(const RectilinearPolygon& poly) {
  PlacedShape s;
  s.vertices.reserve(poly.size());
  for (const auto& p : poly.vertices()) {
    s.vertices.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  }
  return s;
}

PlacedShape PlacedShape::from_rect(const PlacedRect& r) {
  return {{{r.x, r.y}, {r.x + r.w, r.y}, {r.x + r.w, r.y + r.h}, {r.x, r.y + r.h}}};
}

double PlacedShape::xl() const { return extent(vertices).xl; }
double PlacedShape::yl() const { return extent(vertices).yl; }
double PlacedShape::xh() const { return extent(vertices).xh; }
double PlacedShape::yh() const { return extent(vertices).yh; }

bool PlacedShape::has_vertex(PointD p, double tol) const {
  return std::any_of(vertices.begin(), vertices.end(), [&](const PointD& v) {
    return std::abs(v.x - p.x) <= tol && std::abs(v.y - p.y) <= tol;
  });
}

Placement placement_of(const LayoutInstance& layout) {
  Placement out;
  out.reserve(layout.partitions.size());
  for (const auto& p : layout.partitions) out.push_back(PlacedShape::from_polygon(p.shape));
  return out;
}

Placement placement_of(const PlacementSolution& solution) {
  Placement out;
  out.reserve(solution.blocks.size());
  for (const auto& r : solution.blocks) out.push_back(PlacedShape::from_rect(r));
  return out;
}

double abutment_length(const PlacedShape& a, const PlacedShape& b, double tol) {
  const Extent ea = extent(a.vertices), eb = extent(b.vertices);
  if (ea.xl > eb.xh + tol || eb.xl > ea.xh + tol || ea.yl > eb.yh + tol || eb.yl > ea.yh + tol) {
    return 0.0;
  }
  double total = 0.0;
  const auto& va = a.vertices;
  const auto& vb = b.vertices;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const PointD p0 = va[i], p1 = va[(i + 1) % va.size()];
    const bool horizontal = std::abs(p0.y - p1.y) <= tol;
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const PointD q0 = vb[j], q1 = vb[(j + 1) % vb.size()];
      if (horizontal != (std::abs(q0.y - q1.y) <= tol)) continue;
      double lo, hi;
      if (horizontal) {
        if (std::abs(p0.y - q0.y) > tol) continue;
        // Abutting boundaries run in opposite directions.
        if ((p1.x - p0.x) * (q1.x - q0.x) >= 0) continue;
        lo = std::max(std::min(p0.x, p1.x), std::min(q0.x, q1.x));
        hi = std::min(std::max(p0.x, p1.x), std::max(q0.x, q1.x));
      } else {
        if (std::abs(p0.x - q0.x) > tol) continue;
        if ((p1.y - p0.y) * (q1.y - q0.y) >= 0) continue;
        lo = std::max(std::min(p0.y, p1.y), std::min(q0.y, q1.y));
        hi = std::min(std::max(p0.y, p1.y), std::max(q0.y, q1.y));
      }
      if (hi - lo > tol) total += hi - lo;
    }
  }
  return total;
}

bool congruent(const PlacedShape& a, const PlacedShape& b, double tol) {
  if (a.vertices.size() != b.vertices.size()) return false;
  const auto target = normalized(a.vertices, tol);
  for (int t = 0; t < 8; ++t) {
    std::vector<PointD> v = b.vertices;
    for (auto& p : v) {
      double x = p.x, y = p.y;
      if (t & 1) std::swap(x, y);
      if (t & 2) x = -x;
      if (t & 4) y = -y;
      p = {x, y};
    }
    if (same_vertices(target, normalized(std::move(v), tol), tol)) return true;
  }
  return false;
}

Wirelength wirelength(const LayoutInstance& problem, std::span<const PointD> centers) {
  Wirelength wl;
  for (const auto& net : problem.nets) {
    const auto second = static_cast<std::size_t>(net.second);
    if (net.kind == NetKind::BlockToBlock) {
      wl.b2b += net.weight * manhattan_distance(centers[static_cast<std::size_t>(net.first)], centers[second]);
    } else {
      wl.t2b += net.weight * manhattan_distance(problem.terminals[static_cast<std::size_t>(net.first)].position, centers[second]);
    }
  }
  return wl;
}

Labels compute_labels(const LayoutInstance& layout) {
  std::vector<PointD> centers;
  centers.reserve(layout.partitions.size());
  for (const auto& p : layout.partitions) centers.push_back(p.center());
  const Wirelength wl = wirelength(layout, centers);
  return {static_cast<double>(layout.outline.area()), wl.b2b, wl.t2b};
}

double geometry_tolerance(const FixedOutline& outline) {
  return 1e-6 * static_cast<double>(std::max<Coord>({outline.width, outline.height, 1}));
}

ViolationCounts count_violations(const Placement& placement, const ConstraintSet& constraints,
                                 const FixedOutline& outline) {
  const double tol = geometry_tolerance(outline);
  const double W = static_cast<double>(outline.width), H = static_cast<double>(outline.height);
  ViolationCounts v;

  for (const auto& [id, range] : constraints.shape_range) {
    if (!range.contains(at(placement, id).aspect())) ++v.shape;
  }

  for (const auto& [id, tag] : constraints.boundary) {
    const auto& s = at(placement, id);
    bool ok = true;
    if (tag & kLeft) ok = ok && std::abs(s.xl()) <= tol;
    if (tag & kRight) ok = ok && std::abs(s.xh() - W) <= tol;
    if (tag & kBottom) ok = ok && std::abs(s.yl()) <= tol;
    if (tag & kTop) ok = ok && std::abs(s.yh() - H) <= tol;
    if (ok && is_corner_tag(tag)) {
      const PointD corner{(tag & kRight) ? W : 0.0, (tag & kTop) ? H : 0.0};
      ok = s.has_vertex(corner, tol);
    }
    if (!ok) ++v.boundary;
  }

  for (const auto& cluster : constraints.clusters) {
    if (cluster.empty()) continue;
    std::vector<bool> reached(cluster.size(), false);
    std::vector<std::size_t> stack{0};
    reached[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < cluster.size(); ++j) {
        if (reached[j]) continue;
        if (abutment_length(at(placement, cluster[i]), at(placement, cluster[j]), tol) > 0.0) {
          reached[j] = true;
          stack.push_back(j);
        }
      }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end()) ++v.grouping;
  }

  for (const auto& [id, anchor] : constraints.preplaced) {
    const auto& s = at(placement, id);
    if (std::abs(s.xl() - anchor.x) > tol || std::abs(s.yl() - anchor.y) > tol) ++v.preplacement;
  }

  for (const auto& group : constraints.multi_inst) {
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (!congruent(at(placement, group[0]), at(placement, group[i]), tol)) {
        ++v.multi_inst;
        break;
      }
    }
  }

  for (const auto& s : placement) {
    if (s.xl() < -tol || s.yl() < -tol || s.xh() > W + tol || s.yh() > H + tol) v.overflow = true;
  }
  return v;
}

ViolationCounts count_violations(const LayoutInstance& layout) {
  return count_violations(placement_of(layout), layout.constraints, layout.outline);
}

ViolationCounts count_violations(const PlacementSolution& solution, const LayoutInstance& problem) {
  return count_violations(placement_of(solution), problem.constraints, problem.outline);
}

RelativeMetrics relative_metrics(const Labels& solution, const Labels& golden) {
  RelativeMetrics r;
  auto ratio = [](double s, double g, bool& absolute) {
    if (g == 0.0) {
      absolute = true;
      return s;
    }
    return s / g;
  };
  r.rel_area = ratio(solution.area, golden.area, r.area_absolute);
  r.rel_b2b_wl = ratio(solution.b2b_wl, golden.b2b_wl, r.b2b_absolute);
  r.rel_t2b_wl = ratio(solution.t2b_wl, golden.t2b_wl, r.t2b_absolute);
  return r;
}

Labels evaluate_labels(const Placement& placement, const LayoutInstance& problem) {
  if (placement.size() != problem.partitions.size()) {
    throw std::invalid_argument("placement has " + std::to_string(placement.size()) + " blocks, problem has " +
                                std::to_string(problem.partitions.size()));
  }
  std::vector<PointD> centers;
  centers.reserve(placement.size());
  double xl = std::numeric_limits<double>::infinity(), yl = xl;
  double xh = -xl, yh = -xl;
  for (const auto& s : placement) {
    centers.push_back(s.center());
    xl = std::min(xl, s.xl());
    yl = std::min(yl, s.yl());
    xh = std::max(xh, s.xh());
    yh = std::max(yh, s.yh());
  }
  const Wirelength wl = wirelength(problem, centers);
  const double area = placement.empty() ? 0.0 : (xh - xl) * (yh - yl);
  return {area, wl.b2b, wl.t2b};
}

}  // namespace floorset
