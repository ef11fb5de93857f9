#pragma once

#include <optional>
#include <span>
#include <vector>

#include "floorset/layout.hpp"
#include "floorset/placement.hpp"

namespace floorset {

/// Real-valued rectilinear shape of one placed block, vertices in
/// counter-clockwise order. Golden partitions and annealer rectangles are
/// both evaluated through this view.
struct PlacedShape {
  std::vector<PointD> vertices;

  static PlacedShape from_polygon(const RectilinearPolygon& poly);
  static PlacedShape from_rect(const PlacedRect& r);

  double xl() const;
  double yl() const;
  double xh() const;
  double yh() const;
  double aspect() const { return (xh() - xl()) / (yh() - yl()); }
  PointD center() const { return {(xl() + xh()) / 2.0, (yl() + yh()) / 2.0}; }
  bool has_vertex(PointD p, double tol) const;
};

using Placement = std::vector<PlacedShape>;

Placement placement_of(const LayoutInstance& layout);
Placement placement_of(const PlacementSolution& solution);

/// Length of boundary shared by two interior-disjoint shapes.
double abutment_length(const PlacedShape& a, const PlacedShape& b, double tol);
bool congruent(const PlacedShape& a, const PlacedShape& b, double tol);

struct Wirelength {
  double b2b = 0.0;
  double t2b = 0.0;
};

/// Weighted 2-pin Manhattan wirelength between bounding-box centers.
Wirelength wirelength(const LayoutInstance& problem, std::span<const PointD> centers);

/// [area, b2b wirelength, t2b wirelength] of a golden layout.
Labels compute_labels(const LayoutInstance& layout);

/// Per-family violation counts. Throws std::out_of_range when a constraint
/// names a block the placement does not have.
ViolationCounts count_violations(const Placement& placement, const ConstraintSet& constraints,
                                 const FixedOutline& outline);
ViolationCounts count_violations(const LayoutInstance& layout);
ViolationCounts count_violations(const PlacementSolution& solution, const LayoutInstance& problem);

/// Tolerance used when comparing real-valued coordinates against an outline.
double geometry_tolerance(const FixedOutline& outline);

struct RelativeMetrics {
  double rel_area = 0.0;
  double rel_b2b_wl = 0.0;
  double rel_t2b_wl = 0.0;
  /// Set when the golden component was zero; the value is then absolute.
  bool area_absolute = false;
  bool b2b_absolute = false;
  bool t2b_absolute = false;
};

RelativeMetrics relative_metrics(const Labels& solution, const Labels& golden);

/// Labels of an arbitrary placement: area is the bounding box of the placed
/// blocks, wirelengths use the problem's nets and terminals.
Labels evaluate_labels(const Placement& placement, const LayoutInstance& problem);

}  // namespace floorset
