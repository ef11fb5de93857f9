#pragma once

#include <vector>

#include "floorset/geometry.hpp"

namespace floorset {

struct PlacedRect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  /// 0 = as specified, 1 = rotated by 90 degrees.
  int orientation = 0;

  double area() const { return w * h; }
  PointD center() const { return {x + w / 2.0, y + h / 2.0}; }
  bool operator==(const PlacedRect&) const = default;
};

struct ViolationCounts {
  int shape = 0;
  int boundary = 0;
  int grouping = 0;
  int preplacement = 0;
  int multi_inst = 0;
  bool overflow = false;

  int total() const { return shape + boundary + grouping + preplacement + multi_inst; }
  bool operator==(const ViolationCounts&) const = default;
};

struct CostBreakdown {
  double area_term = 0.0;
  double b2b_wl = 0.0;
  double t2b_wl = 0.0;
  double wl_term = 0.0;
  ViolationCounts violations;
  double overflow_term = 0.0;
  double total = 0.0;
};

/// Rectangles indexed by block id plus the realized bounding box.
struct PlacementSolution {
  std::vector<PlacedRect> blocks;
  double bbox_w = 0.0;
  double bbox_h = 0.0;
  CostBreakdown cost;

  double bbox_area() const { return bbox_w * bbox_h; }
};

}  // namespace floorset
