#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floorset/geometry.hpp"

namespace floorset {

enum class DatasetMode { Prime, Lite };

std::string to_string(DatasetMode mode);
DatasetMode parse_dataset_mode(const std::string& text);

struct Partition {
  int id = 0;
  std::string name;
  RectilinearPolygon shape;
  Coord area = 0;

  Partition() = default;
  Partition(int id_, std::string name_, RectilinearPolygon shape_)
      : id(id_), name(std::move(name_)), shape(std::move(shape_)), area(polygon_area(shape)) {}

  PointD center() const { return bbox_center(shape); }
  bool operator==(const Partition&) const = default;
};

struct Terminal {
  int id = 0;
  std::string name;
  PointD position;
  bool operator==(const Terminal&) const = default;
};

enum class NetKind { BlockToBlock, TerminalToBlock };

/// Two-pin net. For BlockToBlock both endpoints are partition ids with
/// first < second; for TerminalToBlock `first` is a terminal id and
/// `second` a partition id.
struct Net {
  NetKind kind = NetKind::BlockToBlock;
  int first = 0;
  int second = 0;
  double weight = 1.0;
  bool operator==(const Net&) const = default;
};

/// Outline edges as bit flags; a corner tag is the union of two adjacent
/// edges (e.g. Left | Bottom).
enum EdgeFlag : unsigned {
  kLeft = 1u,
  kRight = 2u,
  kTop = 4u,
  kBottom = 8u,
};

std::string edge_tag_to_string(unsigned tag);
unsigned parse_edge_tag(const std::string& text);
inline bool is_corner_tag(unsigned tag) {
  return tag == (kLeft | kBottom) || tag == (kLeft | kTop) || tag == (kRight | kBottom) ||
         tag == (kRight | kTop);
}

struct AspectRange {
  double min_ar = 0.0;
  double max_ar = 0.0;
  bool contains(double ratio, double tol = 1e-9) const {
    return ratio >= min_ar * (1.0 - tol) && ratio <= max_ar * (1.0 + tol);
  }
  bool operator==(const AspectRange&) const = default;
};

struct ConstraintSet {
  std::map<int, unsigned> boundary;
  std::map<int, PointD> preplaced;
  std::vector<std::vector<int>> clusters;
  std::vector<std::vector<int>> multi_inst;
  std::map<int, AspectRange> shape_range;

  bool empty() const {
    return boundary.empty() && preplaced.empty() && clusters.empty() && multi_inst.empty() &&
           shape_range.empty();
  }
  bool placement_empty() const {
    return boundary.empty() && preplaced.empty() && clusters.empty() && multi_inst.empty();
  }
  bool operator==(const ConstraintSet&) const = default;
};

struct Labels {
  double area = 0.0;
  double b2b_wl = 0.0;
  double t2b_wl = 0.0;
  bool operator==(const Labels&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  DatasetMode mode = DatasetMode::Prime;
  bool operator==(const Provenance&) const = default;
};

/// One benchmark: outline, partitions, terminals, nets, constraints and
/// the golden labels.
struct LayoutInstance {
  FixedOutline outline;
  std::vector<Partition> partitions;
  std::vector<Terminal> terminals;
  std::vector<Net> nets;
  ConstraintSet constraints;
  std::optional<Labels> labels;
  Provenance provenance;

  std::size_t b2b_count() const;
  std::size_t t2b_count() const;
  bool operator==(const LayoutInstance&) const = default;
};

std::string partition_name(int id);
std::string terminal_name(int id);

/// Structural checks shared by the generators and the readers: ids are
/// dense, shapes lie in the outline, terminals on the perimeter, nets
/// reference existing endpoints. Throws std::invalid_argument.
void validate_structure(const LayoutInstance& layout);

}  // namespace floorset
