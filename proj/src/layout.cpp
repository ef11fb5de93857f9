#include "floorset/layout.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace floorset {

std::string to_string(DatasetMode mode) { return mode == DatasetMode::Prime ? "Prime" : "Lite"; }

DatasetMode parse_dataset_mode(const std::string& text) {
  if (text == "Prime") return DatasetMode::Prime;
  if (text == "Lite") return DatasetMode::Lite;
  throw std::invalid_argument("unknown dataset mode '" + text + "'");
}

std::string edge_tag_to_string(unsigned tag) {
  std::string out;
  auto add = [&](unsigned flag, const char* name) {
    if (!(tag & flag)) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(kLeft, "LEFT");
  add(kRight, "RIGHT");
  add(kTop, "TOP");
  add(kBottom, "BOTTOM");
  return out;
}

unsigned parse_edge_tag(const std::string& text) {
  unsigned tag = 0;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    unsigned flag = 0;
    if (item == "LEFT") flag = kLeft;
    else if (item == "RIGHT") flag = kRight;
    else if (item == "TOP") flag = kTop;
    else if (item == "BOTTOM") flag = kBottom;
    else throw std::invalid_argument("unknown edge tag '" + item + "'");
    if (tag & flag) throw std::invalid_argument("repeated edge in tag '" + text + "'");
    tag |= flag;
  }
  if (tag == 0) throw std::invalid_argument("empty edge tag");
  const unsigned count = static_cast<unsigned>(std::popcount(tag));
  if (count > 2 || (count == 2 && !is_corner_tag(tag))) {
    throw std::invalid_argument("edge tag '" + text + "' is neither an edge nor a corner");
  }
  return tag;
}

std::size_t LayoutInstance::b2b_count() const {
  std::size_t n = 0;
  for (const auto& net : nets) n += net.kind == NetKind::BlockToBlock;
  return n;
}

std::size_t LayoutInstance::t2b_count() const { return nets.size() - b2b_count(); }

std::string partition_name(int id) { return "b" + std::to_string(id); }
std::string terminal_name(int id) { return "t" + std::to_string(id); }

void validate_structure(const LayoutInstance& layout) {
  const auto& ol = layout.outline;
  if (ol.width <= 0 || ol.height <= 0) throw std::invalid_argument("outline must be positive");
  const int np = static_cast<int>(layout.partitions.size());
  const int nt = static_cast<int>(layout.terminals.size());
  for (int i = 0; i < np; ++i) {
    const auto& p = layout.partitions[static_cast<std::size_t>(i)];
    if (p.id != i) throw std::invalid_argument("partition ids must be dense and ordered");
    const Rect b = p.shape.bbox();
    if (b.xl < 0 || b.yl < 0 || b.xh > ol.width || b.yh > ol.height) {
      throw std::invalid_argument("partition " + p.name + " leaves the outline");
    }
    if (p.area != polygon_area(p.shape)) throw std::invalid_argument("stale partition area");
  }
  for (int i = 0; i < nt; ++i) {
    const auto& t = layout.terminals[static_cast<std::size_t>(i)];
    if (t.id != i) throw std::invalid_argument("terminal ids must be dense and ordered");
    if (!on_perimeter(ol, t.position)) {
      throw std::invalid_argument("terminal " + t.name + " is off the perimeter");
    }
  }
  for (const auto& net : layout.nets) {
    if (!(net.weight > 0.0 && net.weight <= 1.0)) throw std::invalid_argument("net weight outside (0,1]");
    if (net.second < 0 || net.second >= np) throw std::invalid_argument("net references missing block");
    if (net.kind == NetKind::BlockToBlock) {
      if (net.first < 0 || net.first >= np) throw std::invalid_argument("net references missing block");
      if (net.first == net.second) throw std::invalid_argument("self-loop net");
    } else if (net.first < 0 || net.first >= nt) {
      throw std::invalid_argument("net references missing terminal");
    }
  }
  auto check_id = [np](int id) {
    if (id < 0 || id >= np) throw std::invalid_argument("constraint references missing block");
  };
  const auto& c = layout.constraints;
  for (const auto& [id, tag] : c.boundary) check_id(id);
  for (const auto& [id, pos] : c.preplaced) check_id(id);
  for (const auto& [id, range] : c.shape_range) check_id(id);
  std::set<int> seen;
  for (const auto& group : c.clusters) {
    for (int id : group) {
      check_id(id);
      if (!seen.insert(id).second) throw std::invalid_argument("clusters overlap");
    }
  }
  seen.clear();
  for (const auto& group : c.multi_inst) {
    if (group.size() < 2) throw std::invalid_argument("multi-instantiation group needs two members");
    for (int id : group) {
      check_id(id);
      if (!seen.insert(id).second) throw std::invalid_argument("multi-instantiation groups overlap");
    }
  }
}

}  // namespace floorset
