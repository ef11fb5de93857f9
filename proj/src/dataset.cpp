#include "floorset/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace floorset {

using nlohmann::json;

json layout_to_json(const LayoutInstance& l) {
  json j;
  j["outline"] = {l.outline.width, l.outline.height};
  j["provenance"] = {{"mode", to_string(l.provenance.mode)}, {"seed", l.provenance.seed}, {"index", l.provenance.index}};
  json parts = json::array();
  for (const auto& p : l.partitions) {
    json verts = json::array();
    for (const auto& v : p.shape.vertices()) verts.push_back({v.x, v.y});
    parts.push_back({{"name", p.name}, {"vertices", std::move(verts)}});
  }
  j["partitions"] = std::move(parts);
  json terms = json::array();
  for (const auto& t : l.terminals) terms.push_back({{"name", t.name}, {"x", t.position.x}, {"y", t.position.y}});
  j["terminals"] = std::move(terms);
  json nets = json::array();
  for (const auto& n : l.nets) {
    nets.push_back({{"kind", n.kind == NetKind::BlockToBlock ? "b2b" : "t2b"}, {"a", n.first}, {"b", n.second}, {"w", n.weight}});
  }
  j["nets"] = std::move(nets);

  const auto& c = l.constraints;
  json cj = json::object();
  cj["boundary"] = json::array();
  for (const auto& [id, tag] : c.boundary) cj["boundary"].push_back({id, edge_tag_to_string(tag)});
  cj["preplaced"] = json::array();
  for (const auto& [id, p] : c.preplaced) cj["preplaced"].push_back({id, p.x, p.y});
  cj["clusters"] = c.clusters;
  cj["multi_inst"] = c.multi_inst;
  cj["shape_range"] = json::array();
  for (const auto& [id, r] : c.shape_range) cj["shape_range"].push_back({id, r.min_ar, r.max_ar});
  j["constraints"] = std::move(cj);

  if (l.labels) {
    j["labels"] = {{"area", l.labels->area}, {"b2b_wl", l.labels->b2b_wl}, {"t2b_wl", l.labels->t2b_wl}};
  } else {
    j["labels"] = nullptr;
  }
  return j;
}

LayoutInstance layout_from_json(const json& j) {
  LayoutInstance l;
  try {
    l.outline = {j.at("outline").at(0).get<Coord>(), j.at("outline").at(1).get<Coord>()};
    const auto& pv = j.at("provenance");
    l.provenance.mode = parse_dataset_mode(pv.at("mode").get<std::string>());
    l.provenance.seed = pv.at("seed").get<std::uint64_t>();
    l.provenance.index = pv.at("index").get<std::uint64_t>();
    for (const auto& p : j.at("partitions")) {
      std::vector<Point> pts;
      for (const auto& v : p.at("vertices")) pts.push_back({v.at(0).get<Coord>(), v.at(1).get<Coord>()});
      l.partitions.emplace_back(static_cast<int>(l.partitions.size()), p.at("name").get<std::string>(),
                                RectilinearPolygon(std::move(pts)));
    }
    for (const auto& t : j.at("terminals")) {
      l.terminals.push_back({static_cast<int>(l.terminals.size()), t.at("name").get<std::string>(),
                             {t.at("x").get<double>(), t.at("y").get<double>()}});
    }
    for (const auto& n : j.at("nets")) {
      Net net;
      const auto kind = n.at("kind").get<std::string>();
      if (kind == "b2b") {
        net.kind = NetKind::BlockToBlock;
      } else if (kind == "t2b") {
        net.kind = NetKind::TerminalToBlock;
      } else {
        throw std::invalid_argument("unknown net kind '" + kind + "'");
      }
      net.first = n.at("a").get<int>();
      net.second = n.at("b").get<int>();
      net.weight = n.at("w").get<double>();
      l.nets.push_back(net);
    }
    const auto& cj = j.at("constraints");
    auto& c = l.constraints;
    for (const auto& e : cj.at("boundary")) c.boundary[e.at(0).get<int>()] = parse_edge_tag(e.at(1).get<std::string>());
    for (const auto& e : cj.at("preplaced")) c.preplaced[e.at(0).get<int>()] = {e.at(1).get<double>(), e.at(2).get<double>()};
    c.clusters = cj.at("clusters").get<std::vector<std::vector<int>>>();
    c.multi_inst = cj.at("multi_inst").get<std::vector<std::vector<int>>>();
    for (const auto& e : cj.at("shape_range")) {
      c.shape_range[e.at(0).get<int>()] = {e.at(1).get<double>(), e.at(2).get<double>()};
    }
    const auto& lj = j.at("labels");
    if (!lj.is_null()) {
      l.labels = Labels{lj.at("area").get<double>(), lj.at("b2b_wl").get<double>(), lj.at("t2b_wl").get<double>()};
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(e.what());
  } catch (const GeometryError& e) {
    throw std::invalid_argument(e.what());
  }
  validate_structure(l);
  return l;
}

std::string write_dataset(const Dataset& data) {
  std::ostringstream out;
  out << kDatasetMagic << " v" << kDatasetVersion << "\n";
  out << "mode " << to_string(data.mode) << "\n";
  out << "count " << data.instances.size() << "\n";
  for (const auto& l : data.instances) {
    const std::string body = layout_to_json(l).dump();
    out << "record " << body.size() << "\n" << body << "\n";
  }
  out << "end\n";
  return out.str();
}

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("dataset", line_, 0, msg); }

  std::string line() {
    if (pos_ >= text_.size()) {
      ++line_;
      fail("unexpected end of file (truncated dataset)");
    }
    const auto nl = text_.find('\n', pos_);
    if (nl == std::string::npos) {
      ++line_;
      fail("unexpected end of file (truncated dataset)");
    }
    std::string s = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return s;
  }

  std::string bytes(std::size_t n) {
    if (text_.size() - pos_ < n + 1) fail("record is truncated");
    std::string s = text_.substr(pos_, n);
    if (text_[pos_ + n] != '\n') fail("record length does not match its header");
    pos_ += n + 1;
    line_ += static_cast<int>(std::count(s.begin(), s.end(), '\n')) + 1;
    return s;
  }

  bool at_end() const { return pos_ == text_.size(); }
  int line_number() const { return line_; }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

std::string after_prefix(Cursor& c, const std::string& prefix) {
  const std::string s = c.line();
  if (s.rfind(prefix, 0) != 0) c.fail("expected '" + prefix + "...', found '" + s + "'");
  return s.substr(prefix.size());
}

std::size_t parse_size(Cursor& c, const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) c.fail("invalid count '" + s + "'");
  return v;
}

}  // namespace

Dataset read_dataset(const std::string& text) {
  Cursor c(text);
  const std::string magic = c.line();
  const std::string want = std::string(kDatasetMagic) + " v" + std::to_string(kDatasetVersion);
  if (magic != want) {
    if (magic.rfind(std::string(kDatasetMagic) + " v", 0) == 0) {
      c.fail("unsupported dataset version '" + magic.substr(std::string(kDatasetMagic).size() + 1) + "', expected v" +
             std::to_string(kDatasetVersion));
    }
    c.fail("not a dataset file");
  }
  Dataset data;
  try {
    data.mode = parse_dataset_mode(after_prefix(c, "mode "));
  } catch (const std::invalid_argument& e) {
    c.fail(e.what());
  }
  const std::size_t count = parse_size(c, after_prefix(c, "count "));
  data.instances.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = parse_size(c, after_prefix(c, "record "));
    const int record_line = c.line_number() + 1;
    const std::string body = c.bytes(n);
    try {
      data.instances.push_back(layout_from_json(json::parse(body)));
    } catch (const std::exception& e) {
      throw ParseError("dataset", record_line, 0, "record " + std::to_string(i) + ": " + e.what());
    }
  }
  if (c.line() != "end") c.fail("expected 'end'");
  if (!c.at_end()) c.fail("trailing data after 'end'");
  return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << write_dataset(data);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_dataset(ss.str());
}

}  // namespace floorset
