#include "floorset/bookshelf.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace floorset {

ParseError::ParseError(std::string file, int line, int column, const std::string& message)
    : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : "") +
                         (column > 0 ? ":" + std::to_string(column) : "") + ": " + message),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kBlocksHeader = "FloorSet blocks 1.0";
constexpr const char* kNetsHeader = "FloorSet nets 1.0";
constexpr const char* kPlHeader = "FloorSet pl 1.0";

std::string fmt(Coord v) { return std::to_string(v); }

bool soft_block(const LayoutInstance& l, const Partition& p) {
  return l.provenance.mode == DatasetMode::Lite && is_rectangle(p.shape) && l.constraints.shape_range.count(p.id);
}

// ---------------------------------------------------------------- reading

struct Token {
  std::string text;
  int column;
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

// Splits on whitespace; '#' starts a comment. Blank lines are dropped.
std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == '#') break;
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) && raw[i] != '#') ++i;
      line.tokens.push_back({raw.substr(start, i - start), static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

class Reader {
 public:
  Reader(std::string file, const std::string& text) : file_(std::move(file)), lines_(tokenize(text)) {}

  [[noreturn]] void fail(const Line& l, std::size_t tok, const std::string& msg) const {
    const int col = tok < l.tokens.size() ? l.tokens[tok].column : 0;
    throw ParseError(file_, l.number, col, msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(file_, 0, 0, msg); }

  const std::vector<Line>& lines() const { return lines_; }
  const std::string& file() const { return file_; }

  void expect_header(const char* header) const {
    std::istringstream want(header);
    std::vector<std::string> words{std::istream_iterator<std::string>(want), {}};
    if (lines_.empty()) fail("empty file, expected '" + std::string(header) + "'");
    const Line& first = lines_.front();
    bool ok = first.tokens.size() == words.size();
    for (std::size_t i = 0; ok && i < words.size(); ++i) ok = first.tokens[i].text == words[i];
    if (!ok) fail(first, 0, "expected header '" + std::string(header) + "'");
  }

  void expect_count(const Line& l, std::size_t n) const {
    if (l.tokens.size() != n) {
      fail(l, std::min(n, l.tokens.size()),
           "expected " + std::to_string(n) + " fields, found " + std::to_string(l.tokens.size()));
    }
  }

  template <class T>
  T number(const Line& l, std::size_t tok) const {
    if (tok >= l.tokens.size()) fail(l, tok, "missing number");
    const std::string& s = l.tokens[tok].text;
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) fail(l, tok, "invalid number '" + s + "'");
    return v;
  }

  // "Key : value..." with the key at token 0.
  bool is_key(const Line& l, const char* key) const {
    return l.tokens[0].text == key && l.tokens.size() >= 2 && l.tokens[1].text == ":";
  }

 private:
  std::string file_;
  std::vector<Line> lines_;
};

Point parse_vertex(const Reader& r, const Line& l, std::size_t tok) {
  const std::string& s = l.tokens[tok].text;
  const auto comma = s.find(',');
  if (s.size() < 5 || s.front() != '(' || s.back() != ')' || comma == std::string::npos) {
    r.fail(l, tok, "expected vertex '(x,y)', found '" + s + "'");
  }
  Point p;
  const char* xb = s.data() + 1;
  const char* xe = s.data() + comma;
  const char* yb = xe + 1;
  const char* ye = s.data() + s.size() - 1;
  const auto rx = std::from_chars(xb, xe, p.x);
  const auto ry = std::from_chars(yb, ye, p.y);
  if (rx.ec != std::errc{} || rx.ptr != xe || ry.ec != std::errc{} || ry.ptr != ye) {
    r.fail(l, tok, "invalid vertex '" + s + "'");
  }
  return p;
}

struct PendingSoft {
  int id;
  Coord area;
  const Line* line;
};

}  // namespace

BookshelfFiles write_bookshelf(const LayoutInstance& l) {
  BookshelfFiles f;
  const auto& c = l.constraints;
  std::size_t n_soft = 0;
  for (const auto& p : l.partitions) n_soft += soft_block(l, p);

  std::ostringstream b;
  b << kBlocksHeader << "\n";
  b << "Provenance : " << to_string(l.provenance.mode) << ' ' << l.provenance.seed << ' ' << l.provenance.index
    << "\n";
  b << "Outline : " << fmt(l.outline.width) << ' ' << fmt(l.outline.height) << "\n";
  b << "NumHardRectilinearBlocks : " << l.partitions.size() - n_soft << "\n";
  b << "NumSoftRectangularBlocks : " << n_soft << "\n";
  b << "NumTerminals : " << l.terminals.size() << "\n\n";
  for (const auto& p : l.partitions) {
    if (soft_block(l, p)) {
      const auto& r = c.shape_range.at(p.id);
      b << p.name << " softrectangular " << fmt(p.area) << ' ' << format_number(r.min_ar) << ' '
        << format_number(r.max_ar) << "\n";
    } else {
      b << p.name << " hardrectilinear " << p.shape.size();
      for (const auto& v : p.shape.vertices()) b << " (" << fmt(v.x) << ',' << fmt(v.y) << ')';
      b << "\n";
    }
  }
  for (const auto& t : l.terminals) b << t.name << " terminal\n";
  const auto name = [&](int id) -> const std::string& { return l.partitions.at(static_cast<std::size_t>(id)).name; };
  if (!c.empty()) b << "\n";
  for (const auto& [id, r] : c.shape_range) {
    if (soft_block(l, l.partitions.at(static_cast<std::size_t>(id)))) continue;
    b << "CONSTRAINT shape " << name(id) << ' ' << format_number(r.min_ar) << ' ' << format_number(r.max_ar) << "\n";
  }
  for (const auto& [id, tag] : c.boundary) b << "CONSTRAINT boundary " << name(id) << ' ' << edge_tag_to_string(tag) << "\n";
  for (const auto& [id, pos] : c.preplaced) {
    b << "CONSTRAINT preplace " << name(id) << ' ' << format_number(pos.x) << ' ' << format_number(pos.y) << "\n";
  }
  for (std::size_t g = 0; g < c.clusters.size(); ++g) {
    b << "CONSTRAINT cluster " << g;
    for (int id : c.clusters[g]) b << ' ' << name(id);
    b << "\n";
  }
  for (std::size_t g = 0; g < c.multi_inst.size(); ++g) {
    b << "CONSTRAINT multiinst " << g;
    for (int id : c.multi_inst[g]) b << ' ' << name(id);
    b << "\n";
  }
  f.blocks = b.str();

  std::ostringstream n;
  n << kNetsHeader << "\n";
  n << "NumNets : " << l.nets.size() << "\n";
  n << "NumPins : " << 2 * l.nets.size() << "\n\n";
  for (const auto& net : l.nets) {
    n << "NetDegree : 2 " << format_number(net.weight) << "\n";
    if (net.kind == NetKind::BlockToBlock) {
      n << name(net.first) << " B\n";
    } else {
      n << l.terminals.at(static_cast<std::size_t>(net.first)).name << " T\n";
    }
    n << name(net.second) << " B\n";
  }
  f.nets = n.str();

  std::ostringstream pl;
  pl << kPlHeader << "\n\n";
  for (const auto& t : l.terminals) {
    pl << t.name << ' ' << format_number(t.position.x) << ' ' << format_number(t.position.y) << "\n";
  }
  for (const auto& p : l.partitions) {
    if (!soft_block(l, p)) continue;
    const Rect r = p.shape.bbox();
    pl << p.name << ' ' << fmt(r.xl) << ' ' << fmt(r.yl) << ' ' << fmt(r.width()) << ' ' << fmt(r.height()) << "\n";
  }
  f.pl = pl.str();
  return f;
}

LayoutInstance parse_bookshelf(const BookshelfFiles& files) {
  LayoutInstance out;
  std::map<std::string, int> blocks, terminals;
  std::vector<PendingSoft> soft;

  // .blocks
  {
    Reader r("blocks", files.blocks);
    r.expect_header(kBlocksHeader);
    std::map<std::string, const Line*> headers;
    std::map<int, const Line*> cluster_ids, multi_ids;
    std::size_t n_hard = 0;
    auto header_once = [&](const Line& l, const std::string& key) {
      if (!headers.emplace(key, &l).second) r.fail(l, 0, "duplicate " + key + " header");
    };
    auto block_id = [&](const Line& l, std::size_t tok) {
      const auto it = blocks.find(l.tokens[tok].text);
      if (it == blocks.end()) r.fail(l, tok, "unknown block '" + l.tokens[tok].text + "'");
      return it->second;
    };
    const auto& lines = r.lines();
    for (std::size_t li = 1; li < lines.size(); ++li) {
      const Line& l = lines[li];
      const std::string& head = l.tokens[0].text;
      if (r.is_key(l, "Provenance")) {
        header_once(l, head);
        r.expect_count(l, 5);
        try {
          out.provenance.mode = parse_dataset_mode(l.tokens[2].text);
        } catch (const std::invalid_argument& e) {
          r.fail(l, 2, e.what());
        }
        out.provenance.seed = r.number<std::uint64_t>(l, 3);
        out.provenance.index = r.number<std::uint64_t>(l, 4);
      } else if (r.is_key(l, "Outline")) {
        header_once(l, head);
        r.expect_count(l, 4);
        out.outline = {r.number<Coord>(l, 2), r.number<Coord>(l, 3)};
        if (out.outline.width <= 0 || out.outline.height <= 0) r.fail(l, 2, "outline must be positive");
      } else if (r.is_key(l, "NumHardRectilinearBlocks") || r.is_key(l, "NumSoftRectangularBlocks") ||
                 r.is_key(l, "NumTerminals")) {
        header_once(l, head);
        r.expect_count(l, 3);
        r.number<std::size_t>(l, 2);
      } else if (head == "CONSTRAINT") {
        if (l.tokens.size() < 2) r.fail(l, 1, "missing constraint kind");
        const std::string& kind = l.tokens[1].text;
        auto& c = out.constraints;
        if (kind == "shape") {
          r.expect_count(l, 5);
          const int id = block_id(l, 2);
          const AspectRange range{r.number<double>(l, 3), r.number<double>(l, 4)};
          if (!(range.min_ar > 0.0 && range.min_ar <= range.max_ar)) r.fail(l, 3, "invalid aspect range");
          if (!c.shape_range.emplace(id, range).second) r.fail(l, 2, "duplicate shape constraint");
        } else if (kind == "boundary") {
          r.expect_count(l, 4);
          const int id = block_id(l, 2);
          unsigned tag = 0;
          try {
            tag = parse_edge_tag(l.tokens[3].text);
          } catch (const std::invalid_argument& e) {
            r.fail(l, 3, e.what());
          }
          if (!c.boundary.emplace(id, tag).second) r.fail(l, 2, "duplicate boundary constraint");
        } else if (kind == "preplace") {
          r.expect_count(l, 5);
          const int id = block_id(l, 2);
          if (!c.preplaced.emplace(id, PointD{r.number<double>(l, 3), r.number<double>(l, 4)}).second) {
            r.fail(l, 2, "duplicate preplace constraint");
          }
        } else if (kind == "cluster" || kind == "multiinst") {
          if (l.tokens.size() < 5) r.fail(l, l.tokens.size(), "a group needs an id and at least two blocks");
          const int gid = r.number<int>(l, 2);
          auto& groups = kind == "cluster" ? c.clusters : c.multi_inst;
          auto& ids = kind == "cluster" ? cluster_ids : multi_ids;
          if (gid != static_cast<int>(groups.size())) {
            r.fail(l, 2, "group ids must count up from 0; expected " + std::to_string(groups.size()));
          }
          ids[gid] = &l;
          std::vector<int> members;
          for (std::size_t t = 3; t < l.tokens.size(); ++t) members.push_back(block_id(l, t));
          groups.push_back(std::move(members));
        } else {
          r.fail(l, 1, "unknown constraint kind '" + kind + "'");
        }
      } else if (l.tokens.size() >= 2 && l.tokens[1].text == "terminal") {
        r.expect_count(l, 2);
        if (blocks.count(head) || !terminals.emplace(head, static_cast<int>(out.terminals.size())).second) {
          r.fail(l, 0, "duplicate name '" + head + "'");
        }
        out.terminals.push_back({static_cast<int>(out.terminals.size()), head, {}});
      } else if (l.tokens.size() >= 2 &&
                 (l.tokens[1].text == "hardrectilinear" || l.tokens[1].text == "softrectangular")) {
        const int id = static_cast<int>(out.partitions.size());
        if (terminals.count(head) || !blocks.emplace(head, id).second) r.fail(l, 0, "duplicate name '" + head + "'");
        if (l.tokens[1].text == "hardrectilinear") {
          const auto k = r.number<std::size_t>(l, 2);
          if (k < 4) r.fail(l, 2, "a rectilinear block needs at least 4 vertices");
          r.expect_count(l, 3 + k);
          std::vector<Point> pts;
          for (std::size_t t = 3; t < 3 + k; ++t) pts.push_back(parse_vertex(r, l, t));
          try {
            RectilinearPolygon poly(std::move(pts));
            if (poly.size() != k) r.fail(l, 2, "vertex list is not in canonical form");
            out.partitions.emplace_back(id, head, std::move(poly));
          } catch (const GeometryError& e) {
            r.fail(l, 3, e.what());
          }
          ++n_hard;
        } else {
          r.expect_count(l, 5);
          const auto area = r.number<Coord>(l, 2);
          const AspectRange range{r.number<double>(l, 3), r.number<double>(l, 4)};
          if (area <= 0) r.fail(l, 2, "area must be positive");
          if (!(range.min_ar > 0.0 && range.min_ar <= range.max_ar)) r.fail(l, 3, "invalid aspect range");
          out.constraints.shape_range[id] = range;
          out.partitions.emplace_back();
          out.partitions.back().id = id;
          out.partitions.back().name = head;
          soft.push_back({id, area, &l});
        }
      } else {
        r.fail(l, 0, "unrecognized line");
      }
    }
    auto check_header = [&](const char* key, std::size_t actual) {
      const auto it = headers.find(key);
      if (it == headers.end()) r.fail(std::string("missing ") + key + " header");
      const auto declared = r.number<std::size_t>(*it->second, 2);
      if (declared != actual) {
        r.fail(*it->second, 2,
               std::string(key) + " is " + std::to_string(declared) + " but " + std::to_string(actual) + " declared");
      }
    };
    if (!headers.count("Outline")) r.fail("missing Outline header");
    check_header("NumHardRectilinearBlocks", n_hard);
    check_header("NumSoftRectangularBlocks", soft.size());
    check_header("NumTerminals", out.terminals.size());
  }

  // .pl
  {
    Reader r("pl", files.pl);
    r.expect_header(kPlHeader);
    std::vector<char> placed_t(out.terminals.size(), 0), placed_b(out.partitions.size(), 0);
    std::map<int, const PendingSoft*> soft_by_id;
    for (const auto& s : soft) soft_by_id[s.id] = &s;
    const auto& lines = r.lines();
    for (std::size_t li = 1; li < lines.size(); ++li) {
      const Line& l = lines[li];
      const std::string& nm = l.tokens[0].text;
      if (const auto t = terminals.find(nm); t != terminals.end()) {
        r.expect_count(l, 3);
        if (placed_t[static_cast<std::size_t>(t->second)]++) r.fail(l, 0, "terminal '" + nm + "' placed twice");
        const PointD pos{r.number<double>(l, 1), r.number<double>(l, 2)};
        if (!on_perimeter(out.outline, pos)) r.fail(l, 1, "terminal '" + nm + "' is off the perimeter");
        out.terminals[static_cast<std::size_t>(t->second)].position = pos;
      } else if (const auto b = blocks.find(nm); b != blocks.end()) {
        r.expect_count(l, 5);
        const auto it = soft_by_id.find(b->second);
        if (it == soft_by_id.end()) r.fail(l, 0, "block '" + nm + "' is not a soft block");
        if (placed_b[static_cast<std::size_t>(b->second)]++) r.fail(l, 0, "block '" + nm + "' placed twice");
        const auto x = r.number<Coord>(l, 1), y = r.number<Coord>(l, 2);
        const auto w = r.number<Coord>(l, 3), h = r.number<Coord>(l, 4);
        if (w <= 0 || h <= 0) r.fail(l, 3, "block dimensions must be positive");
        if (w * h != it->second->area) {
          r.fail(l, 3, "placement of '" + nm + "' has area " + std::to_string(w * h) + ", block declares " +
                           std::to_string(it->second->area));
        }
        try {
          out.partitions[static_cast<std::size_t>(b->second)] = Partition(b->second, nm, RectilinearPolygon::rectangle(x, y, w, h));
        } catch (const GeometryError& e) {
          r.fail(l, 1, e.what());
        }
      } else {
        r.fail(l, 0, "unknown name '" + nm + "'");
      }
    }
    for (std::size_t t = 0; t < placed_t.size(); ++t) {
      if (!placed_t[t]) r.fail("terminal '" + out.terminals[t].name + "' has no position");
    }
    for (const auto& s : soft) {
      if (!placed_b[static_cast<std::size_t>(s.id)]) {
        throw ParseError("blocks", s.line->number, 1,
                         "soft block '" + out.partitions[static_cast<std::size_t>(s.id)].name + "' has no placement in pl");
      }
    }
  }

  // .nets
  {
    Reader r("nets", files.nets);
    r.expect_header(kNetsHeader);
    std::map<std::string, const Line*> headers;
    const auto& lines = r.lines();
    std::size_t li = 1;
    for (; li < lines.size(); ++li) {
      const Line& l = lines[li];
      if (!(r.is_key(l, "NumNets") || r.is_key(l, "NumPins"))) break;
      if (!headers.emplace(l.tokens[0].text, &l).second) r.fail(l, 0, "duplicate " + l.tokens[0].text + " header");
      r.expect_count(l, 3);
      r.number<std::size_t>(l, 2);
    }
    for (const char* key : {"NumNets", "NumPins"}) {
      if (!headers.count(key)) r.fail(std::string("missing ") + key + " header");
    }
    while (li < lines.size()) {
      const Line& l = lines[li];
      if (r.is_key(l, "NumNets") || r.is_key(l, "NumPins")) r.fail(l, 0, "duplicate " + l.tokens[0].text + " header");
      if (!r.is_key(l, "NetDegree")) r.fail(l, 0, "expected 'NetDegree :'");
      r.expect_count(l, 4);
      if (r.number<int>(l, 2) != 2) r.fail(l, 2, "only 2-pin nets are supported");
      const auto weight = r.number<double>(l, 3);
      if (!(weight > 0.0 && weight <= 1.0)) r.fail(l, 3, "net weight outside (0,1]");
      std::array<std::pair<char, int>, 2> pins{};
      for (int k = 0; k < 2; ++k) {
        if (li + 1 + static_cast<std::size_t>(k) >= lines.size()) r.fail(l, 0, "net is missing pins");
        const Line& p = lines[li + 1 + static_cast<std::size_t>(k)];
        r.expect_count(p, 2);
        const std::string& kind = p.tokens[1].text;
        const std::string& nm = p.tokens[0].text;
        if (kind == "B") {
          const auto it = blocks.find(nm);
          if (it == blocks.end()) r.fail(p, 0, "net references undeclared block '" + nm + "'");
          pins[static_cast<std::size_t>(k)] = {'B', it->second};
        } else if (kind == "T") {
          const auto it = terminals.find(nm);
          if (it == terminals.end()) r.fail(p, 0, "net references undeclared terminal '" + nm + "'");
          pins[static_cast<std::size_t>(k)] = {'T', it->second};
        } else {
          r.fail(p, 1, "pin kind must be B or T");
        }
      }
      Net net;
      net.weight = weight;
      if (pins[0].first == 'B' && pins[1].first == 'B') {
        if (pins[0].second == pins[1].second) r.fail(lines[li + 2], 0, "self-loop net");
        net.kind = NetKind::BlockToBlock;
        net.first = pins[0].second;
        net.second = pins[1].second;
      } else if (pins[0].first == 'T' && pins[1].first == 'B') {
        net.kind = NetKind::TerminalToBlock;
        net.first = pins[0].second;
        net.second = pins[1].second;
      } else if (pins[0].first == 'B' && pins[1].first == 'T') {
        net.kind = NetKind::TerminalToBlock;
        net.first = pins[1].second;
        net.second = pins[0].second;
      } else {
        r.fail(lines[li + 1], 0, "a net cannot join two terminals");
      }
      out.nets.push_back(net);
      li += 3;
    }
    const auto declared = r.number<std::size_t>(*headers.at("NumNets"), 2);
    if (declared != out.nets.size()) {
      r.fail(*headers.at("NumNets"), 2,
             "NumNets is " + std::to_string(declared) + " but " + std::to_string(out.nets.size()) + " nets follow");
    }
    const auto pins = r.number<std::size_t>(*headers.at("NumPins"), 2);
    if (pins != 2 * out.nets.size()) {
      r.fail(*headers.at("NumPins"), 2, "NumPins is " + std::to_string(pins) + ", expected " + std::to_string(2 * out.nets.size()));
    }
  }

  try {
    validate_structure(out);
  } catch (const std::invalid_argument& e) {
    throw ParseError("blocks", 0, 0, e.what());
  }
  return out;
}

void save_bookshelf(const BookshelfFiles& files, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  for (const auto& [ext, text] : {std::pair{".blocks", &files.blocks}, {".nets", &files.nets}, {".pl", &files.pl}}) {
    const auto path = dir / (stem + ext);
    std::ofstream out(path, std::ios::binary);
    out << *text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
}

BookshelfFiles load_bookshelf(const std::filesystem::path& dir, const std::string& stem) {
  auto slurp = [&](const char* ext) {
    const auto path = dir / (stem + ext);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return {slurp(".blocks"), slurp(".nets"), slurp(".pl")};
}

}  // namespace floorset
