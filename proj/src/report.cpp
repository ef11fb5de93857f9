#include "floorset/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "floorset/prime.hpp"

namespace floorset {

using nlohmann::json;

SolutionSet solutions_from_rects(const std::vector<PlacementSolution>& solutions) {
  SolutionSet s;
  for (const auto& sol : solutions) s.placements.push_back(placement_of(sol));
  return s;
}

SolutionSet solutions_from_dataset(const Dataset& data) {
  SolutionSet s;
  for (const auto& l : data.instances) s.placements.push_back(placement_of(l));
  return s;
}

namespace {

bool is_axis_rect(const PlacedShape& s) {
  if (s.vertices.size() != 4) return false;
  for (const auto& v : s.vertices) {
    if ((v.x != s.xl() && v.x != s.xh()) || (v.y != s.yl() && v.y != s.yh())) return false;
  }
  return true;
}

}  // namespace

std::string write_solutions(const SolutionSet& solutions) {
  json j;
  j["schema"] = kSolutionsSchema;
  json list = json::array();
  for (std::size_t i = 0; i < solutions.placements.size(); ++i) {
    json blocks = json::array();
    for (const auto& s : solutions.placements[i]) {
      if (is_axis_rect(s)) {
        blocks.push_back({s.xl(), s.yl(), s.xh() - s.xl(), s.yh() - s.yl()});
      } else {
        json verts = json::array();
        for (const auto& v : s.vertices) verts.push_back({v.x, v.y});
        blocks.push_back(std::move(verts));
      }
    }
    list.push_back({{"index", i}, {"blocks", std::move(blocks)}});
  }
  j["solutions"] = std::move(list);
  return j.dump(1) + "\n";
}

SolutionSet read_solutions(const std::string& text) {
  SolutionSet out;
  try {
    const json j = json::parse(text);
    if (j.value("schema", "") != kSolutionsSchema) {
      throw std::invalid_argument(std::string("expected schema '") + kSolutionsSchema + "'");
    }
    for (const auto& e : j.at("solutions")) {
      if (e.at("index").get<std::size_t>() != out.placements.size()) {
        throw std::invalid_argument("solution indices must be 0, 1, 2, ... in order; found " +
                                    e.at("index").dump() + " at position " + std::to_string(out.placements.size()));
      }
      Placement p;
      for (const auto& b : e.at("blocks")) {
        if (b.size() == 4 && b.at(0).is_number()) {
          const double x = b[0].get<double>(), y = b[1].get<double>();
          const double w = b[2].get<double>(), h = b[3].get<double>();
          if (!(w > 0.0 && h > 0.0)) throw std::invalid_argument("block with non-positive size");
          p.push_back(PlacedShape::from_rect({x, y, w, h, 0}));
        } else {
          PlacedShape s;
          for (const auto& v : b) s.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
          if (s.vertices.size() < 4) throw std::invalid_argument("polygon with fewer than 4 vertices");
          p.push_back(std::move(s));
        }
      }
      out.placements.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed solutions file: ") + e.what());
  }
  return out;
}

SolutionSet load_solutions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.rfind(kDatasetMagic, 0) == 0) return solutions_from_dataset(read_dataset(text));
  return read_solutions(text);
}

std::vector<ReportRow> evaluate(const Dataset& data, const SolutionSet& solutions) {
  if (solutions.placements.size() != data.instances.size()) {
    throw std::invalid_argument("dataset has " + std::to_string(data.instances.size()) + " instances but " +
                                std::to_string(solutions.placements.size()) + " solutions were given");
  }
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const auto& l = data.instances[i];
    const auto& p = solutions.placements[i];
    if (p.size() != l.partitions.size()) {
      throw std::invalid_argument("solution " + std::to_string(i) + " has " + std::to_string(p.size()) +
                                  " blocks, instance has " + std::to_string(l.partitions.size()));
    }
    ReportRow r;
    r.index = i;
    r.labels = evaluate_labels(p, l);
    r.violations = count_violations(p, l.constraints, l.outline);
    r.relative = relative_metrics(r.labels, l.labels ? *l.labels : compute_labels(l));
    rows.push_back(r);
  }
  return rows;
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "index\tarea\tb2b_wl\tt2b_wl\tshape\tboundary\tgrouping\tpreplacement\tmulti_inst\toverflow\ttotal_"
         "violations\trel_area\trel_b2b_wl\trel_t2b_wl\n";
  std::array<double, 13> sum{};
  for (const auto& r : rows) {
    const std::array<double, 13> v{r.labels.area,
                                   r.labels.b2b_wl,
                                   r.labels.t2b_wl,
                                   static_cast<double>(r.violations.shape),
                                   static_cast<double>(r.violations.boundary),
                                   static_cast<double>(r.violations.grouping),
                                   static_cast<double>(r.violations.preplacement),
                                   static_cast<double>(r.violations.multi_inst),
                                   r.violations.overflow ? 1.0 : 0.0,
                                   static_cast<double>(r.violations.total()),
                                   r.relative.rel_area,
                                   r.relative.rel_b2b_wl,
                                   r.relative.rel_t2b_wl};
    out << r.index;
    for (std::size_t k = 0; k < v.size(); ++k) {
      out << '\t' << format_number(v[k]);
      sum[k] += v[k];
    }
    out << '\n';
  }
  out << "mean";
  for (double s : sum) out << '\t' << format_number(rows.empty() ? 0.0 : s / static_cast<double>(rows.size()));
  out << '\n';
  return out.str();
}

Histogram Histogram::build(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
  Histogram h;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + width * static_cast<double>(i));
  h.edges.back() = hi;
  h.density.assign(bins, 0.0);
  for (double v : values) {
    const double k = std::floor((v - lo) / width);
    const auto bin = static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(bins - 1)));
    h.density[bin] += 1.0;
  }
  if (!values.empty()) {
    for (double& d : h.density) d /= static_cast<double>(values.size()) * width;
  }
  return h;
}

DatasetStats dataset_stats(const Dataset& data, const TargetDistributions& targets) {
  if (data.instances.empty()) throw std::invalid_argument("dataset is empty");
  DatasetStats s;
  for (const auto& l : data.instances) {
    for (const auto& p : l.partitions) {
      s.aspects.push_back(bbox_aspect(p.shape));
      s.vertex_counts.push_back(static_cast<int>(p.shape.size()));
    }
    const double perimeter = static_cast<double>(l.outline.perimeter());
    for (const auto& n : l.nets) {
      if (n.kind != NetKind::BlockToBlock) continue;
      const auto a = l.partitions.at(static_cast<std::size_t>(n.first)).center();
      const auto b = l.partitions.at(static_cast<std::size_t>(n.second)).center();
      s.net_lengths.push_back(manhattan_distance(a, b) / perimeter);
    }
  }
  const auto target = target_quantiles(targets.aspect, kTargetQuantiles);
  std::vector<double> sorted = s.aspects;
  std::sort(sorted.begin(), sorted.end());
  s.aspect_w1 = wasserstein_1d_sorted(sorted, target);

  const auto [t_lo, t_hi] = support(targets.aspect);
  double lo = std::min(t_lo, sorted.front());
  double hi = std::max(t_hi, sorted.back());
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  s.aspect_hist = Histogram::build(s.aspects, lo, hi, kStatsBins);
  s.aspect_hist.target_density = Histogram::build(target, lo, hi, kStatsBins).density;
  s.length_hist = Histogram::build(s.net_lengths, 0.0, 1.0, kStatsBins);
  return s;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string histogram_tsv(const Histogram& h) {
  std::ostringstream out;
  out << "bin_lo\tbin_hi\tdensity";
  if (!h.target_density.empty()) out << "\ttarget_density";
  out << '\n';
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    out << format_number(h.edges[i]) << '\t' << format_number(h.edges[i + 1]) << '\t' << format_number(h.density[i]);
    if (!h.target_density.empty()) out << '\t' << format_number(h.target_density[i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace

void write_stats(const DatasetStats& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "aspect_pdf.tsv", histogram_tsv(s.aspect_hist));
  write_text(dir / "netlen_pdf.tsv", histogram_tsv(s.length_hist));

  std::map<int, std::size_t> vertices;
  for (int v : s.vertex_counts) ++vertices[v];
  std::ostringstream vh;
  vh << "vertices\tcount\n";
  for (const auto& [k, c] : vertices) vh << k << '\t' << c << '\n';
  write_text(dir / "vertex_hist.tsv", vh.str());

  const double max_len = s.net_lengths.empty() ? 0.0 : *std::max_element(s.net_lengths.begin(), s.net_lengths.end());
  std::ostringstream sum;
  sum << "metric\tvalue\n";
  sum << "partitions\t" << s.aspects.size() << '\n';
  sum << "b2b_nets\t" << s.net_lengths.size() << '\n';
  sum << "aspect_w1\t" << format_number(s.aspect_w1) << '\n';
  sum << "max_net_length\t" << format_number(max_len) << '\n';
  write_text(dir / "summary.tsv", sum.str());
}

}  // namespace floorset
