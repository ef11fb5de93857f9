#include "floorset/prime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "floorset/metrics.hpp"

namespace floorset {

namespace {

// Cells whose mean aspect ratio is within this factor of square are
// preferred over hitting the sampled cell count exactly.
constexpr double kCellAspectTolerance = 1.5;

double cell_skew(int columns, int rows, const FixedOutline& outline) {
  const double cell_w = static_cast<double>(outline.width) / columns;
  const double cell_h = static_cast<double>(outline.height) / rows;
  return std::abs(std::log(cell_w / cell_h));
}

std::vector<Coord> random_cuts(Coord length, int count, Rng& rng) {
  std::vector<Coord> pool(static_cast<std::size_t>(length - 1));
  std::iota(pool.begin(), pool.end(), Coord{1});
  for (int i = 0; i < count; ++i) {
    const auto j = uniform_int<std::size_t>(rng, static_cast<std::size_t>(i), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::optional<std::pair<int, int>> grid_dimensions(int n_cells, const FixedOutline& outline) {
  std::optional<std::pair<int, int>> best;
  double best_skew = std::numeric_limits<double>::infinity();
  for (int c = 1; c <= n_cells; ++c) {
    if (n_cells % c != 0) continue;
    const int r = n_cells / c;
    if (c > outline.width || r > outline.height) continue;
    const double skew = cell_skew(c, r, outline);
    if (skew < best_skew - 1e-12) {
      best_skew = skew;
      best = {c, r};
    }
  }
  return best;
}

PartitionGrid create_mesh_cells(int n_cells, int min_cells, int max_cells, const FixedOutline& outline, Rng& rng) {
  if (outline.width < 1 || outline.height < 1) throw GeometryError("empty outline");
  const double limit = std::log(kCellAspectTolerance) + 1e-12;
  std::optional<std::pair<int, int>> dims, fallback;
  for (int delta = 0; !dims && delta <= std::max(n_cells - min_cells, max_cells - n_cells); ++delta) {
    for (int side : {-1, 1}) {
      const int n = n_cells + side * delta;
      if (n < min_cells || n > max_cells || (delta == 0 && side > 0)) continue;
      const auto d = grid_dimensions(n, outline);
      if (!d) continue;
      if (!fallback) fallback = d;
      if (cell_skew(d->first, d->second, outline) <= limit) {
        dims = d;
        break;
      }
    }
  }
  if (!dims) dims = fallback;
  if (!dims) {
    throw GeometryError("outline " + std::to_string(outline.width) + "x" + std::to_string(outline.height) +
                        " cannot host " + std::to_string(min_cells) + " cells");
  }

  PartitionGrid g;
  g.outline = outline;
  const auto [cols, rows] = *dims;
  g.x_cuts = random_cuts(outline.width, cols - 1, rng);
  g.y_cuts = random_cuts(outline.height, rows - 1, rng);

  std::vector<Coord> xs{0}, ys{0};
  xs.insert(xs.end(), g.x_cuts.begin(), g.x_cuts.end());
  xs.push_back(outline.width);
  ys.insert(ys.end(), g.y_cuts.begin(), g.y_cuts.end());
  ys.push_back(outline.height);
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      g.cells.push_back({xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)],
                         xs[static_cast<std::size_t>(i) + 1], ys[static_cast<std::size_t>(j) + 1]});
      const int id = j * cols + i;
      if (i > 0) g.adjacency.push_back({id - 1, id});
      if (j > 0) g.adjacency.push_back({id - cols, id});
    }
  }
  std::sort(g.adjacency.begin(), g.adjacency.end());
  return g;
}

PartitionGrid create_mesh(int n_parts, const FixedOutline& outline, Rng& rng) {
  if (n_parts < 2) throw GeometryError("need at least 2 partitions");
  const int factor = uniform_int(rng, 4, 6);
  return create_mesh_cells(factor * n_parts, 4 * n_parts, 6 * n_parts, outline, rng);
}

namespace {

// Union of two abutted partitions, or nullopt when it is not admissible.
std::optional<RectilinearPolygon> try_union(const RectilinearPolygon& a, const RectilinearPolygon& b,
                                            bool rectilinear) {
  if (is_rectangle(a) && is_rectangle(b)) {
    const Rect ra = a.bbox(), rb = b.bbox();
    const Rect u{std::min(ra.xl, rb.xl), std::min(ra.yl, rb.yl), std::max(ra.xh, rb.xh), std::max(ra.yh, rb.yh)};
    if (u.area() == ra.area() + rb.area()) return RectilinearPolygon::from_rect(u);
  }
  if (!rectilinear) return std::nullopt;
  try {
    return merge_adjacent(a, b);
  } catch (const MergeError&) {
    return std::nullopt;
  }
}

// Sorted multiset with one copy each of `x` and `y` replaced by `z`.
void replace_two(const std::vector<double>& sorted, double x, double y, double z, std::vector<double>& out) {
  out.clear();
  bool dropped_x = false, dropped_y = false, inserted = false;
  for (double v : sorted) {
    if (!dropped_x && v == x) {
      dropped_x = true;
      continue;
    }
    if (!dropped_y && v == y) {
      dropped_y = true;
      continue;
    }
    if (!inserted && z <= v) {
      out.push_back(z);
      inserted = true;
    }
    out.push_back(v);
  }
  if (!inserted) out.push_back(z);
}

}  // namespace

std::vector<Partition> merge_partitions(const PartitionGrid& grid, int n_parts, std::span<const double> target,
                                        bool rectilinear, Rng& rng, GenerationTrace* trace) {
  const int n_cells = static_cast<int>(grid.cells.size());
  if (n_parts < 1 || n_parts > n_cells) {
    throw GenerationError("cannot merge " + std::to_string(n_cells) + " cells into " + std::to_string(n_parts));
  }
  std::vector<std::optional<RectilinearPolygon>> shapes;
  std::vector<double> aspect;
  for (const auto& c : grid.cells) {
    shapes.emplace_back(RectilinearPolygon::from_rect(c));
    aspect.push_back(bbox_aspect(*shapes.back()));
  }
  std::vector<double> sorted = aspect;
  std::sort(sorted.begin(), sorted.end());
  double w1 = wasserstein_1d_sorted(sorted, target);
  if (trace) trace->initial_w1 = w1;

  struct Edge {
    int a, b;
    bool invalid;
  };
  std::vector<Edge> edges;
  for (auto [a, b] : grid.adjacency) edges.push_back({a, b, false});

  struct Candidate {
    std::size_t edge;
    RectilinearPolygon shape;
    double w1;
  };
  std::optional<Candidate> best_rejected;
  int rejections = 0;
  std::vector<double> scratch;
  std::vector<std::size_t> open;

  for (int parts = n_cells; parts > n_parts;) {
    open.clear();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edges[e].invalid) open.push_back(e);
    }
    if (open.empty()) {
      throw GenerationError("no admissible merge left at " + std::to_string(parts) + " partitions");
    }
    const std::size_t e = open[uniform_int<std::size_t>(rng, 0, open.size() - 1)];
    const auto [a, b, invalid] = edges[e];
    auto merged = try_union(*shapes[static_cast<std::size_t>(a)], *shapes[static_cast<std::size_t>(b)], rectilinear);
    if (!merged) {
      edges[e].invalid = true;
      if (trace) ++trace->invalid_merge_draws;
      continue;
    }
    const double ar = bbox_aspect(*merged);
    replace_two(sorted, aspect[static_cast<std::size_t>(a)], aspect[static_cast<std::size_t>(b)], ar, scratch);
    const double w1_new = wasserstein_1d_sorted(scratch, target);

    std::optional<Candidate> accept;
    bool fallback = false;
    if (w1_new < w1) {
      accept = Candidate{e, std::move(*merged), w1_new};
    } else {
      if (!best_rejected || w1_new < best_rejected->w1) best_rejected = Candidate{e, std::move(*merged), w1_new};
      if (++rejections >= kMergeFallbackPatience) {
        accept = std::move(best_rejected);
        fallback = true;
      }
    }
    if (!accept) continue;

    const int ka = edges[accept->edge].a, kb = edges[accept->edge].b;
    const auto ia = static_cast<std::size_t>(ka), ib = static_cast<std::size_t>(kb);
    const double ar_acc = bbox_aspect(accept->shape);
    replace_two(sorted, aspect[ia], aspect[ib], ar_acc, scratch);
    sorted.swap(scratch);
    if (trace) trace->merges.push_back({w1, accept->w1, fallback});
    w1 = accept->w1;
    shapes[ia] = std::move(accept->shape);
    shapes[ib].reset();
    aspect[ia] = ar_acc;
    --parts;

    // kb is absorbed into ka; edges touching either get re-evaluated.
    std::vector<Edge> next;
    next.reserve(edges.size());
    for (auto edge : edges) {
      if (edge.a == kb) edge.a = ka;
      if (edge.b == kb) edge.b = ka;
      if (edge.a == edge.b) continue;
      if (edge.a > edge.b) std::swap(edge.a, edge.b);
      if (edge.a == ka || edge.b == ka) edge.invalid = false;
      next.push_back(edge);
    }
    std::sort(next.begin(), next.end(), [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    next.erase(std::unique(next.begin(), next.end(), [](const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }),
               next.end());
    edges.swap(next);
    best_rejected.reset();
    rejections = 0;
  }
  if (trace) trace->final_w1 = w1;

  std::vector<RectilinearPolygon> alive;
  for (auto& s : shapes) {
    if (s) alive.push_back(std::move(*s));
  }
  std::sort(alive.begin(), alive.end(), [](const RectilinearPolygon& x, const RectilinearPolygon& y) {
    const Point px = x.vertices().front(), py = y.vertices().front();
    return std::tie(px.y, px.x) < std::tie(py.y, py.x);
  });
  std::vector<Partition> out;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    const int id = static_cast<int>(i);
    out.emplace_back(id, partition_name(id), std::move(alive[i]));
  }
  return out;
}

void annotate_layout(LayoutInstance& layout, const GenConfig& config, const TargetDistributions& targets, Rng& rng,
                     GenerationTrace& trace) {
  const int n = static_cast<int>(layout.partitions.size());
  const int n_terms = terminal_count(n, targets.sample("N_terms_parts", rng));
  annotate_terminals(layout, n_terms, config.terminal_pitch_slack, rng, &trace);

  const double d_parts = targets.sample("D_parts", rng);
  const double d_terms = targets.sample("D_terms", rng);
  trace.n_terms = n_terms;
  trace.part_density = d_parts;
  trace.term_density = d_terms;
  annotate_nets(layout, d_parts, d_terms, targets.net_weight, rng, &trace);

  if (config.placement_constraints) {
    ConstraintFractions f;
    f.boundary = targets.sample("E_parts", rng);
    f.cluster = targets.sample("C_parts", rng);
    f.cluster_count = static_cast<int>(std::lround(targets.sample("N_clusters", rng)));
    f.preplaced = targets.sample("P_parts", rng);
    f.multi_inst = targets.sample("M_parts", rng);
    annotate_constraints(layout, f, rng, &trace);
  } else {
    layout.constraints = {};
    annotate_shape_ranges(layout);
  }
  layout.labels = compute_labels(layout);
}

GenerationResult generate_prime(const GenConfig& config, const TargetDistributions& targets, std::uint64_t index) {
  GenerationResult result;
  result.index = index;
  Rng rng = make_stream(config.seed, index);
  const FixedOutline outline = config.outline.sample(rng);
  const int n_parts = static_cast<int>(config.num_partitions.sample(rng));
  const auto target = target_quantiles(targets.aspect, kTargetQuantiles);

  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    GenerationTrace trace;
    trace.attempts = attempt + 1;
    try {
      const PartitionGrid grid = create_mesh(n_parts, outline, rng);
      LayoutInstance layout;
      layout.outline = outline;
      layout.partitions = merge_partitions(grid, n_parts, target, config.rectilinear, rng, &trace);
      layout.provenance = {config.seed, index, DatasetMode::Prime};
      annotate_layout(layout, config, targets, rng, trace);
      validate_structure(layout);
      const ViolationCounts v = count_violations(layout);
      if (v.total() != 0 || v.overflow) throw GenerationError("generated layout violates its own constraints");
      result.layout = std::move(layout);
      result.trace = std::move(trace);
      return result;
    } catch (const GeometryError& e) {
      result.error = e.what();
      result.trace = std::move(trace);
      return result;
    } catch (const GenerationError& e) {
      result.error = e.what();
      result.trace = std::move(trace);
    }
  }
  result.error = "gave up after " + std::to_string(kGenerationAttempts) + " attempts: " + result.error;
  return result;
}

}  // namespace floorset
