#include "floorset/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace floorset {

int GenerationTrace::fallback_count() const {
  return static_cast<int>(std::count_if(merges.begin(), merges.end(), [](const MergeStep& m) { return m.fallback; }));
}

int terminal_count(int n_parts, double ratio) {
  return std::max(1, static_cast<int>(std::lround(n_parts * ratio)));
}

std::vector<std::size_t> weighted_sample(const std::vector<double>& weights, std::size_t k, Rng& rng) {
  struct Key {
    int group;  // 0 for positive weight, 1 for zero weight
    double key;
    std::size_t index;
  };
  std::vector<Key> keys;
  keys.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    if (weights[i] > 0.0) {
      keys.push_back({0, std::log(u) / weights[i], i});
    } else {
      keys.push_back({1, u, i});
    }
  }
  k = std::min(k, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                    [](const Key& a, const Key& b) {
                      if (a.group != b.group) return a.group < b.group;
                      if (a.key != b.key) return a.key > b.key;
                      return a.index < b.index;
                    });
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(keys[i].index);
  return out;
}

void annotate_terminals(LayoutInstance& layout, int n_terms, double slack, Rng& rng, GenerationTrace* trace) {
  if (n_terms < 1) throw GenerationError("terminal count must be at least 1");
  const FixedOutline& ol = layout.outline;
  // Positions are counted in half-grid units around the perimeter.
  const std::size_t slots = static_cast<std::size_t>(2 * ol.perimeter());
  const double pitch = static_cast<double>(ol.perimeter()) / n_terms;

  constexpr int kRestartsPerSlack = 20;
  double alpha = slack;
  int restarts = 0;
  for (;;) {
    const double required = alpha * pitch;
    std::vector<bool> blocked(slots, false);
    std::vector<std::size_t> chosen;
    while (chosen.size() < static_cast<std::size_t>(n_terms)) {
      const auto free = static_cast<std::size_t>(std::count(blocked.begin(), blocked.end(), false));
      if (free == 0) break;
      auto pick = uniform_int<std::size_t>(rng, 0, free - 1);
      std::size_t k = 0;
      for (;; ++k) {
        if (!blocked[k] && pick-- == 0) break;
      }
      chosen.push_back(k);
      for (std::size_t o = 0; o < slots && 0.5 * static_cast<double>(o) < required; ++o) {
        blocked[(k + o) % slots] = true;
        blocked[(k + slots - o) % slots] = true;
      }
    }
    if (chosen.size() == static_cast<std::size_t>(n_terms)) {
      layout.terminals.clear();
      for (int i = 0; i < n_terms; ++i) {
        const double s = 0.5 * static_cast<double>(chosen[static_cast<std::size_t>(i)]);
        layout.terminals.push_back({i, terminal_name(i), point_at_perimeter(ol, s)});
      }
      if (trace) {
        trace->terminal_restarts += restarts;
        trace->terminal_slack = alpha;
        if (alpha < slack) {
          trace->notes.push_back("terminal pitch slack relaxed to " + std::to_string(alpha));
        }
      }
      return;
    }
    ++restarts;
    if (restarts % kRestartsPerSlack == 0) alpha *= 0.9;
  }
}

int b2b_net_count(int n_parts, double density) {
  return static_cast<int>(std::lround(density * n_parts * (n_parts - 1) / 2.0));
}

int t2b_net_count(int n_parts, int n_terms, double density) {
  return static_cast<int>(std::lround(density * n_parts * n_terms));
}

namespace {

std::vector<double> similarities(const std::vector<double>& distances) {
  const double dmax = distances.empty() ? 0.0 : *std::max_element(distances.begin(), distances.end());
  std::vector<double> sim(distances.size(), 1.0);
  if (dmax > 0.0) {
    for (std::size_t i = 0; i < distances.size(); ++i) sim[i] = 1.0 - distances[i] / dmax;
  }
  return sim;
}

std::size_t clamp_count(int requested, std::size_t available, const char* what, GenerationTrace* trace) {
  const auto n = static_cast<std::size_t>(std::max(requested, 0));
  if (n > available) {
    if (trace) {
      trace->notes.push_back(std::string(what) + " net count clamped from " + std::to_string(n) + " to " +
                             std::to_string(available));
    }
    return available;
  }
  return n;
}

}  // namespace

void annotate_nets(LayoutInstance& layout, double part_density, double term_density, const WeightModel& weights,
                   Rng& rng, GenerationTrace* trace) {
  const auto& parts = layout.partitions;
  const int n = static_cast<int>(parts.size());
  const double circumference = static_cast<double>(layout.outline.perimeter());
  layout.nets.clear();

  std::vector<PointD> centers;
  for (const auto& p : parts) centers.push_back(p.center());

  std::vector<std::pair<int, int>> pairs;
  std::vector<double> dist;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      pairs.push_back({i, j});
      dist.push_back(manhattan_distance(centers[static_cast<std::size_t>(i)], centers[static_cast<std::size_t>(j)]));
    }
  }
  const std::size_t n_b2b = clamp_count(b2b_net_count(n, part_density), pairs.size(), "b2b", trace);
  auto picked = weighted_sample(similarities(dist), n_b2b, rng);
  std::sort(picked.begin(), picked.end());
  for (std::size_t k : picked) {
    const double w = sample_net_weight(weights, dist[k] / circumference, rng);
    layout.nets.push_back({NetKind::BlockToBlock, pairs[k].first, pairs[k].second, w});
  }

  const int n_terms = static_cast<int>(layout.terminals.size());
  pairs.clear();
  dist.clear();
  for (int t = 0; t < n_terms; ++t) {
    for (int p = 0; p < n; ++p) {
      pairs.push_back({t, p});
      dist.push_back(manhattan_distance(layout.terminals[static_cast<std::size_t>(t)].position,
                                        centers[static_cast<std::size_t>(p)]));
    }
  }
  const std::size_t n_t2b = clamp_count(t2b_net_count(n, n_terms, term_density), pairs.size(), "t2b", trace);
  picked = weighted_sample(similarities(dist), n_t2b, rng);
  std::sort(picked.begin(), picked.end());
  for (std::size_t k : picked) {
    layout.nets.push_back({NetKind::TerminalToBlock, pairs[k].first, pairs[k].second, 1.0});
  }
}

std::vector<std::pair<int, int>> abutment_pairs(const std::vector<Partition>& partitions) {
  std::vector<Rect> boxes;
  for (const auto& p : partitions) boxes.push_back(p.shape.bbox());
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    for (std::size_t j = i + 1; j < partitions.size(); ++j) {
      const Rect& a = boxes[i];
      const Rect& b = boxes[j];
      const Coord ox = std::min(a.xh, b.xh) - std::max(a.xl, b.xl);
      const Coord oy = std::min(a.yh, b.yh) - std::max(a.yl, b.yl);
      // Boxes must meet along a segment of positive length.
      if (ox < 0 || oy < 0 || (ox == 0 && oy == 0)) continue;
      if (shared_edge(partitions[i].shape, partitions[j].shape) > 0) {
        out.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return out;
}

void annotate_shape_ranges(LayoutInstance& layout) {
  layout.constraints.shape_range.clear();
  for (const auto& p : layout.partitions) {
    const double r = bbox_aspect(p.shape);
    layout.constraints.shape_range[p.id] = {r / (1.0 + kShapeRangeSlack), r * (1.0 + kShapeRangeSlack)};
  }
}

namespace {

void annotate_boundary(LayoutInstance& layout, double fraction, Rng& rng, GenerationTrace* trace) {
  const FixedOutline& ol = layout.outline;
  const int n = static_cast<int>(layout.partitions.size());
  std::vector<double> incident(static_cast<std::size_t>(n), 0.0);
  for (const auto& net : layout.nets) {
    incident[static_cast<std::size_t>(net.second)] += net.weight;
    if (net.kind == NetKind::BlockToBlock) incident[static_cast<std::size_t>(net.first)] += net.weight;
  }

  std::vector<int> edge_parts;
  for (const auto& p : layout.partitions) {
    const Rect b = p.shape.bbox();
    if (b.xl == 0 || b.yl == 0 || b.xh == ol.width || b.yh == ol.height) edge_parts.push_back(p.id);
  }
  std::vector<double> cdist;
  for (int id : edge_parts) cdist.push_back(incident[static_cast<std::size_t>(id)]);
  if (std::all_of(cdist.begin(), cdist.end(), [](double w) { return w == 0.0; })) {
    std::fill(cdist.begin(), cdist.end(), 1.0);
  }

  auto want = static_cast<std::size_t>(std::lround(n * fraction));
  if (want > edge_parts.size()) {
    if (trace) trace->notes.push_back("boundary quota reduced to " + std::to_string(edge_parts.size()));
    want = edge_parts.size();
  }
  for (std::size_t k : weighted_sample(cdist, want, rng)) {
    const auto& p = layout.partitions[static_cast<std::size_t>(edge_parts[k])];
    const Rect b = p.shape.bbox();
    std::vector<unsigned> corners, edges;
    for (unsigned h : {kLeft, kRight}) {
      for (unsigned v : {kBottom, kTop}) {
        const Point c{h == kLeft ? 0 : ol.width, v == kBottom ? 0 : ol.height};
        if (std::find(p.shape.vertices().begin(), p.shape.vertices().end(), c) != p.shape.vertices().end()) {
          corners.push_back(h | v);
        }
      }
    }
    if (b.xl == 0) edges.push_back(kLeft);
    if (b.xh == ol.width) edges.push_back(kRight);
    if (b.yh == ol.height) edges.push_back(kTop);
    if (b.yl == 0) edges.push_back(kBottom);
    const auto& options = corners.empty() ? edges : corners;
    layout.constraints.boundary[p.id] = options[uniform_int<std::size_t>(rng, 0, options.size() - 1)];
  }
}

void annotate_preplaced(LayoutInstance& layout, double fraction, Rng& rng) {
  const FixedOutline& ol = layout.outline;
  const int n = static_cast<int>(layout.partitions.size());
  std::vector<double> edist;
  for (const auto& p : layout.partitions) {
    const Rect b = p.shape.bbox();
    const Coord d = std::min({b.xl, b.yl, ol.width - b.xh, ol.height - b.yh});
    edist.push_back(1.0 / static_cast<double>(std::max<Coord>(d, 1)));
  }
  const auto want = static_cast<std::size_t>(std::lround(n * fraction));
  for (std::size_t k : weighted_sample(edist, want, rng)) {
    const Rect b = layout.partitions[k].shape.bbox();
    layout.constraints.preplaced[static_cast<int>(k)] = {static_cast<double>(b.xl), static_cast<double>(b.yl)};
  }
}

void annotate_clusters(LayoutInstance& layout, double fraction, int cluster_count, Rng& rng,
                       GenerationTrace* trace) {
  const int n = static_cast<int>(layout.partitions.size());
  const int n_clustered = static_cast<int>(std::lround(n * fraction));
  if (n_clustered < 2) return;

  std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(n));
  for (auto [a, b] : abutment_pairs(layout.partitions)) {
    neighbours[static_cast<std::size_t>(a)].push_back(b);
    neighbours[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (const auto& [id, tag] : layout.constraints.boundary) taken[static_cast<std::size_t>(id)] = true;
  for (const auto& [id, at] : layout.constraints.preplaced) taken[static_cast<std::size_t>(id)] = true;

  std::vector<int> free_ids;
  for (int i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) free_ids.push_back(i);
  }
  const int k = std::clamp(cluster_count, 1, n_clustered / 2);
  const int target = (n_clustered + k - 1) / k;

  std::vector<std::vector<int>> clusters;
  for (std::size_t s : weighted_sample(std::vector<double>(free_ids.size(), 1.0), static_cast<std::size_t>(k), rng)) {
    clusters.push_back({free_ids[s]});
    taken[static_cast<std::size_t>(free_ids[s])] = true;
  }
  int total = static_cast<int>(clusters.size());
  for (auto& cluster : clusters) {
    while (static_cast<int>(cluster.size()) < target && total < n_clustered) {
      std::set<int> frontier;
      for (int m : cluster) {
        for (int nb : neighbours[static_cast<std::size_t>(m)]) {
          if (!taken[static_cast<std::size_t>(nb)]) frontier.insert(nb);
        }
      }
      if (frontier.empty()) break;
      auto it = frontier.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(uniform_int<std::size_t>(rng, 0, frontier.size() - 1)));
      cluster.push_back(*it);
      taken[static_cast<std::size_t>(*it)] = true;
      ++total;
    }
  }
  int placed = 0;
  for (auto& cluster : clusters) {
    if (cluster.size() < 2) continue;
    std::sort(cluster.begin(), cluster.end());
    placed += static_cast<int>(cluster.size());
    layout.constraints.clusters.push_back(std::move(cluster));
  }
  std::sort(layout.constraints.clusters.begin(), layout.constraints.clusters.end());
  if (placed < n_clustered && trace) {
    trace->notes.push_back("clustered " + std::to_string(placed) + " of " + std::to_string(n_clustered) +
                           " requested partitions");
  }
}

void annotate_multi_inst(LayoutInstance& layout, double fraction, Rng& rng, GenerationTrace* trace) {
  const int n = static_cast<int>(layout.partitions.size());
  int remaining = static_cast<int>(std::lround(n * fraction));
  if (remaining < 2) return;

  // Bucket by cheap invariants before the pairwise congruence test.
  std::map<std::tuple<Coord, std::size_t, Coord, Coord>, std::vector<int>> buckets;
  for (const auto& p : layout.partitions) {
    const Rect b = p.shape.bbox();
    buckets[{p.area, p.shape.size(), std::min(b.width(), b.height()), std::max(b.width(), b.height())}].push_back(p.id);
  }
  std::vector<std::vector<int>> classes;
  for (auto& [key, ids] : buckets) {
    std::vector<bool> used(ids.size(), false);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (used[i]) continue;
      std::vector<int> cls{ids[i]};
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (!used[j] && congruent(layout.partitions[static_cast<std::size_t>(ids[i])].shape,
                                  layout.partitions[static_cast<std::size_t>(ids[j])].shape)) {
          used[j] = true;
          cls.push_back(ids[j]);
        }
      }
      if (cls.size() >= 2) classes.push_back(std::move(cls));
    }
  }

  for (std::size_t c : weighted_sample(std::vector<double>(classes.size(), 1.0), classes.size(), rng)) {
    if (remaining < 2) break;
    const auto& cls = classes[c];
    const auto m = std::min(cls.size(), static_cast<std::size_t>(remaining));
    std::vector<int> group;
    for (std::size_t s : weighted_sample(std::vector<double>(cls.size(), 1.0), m, rng)) group.push_back(cls[s]);
    std::sort(group.begin(), group.end());
    remaining -= static_cast<int>(m);
    layout.constraints.multi_inst.push_back(std::move(group));
  }
  std::sort(layout.constraints.multi_inst.begin(), layout.constraints.multi_inst.end());
  if (remaining > 0 && trace) {
    trace->multi_inst_shortfall += remaining;
    trace->notes.push_back("multi-instantiation quota short by " + std::to_string(remaining));
  }
}

}  // namespace

void annotate_constraints(LayoutInstance& layout, const ConstraintFractions& fractions, Rng& rng,
                          GenerationTrace* trace) {
  layout.constraints = {};
  annotate_boundary(layout, fractions.boundary, rng, trace);
  annotate_preplaced(layout, fractions.preplaced, rng);
  annotate_clusters(layout, fractions.cluster, fractions.cluster_count, rng, trace);
  annotate_multi_inst(layout, fractions.multi_inst, rng, trace);
  annotate_shape_ranges(layout);
}

}  // namespace floorset
