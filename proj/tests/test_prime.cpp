#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "floorset/metrics.hpp"
#include "floorset/prime.hpp"

using namespace floorset;

namespace {

GenConfig small_config(int n_parts, bool rectilinear = true) {
  GenConfig c;
  c.outline.width = {60, 120};
  c.outline.height = {60, 120};
  c.num_partitions = {n_parts, n_parts};
  c.rectilinear = rectilinear;
  c.seed = 5;
  return c;
}

LayoutInstance from_rects(FixedOutline outline, const std::vector<Rect>& rects) {
  LayoutInstance l;
  l.outline = outline;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const int id = static_cast<int>(i);
    l.partitions.emplace_back(id, partition_name(id), RectilinearPolygon::from_rect(rects[i]));
  }
  return l;
}

void check_tiling(const LayoutInstance& l) {
  Coord total = 0;
  for (const auto& p : l.partitions) total += p.area;
  CHECK(total == l.outline.area());
  for (std::size_t i = 0; i < l.partitions.size(); ++i) {
    for (std::size_t j = i + 1; j < l.partitions.size(); ++j) {
      CHECK(overlap_area(l.partitions[i].shape, l.partitions[j].shape) == 0);
    }
  }
}

}  // namespace

TEST_CASE("create_mesh cell counts") {
  Rng rng(1);
  const FixedOutline ol{200, 200};
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = create_mesh(20, ol, rng);
    CHECK(g.cells.size() >= 80);
    CHECK(g.cells.size() <= 120);
    CHECK(g.cells.size() == static_cast<std::size_t>(g.columns() * g.rows()));
    Coord total = 0;
    for (const auto& c : g.cells) total += c.area();
    CHECK(total == ol.area());
    CHECK(std::adjacent_find(g.x_cuts.begin(), g.x_cuts.end()) == g.x_cuts.end());
    CHECK(std::is_sorted(g.x_cuts.begin(), g.x_cuts.end()));
    CHECK(g.x_cuts.front() > 0);
    CHECK(g.x_cuts.back() < ol.width);
    CHECK(g.adjacency.size() ==
          static_cast<std::size_t>((g.columns() - 1) * g.rows() + g.columns() * (g.rows() - 1)));
  }
}

TEST_CASE("grid dimensions nearest to square") {
  // Oracle: enumerate all factor pairs of 8 and keep those closest to square.
  const auto d = grid_dimensions(8, {10, 10});
  REQUIRE(d);
  int best = 100;
  std::set<std::pair<int, int>> nearest;
  for (int c = 1; c <= 8; ++c) {
    if (8 % c) continue;
    const int gap = std::abs(c - 8 / c);
    if (gap < best) nearest.clear(), best = gap;
    if (gap == best) nearest.insert({c, 8 / c});
  }
  CHECK(nearest.count(*d) == 1);
  CHECK(d->first * d->second == 8);

  Rng rng(3);
  const auto g = create_mesh_cells(8, 8, 12, {10, 10}, rng);
  CHECK(g.cells.size() >= 8);
}

TEST_CASE("create_mesh on a tiny outline fails") {
  Rng rng(1);
  CHECK_THROWS_AS(create_mesh(25, {4, 4}, rng), GeometryError);
}

TEST_CASE("merge_partitions identity when counts match") {
  Rng rng(2);
  const auto g = create_mesh_cells(8, 8, 8, {40, 20}, rng);
  REQUIRE(g.cells.size() == 8);
  GenerationTrace trace;
  const std::vector<double> target{1.0};
  const auto parts = merge_partitions(g, 8, target, true, rng, &trace);
  CHECK(parts.size() == 8);
  CHECK(trace.merges.empty());
}

TEST_CASE("merge 2x2 unit grid into three rectangles") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto g = create_mesh_cells(4, 4, 4, {2, 2}, rng);
    const std::vector<double> target{0.5, 1.0, 2.0};
    const auto parts = merge_partitions(g, 3, target, false, rng);
    REQUIRE(parts.size() == 3);
    std::multiset<Coord> areas;
    for (const auto& p : parts) {
      CHECK(is_rectangle(p.shape));
      areas.insert(p.area);
    }
    CHECK(areas == std::multiset<Coord>{1, 1, 2});
  }
}

TEST_CASE("merge acceptance matches brute-force oracle") {
  // 3x3 outline cut at 1 gives cells 1x1, 2x1, 1x2 and 2x2.
  const std::vector<std::vector<double>> targets{{1.0}, {0.5, 1.0, 2.0}, {2.0, 2.0}, {0.25}, {1.0, 3.0}};
  for (const auto& tgt : targets) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      auto g = create_mesh_cells(4, 4, 4, {3, 3}, rng);
      std::vector<double> base;
      for (const auto& c : g.cells) base.push_back(static_cast<double>(c.width()) / static_cast<double>(c.height()));
      const double w0 = wasserstein_1d(base, tgt);

      // Enumerate every legal merge and its resulting W1.
      std::vector<std::pair<std::multiset<Coord>, double>> candidates;
      for (auto [a, b] : g.adjacency) {
        const auto u = merge_adjacent(RectilinearPolygon::from_rect(g.cells[static_cast<std::size_t>(a)]),
                                      RectilinearPolygon::from_rect(g.cells[static_cast<std::size_t>(b)]));
        std::vector<double> ars{bbox_aspect(u)};
        std::multiset<Coord> areas{polygon_area(u)};
        for (std::size_t k = 0; k < g.cells.size(); ++k) {
          if (static_cast<int>(k) == a || static_cast<int>(k) == b) continue;
          ars.push_back(base[k]);
          areas.insert(g.cells[k].area());
        }
        candidates.push_back({areas, wasserstein_1d(ars, tgt)});
      }
      double best = 1e9;
      for (const auto& c : candidates) best = std::min(best, c.second);

      GenerationTrace trace;
      const auto parts = merge_partitions(g, 3, tgt, true, rng, &trace);
      REQUIRE(trace.merges.size() == 1);
      const double w1 = trace.merges[0].w1_after;
      CHECK(trace.merges[0].w1_before == doctest::Approx(w0));
      std::vector<double> realized;
      for (const auto& p : parts) realized.push_back(bbox_aspect(p.shape));
      CHECK(wasserstein_1d(realized, tgt) == doctest::Approx(w1));
      if (best < w0) {
        CHECK(w1 < w0);
        CHECK_FALSE(trace.merges[0].fallback);
      } else {
        CHECK(trace.merges[0].fallback);
        CHECK(w1 == doctest::Approx(best));
      }
    }
  }
}

TEST_CASE("merge monotonicity outside fallbacks") {
  Rng rng(9);
  const auto target = target_quantiles(TargetDistributions::defaults().aspect, 256);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = create_mesh(15, {150, 100}, rng);
    GenerationTrace trace;
    const auto parts = merge_partitions(g, 15, target, true, rng, &trace);
    CHECK(parts.size() == 15);
    for (std::size_t i = 0; i < trace.merges.size(); ++i) {
      if (!trace.merges[i].fallback) CHECK(trace.merges[i].w1_after < trace.merges[i].w1_before);
      if (i + 1 < trace.merges.size()) CHECK(trace.merges[i].w1_after == trace.merges[i + 1].w1_before);
    }
    CHECK(trace.final_w1 < trace.initial_w1);
  }
}

TEST_CASE("weighted_sample frequencies") {
  const std::vector<double> w{3.0, 1.0, 0.0};
  std::map<std::size_t, int> first;
  Rng rng(4);
  const int runs = 20000;
  for (int i = 0; i < runs; ++i) {
    const auto s = weighted_sample(w, 3, rng);
    REQUIRE(s.size() == 3);
    CHECK(s[2] == 2);  // zero weight drawn last
    ++first[s[0]];
  }
  // P(first = 0) = 3/4; binomial sigma ~ 0.003.
  CHECK(static_cast<double>(first[0]) / runs == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("terminal pitch") {
  const FixedOutline ol{10, 10};
  CHECK(static_cast<double>(ol.perimeter()) / 8 == 5.0);

  for (int n_terms : {1, 4, 8, 20}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      LayoutInstance l;
      l.outline = ol;
      Rng rng(seed);
      GenerationTrace trace;
      annotate_terminals(l, n_terms, 0.5, rng, &trace);
      REQUIRE(l.terminals.size() == static_cast<std::size_t>(n_terms));
      const double required = 0.5 * (2.0 * (10 + 10) / n_terms);
      for (std::size_t i = 0; i < l.terminals.size(); ++i) {
        const PointD p = l.terminals[i].position;
        CHECK(on_perimeter(ol, p));
        CHECK(std::fmod(p.x * 2, 1.0) == 0.0);
        CHECK(std::fmod(p.y * 2, 1.0) == 0.0);
        for (std::size_t j = i + 1; j < l.terminals.size(); ++j) {
          const double d = perimeter_distance(ol, perimeter_position(ol, p), perimeter_position(ol, l.terminals[j].position));
          CHECK(d >= required);
        }
      }
      CHECK(trace.terminal_slack == 0.5);
    }
  }
}

TEST_CASE("net counts follow density") {
  CHECK(b2b_net_count(20, 0.1) == 19);
  CHECK(b2b_net_count(2, 1.0) == 1);
  CHECK(t2b_net_count(10, 5, 0.1) == 5);

  Rng rng(1);
  auto g = create_mesh_cells(20, 20, 20, {50, 40}, rng);
  LayoutInstance l;
  l.outline = g.outline;
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    l.partitions.emplace_back(static_cast<int>(i), partition_name(static_cast<int>(i)), RectilinearPolygon::from_rect(g.cells[i]));
  }
  annotate_terminals(l, 6, 0.5, rng);
  annotate_nets(l, 0.1, 0.2, TargetDistributions::defaults().net_weight, rng);
  // Oracle: nonzero entries of the emitted upper-triangular adjacency matrix.
  std::set<std::pair<int, int>> b2b, t2b;
  for (const auto& n : l.nets) {
    CHECK(n.weight > 0.0);
    CHECK(n.weight <= 1.0);
    if (n.kind == NetKind::BlockToBlock) {
      CHECK(n.first < n.second);
      b2b.insert({n.first, n.second});
    } else {
      CHECK(n.weight == 1.0);
      t2b.insert({n.first, n.second});
    }
  }
  CHECK(b2b.size() == 19);
  CHECK(t2b.size() == 24);
  CHECK(l.b2b_count() == 19);
}

TEST_CASE("two partitions with full density") {
  Rng rng(1);
  auto l = from_rects({4, 2}, {{0, 0, 2, 2}, {2, 0, 4, 2}});
  annotate_terminals(l, 1, 0.5, rng);
  annotate_nets(l, 1.0, 0.0, dist::Constant{0.5}, rng);
  REQUIRE(l.nets.size() == 1);
  CHECK(l.nets[0] == Net{NetKind::BlockToBlock, 0, 1, 0.5});
}

TEST_CASE("similarity sampling prefers near pairs") {
  // A=[0,1], B=[1,2], C=[2,10]: distances AB=1, BC=4.5, AC=5.5.
  const auto base = from_rects({10, 1}, {{0, 0, 1, 1}, {1, 0, 2, 1}, {2, 0, 10, 1}});
  std::map<std::pair<int, int>, int> freq;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    auto l = base;
    Rng rng(static_cast<std::uint64_t>(i));
    l.terminals = {{0, terminal_name(0), {0, 0}}};
    annotate_nets(l, 1.0 / 3.0, 0.0, dist::Constant{1.0}, rng);
    REQUIRE(l.nets.size() == 1);
    ++freq[{l.nets[0].first, l.nets[0].second}];
  }
  CHECK(freq[{0, 1}] > freq[{0, 2}]);
  // Exact single-draw probabilities: sim AB = 1 - 1/5.5, BC = 1 - 4.5/5.5, AC = 0.
  const double p_ab = (1 - 1 / 5.5) / ((1 - 1 / 5.5) + (1 - 4.5 / 5.5));
  CHECK(static_cast<double>(freq[{0, 1}]) / runs == doctest::Approx(p_ab).epsilon(0.02));
  CHECK(freq[{0, 2}] == 0);
}

TEST_CASE("constraint annotation on a unit grid") {
  auto l = from_rects({2, 2}, {{0, 0, 1, 1}, {1, 0, 2, 1}, {0, 1, 1, 2}, {1, 1, 2, 2}});
  Rng rng(8);
  ConstraintFractions f;
  f.multi_inst = 0.5;
  annotate_constraints(l, f, rng);
  CHECK(l.constraints.boundary.empty());
  CHECK(l.constraints.preplaced.empty());
  CHECK(l.constraints.clusters.empty());
  REQUIRE(l.constraints.multi_inst.size() == 1);
  CHECK(l.constraints.multi_inst[0].size() == 2);
  CHECK(l.constraints.shape_range.size() == 4);
  CHECK(l.constraints.shape_range.at(0) == AspectRange{0.8, 1.25});
}

TEST_CASE("corner partitions get corner tags") {
  auto l = from_rects({2, 2}, {{0, 0, 1, 1}, {1, 0, 2, 1}, {0, 1, 1, 2}, {1, 1, 2, 2}});
  Rng rng(8);
  ConstraintFractions f;
  f.boundary = 1.0;
  annotate_constraints(l, f, rng);
  REQUIRE(l.constraints.boundary.size() == 4);
  CHECK(l.constraints.boundary.at(0) == (kLeft | kBottom));
  CHECK(l.constraints.boundary.at(1) == (kRight | kBottom));
  CHECK(l.constraints.boundary.at(2) == (kLeft | kTop));
  CHECK(l.constraints.boundary.at(3) == (kRight | kTop));
  CHECK(count_violations(l).total() == 0);
}

TEST_CASE("generate_prime two rectangles") {
  GenConfig c;
  c.outline.width = {4, 4};
  c.outline.height = {4, 4};
  c.num_partitions = {2, 2};
  c.rectilinear = false;
  const auto r = generate_prime(c, TargetDistributions::defaults(), 0);
  REQUIRE(r.layout);
  CHECK(r.layout->partitions.size() == 2);
  for (const auto& p : r.layout->partitions) CHECK(is_rectangle(p.shape));
  check_tiling(*r.layout);
}

TEST_CASE("generate_prime invariants") {
  for (bool rect : {true, false}) {
    for (int n : {5, 12, 30}) {
      const auto config = small_config(n, rect);
      for (std::uint64_t i = 0; i < 6; ++i) {
        const auto r = generate_prime(config, TargetDistributions::defaults(), i);
        REQUIRE_MESSAGE(r.layout, r.error);
        const auto& l = *r.layout;
        CHECK(l.partitions.size() == static_cast<std::size_t>(n));
        check_tiling(l);
        if (!rect) {
          for (const auto& p : l.partitions) CHECK(is_rectangle(p.shape));
        }
        const auto v = count_violations(l);
        CHECK(v.total() == 0);
        CHECK_FALSE(v.overflow);
        CHECK(l.labels == compute_labels(l));
        CHECK(l.provenance == Provenance{config.seed, i, DatasetMode::Prime});

        // Clusters connected, groups congruent, sets disjoint.
        std::set<int> seen;
        for (const auto& cl : l.constraints.clusters) {
          for (int id : cl) CHECK(seen.insert(id).second);
        }
        seen.clear();
        for (const auto& g : l.constraints.multi_inst) {
          CHECK(g.size() >= 2);
          for (int id : g) {
            CHECK(seen.insert(id).second);
            CHECK(congruent(l.partitions[static_cast<std::size_t>(id)].shape,
                            l.partitions[static_cast<std::size_t>(g[0])].shape));
          }
        }
        std::set<std::pair<int, int>> nets;
        for (const auto& net : l.nets) {
          CHECK(nets.insert({net.kind == NetKind::BlockToBlock ? net.first : -1 - net.first, net.second}).second);
        }
      }
    }
  }
}

TEST_CASE("generate_prime is deterministic") {
  const auto config = small_config(20);
  const auto a = generate_prime(config, TargetDistributions::defaults(), 3);
  const auto b = generate_prime(config, TargetDistributions::defaults(), 3);
  const auto c = generate_prime(config, TargetDistributions::defaults(), 4);
  REQUIRE(a.layout);
  REQUIRE(c.layout);
  CHECK(*a.layout == *b.layout);
  CHECK_FALSE(*a.layout == *c.layout);
}

TEST_CASE("placement constraints disabled") {
  auto config = small_config(10);
  config.placement_constraints = false;
  const auto r = generate_prime(config, TargetDistributions::defaults(), 0);
  REQUIRE(r.layout);
  CHECK(r.layout->constraints.placement_empty());
  CHECK(r.layout->constraints.shape_range.size() == 10);
}
