#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "floorset/metrics.hpp"
#include "floorset/prime.hpp"
#include "floorset/sa.hpp"

using namespace floorset;

namespace {

SAProblem squares(std::size_t n, double side = 1.0) {
  SAProblem p;
  for (std::size_t i = 0; i < n; ++i) p.blocks.push_back({{{side, side}}, false, std::nullopt});
  return p;
}

SAProblem random_problem(Rng& rng, std::size_t n, bool with_fixed) {
  SAProblem p;
  for (std::size_t i = 0; i < n; ++i) {
    SABlock b;
    const int k = uniform_int(rng, 1, 3);
    for (int j = 0; j < k; ++j) b.options.push_back({uniform_real(rng, 0.5, 4.0), uniform_real(rng, 0.5, 4.0)});
    b.allow_rotation = uniform_int(rng, 0, 1) == 1;
    p.blocks.push_back(std::move(b));
  }
  if (with_fixed) {
    p.blocks[0].fixed = PointD{3.0, 2.0};
    p.blocks[1].fixed = PointD{0.5, 6.0};
    p.blocks[0].options.resize(1);
    p.blocks[1].options.resize(1);
  }
  return p;
}

double overlap(const PlacedRect& a, const PlacedRect& b) {
  const double w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  return w > 0 && h > 0 ? w * h : 0.0;
}

bool overlap_free(const PlacementSolution& s) {
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < s.blocks.size(); ++j) {
      if (overlap(s.blocks[i], s.blocks[j]) > 1e-9) return false;
    }
  }
  return true;
}

BStarTree chain(std::vector<int> blocks, std::vector<char> is_left) {
  // Slot i+1 hangs under slot i as its left (true) or right (false) child.
  BStarTree t;
  const std::size_t m = blocks.size();
  t.block = std::move(blocks);
  t.parent.assign(m, -1);
  t.left.assign(m, -1);
  t.right.assign(m, -1);
  t.root = 0;
  for (std::size_t i = 1; i < m; ++i) {
    (is_left[i - 1] ? t.left : t.right)[i - 1] = static_cast<int>(i);
    t.parent[i] = static_cast<int>(i) - 1;
  }
  t.shape.assign(m, 0);
  t.rotated.assign(m, 0);
  return t;
}

CostFunction bbox_cost() {
  return [](const PlacementSolution& s) {
    CostBreakdown c;
    c.area_term = s.bbox_area();
    c.total = c.area_term;
    return c;
  };
}

GenConfig prime_config(int n) {
  GenConfig c;
  c.outline.width = {60, 90};
  c.outline.height = {60, 90};
  c.num_partitions = {n, n};
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("decode places children right of and above their parent") {
  SAProblem p;
  p.blocks = {{{{2, 1}}, false, {}}, {{{1, 1}}, false, {}}, {{{3, 2}}, false, {}}};
  SUBCASE("single block at the origin") {
    const auto s = decode(chain({0}, {}), squares(1));
    CHECK(s.blocks[0] == PlacedRect{0, 0, 1, 1, 0});
  }
  SUBCASE("left child") {
    const auto s = decode(chain({0, 1}, {1}), p);
    CHECK(s.blocks[1].x == 2.0);
    CHECK(s.blocks[1].y == 0.0);
  }
  SUBCASE("right child sits on the contour") {
    const auto s = decode(chain({0, 1, 2}, {1, 0}), p);
    // 2 is the right child of 1: same x as 1, above it.
    CHECK(s.blocks[2].x == 2.0);
    CHECK(s.blocks[2].y == 1.0);
    CHECK(s.bbox_w == 5.0);
    CHECK(s.bbox_h == 3.0);
  }
  SUBCASE("rotation swaps the dimensions") {
    auto t = chain({0}, {});
    t.rotated[0] = 1;
    SAProblem one;
    one.blocks = {{{{2, 1}}, true, {}}};
    const auto s = decode(t, one);
    CHECK(s.blocks[0].w == 1.0);
    CHECK(s.blocks[0].h == 2.0);
    CHECK(s.blocks[0].orientation == 1);
  }
}

TEST_CASE("fixed blocks stay put and push movable blocks up") {
  SAProblem p = squares(3, 2.0);
  p.blocks[0].fixed = PointD{1.0, 0.0};
  const auto s = decode(chain({1, 2}, {1}), p);
  CHECK(s.blocks[0].x == 1.0);
  CHECK(s.blocks[0].y == 0.0);
  CHECK(s.blocks[1].y == 2.0);
  CHECK(overlap_free(s));
}

TEST_CASE("perturb keeps the tree valid and decode overlap-free") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 12));
    const SAProblem p = random_problem(rng, n, trial % 2 == 1);
    BStarTree t = BStarTree::initial(p);
    REQUIRE(t.valid());
    std::set<MoveKind> kinds;
    for (int k = 0; k < 300; ++k) {
      kinds.insert(perturb(t, p, rng));
      REQUIRE(t.valid());
      const auto s = decode(t, p);
      REQUIRE(overlap_free(s));
      for (std::size_t b = 0; b < n; ++b) {
        if (p.blocks[b].fixed) {
          CHECK(s.blocks[b].x == p.blocks[b].fixed->x);
          CHECK(s.blocks[b].y == p.blocks[b].fixed->y);
        }
      }
    }
    CHECK(kinds.size() == 3);
  }
}

TEST_CASE("zero temperature only accepts improvements") {
  Rng rng(4);
  const SAProblem p = random_problem(rng, 8, false);
  SAParams params;
  params.initial_temperature = 1e-300;
  params.moves_per_block = 20;
  params.cooling = 0.5;
  params.stop_ratio = 0.1;
  const auto r = anneal(p, BStarTree::initial(p), bbox_cost(), params, rng, true);
  REQUIRE(r.trajectory.size() >= 2);
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) CHECK(r.trajectory[i].total <= r.trajectory[i - 1].total);
  CHECK(r.best.cost.total == doctest::Approx(r.trajectory.back().total));
  CHECK(r.best.cost.total <= r.initial_cost);
}

TEST_CASE("four unit squares pack into a 2x2 square") {
  const SAProblem p = squares(4);
  SAParams params;
  params.moves_per_block = 20;
  int optimal = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng = make_stream(seed, 0);
    const auto r = anneal(p, BStarTree::initial(p), bbox_cost(), params, rng);
    if (std::abs(r.best.bbox_area() - 4.0) < 1e-9) ++optimal;
  }
  CHECK(optimal >= 95);
}

TEST_CASE("annealing is deterministic per stream") {
  Rng a(9), b(9), g(2);
  const SAProblem p = random_problem(g, 10, true);
  const auto ra = anneal(p, BStarTree::initial(p), bbox_cost(), SAParams{}, a);
  const auto rb = anneal(p, BStarTree::initial(p), bbox_cost(), SAParams{}, b);
  CHECK(ra.best.blocks == rb.best.blocks);
  CHECK(ra.steps == rb.steps);
}

TEST_CASE("early stop predicate") {
  Rng rng(3);
  const SAProblem p = squares(6);
  const auto r = anneal(p, BStarTree::initial(p), bbox_cost(), SAParams{}, rng, false,
                        [](const CostBreakdown& c) { return c.total <= 8.0; });
  CHECK(r.best.cost.total <= 8.0);
}

TEST_CASE("rerank picks the weighted minimum") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CostBreakdown> traj(static_cast<std::size_t>(uniform_int(rng, 1, 12)));
    for (auto& c : traj) {
      // Coarse values so ties happen.
      c.area_term = uniform_int(rng, 0, 3);
      c.wl_term = uniform_int(rng, 0, 3);
      c.violations.shape = uniform_int(rng, 0, 2);
      c.violations.boundary = uniform_int(rng, 0, 1);
    }
    const double wa = uniform_int(rng, 0, 2), ww = uniform_int(rng, 0, 2), wv = uniform_int(rng, 0, 2);
    const std::size_t got = rerank(traj, wa, ww, wv);
    // Oracle: lexicographic (score, violations, index).
    std::size_t want = 0;
    auto key = [&](std::size_t i) {
      const auto& c = traj[i];
      return std::tuple(wa * c.area_term + ww * c.wl_term + wv * c.violations.total(), c.violations.total(), i);
    };
    for (std::size_t i = 1; i < traj.size(); ++i) {
      if (key(i) < key(want)) want = i;
    }
    CHECK(got == want);
  }
  CHECK_THROWS_AS(rerank({}, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("annealing never returns worse than its start") {
  Rng g(21);
  for (int trial = 0; trial < 20; ++trial) {
    const SAProblem p = random_problem(g, static_cast<std::size_t>(uniform_int(g, 3, 12)), trial % 2 == 0);
    SAParams params;
    params.moves_per_block = 10;
    params.stop_ratio = 1e-2;
    Rng rng = make_stream(5, static_cast<std::uint64_t>(trial));
    const auto r = anneal(p, BStarTree::initial(p), bbox_cost(), params, rng);
    CHECK(r.best.cost.total <= r.initial_cost);
  }
}

TEST_CASE("raising the violation weight never raises the reranked violation count") {
  const auto gen = generate_prime(prime_config(12), TargetDistributions::defaults(), 2);
  REQUIRE(gen.layout);
  const LayoutInstance& l = *gen.layout;
  const SAProblem p = baseline_problem(l);
  const double outline_area = static_cast<double>(l.outline.area());
  std::vector<PointD> centers;
  const CostFunction cost = [&](const PlacementSolution& s) {
    CostBreakdown c;
    c.area_term = s.bbox_area() / outline_area;
    centers.clear();
    for (const auto& b : s.blocks) centers.push_back(b.center());
    const Wirelength wl = wirelength(l, centers);
    c.wl_term = (wl.b2b + wl.t2b) / (l.labels->b2b_wl + l.labels->t2b_wl);
    c.violations = rect_violations(s, l.constraints, l.outline);
    c.total = c.area_term + c.wl_term + 10.0 * c.violations.total();
    return c;
  };
  SAParams params;
  params.moves_per_block = 10;
  params.stop_ratio = 1e-2;
  Rng rng(6);
  const auto r = anneal(p, BStarTree::initial(p), cost, params, rng, true);
  REQUIRE(r.trajectory.size() > 10);
  int previous = std::numeric_limits<int>::max();
  for (double w : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e4}) {
    const int v = r.trajectory[rerank(r.trajectory, 1.0, 1.0, w)].violations.total();
    CHECK(v <= previous);
    previous = v;
  }
}

TEST_CASE("SA parameters round-trip and validate") {
  SAParams p;
  p.cooling = 0.8;
  p.retries = 3;
  p.seed = 77;
  const auto q = SAParams::from_json(p.to_json());
  CHECK(q.cooling == 0.8);
  CHECK(q.retries == 3);
  CHECK(q.seed == 77);
  auto j = p.to_json();
  j["colling"] = 0.9;
  CHECK_THROWS_AS(SAParams::from_json(j), std::invalid_argument);
  j = p.to_json();
  j["cooling"] = 1.0;
  CHECK_THROWS_AS(SAParams::from_json(j), std::invalid_argument);
  j = p.to_json();
  j.erase("schema");
  CHECK_THROWS_AS(SAParams::from_json(j), std::invalid_argument);
}

TEST_CASE("Polish expressions stay normalized under perturbation") {
  Rng rng(12);
  for (std::size_t n : {2u, 3u, 7u, 20u}) {
    auto e = PolishExpression::initial(n);
    REQUIRE(e.valid(n));
    for (int k = 0; k < 2000; ++k) {
      perturb(e, rng);
      REQUIRE(e.valid(n));
    }
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 40));
    std::vector<double> areas(n);
    for (auto& a : areas) a = uniform_real(rng, 1.0, 50.0);
    CHECK(PolishExpression::bisection(areas, uniform_real(rng, 5, 50), uniform_real(rng, 5, 50)).valid(n));
  }
  PolishExpression bad;
  bad.tokens = {0, 1, PolishExpression::kVerticalCut, PolishExpression::kVerticalCut};
  CHECK_FALSE(bad.valid(2));
  bad.tokens = {0, PolishExpression::kVerticalCut, 1};
  CHECK_FALSE(bad.valid(2));
}

TEST_CASE("slice_pack agrees with exhaustive shape enumeration") {
  // Three blocks, every expression shape: a b V c H etc. The oracle tries
  // every shape combination directly.
  constexpr int V = PolishExpression::kVerticalCut, H = PolishExpression::kHorizontalCut;
  const std::vector<std::vector<int>> exprs = {{0, 1, V, 2, H}, {0, 1, H, 2, V}, {0, 1, 2, H, V}, {0, 1, 2, V, H}};
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ShapeList> leaves(3);
    for (auto& l : leaves) {
      for (int k = uniform_int(rng, 1, 5); k > 0; --k) l.push_back({uniform_int(rng, 1, 9), uniform_int(rng, 1, 9)});
      prune_shapes(l);
    }
    const FixedOutline ol{uniform_int<Coord>(rng, 3, 20), uniform_int<Coord>(rng, 3, 20)};
    for (const auto& tokens : exprs) {
      PolishExpression e;
      e.tokens = tokens;
      bool oracle = false;
      for (auto a : leaves[0]) {
        for (auto b : leaves[1]) {
          for (auto c : leaves[2]) {
            auto join = [](std::pair<Coord, Coord> x, std::pair<Coord, Coord> y, int op) {
              return op == V ? std::pair{x.first + y.first, std::max(x.second, y.second)}
                             : std::pair{std::max(x.first, y.first), x.second + y.second};
            };
            const auto root = tokens[2] >= 0 ? join(a, join(b, c, tokens[3]), tokens[4])
                                             : join(join(a, b, tokens[2]), c, tokens[4]);
            oracle = oracle || (root.first <= ol.width && root.second <= ol.height);
          }
        }
      }
      const SlicingFit fit = slice_pack(e, leaves, ol, true);
      CHECK((fit.overflow == 0.0) == oracle);
      CHECK((fit.scale <= 1.0) == oracle);
      // Returned rectangles use listed shapes, do not overlap and stay in the
      // reported footprint.
      for (std::size_t i = 0; i < 3; ++i) {
        const Rect& r = fit.rects[i];
        CHECK(std::find(leaves[i].begin(), leaves[i].end(), std::pair{r.width(), r.height()}) != leaves[i].end());
        CHECK(r.xl >= 0);
        CHECK(r.yl >= 0);
        CHECK(r.xh <= fit.width);
        CHECK(r.yh <= fit.height);
        for (std::size_t j = i + 1; j < 3; ++j) {
          const Rect& q = fit.rects[j];
          CHECK((r.xh <= q.xl || q.xh <= r.xl || r.yh <= q.yl || q.yh <= r.yl));
        }
      }
    }
  }
}

TEST_CASE("prune_shapes keeps the Pareto staircase") {
  ShapeList s{{3, 3}, {2, 5}, {3, 4}, {4, 3}, {1, 9}, {2, 6}};
  prune_shapes(s);
  CHECK(s == ShapeList{{1, 9}, {2, 5}, {3, 3}});
}

TEST_CASE("rect_violations agrees with count_violations") {
  const auto r = generate_prime(prime_config(14), TargetDistributions::defaults(), 3);
  REQUIRE(r.layout);
  const auto& l = *r.layout;
  const SAProblem p = baseline_problem(l);
  Rng rng(6);
  BStarTree t = BStarTree::initial(p);
  int with_violations = 0;
  for (int k = 0; k < 300; ++k) {
    perturb(t, p, rng);
    const auto s = decode(t, p);
    const auto fast = rect_violations(s, l.constraints, l.outline);
    REQUIRE(fast == count_violations(s, l));
    with_violations += fast.total() > 0;
  }
  CHECK(with_violations > 0);
}

TEST_CASE("baseline problem shapes") {
  const auto r = generate_prime(prime_config(10), TargetDistributions::defaults(), 1);
  REQUIRE(r.layout);
  const auto& l = *r.layout;
  const SAProblem p = baseline_problem(l);
  REQUIRE(p.blocks.size() == l.partitions.size());
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const auto& b = p.blocks[i];
    const double a = static_cast<double>(l.partitions[i].area);
    for (const auto& o : b.options) CHECK(o.w * o.h == doctest::Approx(a));
    if (l.constraints.preplaced.count(static_cast<int>(i))) {
      REQUIRE(b.fixed);
      CHECK(b.options.size() == 1);
    } else {
      CHECK(b.options.size() == static_cast<std::size_t>(kShapeLevels));
      const auto& range = l.constraints.shape_range.at(static_cast<int>(i));
      CHECK(b.options.front().w / b.options.front().h == doctest::Approx(range.min_ar));
      CHECK(b.options.back().w / b.options.back().h == doctest::Approx(range.max_ar));
    }
  }
}

TEST_CASE("baseline on two blocks reaches the exhaustive optimum") {
  LayoutInstance l;
  l.outline = {6, 4};
  l.partitions.emplace_back(0, partition_name(0), RectilinearPolygon::rectangle(0, 0, 4, 4));
  l.partitions.emplace_back(1, partition_name(1), RectilinearPolygon::rectangle(4, 0, 2, 4));
  l.terminals = {{0, terminal_name(0), {6, 2}}};
  l.nets = {{NetKind::BlockToBlock, 0, 1, 1.0}, {NetKind::TerminalToBlock, 0, 1, 0.5}};
  annotate_shape_ranges(l);
  l.labels = compute_labels(l);
  SAParams params;
  params.moves_per_block = 50;
  const auto res = solve_baseline(l, params);

  // Oracle: two blocks in a B*-tree are either side by side (bottoms
  // aligned) or stacked (left edges aligned), in either order.
  const SAProblem p = baseline_problem(l);
  const double norm = l.labels->b2b_wl + l.labels->t2b_wl;
  const PointD term = l.terminals[0].position;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s0 : p.blocks[0].options) {
    for (const auto& s1 : p.blocks[1].options) {
      for (int arr = 0; arr < 4; ++arr) {
        PlacedRect r0{0, 0, s0.w, s0.h, 0}, r1{0, 0, s1.w, s1.h, 0};
        PlacedRect& first = arr % 2 == 0 ? r0 : r1;
        PlacedRect& second = arr % 2 == 0 ? r1 : r0;
        if (arr < 2) second.x = first.w;
        else second.y = first.h;
        const double bw = std::max(r0.x + r0.w, r1.x + r1.w), bh = std::max(r0.y + r0.h, r1.y + r1.h);
        const PointD c0 = r0.center(), c1 = r1.center();
        const double b2b = std::abs(c0.x - c1.x) + std::abs(c0.y - c1.y);
        const double t2b = 0.5 * (std::abs(term.x - c1.x) + std::abs(term.y - c1.y));
        PlacementSolution sol;
        sol.blocks = {r0, r1};
        const int v = count_violations(sol, l).total();
        best = std::min(best, bw * bh / 24.0 + (b2b + t2b) / norm + params.w_violation * v);
      }
    }
  }
  CHECK(res.solution.cost.total == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("baseline keeps preplaced blocks at their anchors") {
  GenConfig c = prime_config(12);
  const auto r = generate_prime(c, TargetDistributions::defaults(), 2);
  REQUIRE(r.layout);
  const auto& l = *r.layout;
  REQUIRE_FALSE(l.constraints.preplaced.empty());
  SAParams params;
  params.moves_per_block = 10;
  const auto res = solve_baseline(l, params);
  for (const auto& [id, anchor] : l.constraints.preplaced) {
    CHECK(res.solution.blocks[static_cast<std::size_t>(id)].x == anchor.x);
    CHECK(res.solution.blocks[static_cast<std::size_t>(id)].y == anchor.y);
  }
  CHECK(overlap_free(res.solution));
  CHECK(res.violations == count_violations(res.solution, l));
  const auto again = solve_baseline(l, params);
  CHECK(again.solution.blocks == res.solution.blocks);
}
