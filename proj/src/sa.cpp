#include "floorset/sa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "floorset/metrics.hpp"

namespace floorset {

namespace {

constexpr const char* kSASchema = "floorset-sa v1";

ShapeOption realized(const BStarTree& tree, const SAProblem& problem, int b) {
  const auto ub = static_cast<std::size_t>(b);
  ShapeOption s = problem.blocks[ub].options[static_cast<std::size_t>(tree.shape[ub])];
  if (tree.rotated[ub]) std::swap(s.w, s.h);
  return s;
}

struct Segment {
  double x0, x1, y;
};

}  // namespace

BStarTree BStarTree::initial(const SAProblem& problem) {
  BStarTree t;
  const std::size_t n = problem.blocks.size();
  t.shape.assign(n, 0);
  t.rotated.assign(n, 0);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    if (problem.blocks[b].options.empty()) throw std::invalid_argument("block without shape options");
    if (problem.blocks[b].fixed) continue;
    t.block.push_back(static_cast<int>(b));
    total += problem.blocks[b].options[0].w * problem.blocks[b].options[0].h;
  }
  const std::size_t m = t.block.size();
  t.parent.assign(m, -1);
  t.left.assign(m, -1);
  t.right.assign(m, -1);
  if (m == 0) return t;
  t.root = 0;
  const double row_limit = std::sqrt(total);
  int row_start = 0;
  double row_width = problem.blocks[static_cast<std::size_t>(t.block[0])].options[0].w;
  for (std::size_t s = 1; s < m; ++s) {
    const double w = problem.blocks[static_cast<std::size_t>(t.block[s])].options[0].w;
    const int si = static_cast<int>(s);
    if (row_width + w > row_limit) {
      t.right[static_cast<std::size_t>(row_start)] = si;
      t.parent[s] = row_start;
      row_start = si;
      row_width = w;
    } else {
      t.left[s - 1] = si;
      t.parent[s] = si - 1;
      row_width += w;
    }
  }
  return t;
}

bool BStarTree::valid() const {
  const std::size_t m = block.size();
  if (parent.size() != m || left.size() != m || right.size() != m) return false;
  if (m == 0) return root == -1;
  if (root < 0 || static_cast<std::size_t>(root) >= m || parent[static_cast<std::size_t>(root)] != -1) return false;
  std::vector<char> seen(m, 0);
  std::vector<int> stack{root};
  std::size_t count = 0;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(s)]) return false;
    seen[static_cast<std::size_t>(s)] = 1;
    ++count;
    for (int c : {left[static_cast<std::size_t>(s)], right[static_cast<std::size_t>(s)]}) {
      if (c == -1) continue;
      if (c < 0 || static_cast<std::size_t>(c) >= m || parent[static_cast<std::size_t>(c)] != s) return false;
      stack.push_back(c);
    }
  }
  std::vector<int> ids = block;
  std::sort(ids.begin(), ids.end());
  return count == m && std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

void decode(const BStarTree& tree, const SAProblem& problem, PlacementSolution& out) {
  const std::size_t n = problem.blocks.size();
  out.blocks.assign(n, {});
  std::vector<PlacedRect> obstacles;
  for (std::size_t b = 0; b < n; ++b) {
    const auto& blk = problem.blocks[b];
    if (!blk.fixed) continue;
    out.blocks[b] = {blk.fixed->x, blk.fixed->y, blk.options[0].w, blk.options[0].h, 0};
    obstacles.push_back(out.blocks[b]);
  }

  std::vector<Segment> contour, next;
  std::vector<int> stack;
  if (tree.root >= 0) stack.push_back(tree.root);
  while (!stack.empty()) {
    const auto s = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    const int b = tree.block[s];
    const ShapeOption dim = realized(tree, problem, b);
    double x = 0.0;
    if (const int p = tree.parent[s]; p >= 0) {
      const PlacedRect& pr = out.blocks[static_cast<std::size_t>(tree.block[static_cast<std::size_t>(p)])];
      x = tree.left[static_cast<std::size_t>(p)] == static_cast<int>(s) ? pr.x + pr.w : pr.x;
    }
    const double x1 = x + dim.w;
    double y = 0.0;
    for (const auto& seg : contour) {
      if (seg.x1 > x && seg.x0 < x1) y = std::max(y, seg.y);
    }
    for (bool moved = true; moved;) {
      moved = false;
      for (const auto& o : obstacles) {
        if (x < o.x + o.w && o.x < x1 && y < o.y + o.h && o.y < y + dim.h) {
          y = o.y + o.h;
          moved = true;
        }
      }
    }
    out.blocks[static_cast<std::size_t>(b)] = {x, y, dim.w, dim.h, tree.rotated[static_cast<std::size_t>(b)] ? 1 : 0};

    next.clear();
    bool inserted = false;
    for (const auto& seg : contour) {
      if (seg.x1 <= x || seg.x0 >= x1) {
        if (!inserted && seg.x0 >= x1) {
          next.push_back({x, x1, y + dim.h});
          inserted = true;
        }
        next.push_back(seg);
        continue;
      }
      if (seg.x0 < x) next.push_back({seg.x0, x, seg.y});
      if (!inserted) {
        next.push_back({x, x1, y + dim.h});
        inserted = true;
      }
      if (seg.x1 > x1) next.push_back({x1, seg.x1, seg.y});
    }
    if (!inserted) next.push_back({x, x1, y + dim.h});
    contour.swap(next);

    if (tree.right[s] >= 0) stack.push_back(tree.right[s]);
    if (tree.left[s] >= 0) stack.push_back(tree.left[s]);
  }

  double xl = std::numeric_limits<double>::infinity(), yl = xl, xh = -xl, yh = -xl;
  for (const auto& r : out.blocks) {
    xl = std::min(xl, r.x);
    yl = std::min(yl, r.y);
    xh = std::max(xh, r.x + r.w);
    yh = std::max(yh, r.y + r.h);
  }
  out.bbox_w = n ? xh - xl : 0.0;
  out.bbox_h = n ? yh - yl : 0.0;
}

PlacementSolution decode(const BStarTree& tree, const SAProblem& problem) {
  PlacementSolution out;
  decode(tree, problem, out);
  return out;
}

namespace {

bool reshape(BStarTree& tree, const SAProblem& problem, Rng& rng) {
  const int b = tree.block[uniform_int<std::size_t>(rng, 0, tree.size() - 1)];
  const auto ub = static_cast<std::size_t>(b);
  const auto& blk = problem.blocks[ub];
  const bool can_reshape = blk.options.size() > 1;
  if (can_reshape && (!blk.allow_rotation || uniform_int(rng, 0, 1) == 0)) {
    auto k = uniform_int<std::size_t>(rng, 0, blk.options.size() - 2);
    if (k >= static_cast<std::size_t>(tree.shape[ub])) ++k;
    tree.shape[ub] = static_cast<int>(k);
    return true;
  }
  if (blk.allow_rotation) {
    tree.rotated[ub] = !tree.rotated[ub];
    return true;
  }
  return false;
}

}  // namespace

MoveKind perturb(BStarTree& tree, const SAProblem& problem, Rng& rng) {
  const std::size_t m = tree.size();
  if (m == 0) return MoveKind::Reshape;
  const int kind = m < 2 ? 2 : uniform_int(rng, 0, 2);
  if (kind == 0) {
    const auto a = uniform_int<std::size_t>(rng, 0, m - 1);
    auto b = uniform_int<std::size_t>(rng, 0, m - 2);
    if (b >= a) ++b;
    std::swap(tree.block[a], tree.block[b]);
    return MoveKind::Swap;
  }
  if (kind == 1) {
    // Sink the chosen block to a leaf, detach that leaf and reinsert it
    // under a random slot.
    auto s = static_cast<int>(uniform_int<std::size_t>(rng, 0, m - 1));
    for (;;) {
      const int l = tree.left[static_cast<std::size_t>(s)], r = tree.right[static_cast<std::size_t>(s)];
      if (l < 0 && r < 0) break;
      const int c = (l >= 0 && r >= 0) ? (uniform_int(rng, 0, 1) ? l : r) : (l >= 0 ? l : r);
      std::swap(tree.block[static_cast<std::size_t>(s)], tree.block[static_cast<std::size_t>(c)]);
      s = c;
    }
    const auto us = static_cast<std::size_t>(s);
    const auto p = static_cast<std::size_t>(tree.parent[us]);
    (tree.left[p] == s ? tree.left[p] : tree.right[p]) = -1;
    tree.parent[us] = -1;

    auto t = uniform_int<std::size_t>(rng, 0, m - 2);
    if (t >= us) ++t;
    const bool as_left = uniform_int(rng, 0, 1) == 0;
    int& slot = as_left ? tree.left[t] : tree.right[t];
    const int displaced = slot;
    slot = s;
    tree.parent[us] = static_cast<int>(t);
    if (displaced >= 0) {
      (as_left ? tree.left[us] : tree.right[us]) = displaced;
      tree.parent[static_cast<std::size_t>(displaced)] = s;
    }
    return MoveKind::Move;
  }
  reshape(tree, problem, rng);
  return MoveKind::Reshape;
}

void SAParams::validate() const {
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling must lie in (0, 1)");
  if (moves_per_block < 1) throw std::invalid_argument("moves_per_block must be positive");
  if (!(stop_ratio > 0.0 && stop_ratio < 1.0)) throw std::invalid_argument("stop_ratio must lie in (0, 1)");
  if (w_area < 0 || w_wl < 0 || w_violation < 0) throw std::invalid_argument("cost weights must be non-negative");
  if (retries < 1) throw std::invalid_argument("retries must be positive");
}

SAParams SAParams::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != kSASchema) {
    throw std::invalid_argument(std::string("expected schema '") + kSASchema + "'");
  }
  SAParams p;
  for (const auto& [key, v] : j.items()) {
    if (key == "schema") continue;
    if (key == "initial_temperature") p.initial_temperature = v.get<double>();
    else if (key == "cooling") p.cooling = v.get<double>();
    else if (key == "moves_per_block") p.moves_per_block = v.get<int>();
    else if (key == "stop_ratio") p.stop_ratio = v.get<double>();
    else if (key == "w_area") p.w_area = v.get<double>();
    else if (key == "w_wl") p.w_wl = v.get<double>();
    else if (key == "w_violation") p.w_violation = v.get<double>();
    else if (key == "retries") p.retries = v.get<int>();
    else if (key == "seed") p.seed = v.get<std::uint64_t>();
    else throw std::invalid_argument("unknown SA parameter '" + key + "'");
  }
  p.validate();
  return p;
}

nlohmann::json SAParams::to_json() const {
  return {{"schema", kSASchema},        {"initial_temperature", initial_temperature},
          {"cooling", cooling},         {"moves_per_block", moves_per_block},
          {"stop_ratio", stop_ratio},   {"w_area", w_area},
          {"w_wl", w_wl},               {"w_violation", w_violation},
          {"retries", retries},         {"seed", seed}};
}

SAParams SAParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open SA parameter file " + path);
  return from_json(nlohmann::json::parse(in));
}

AnnealResult anneal(const SAProblem& problem, BStarTree tree, const CostFunction& cost, const SAParams& params,
                    Rng& rng, bool record_trajectory, const StopPredicate& done) {
  PlacementSolution scratch;
  auto evaluate = [&](const BStarTree& t) {
    decode(t, problem, scratch);
    return cost(scratch);
  };
  auto move = [&](BStarTree& t, Rng& g) { perturb(t, problem, g); };
  const std::size_t moves = static_cast<std::size_t>(params.moves_per_block) * tree.size();
  auto run = anneal_state(std::move(tree), moves, move, evaluate, params, rng, record_trajectory, done);

  AnnealResult result;
  result.tree = std::move(run.best);
  decode(result.tree, problem, result.best);
  result.best.cost = run.best_cost;
  result.initial_cost = run.initial_cost;
  result.steps = run.steps;
  result.trajectory = std::move(run.trajectory);
  return result;
}

namespace {

constexpr int kV = PolishExpression::kVerticalCut;
constexpr int kH = PolishExpression::kHorizontalCut;

bool is_operator(int t) { return t < 0; }

}  // namespace

PolishExpression PolishExpression::initial(std::size_t n) {
  PolishExpression e;
  for (std::size_t i = 0; i < n; ++i) {
    e.tokens.push_back(static_cast<int>(i));
    if (i > 0) e.tokens.push_back(i % 2 ? kV : kH);
  }
  return e;
}

namespace {

struct SliceNode {
  int op = 0;  // operator, or block id when children is empty
  std::vector<SliceNode> children;
};

SliceNode bisect(std::span<const double> areas, std::size_t lo, std::size_t hi, double w, double h) {
  if (hi - lo == 1) return {static_cast<int>(lo), {}};
  double total = 0.0;
  for (std::size_t i = lo; i < hi; ++i) total += areas[i];
  std::size_t mid = lo + 1;
  double left = areas[lo];
  while (mid + 1 < hi && left + areas[mid] <= total / 2.0) left += areas[mid++];
  const double share = total > 0.0 ? left / total : 0.5;
  SliceNode n;
  n.op = w >= h ? kV : kH;
  SliceNode l = n.op == kV ? bisect(areas, lo, mid, w * share, h) : bisect(areas, lo, mid, w, h * share);
  SliceNode r = n.op == kV ? bisect(areas, mid, hi, w * (1 - share), h) : bisect(areas, mid, hi, w, h * (1 - share));
  // Cuts are associative; flattening same-direction children keeps the
  // expression normalized.
  for (SliceNode* c : {&l, &r}) {
    if (c->op == n.op && !c->children.empty()) {
      for (auto& g : c->children) n.children.push_back(std::move(g));
    } else {
      n.children.push_back(std::move(*c));
    }
  }
  return n;
}

void emit(const SliceNode& n, std::vector<int>& out) {
  if (n.children.empty()) {
    out.push_back(n.op);
    return;
  }
  emit(n.children[0], out);
  for (std::size_t i = 1; i < n.children.size(); ++i) {
    emit(n.children[i], out);
    out.push_back(n.op);
  }
}

}  // namespace

PolishExpression PolishExpression::bisection(std::span<const double> areas, double width, double height) {
  PolishExpression e;
  if (!areas.empty()) emit(bisect(areas, 0, areas.size(), width, height), e.tokens);
  return e;
}

bool PolishExpression::valid(std::size_t n) const {
  if (n == 0) return tokens.empty();
  if (tokens.size() != 2 * n - 1) return false;
  std::vector<char> seen(n, 0);
  std::size_t operands = 0, operators = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int t = tokens[i];
    if (is_operator(t)) {
      if (t != kV && t != kH) return false;
      if (i > 0 && tokens[i - 1] == t) return false;
      if (++operators >= operands) return false;
    } else {
      if (static_cast<std::size_t>(t) >= n || seen[t]) return false;
      seen[t] = 1;
      ++operands;
    }
  }
  return operands == n;
}

void perturb(PolishExpression& expr, Rng& rng) {
  auto& tk = expr.tokens;
  if (tk.size() < 3) return;
  const auto pick = [&](std::size_t n) { return static_cast<std::size_t>(uniform_int<std::int64_t>(rng, 0, n - 1)); };
  const int kind = static_cast<int>(uniform_int<std::int64_t>(rng, 0, 2));
  if (kind == 2) {
    // Swap an operand with a neighbouring operator; keep trying a few spots.
    for (int tries = 0; tries < 16; ++tries) {
      const std::size_t i = pick(tk.size() - 1);
      if (is_operator(tk[i]) == is_operator(tk[i + 1])) continue;
      std::swap(tk[i], tk[i + 1]);
      bool ok = true;
      std::size_t operands = 0, operators = 0;
      for (std::size_t j = 0; j < tk.size() && ok; ++j) {
        if (is_operator(tk[j])) {
          ok = ++operators < operands && !(j > 0 && tk[j - 1] == tk[j]);
        } else {
          ++operands;
        }
      }
      if (ok) return;
      std::swap(tk[i], tk[i + 1]);
    }
  }
  if (kind == 1) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < tk.size(); ++i) {
      if (is_operator(tk[i]) && !is_operator(tk[i - 1])) starts.push_back(i);
    }
    for (std::size_t i = starts[pick(starts.size())]; i < tk.size() && is_operator(tk[i]); ++i) {
      tk[i] = tk[i] == kV ? kH : kV;
    }
    return;
  }
  std::vector<std::size_t> operands;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    if (!is_operator(tk[i])) operands.push_back(i);
  }
  const std::size_t k = pick(operands.size() - 1);
  std::swap(tk[operands[k]], tk[operands[k + 1]]);
}

void prune_shapes(ShapeList& shapes) {
  std::sort(shapes.begin(), shapes.end());
  ShapeList out;
  for (const auto& s : shapes) {
    if (!out.empty() && s.second >= out.back().second) continue;
    if (!out.empty() && s.first == out.back().first) out.pop_back();
    out.push_back(s);
  }
  shapes = std::move(out);
}

namespace {

using CurvePoint = SlicingPacker::CurvePoint;

// In place; indices only grow, so earlier reads never see overwritten slots.
void thin(std::vector<CurvePoint>& c) {
  if (c.size() <= kMaxCurvePoints) return;
  const double step = static_cast<double>(c.size() - 1) / static_cast<double>(kMaxCurvePoints - 1);
  for (std::size_t k = 0; k < kMaxCurvePoints; ++k) c[k] = c[static_cast<std::size_t>(std::lround(step * k))];
  c.resize(kMaxCurvePoints);
}

// Both inputs sorted by ascending w, descending h; so is the output.
void combine(const std::vector<CurvePoint>& l, const std::vector<CurvePoint>& r, bool vertical,
             std::vector<CurvePoint>& out) {
  out.clear();
  if (vertical) {
    // Widths add, height is the max: only shrinking the taller side helps.
    std::size_t i = 0, j = 0;
    while (true) {
      const Coord h = std::max(l[i].h, r[j].h);
      if (out.empty() || out.back().h != h) out.push_back({l[i].w + r[j].w, h, static_cast<int>(i), static_cast<int>(j)});
      const bool adv_l = l[i].h == h, adv_r = r[j].h == h;
      if ((adv_l && i + 1 >= l.size()) || (adv_r && j + 1 >= r.size())) break;
      if (adv_l) ++i;
      if (adv_r) ++j;
    }
  } else {
    // Heights add, width is the max: walk from the widest options down.
    std::size_t i = l.size() - 1, j = r.size() - 1;
    while (true) {
      const Coord w = std::max(l[i].w, r[j].w);
      if (out.empty() || out.back().w != w) out.push_back({w, l[i].h + r[j].h, static_cast<int>(i), static_cast<int>(j)});
      const bool adv_l = l[i].w == w, adv_r = r[j].w == w;
      if ((adv_l && i == 0) || (adv_r && j == 0)) break;
      if (adv_l) --i;
      if (adv_r) --j;
    }
    std::reverse(out.begin(), out.end());
  }
  thin(out);
}

}  // namespace

SlicingPacker::SlicingPacker(std::span<const ShapeList> leaves, const FixedOutline& outline) : outline_(outline) {
  for (std::size_t b = 0; b < leaves.size(); ++b) {
    if (leaves[b].empty()) throw std::invalid_argument("block " + std::to_string(b) + " has no shape options");
    std::vector<CurvePoint> c;
    for (std::size_t k = 0; k < leaves[b].size(); ++k) c.push_back({leaves[b][k].first, leaves[b][k].second, -1, -1});
    thin(c);
    leaf_curves_.push_back(std::move(c));
  }
  if (!leaves.empty()) inner_curves_.resize(leaves.size() - 1);
}

SlicingFit SlicingPacker::pack(const PolishExpression& expr, bool with_rects) {
  if (expr.tokens.size() + 1 != 2 * leaf_curves_.size()) throw std::invalid_argument("expression size mismatch");
  nodes_.clear();
  stack_.clear();
  std::size_t inner = 0;
  for (int t : expr.tokens) {
    Node n;
    n.token = t;
    if (is_operator(t)) {
      if (stack_.size() < 2) throw std::invalid_argument("malformed Polish expression");
      n.right = stack_.back();
      stack_.pop_back();
      n.left = stack_.back();
      stack_.pop_back();
      auto& buf = inner_curves_[inner++];
      combine(*nodes_[n.left].curve, *nodes_[n.right].curve, t == kV, buf);
      n.curve = &buf;
    } else {
      n.curve = &leaf_curves_.at(static_cast<std::size_t>(t));
    }
    nodes_.push_back(n);
    stack_.push_back(static_cast<int>(nodes_.size()) - 1);
  }
  if (stack_.size() != 1) throw std::invalid_argument("malformed Polish expression");

  const double W = static_cast<double>(outline_.width), H = static_cast<double>(outline_.height);
  const auto& root = *nodes_[stack_.back()].curve;
  // Smallest uniform scale of the outline that holds the option; fits iff
  // <= 1. Ties go to the smaller area.
  std::size_t pick = 0;
  double best_scale = std::numeric_limits<double>::infinity(), best_area = best_scale;
  for (std::size_t k = 0; k < root.size(); ++k) {
    const double scale = std::max(static_cast<double>(root[k].w) / W, static_cast<double>(root[k].h) / H);
    const double area = static_cast<double>(root[k].w) * static_cast<double>(root[k].h);
    if (scale < best_scale || (scale == best_scale && area < best_area)) {
      pick = k;
      best_scale = scale;
      best_area = area;
    }
  }
  const double best_over = std::max(0.0, static_cast<double>(root[pick].w) - W) / W +
                           std::max(0.0, static_cast<double>(root[pick].h) - H) / H;
  SlicingFit fit;
  fit.width = root[pick].w;
  fit.height = root[pick].h;
  fit.overflow = best_over;
  fit.scale = best_scale;
  if (!with_rects) return fit;

  fit.rects.resize(leaf_curves_.size());
  std::vector<std::tuple<int, int, Coord, Coord>> todo{{stack_.back(), static_cast<int>(pick), 0, 0}};
  while (!todo.empty()) {
    auto [id, k, x, y] = todo.back();
    todo.pop_back();
    const Node& n = nodes_[id];
    const CurvePoint& p = (*n.curve)[static_cast<std::size_t>(k)];
    if (!is_operator(n.token)) {
      fit.rects[static_cast<std::size_t>(n.token)] = Rect{x, y, x + p.w, y + p.h};
      continue;
    }
    const CurvePoint& lp = (*nodes_[n.left].curve)[static_cast<std::size_t>(p.li)];
    todo.push_back({n.left, p.li, x, y});
    todo.push_back({n.right, p.ri, n.token == kV ? x + lp.w : x, n.token == kV ? y : y + lp.h});
  }
  return fit;
}

SlicingFit slice_pack(const PolishExpression& expr, std::span<const ShapeList> leaves, const FixedOutline& outline,
                      bool with_rects) {
  return SlicingPacker(leaves, outline).pack(expr, with_rects);
}

std::size_t rerank(const std::vector<CostBreakdown>& trajectory, double w_area, double w_wl, double w_violation) {
  if (trajectory.empty()) throw std::invalid_argument("empty trajectory");
  std::size_t best = 0;
  auto score = [&](const CostBreakdown& c) {
    return w_area * c.area_term + w_wl * c.wl_term + w_violation * c.violations.total();
  };
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const double si = score(trajectory[i]), sb = score(trajectory[best]);
    if (si < sb || (si == sb && trajectory[i].violations.total() < trajectory[best].violations.total())) best = i;
  }
  return best;
}

ViolationCounts rect_violations(const PlacementSolution& solution, const ConstraintSet& constraints,
                                const FixedOutline& outline) {
  const double tol = geometry_tolerance(outline);
  const double W = static_cast<double>(outline.width), H = static_cast<double>(outline.height);
  const auto& r = solution.blocks;
  auto at = [&](int id) -> const PlacedRect& {
    if (id < 0 || static_cast<std::size_t>(id) >= r.size()) {
      throw std::out_of_range("constraint references unknown block " + std::to_string(id));
    }
    return r[static_cast<std::size_t>(id)];
  };
  ViolationCounts v;
  for (const auto& [id, range] : constraints.shape_range) {
    const auto& b = at(id);
    if (!range.contains(b.w / b.h)) ++v.shape;
  }
  for (const auto& [id, tag] : constraints.boundary) {
    const auto& b = at(id);
    bool ok = true;
    if (tag & kLeft) ok = ok && std::abs(b.x) <= tol;
    if (tag & kRight) ok = ok && std::abs(b.x + b.w - W) <= tol;
    if (tag & kBottom) ok = ok && std::abs(b.y) <= tol;
    if (tag & kTop) ok = ok && std::abs(b.y + b.h - H) <= tol;
    if (!ok) ++v.boundary;
  }
  auto abut = [tol](const PlacedRect& a, const PlacedRect& b) {
    const double ox = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
    const double oy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
    const bool side = std::abs(a.x + a.w - b.x) <= tol || std::abs(b.x + b.w - a.x) <= tol;
    const bool stack = std::abs(a.y + a.h - b.y) <= tol || std::abs(b.y + b.h - a.y) <= tol;
    return (side && oy > tol) || (stack && ox > tol);
  };
  std::vector<char> reached;
  std::vector<std::size_t> stack;
  for (const auto& cluster : constraints.clusters) {
    if (cluster.empty()) continue;
    reached.assign(cluster.size(), 0);
    reached[0] = 1;
    stack.assign(1, 0);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < cluster.size(); ++j) {
        if (!reached[j] && abut(at(cluster[i]), at(cluster[j]))) {
          reached[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (std::find(reached.begin(), reached.end(), 0) != reached.end()) ++v.grouping;
  }
  for (const auto& [id, anchor] : constraints.preplaced) {
    const auto& b = at(id);
    if (std::abs(b.x - anchor.x) > tol || std::abs(b.y - anchor.y) > tol) ++v.preplacement;
  }
  for (const auto& group : constraints.multi_inst) {
    const auto& g0 = at(group.front());
    for (std::size_t i = 1; i < group.size(); ++i) {
      const auto& g = at(group[i]);
      const bool same = std::abs(g.w - g0.w) <= tol && std::abs(g.h - g0.h) <= tol;
      const bool turned = std::abs(g.w - g0.h) <= tol && std::abs(g.h - g0.w) <= tol;
      if (!same && !turned) {
        ++v.multi_inst;
        break;
      }
    }
  }
  for (const auto& b : r) {
    if (b.x < -tol || b.y < -tol || b.x + b.w > W + tol || b.y + b.h > H + tol) v.overflow = true;
  }
  return v;
}

SAProblem baseline_problem(const LayoutInstance& problem) {
  SAProblem sa;
  for (const auto& p : problem.partitions) {
    SABlock blk;
    const double a = static_cast<double>(p.area);
    if (const auto it = problem.constraints.preplaced.find(p.id); it != problem.constraints.preplaced.end()) {
      const double r = bbox_aspect(p.shape);
      blk.options = {{std::sqrt(a * r), std::sqrt(a / r)}};
      blk.fixed = it->second;
    } else if (const auto sr = problem.constraints.shape_range.find(p.id); sr != problem.constraints.shape_range.end()) {
      const double lo = sr->second.min_ar, hi = sr->second.max_ar;
      for (int k = 0; k < kShapeLevels; ++k) {
        const double r = lo * std::pow(hi / lo, static_cast<double>(k) / (kShapeLevels - 1));
        blk.options.push_back({std::sqrt(a * r), std::sqrt(a / r)});
      }
    } else {
      blk.options = {{std::sqrt(a), std::sqrt(a)}};
      blk.allow_rotation = false;
    }
    sa.blocks.push_back(std::move(blk));
  }
  return sa;
}

BaselineResult solve_baseline(const LayoutInstance& problem, const SAParams& params) {
  const SAProblem sa = baseline_problem(problem);
  const double outline_area = static_cast<double>(problem.outline.area());
  double normalizer = 1.0;
  if (problem.labels && problem.labels->b2b_wl + problem.labels->t2b_wl > 0.0) {
    normalizer = problem.labels->b2b_wl + problem.labels->t2b_wl;
  }
  std::vector<PointD> centers;
  const CostFunction cost = [&](const PlacementSolution& s) {
    CostBreakdown c;
    c.area_term = s.bbox_area() / outline_area;
    centers.clear();
    for (const auto& b : s.blocks) centers.push_back(b.center());
    const Wirelength wl = wirelength(problem, centers);
    c.b2b_wl = wl.b2b;
    c.t2b_wl = wl.t2b;
    c.wl_term = (wl.b2b + wl.t2b) / normalizer;
    c.violations = rect_violations(s, problem.constraints, problem.outline);
    c.total = params.w_area * c.area_term + params.w_wl * c.wl_term + params.w_violation * c.violations.total();
    return c;
  };

  std::optional<AnnealResult> best;
  for (int r = 0; r < params.retries; ++r) {
    Rng rng = make_stream(params.seed, static_cast<std::uint64_t>(r), 0x5a);
    AnnealResult run = anneal(sa, BStarTree::initial(sa), cost, params, rng);
    if (!best || run.best.cost.total < best->best.cost.total) best = std::move(run);
  }
  BaselineResult out;
  out.solution = std::move(best->best);
  out.violations = count_violations(out.solution, problem);
  out.labels = evaluate_labels(placement_of(out.solution), problem);
  return out;
}

}  // namespace floorset
