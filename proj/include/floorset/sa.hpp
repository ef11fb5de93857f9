#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "floorset/layout.hpp"
#include "floorset/placement.hpp"
#include "floorset/rng.hpp"

namespace floorset {

struct ShapeOption {
  double w = 0.0;
  double h = 0.0;
};

struct SABlock {
  /// Realizable (w, h) pairs; reshaping picks among them.
  std::vector<ShapeOption> options;
  bool allow_rotation = false;
  /// Fixed blocks are obstacles at this lower-left corner, shape options[0].
  std::optional<PointD> fixed;
};

struct SAProblem {
  std::vector<SABlock> blocks;
};

/// B*-tree over the movable blocks. The topology lives on slots; each slot
/// holds a block id, so swapping two blocks only exchanges slot contents.
/// Left child: placed immediately to the right of its parent. Right child:
/// placed above its parent at the same x.
struct BStarTree {
  std::vector<int> block;  // slot -> block id
  std::vector<int> parent;
  std::vector<int> left;
  std::vector<int> right;
  int root = -1;
  /// Per block id (all blocks, fixed included).
  std::vector<int> shape;
  std::vector<char> rotated;

  std::size_t size() const { return block.size(); }
  /// Rows of left-chains whose width stays near sqrt(total area).
  static BStarTree initial(const SAProblem& problem);
  /// Structural validity: one root, consistent links, every slot reached.
  bool valid() const;
};

/// Contour packing of the tree; fixed blocks are placed at their anchors
/// and movable blocks are pushed up past any obstacle they would overlap.
void decode(const BStarTree& tree, const SAProblem& problem, PlacementSolution& out);
PlacementSolution decode(const BStarTree& tree, const SAProblem& problem);

enum class MoveKind { Swap, Move, Reshape };

/// Applies one random move; returns which kind was applied.
MoveKind perturb(BStarTree& tree, const SAProblem& problem, Rng& rng);

struct SAParams {
  /// Non-positive means calibrate from 100 random moves for ~0.9 initial
  /// uphill acceptance.
  double initial_temperature = 0.0;
  double cooling = 0.95;
  /// Moves per temperature step = moves_per_block * number of blocks.
  int moves_per_block = 100;
  /// Stop once T < stop_ratio * T0.
  double stop_ratio = 1e-4;
  double w_area = 1.0;
  double w_wl = 1.0;
  double w_violation = 10.0;
  int retries = 1;
  std::uint64_t seed = 1;

  void validate() const;
  static SAParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static SAParams load(const std::string& path);
};

using CostFunction = std::function<CostBreakdown(const PlacementSolution&)>;

/// Stops early once `done` holds for an accepted state.
using StopPredicate = std::function<bool(const CostBreakdown&)>;

template <class State>
struct AnnealOutcome {
  State best;
  CostBreakdown best_cost;
  double initial_cost = 0.0;
  std::size_t steps = 0;
  /// Cost of every accepted state in order, when recording was requested.
  std::vector<CostBreakdown> trajectory;
};

/// Metropolis annealing over any state type. `perturb(State&, Rng&)` applies
/// one move; `evaluate(const State&)` returns its cost. The temperature
/// schedule is geometric from T0 (calibrated from 100 random moves when
/// params.initial_temperature <= 0) down to stop_ratio * T0.
template <class State, class Perturb, class Evaluate>
AnnealOutcome<State> anneal_state(State state, std::size_t moves_per_step, Perturb&& perturb, Evaluate&& evaluate,
                                  const SAParams& params, Rng& rng, bool record_trajectory = false,
                                  const StopPredicate& done = {}) {
  params.validate();
  AnnealOutcome<State> out;
  CostBreakdown current = evaluate(state);
  out.initial_cost = current.total;
  out.best = state;
  out.best_cost = current;
  if (record_trajectory) out.trajectory.push_back(current);
  if (moves_per_step == 0 || (done && done(current))) return out;

  double t0 = params.initial_temperature;
  if (t0 <= 0.0) {
    State probe = state;
    double prev = current.total, uphill = 0.0;
    int ups = 0;
    for (int i = 0; i < 100; ++i) {
      perturb(probe, rng);
      const double next = evaluate(probe).total;
      if (next > prev) {
        uphill += next - prev;
        ++ups;
      }
      prev = next;
    }
    // exp(-mean_uphill / T0) = 0.9
    t0 = ups ? -(uphill / ups) / std::log(0.9) : 1e-9 * std::max(1.0, std::abs(current.total));
  }

  State backup = state;
  for (double T = t0; T >= t0 * params.stop_ratio; T *= params.cooling) {
    for (std::size_t k = 0; k < moves_per_step; ++k) {
      backup = state;
      perturb(state, rng);
      const CostBreakdown next = evaluate(state);
      const double delta = next.total - current.total;
      ++out.steps;
      if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / T)) {
        current = next;
        if (record_trajectory) out.trajectory.push_back(current);
        if (current.total < out.best_cost.total) {
          out.best = state;
          out.best_cost = current;
        }
        if (done && done(current)) return out;
      } else {
        state = backup;
      }
    }
  }
  return out;
}

struct AnnealResult {
  BStarTree tree;
  PlacementSolution best;
  double initial_cost = 0.0;
  std::size_t steps = 0;
  std::vector<CostBreakdown> trajectory;
};

/// B*-tree annealing with params.moves_per_block moves per movable block at
/// each temperature.
AnnealResult anneal(const SAProblem& problem, BStarTree tree, const CostFunction& cost, const SAParams& params,
                    Rng& rng, bool record_trajectory = false, const StopPredicate& done = {});

/// Slicing floorplan as a normalized Polish expression: operands are block
/// ids, kVerticalCut places the two operands side by side, kHorizontalCut
/// stacks the second above the first.
struct PolishExpression {
  static constexpr int kVerticalCut = -1;
  static constexpr int kHorizontalCut = -2;
  std::vector<int> tokens;

  /// 0 1 V 2 H 3 V ... over blocks 0..n-1.
  static PolishExpression initial(std::size_t n);
  /// Recursive bisection of a width x height region: blocks (in id order)
  /// split into two runs of near-equal area, cut across the longer side.
  static PolishExpression bisection(std::span<const double> areas, double width, double height);
  /// Balloting property, no two equal adjacent operators, each block once.
  bool valid(std::size_t n) const;
};

/// Wong-Liu moves: swap adjacent operands, complement an operator chain, or
/// swap an adjacent operand/operator pair when the result stays normalized.
void perturb(PolishExpression& expr, Rng& rng);

/// Non-dominated (w, h) options sorted by ascending w (so descending h).
using ShapeList = std::vector<std::pair<Coord, Coord>>;

/// Drops dominated and duplicate entries; sorts by w.
void prune_shapes(ShapeList& shapes);

/// Longest shape list kept at any slicing node; longer lists are thinned
/// evenly, keeping both ends.
inline constexpr std::size_t kMaxCurvePoints = 24;

struct SlicingFit {
  /// Lower-left-packed rectangles indexed by block id; empty unless requested.
  std::vector<Rect> rects;
  Coord width = 0;
  Coord height = 0;
  /// Relative excess over the outline: max(0, w-W)/W + max(0, h-H)/H.
  double overflow = 0.0;
  /// max(w/W, h/H); at most 1 when the packing fits.
  double scale = 0.0;
};

/// Combines leaf shape lists bottom-up (widths add under a vertical cut,
/// heights under a horizontal cut) and picks the root option needing the
/// smallest uniform scale of the outline, then the least area. Keeps its
/// buffers between calls; not thread-safe.
class SlicingPacker {
 public:
  SlicingPacker(std::span<const ShapeList> leaves, const FixedOutline& outline);
  SlicingFit pack(const PolishExpression& expr, bool with_rects);

  struct CurvePoint {
    Coord w, h;
    int li, ri;  // indices into the children's curves
  };

 private:
  struct Node {
    int token = 0;
    int left = -1, right = -1;
    const std::vector<CurvePoint>* curve = nullptr;
  };
  FixedOutline outline_;
  std::vector<std::vector<CurvePoint>> leaf_curves_;
  std::vector<std::vector<CurvePoint>> inner_curves_;
  std::vector<Node> nodes_;
  std::vector<int> stack_;
};

SlicingFit slice_pack(const PolishExpression& expr, std::span<const ShapeList> leaves, const FixedOutline& outline,
                      bool with_rects);

/// Index of the trajectory entry minimizing the weighted cost; ties go to
/// fewer violations, then the earliest entry.
std::size_t rerank(const std::vector<CostBreakdown>& trajectory, double w_area, double w_wl, double w_violation);

/// Fast rectangle-only violation counts; agrees with count_violations.
ViolationCounts rect_violations(const PlacementSolution& solution, const ConstraintSet& constraints,
                                const FixedOutline& outline);

inline constexpr int kShapeLevels = 9;

/// Baseline problem: each partition becomes a soft rectangle of its golden
/// area with kShapeLevels log-spaced aspect ratios inside its shape range;
/// preplaced partitions are fixed at their anchors with the golden ratio.
SAProblem baseline_problem(const LayoutInstance& problem);

struct BaselineResult {
  PlacementSolution solution;
  ViolationCounts violations;
  Labels labels;
};

/// Classical constrained SA over the problem; best of `params.retries`
/// independent runs.
BaselineResult solve_baseline(const LayoutInstance& problem, const SAParams& params);

}  // namespace floorset
