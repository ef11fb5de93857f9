#pragma once

#include <optional>
#include <vector>

#include "floorset/distributions.hpp"
#include "floorset/layout.hpp"
#include "floorset/prime.hpp"
#include "floorset/rng.hpp"
#include "floorset/sa.hpp"

namespace floorset {

struct RectSpec {
  int id = 0;
  Coord area = 0;
  AspectRange ar_range;
};

inline constexpr double kLiteFill = 0.97;
inline constexpr double kDirichletConcentration = 4.0;
/// Emitted Lite layouts leave strictly less whitespace than this.
inline constexpr double kLiteMaxWhitespace = 0.05;
/// Each spec may use aspect ratios within this factor of its sampled target.
inline constexpr double kLiteAspectSlack = 2.0;

/// Area budgets from a symmetric Dirichlet split of kLiteFill * W * H. Each
/// spec may use aspect ratios within kLiteAspectSlack of its sampled target.
std::vector<RectSpec> make_rect_specs(int n_parts, const FixedOutline& outline, const Distribution& aspect, Rng& rng);

/// A realized area a' satisfies a - kLiteAreaShrink * a <= a' and
/// a' <= a + max(kLiteAreaGrowth * a, ceil(sqrt(a))); the sqrt term keeps
/// small budgets realizable on the grid.
inline constexpr double kLiteAreaShrink = 0.015;
inline constexpr double kLiteAreaGrowth = 0.015;

/// Pareto staircase of integer (w, h) inside the outline with w / h in the
/// range and w * h within the realized-area window of `area`.
ShapeList lite_shapes(Coord area, const AspectRange& range, const FixedOutline& outline);

struct PackResult {
  std::vector<Rect> rects;  // indexed by spec id; empty unless fits
  bool fits = false;
  double bbox_w = 0.0;
  double bbox_h = 0.0;
};

/// Default schedule for Lite packing; lighter than the baseline solver.
SAParams lite_pack_params();

/// Anneals a slicing floorplan over the specs' shape staircases; `fits` is
/// false when no run inside the retry budget stayed within the outline.
PackResult pack_rectangles(const std::vector<RectSpec>& specs, const FixedOutline& outline, const SAParams& params,
                           Rng& rng);

/// Instance `index` of a Lite run; deterministic given (config.seed, index).
GenerationResult generate_lite(const GenConfig& config, const TargetDistributions& targets, std::uint64_t index);

/// Dispatches on config.mode.
GenerationResult generate_instance(const GenConfig& config, const TargetDistributions& targets, std::uint64_t index);

}  // namespace floorset
