#include "floorset/lite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/gamma_distribution.hpp>

#include "floorset/metrics.hpp"

namespace floorset {

namespace {

// Dirichlet shares are clipped below at this fraction of an even share.
constexpr double kMinShare = 0.25;

}  // namespace

ShapeList lite_shapes(Coord area, const AspectRange& range, const FixedOutline& outline) {
  const double a = static_cast<double>(area);
  const auto slack = static_cast<Coord>(std::max(kLiteAreaGrowth * a, std::ceil(std::sqrt(a))));
  const Coord lo = std::max<Coord>(1, area - static_cast<Coord>(kLiteAreaShrink * a)), hi = area + slack;
  ShapeList out;
  for (Coord w = 1; w <= outline.width; ++w) {
    // Shortest h meeting both the area floor and the flattest allowed ratio;
    // the loop only absorbs rounding in the ceil.
    const auto flat = static_cast<Coord>(std::ceil(static_cast<double>(w) / range.max_ar));
    Coord h = std::max<Coord>({(lo + w - 1) / w, flat - 1, 1});
    while (h <= outline.height && static_cast<double>(w) / static_cast<double>(h) > range.max_ar) ++h;
    if (w * h > hi || h > outline.height) continue;
    if (!range.contains(static_cast<double>(w) / static_cast<double>(h), 0.0)) continue;
    out.push_back({w, h});
  }
  prune_shapes(out);
  return out;
}

std::vector<RectSpec> make_rect_specs(int n_parts, const FixedOutline& outline, const Distribution& aspect, Rng& rng) {
  if (n_parts < 2) throw GenerationError("Lite layouts need at least 2 partitions");
  const auto n = static_cast<std::size_t>(n_parts);
  boost::random::gamma_distribution<double> gamma(kDirichletConcentration, 1.0);
  std::vector<double> share(n);
  double sum = 0.0;
  for (auto& s : share) sum += (s = gamma(rng));
  const double floor_share = kMinShare / static_cast<double>(n);
  double clipped = 0.0;
  for (auto& s : share) clipped += (s = std::max(s / sum, floor_share));
  for (auto& s : share) s /= clipped;

  const double budget = kLiteFill * static_cast<double>(outline.area());
  std::vector<RectSpec> specs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = std::max<Coord>(1, static_cast<Coord>(std::floor(budget * share[i])));
    // Small budgets may have no integer shape near some targets; redraw.
    for (int tries = 0;; ++tries) {
      const double r = sample(aspect, rng);
      const AspectRange range{r / kLiteAspectSlack, r * kLiteAspectSlack};
      if (!lite_shapes(a, range, outline).empty()) {
        specs.push_back({static_cast<int>(i), a, range});
        break;
      }
      if (tries == 20) throw GenerationError("no integer shape of area " + std::to_string(a) + " fits the outline");
    }
  }
  return specs;
}

SAParams lite_pack_params() {
  SAParams p;
  // Scale-cost units: a 1% larger footprint is accepted with p ~ e^-3 at the
  // start. The bisection start is already close; a hot start undoes it.
  p.initial_temperature = 0.003;
  p.cooling = 0.9;
  p.moves_per_block = 20;
  p.stop_ratio = 1e-3;
  p.retries = 4;
  return p;
}

PackResult pack_rectangles(const std::vector<RectSpec>& specs, const FixedOutline& outline, const SAParams& params,
                           Rng& rng) {
  const std::size_t n = specs.size();
  Coord total = 0;
  std::vector<ShapeList> leaves(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (specs[i].id != static_cast<int>(i)) throw std::invalid_argument("spec ids must be 0..n-1 in order");
    total += specs[i].area;
    leaves[i] = lite_shapes(specs[i].area, specs[i].ar_range, outline);
    if (leaves[i].empty()) throw GenerationError("spec " + std::to_string(i) + " has no realizable shape");
  }
  if (total > outline.area()) throw GenerationError("specs exceed the outline area");

  PackResult out;
  if (n == 0) {
    out.fits = true;
    return out;
  }
  const double outline_area = static_cast<double>(outline.area());
  SlicingPacker packer(leaves, outline);
  const auto evaluate = [&](const PolishExpression& e) {
    const SlicingFit f = packer.pack(e, false);
    CostBreakdown c;
    c.overflow_term = f.overflow;
    c.area_term = static_cast<double>(f.width) * static_cast<double>(f.height) / outline_area;
    c.total = f.scale;
    return c;
  };
  const auto move = [](PolishExpression& e, Rng& g) { perturb(e, g); };
  const StopPredicate fits = [](const CostBreakdown& c) { return c.overflow_term == 0.0; };
  const std::size_t moves = static_cast<std::size_t>(params.moves_per_block) * n;

  std::vector<double> areas;
  for (const auto& sp : specs) areas.push_back(static_cast<double>(sp.area));
  const PolishExpression start =
      PolishExpression::bisection(areas, static_cast<double>(outline.width), static_cast<double>(outline.height));
  double best_cost = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < params.retries && !out.fits; ++attempt) {
    const auto run = anneal_state(start, moves, move, evaluate, params, rng, false, fits);
    if (run.best_cost.total >= best_cost) continue;
    best_cost = run.best_cost.total;
    const SlicingFit f = packer.pack(run.best, true);
    out.fits = f.overflow == 0.0;
    out.rects = f.rects;
    out.bbox_w = static_cast<double>(f.width);
    out.bbox_h = static_cast<double>(f.height);
  }
  if (!out.fits) out.rects.clear();
  return out;
}

GenerationResult generate_lite(const GenConfig& config, const TargetDistributions& targets, std::uint64_t index) {
  GenerationResult result;
  result.index = index;
  Rng rng = make_stream(config.seed, index);
  const FixedOutline outline = config.outline.sample(rng);
  const int n_parts = static_cast<int>(config.num_partitions.sample(rng));

  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    GenerationTrace trace;
    trace.attempts = attempt + 1;
    try {
      const auto specs = make_rect_specs(n_parts, outline, targets.aspect, rng);
      const PackResult pack = pack_rectangles(specs, outline, lite_pack_params(), rng);
      if (!pack.fits) throw GenerationError("packing overflowed the outline");
      Coord used = 0;
      for (const auto& r : pack.rects) used += r.area();
      if (static_cast<double>(used) <= (1.0 - kLiteMaxWhitespace) * static_cast<double>(outline.area())) {
        throw GenerationError("packing left too much whitespace");
      }
      LayoutInstance layout;
      layout.outline = outline;
      for (std::size_t i = 0; i < pack.rects.size(); ++i) {
        const int id = static_cast<int>(i);
        layout.partitions.emplace_back(id, partition_name(id), RectilinearPolygon::from_rect(pack.rects[i]));
      }
      layout.provenance = {config.seed, index, DatasetMode::Lite};
      annotate_layout(layout, config, targets, rng, trace);
      validate_structure(layout);
      const ViolationCounts v = count_violations(layout);
      if (v.total() != 0 || v.overflow) throw GenerationError("generated layout violates its own constraints");
      result.layout = std::move(layout);
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

GenerationResult generate_instance(const GenConfig& config, const TargetDistributions& targets, std::uint64_t index) {
  return config.mode == DatasetMode::Lite ? generate_lite(config, targets, index)
                                          : generate_prime(config, targets, index);
}

}  // namespace floorset
