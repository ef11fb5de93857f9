#pragma once

#include <string>
#include <vector>

#include "floorset/distributions.hpp"
#include "floorset/layout.hpp"
#include "floorset/rng.hpp"

namespace floorset {

/// Record of the non-routine events of one generation attempt.
struct GenerationTrace {
  struct MergeStep {
    double w1_before = 0.0;
    double w1_after = 0.0;
    bool fallback = false;
  };

  double initial_w1 = 0.0;
  double final_w1 = 0.0;
  std::vector<MergeStep> merges;
  int invalid_merge_draws = 0;
  int attempts = 0;
  int terminal_restarts = 0;
  /// Pitch slack actually achieved; below the configured value only after
  /// relaxation.
  double terminal_slack = 0.0;
  int multi_inst_shortfall = 0;
  /// Per-layout parameters drawn from the target distributions.
  int n_terms = 0;
  double part_density = 0.0;
  double term_density = 0.0;
  std::vector<std::string> notes;

  int fallback_count() const;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Terminal count for a layout: max(1, round(n_parts * ratio)).
int terminal_count(int n_parts, double ratio);

/// Places n_terms terminals on half-grid perimeter positions so that every
/// pair is at least slack * 2(W+H)/n_terms apart along the perimeter.
void annotate_terminals(LayoutInstance& layout, int n_terms, double slack, Rng& rng,
                        GenerationTrace* trace = nullptr);

int b2b_net_count(int n_parts, double density);
int t2b_net_count(int n_parts, int n_terms, double density);

/// Distinct 2-pin nets sampled without replacement with probability
/// proportional to 1 - distance / max distance.
void annotate_nets(LayoutInstance& layout, double part_density, double term_density,
                   const WeightModel& weights, Rng& rng, GenerationTrace* trace = nullptr);

struct ConstraintFractions {
  double boundary = 0.0;
  double cluster = 0.0;
  int cluster_count = 1;
  double preplaced = 0.0;
  double multi_inst = 0.0;
};

/// Boundary, preplacement, cluster and multi-instantiation constraints read
/// off the realized layout, plus shape ranges.
void annotate_constraints(LayoutInstance& layout, const ConstraintFractions& fractions, Rng& rng,
                          GenerationTrace* trace = nullptr);

inline constexpr double kShapeRangeSlack = 0.25;

/// shape_range[i] = [r / 1.25, r * 1.25] around each realized aspect ratio.
void annotate_shape_ranges(LayoutInstance& layout);

/// Indices of k items drawn without replacement with probability
/// proportional to weight (Efraimidis-Spirakis keys). Zero-weight items are
/// drawn uniformly once the positive-weight items are exhausted.
std::vector<std::size_t> weighted_sample(const std::vector<double>& weights, std::size_t k, Rng& rng);

/// Partition pairs (i < j) whose shapes share boundary.
std::vector<std::pair<int, int>> abutment_pairs(const std::vector<Partition>& partitions);

}  // namespace floorset
