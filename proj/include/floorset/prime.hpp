#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "floorset/annotate.hpp"
#include "floorset/distributions.hpp"
#include "floorset/layout.hpp"
#include "floorset/rng.hpp"

namespace floorset {

struct PartitionGrid {
  FixedOutline outline;
  std::vector<Coord> x_cuts;
  std::vector<Coord> y_cuts;
  /// Row-major: cell (i, j) is cells[j * columns() + i].
  std::vector<Rect> cells;
  std::vector<std::pair<int, int>> adjacency;

  int columns() const { return static_cast<int>(x_cuts.size()) + 1; }
  int rows() const { return static_cast<int>(y_cuts.size()) + 1; }
};

/// Factor pair (columns, rows) of n_cells fitting the outline whose ratio is
/// closest to the outline's; nullopt when none fits.
std::optional<std::pair<int, int>> grid_dimensions(int n_cells, const FixedOutline& outline);

/// Grid of exactly n_cells cells (or the nearest cell count in
/// [min_cells, max_cells] that factors into the outline) with random
/// interior cuts. Throws GeometryError when the outline is too small.
PartitionGrid create_mesh_cells(int n_cells, int min_cells, int max_cells, const FixedOutline& outline, Rng& rng);

/// create_mesh_cells with n_cells = uniform{4, 5, 6} * n_parts.
PartitionGrid create_mesh(int n_parts, const FixedOutline& outline, Rng& rng);

inline constexpr int kMergeFallbackPatience = 50;

/// Merges adjacent cells until n_parts partitions remain, accepting a merge
/// when it reduces the W1 distance of the aspect-ratio multiset to `target`
/// (sorted ascending). Throws GenerationError when no admissible merge is
/// left before reaching n_parts.
std::vector<Partition> merge_partitions(const PartitionGrid& grid, int n_parts, std::span<const double> target,
                                        bool rectilinear, Rng& rng, GenerationTrace* trace = nullptr);

struct GenerationResult {
  std::uint64_t index = 0;
  std::optional<LayoutInstance> layout;
  GenerationTrace trace;
  /// Set when the instance was skipped.
  std::string error;
};

inline constexpr int kGenerationAttempts = 10;
inline constexpr std::size_t kTargetQuantiles = 1024;

/// Instance `index` of a Prime run; deterministic given (config.seed, index).
GenerationResult generate_prime(const GenConfig& config, const TargetDistributions& targets, std::uint64_t index);

/// Terminals, nets and (when enabled) placement constraints sampled from the
/// target distributions, then labels. Shared by both pipelines.
void annotate_layout(LayoutInstance& layout, const GenConfig& config, const TargetDistributions& targets, Rng& rng,
                     GenerationTrace& trace);

}  // namespace floorset
