#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "floorset/dataset.hpp"
#include "floorset/distributions.hpp"
#include "floorset/metrics.hpp"

namespace floorset {

/// One candidate placement per dataset instance, matched by position.
struct SolutionSet {
  std::vector<Placement> placements;
};

inline constexpr const char* kSolutionsSchema = "floorset-solutions v1";

SolutionSet solutions_from_rects(const std::vector<PlacementSolution>& solutions);
/// Golden geometry of every instance, for golden-vs-golden checks.
SolutionSet solutions_from_dataset(const Dataset& data);

/// JSON document {"schema": ..., "solutions": [{"index", "blocks": [[x,y,w,h] | [[x,y],...]]}]}.
std::string write_solutions(const SolutionSet& solutions);
SolutionSet read_solutions(const std::string& text);
/// Accepts a solutions file or a dataset container.
SolutionSet load_solutions(const std::filesystem::path& path);

struct ReportRow {
  std::size_t index = 0;
  Labels labels;
  ViolationCounts violations;
  RelativeMetrics relative;
};

/// Throws std::invalid_argument when the solution count or block counts do
/// not line up with the dataset.
std::vector<ReportRow> evaluate(const Dataset& data, const SolutionSet& solutions);

/// Tab-separated report: header row, one row per instance, then a `mean`
/// summary row.
std::string format_report(const std::vector<ReportRow>& rows);

struct Histogram {
  std::vector<double> edges;  // size bins + 1
  std::vector<double> density;
  std::vector<double> target_density;  // empty when there is no target

  /// Equal-width bins over [lo, hi]; values outside land in the end bins.
  static Histogram build(const std::vector<double>& values, double lo, double hi, std::size_t bins);
};

struct DatasetStats {
  std::vector<double> aspects;
  std::vector<double> net_lengths;  // b2b centroid distance / outline perimeter
  std::vector<int> vertex_counts;
  Histogram aspect_hist;
  Histogram length_hist;
  /// Sorted-quantile distance of the pooled aspects to the A_parts target.
  double aspect_w1 = 0.0;
};

inline constexpr std::size_t kStatsBins = 40;

/// Throws std::invalid_argument for an empty dataset.
DatasetStats dataset_stats(const Dataset& data, const TargetDistributions& targets);

/// Writes aspect_pdf.tsv, netlen_pdf.tsv, vertex_hist.tsv and summary.tsv.
void write_stats(const DatasetStats& stats, const std::filesystem::path& dir);

}  // namespace floorset
