#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "floorset/layout.hpp"
#include "floorset/rng.hpp"

namespace floorset {

class DistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace dist {

struct Constant {
  double value = 0.0;
};
struct Uniform {
  double lo = 0.0;
  double hi = 0.0;
};
struct UniformInt {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
struct Choice {
  std::vector<double> values;
  std::vector<double> weights;
};
/// Log-normal with the given median, truncated to [lo, hi] by rejection.
struct LogNormal {
  double median = 1.0;
  double sigma = 0.4;
  double lo = 0.25;
  double hi = 4.0;
};

/// Net weight as a function of normalized net length: Beta distributed
/// with mean interpolated linearly between the two endpoints.
struct LinearBeta {
  double mean_at_zero = 0.8;
  double mean_at_one = 0.2;
  double concentration = 6.0;
};

}  // namespace dist

using Distribution = std::variant<dist::Constant, dist::Uniform, dist::UniformInt, dist::Choice, dist::LogNormal>;
using WeightModel = std::variant<dist::Constant, dist::LinearBeta>;

double sample(const Distribution& d, Rng& rng);

/// Smallest and largest value the distribution can produce.
std::pair<double, double> support(const Distribution& d);

/// n evenly spaced quantiles (at (i + 0.5) / n) of the distribution. Used as
/// the reference sample when measuring distance to a target.
std::vector<double> target_quantiles(const Distribution& d, std::size_t n);

double sample_net_weight(const WeightModel& model, double normalized_length, Rng& rng);

/// The ten per-layout parameters driving generation.
struct TargetDistributions {
  Distribution aspect;          // A_parts
  Distribution terms_ratio;     // N_terms^parts
  Distribution part_density;    // D_parts
  Distribution term_density;    // D_terms
  WeightModel net_weight;       // W_parts
  Distribution boundary_frac;   // E_parts
  Distribution cluster_frac;    // C_parts
  Distribution cluster_count;   // N_clusters
  Distribution preplaced_frac;  // P_parts
  Distribution multi_inst_frac; // M_parts

  static TargetDistributions defaults();

  const Distribution& named(std::string_view name) const;
  Distribution& named(std::string_view name) {
    return const_cast<Distribution&>(std::as_const(*this).named(name));
  }
  double sample(std::string_view name, Rng& rng) const;

  /// Throws DistributionError when a support falls outside its allowed range.
  void validate() const;

  static TargetDistributions from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static TargetDistributions load(const std::string& path);
};

/// 1-Wasserstein distance between two empirical distributions with equal
/// atom weights (area between the quantile functions).
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// Same as wasserstein_1d but both inputs are already sorted ascending.
double wasserstein_1d_sorted(std::span<const double> a, std::span<const double> b);

std::vector<double> empirical_aspects(std::span<const Partition> partitions);

/// Integer sweep: either an inclusive range or an explicit list of choices.
struct IntSweep {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<std::int64_t> choices;

  std::int64_t sample(Rng& rng) const;
  std::int64_t min() const;
};

struct OutlineSweep {
  IntSweep width;
  IntSweep height;
  std::vector<std::pair<std::int64_t, std::int64_t>> choices;

  FixedOutline sample(Rng& rng) const;
};

struct GenConfig {
  std::int64_t num_layouts = 1;
  OutlineSweep outline;
  IntSweep num_partitions;
  bool rectilinear = true;
  bool placement_constraints = true;
  DatasetMode mode = DatasetMode::Prime;
  std::uint64_t seed = 1;
  double terminal_pitch_slack = 0.5;

  void validate() const;
  static GenConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static GenConfig load(const std::string& path);
};

}  // namespace floorset
