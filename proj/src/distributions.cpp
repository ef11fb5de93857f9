#include "floorset/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace floorset {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr const char* kDistSchema = "floorset-dist v1";
constexpr const char* kConfigSchema = "floorset-config v1";

const char* const kNames[] = {"A_parts", "N_terms_parts", "D_parts", "D_terms", "W_parts",
                              "E_parts", "C_parts",       "N_clusters", "P_parts", "M_parts"};

void check_choice(const dist::Choice& c) {
  if (c.values.empty()) throw DistributionError("choice distribution has no values");
  if (!c.weights.empty() && c.weights.size() != c.values.size()) {
    throw DistributionError("choice weights do not match values");
  }
  for (double w : c.weights) {
    if (!(w >= 0.0)) throw DistributionError("negative choice weight");
  }
  if (!c.weights.empty() && std::accumulate(c.weights.begin(), c.weights.end(), 0.0) <= 0.0) {
    throw DistributionError("choice weights sum to zero");
  }
}

double get_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw DistributionError(std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

Distribution distribution_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "constant") return dist::Constant{get_number(j, "value")};
  if (family == "uniform") {
    dist::Uniform u{get_number(j, "min"), get_number(j, "max")};
    if (u.lo > u.hi) throw DistributionError("uniform min exceeds max");
    return u;
  }
  if (family == "uniform_int") {
    dist::UniformInt u{j.at("min").get<std::int64_t>(), j.at("max").get<std::int64_t>()};
    if (u.lo > u.hi) throw DistributionError("uniform_int min exceeds max");
    return u;
  }
  if (family == "choice") {
    dist::Choice c;
    c.values = j.at("values").get<std::vector<double>>();
    if (j.contains("weights")) c.weights = j.at("weights").get<std::vector<double>>();
    check_choice(c);
    return c;
  }
  if (family == "lognormal") {
    dist::LogNormal d{get_number(j, "median"), get_number(j, "sigma"), get_number(j, "min"), get_number(j, "max")};
    if (d.median <= 0 || d.sigma < 0 || d.lo <= 0 || d.lo > d.hi || d.median < d.lo || d.median > d.hi) {
      throw DistributionError("invalid lognormal parameters");
    }
    return d;
  }
  throw DistributionError("unknown distribution family '" + family + "'");
}

nlohmann::json distribution_to_json(const Distribution& d) {
  return std::visit(overloaded{
                        [](const dist::Constant& c) { return nlohmann::json{{"family", "constant"}, {"value", c.value}}; },
                        [](const dist::Uniform& u) {
                          return nlohmann::json{{"family", "uniform"}, {"min", u.lo}, {"max", u.hi}};
                        },
                        [](const dist::UniformInt& u) {
                          return nlohmann::json{{"family", "uniform_int"}, {"min", u.lo}, {"max", u.hi}};
                        },
                        [](const dist::Choice& c) {
                          nlohmann::json j{{"family", "choice"}, {"values", c.values}};
                          if (!c.weights.empty()) j["weights"] = c.weights;
                          return j;
                        },
                        [](const dist::LogNormal& l) {
                          return nlohmann::json{{"family", "lognormal"}, {"median", l.median}, {"sigma", l.sigma},
                                                {"min", l.lo},          {"max", l.hi}};
                        },
                    },
                    d);
}

WeightModel weight_model_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "constant") return dist::Constant{get_number(j, "value")};
  if (family == "linear_beta") {
    dist::LinearBeta b{get_number(j, "mean_at_zero"), get_number(j, "mean_at_one"), get_number(j, "concentration")};
    return b;
  }
  throw DistributionError("unknown net weight family '" + family + "'");
}

nlohmann::json weight_model_to_json(const WeightModel& m) {
  if (const auto* c = std::get_if<dist::Constant>(&m)) return {{"family", "constant"}, {"value", c->value}};
  const auto& b = std::get<dist::LinearBeta>(m);
  return {{"family", "linear_beta"},
          {"mean_at_zero", b.mean_at_zero},
          {"mean_at_one", b.mean_at_one},
          {"concentration", b.concentration}};
}

void require_support(const Distribution& d, const char* name, double lo, double hi, bool open_lo) {
  const auto [slo, shi] = support(d);
  const bool lo_ok = open_lo ? slo > lo : slo >= lo;
  if (!lo_ok || shi > hi) {
    throw DistributionError(std::string("distribution ") + name + " has support outside its allowed range");
  }
}

IntSweep sweep_from_json(const nlohmann::json& j) {
  IntSweep s;
  if (j.is_number_integer()) {
    s.lo = s.hi = j.get<std::int64_t>();
  } else if (j.is_array()) {
    const auto v = j.get<std::vector<std::int64_t>>();
    if (v.size() != 2) throw DistributionError("range sweep must be [min, max]");
    s.lo = v[0];
    s.hi = v[1];
    if (s.lo > s.hi) throw DistributionError("sweep min exceeds max");
  } else if (j.is_object() && j.contains("choices")) {
    s.choices = j.at("choices").get<std::vector<std::int64_t>>();
    if (s.choices.empty()) throw DistributionError("empty sweep choices");
  } else {
    throw DistributionError("malformed sweep");
  }
  return s;
}

nlohmann::json sweep_to_json(const IntSweep& s) {
  if (!s.choices.empty()) return {{"choices", s.choices}};
  return nlohmann::json::array({s.lo, s.hi});
}

}  // namespace

double sample(const Distribution& d, Rng& rng) {
  return std::visit(overloaded{
                        [](const dist::Constant& c) { return c.value; },
                        [&](const dist::Uniform& u) { return uniform_real(rng, u.lo, u.hi); },
                        [&](const dist::UniformInt& u) { return static_cast<double>(uniform_int(rng, u.lo, u.hi)); },
                        [&](const dist::Choice& c) {
                          if (c.weights.empty()) {
                            return c.values[uniform_int<std::size_t>(rng, 0, c.values.size() - 1)];
                          }
                          const double total = std::accumulate(c.weights.begin(), c.weights.end(), 0.0);
                          double u = uniform01(rng) * total;
                          for (std::size_t i = 0; i < c.values.size(); ++i) {
                            if (u < c.weights[i]) return c.values[i];
                            u -= c.weights[i];
                          }
                          return c.values.back();
                        },
                        [&](const dist::LogNormal& l) {
                          boost::random::normal_distribution<double> normal(0.0, l.sigma);
                          for (int attempt = 0; attempt < 10000; ++attempt) {
                            const double v = l.median * std::exp(normal(rng));
                            if (v >= l.lo && v <= l.hi) return v;
                          }
                          return l.median;
                        },
                    },
                    d);
}

std::pair<double, double> support(const Distribution& d) {
  return std::visit(overloaded{
                        [](const dist::Constant& c) { return std::pair{c.value, c.value}; },
                        [](const dist::Uniform& u) { return std::pair{u.lo, u.hi}; },
                        [](const dist::UniformInt& u) {
                          return std::pair{static_cast<double>(u.lo), static_cast<double>(u.hi)};
                        },
                        [](const dist::Choice& c) {
                          const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
                          return std::pair{*lo, *hi};
                        },
                        [](const dist::LogNormal& l) { return std::pair{l.lo, l.hi}; },
                    },
                    d);
}

std::vector<double> target_quantiles(const Distribution& d, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out[i] = std::visit(
        overloaded{
            [](const dist::Constant& c) { return c.value; },
            [u](const dist::Uniform& r) { return r.lo + u * (r.hi - r.lo); },
            [u](const dist::UniformInt& r) {
              const double span = static_cast<double>(r.hi - r.lo + 1);
              return static_cast<double>(r.lo) + std::min(std::floor(u * span), span - 1.0);
            },
            [u](const dist::Choice& c) {
              std::vector<std::size_t> order(c.values.size());
              std::iota(order.begin(), order.end(), 0);
              std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.values[a] < c.values[b]; });
              double total = c.weights.empty() ? static_cast<double>(c.values.size())
                                               : std::accumulate(c.weights.begin(), c.weights.end(), 0.0);
              double acc = 0.0;
              for (auto k : order) {
                acc += (c.weights.empty() ? 1.0 : c.weights[k]) / total;
                if (u < acc) return c.values[k];
              }
              return c.values[order.back()];
            },
            [u](const dist::LogNormal& l) {
              if (l.sigma == 0.0) return l.median;
              const boost::math::normal_distribution<double> normal(0.0, l.sigma);
              const double plo = boost::math::cdf(normal, std::log(l.lo / l.median));
              const double phi = boost::math::cdf(normal, std::log(l.hi / l.median));
              return l.median * std::exp(boost::math::quantile(normal, plo + u * (phi - plo)));
            },
        },
        d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double sample_net_weight(const WeightModel& model, double normalized_length, Rng& rng) {
  if (!(normalized_length >= 0.0 && normalized_length <= 1.0)) {
    throw DistributionError("normalized net length outside [0,1]");
  }
  if (const auto* c = std::get_if<dist::Constant>(&model)) return c->value;
  const auto& b = std::get<dist::LinearBeta>(model);
  const double mean = b.mean_at_zero + (b.mean_at_one - b.mean_at_zero) * normalized_length;
  boost::random::beta_distribution<double> beta(mean * b.concentration, (1.0 - mean) * b.concentration);
  return std::clamp(beta(rng), 1e-6, 1.0);
}

TargetDistributions TargetDistributions::defaults() {
  TargetDistributions t;
  t.aspect = dist::LogNormal{1.0, 0.4, 0.25, 4.0};
  t.terms_ratio = dist::Uniform{0.2, 1.0};
  t.part_density = dist::Uniform{0.05, 0.25};
  t.term_density = dist::Uniform{0.02, 0.10};
  t.net_weight = dist::LinearBeta{0.8, 0.2, 6.0};
  t.boundary_frac = dist::Uniform{0.1, 0.3};
  t.cluster_frac = dist::Uniform{0.1, 0.3};
  t.cluster_count = dist::UniformInt{1, 4};
  t.preplaced_frac = dist::Uniform{0.05, 0.2};
  t.multi_inst_frac = dist::Uniform{0.0, 0.2};
  return t;
}

const Distribution& TargetDistributions::named(std::string_view name) const {
  if (name == "A_parts") return aspect;
  if (name == "N_terms_parts") return terms_ratio;
  if (name == "D_parts") return part_density;
  if (name == "D_terms") return term_density;
  if (name == "E_parts") return boundary_frac;
  if (name == "C_parts") return cluster_frac;
  if (name == "N_clusters") return cluster_count;
  if (name == "P_parts") return preplaced_frac;
  if (name == "M_parts") return multi_inst_frac;
  if (name == "W_parts") throw DistributionError("W_parts is conditional; use sample_net_weight");
  throw DistributionError("unknown distribution '" + std::string(name) + "'");
}

double TargetDistributions::sample(std::string_view name, Rng& rng) const {
  return floorset::sample(named(name), rng);
}

void TargetDistributions::validate() const {
  require_support(aspect, "A_parts", 0.0, 1e9, true);
  require_support(terms_ratio, "N_terms_parts", 0.0, 1e9, true);
  require_support(part_density, "D_parts", 0.0, 1.0, false);
  require_support(term_density, "D_terms", 0.0, 1.0, false);
  require_support(boundary_frac, "E_parts", 0.0, 1.0, false);
  require_support(cluster_frac, "C_parts", 0.0, 1.0, false);
  require_support(cluster_count, "N_clusters", 1.0, 1e9, false);
  require_support(preplaced_frac, "P_parts", 0.0, 1.0, false);
  require_support(multi_inst_frac, "M_parts", 0.0, 1.0, false);
  if (const auto* c = std::get_if<dist::Constant>(&net_weight)) {
    if (!(c->value > 0.0 && c->value <= 1.0)) throw DistributionError("W_parts constant outside (0,1]");
  } else {
    const auto& b = std::get<dist::LinearBeta>(net_weight);
    for (double m : {b.mean_at_zero, b.mean_at_one}) {
      if (!(m > 0.0 && m < 1.0)) throw DistributionError("W_parts means must lie in (0,1)");
    }
    if (!(b.concentration > 0.0)) throw DistributionError("W_parts concentration must be positive");
  }
}

TargetDistributions TargetDistributions::from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j.at("schema") != kDistSchema) {
    throw DistributionError(std::string("expected schema '") + kDistSchema + "'");
  }
  TargetDistributions t = defaults();
  for (const auto& [key, value] : j.items()) {
    if (key == "schema") continue;
    if (key == "W_parts") {
      t.net_weight = weight_model_from_json(value);
      continue;
    }
    if (std::find(std::begin(kNames), std::end(kNames), key) == std::end(kNames)) {
      throw DistributionError("unknown distribution '" + key + "'");
    }
    t.named(key) = distribution_from_json(value);
  }
  t.validate();
  return t;
}

nlohmann::json TargetDistributions::to_json() const {
  nlohmann::json j;
  j["schema"] = kDistSchema;
  for (const char* name : kNames) {
    if (std::string_view(name) == "W_parts") {
      j[name] = weight_model_to_json(net_weight);
    } else {
      j[name] = distribution_to_json(named(name));
    }
  }
  return j;
}

TargetDistributions TargetDistributions::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DistributionError("cannot open distribution file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DistributionError(path + ": " + e.what());
  }
}

double wasserstein_1d_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DistributionError("wasserstein_1d needs non-empty samples");
  const std::uint64_t n = a.size(), m = b.size();
  // Walk both quantile step functions on the common grid of i/n and j/m,
  // measured in units of 1/(n*m) so breakpoints compare exactly.
  std::uint64_t i = 0, j = 0, pos = 0;
  double total = 0.0;
  while (i < n && j < m) {
    const std::uint64_t next_a = (i + 1) * m;
    const std::uint64_t next_b = (j + 1) * n;
    const std::uint64_t next = std::min(next_a, next_b);
    total += static_cast<double>(next - pos) * std::abs(a[i] - b[j]);
    pos = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return wasserstein_1d_sorted(sa, sb);
}

std::vector<double> empirical_aspects(std::span<const Partition> partitions) {
  std::vector<double> out;
  out.reserve(partitions.size());
  for (const auto& p : partitions) out.push_back(bbox_aspect(p.shape));
  return out;
}

std::int64_t IntSweep::sample(Rng& rng) const {
  if (!choices.empty()) return choices[uniform_int<std::size_t>(rng, 0, choices.size() - 1)];
  return uniform_int(rng, lo, hi);
}

std::int64_t IntSweep::min() const {
  if (!choices.empty()) return *std::min_element(choices.begin(), choices.end());
  return lo;
}

FixedOutline OutlineSweep::sample(Rng& rng) const {
  if (!choices.empty()) {
    const auto& c = choices[uniform_int<std::size_t>(rng, 0, choices.size() - 1)];
    return {c.first, c.second};
  }
  const auto w = width.sample(rng);
  const auto h = height.sample(rng);
  return {w, h};
}

void GenConfig::validate() const {
  if (num_layouts < 0) throw DistributionError("num_layouts must be non-negative");
  if (num_partitions.min() < 2) throw DistributionError("partition counts must be >= 2");
  if (!(terminal_pitch_slack > 0.0 && terminal_pitch_slack <= 1.0)) {
    throw DistributionError("terminal_pitch_slack must lie in (0,1]");
  }
  if (outline.choices.empty()) {
    if (outline.width.min() < 1 || outline.height.min() < 1) throw DistributionError("outline must be positive");
  } else {
    for (const auto& [w, h] : outline.choices) {
      if (w < 1 || h < 1) throw DistributionError("outline must be positive");
    }
  }
}

GenConfig GenConfig::from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j.at("schema") != kConfigSchema) {
    throw DistributionError(std::string("expected schema '") + kConfigSchema + "'");
  }
  static const char* const known[] = {"schema",       "num_layouts", "foutline_shape",      "num_partitions",
                                      "rectilinear_flag", "placement_constraints_flag", "dataset_mode", "seed",
                                      "terminal_pitch_slack"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw DistributionError("unknown config field '" + key + "'");
    }
  }
  GenConfig c;
  c.num_layouts = j.at("num_layouts").get<std::int64_t>();
  const auto& shape = j.at("foutline_shape");
  if (shape.contains("choices")) {
    for (const auto& pair : shape.at("choices")) {
      c.outline.choices.emplace_back(pair.at(0).get<std::int64_t>(), pair.at(1).get<std::int64_t>());
    }
  } else {
    c.outline.width = sweep_from_json(shape.at("width"));
    c.outline.height = sweep_from_json(shape.at("height"));
  }
  c.num_partitions = sweep_from_json(j.at("num_partitions"));
  auto flag = [&](const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = j.at(key).get<int>();
    if (v != 0 && v != 1) throw DistributionError(std::string(key) + " must be 0 or 1");
    return v == 1;
  };
  c.rectilinear = flag("rectilinear_flag", true);
  c.placement_constraints = flag("placement_constraints_flag", true);
  c.mode = parse_dataset_mode(j.value("dataset_mode", std::string("Prime")));
  c.seed = j.value("seed", std::uint64_t{1});
  c.terminal_pitch_slack = j.value("terminal_pitch_slack", 0.5);
  c.validate();
  return c;
}

nlohmann::json GenConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = kConfigSchema;
  j["num_layouts"] = num_layouts;
  if (!outline.choices.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [w, h] : outline.choices) arr.push_back({w, h});
    j["foutline_shape"] = {{"choices", arr}};
  } else {
    j["foutline_shape"] = {{"width", sweep_to_json(outline.width)}, {"height", sweep_to_json(outline.height)}};
  }
  j["num_partitions"] = sweep_to_json(num_partitions);
  j["rectilinear_flag"] = rectilinear ? 1 : 0;
  j["placement_constraints_flag"] = placement_constraints ? 1 : 0;
  j["dataset_mode"] = to_string(mode);
  j["seed"] = seed;
  j["terminal_pitch_slack"] = terminal_pitch_slack;
  return j;
}

GenConfig GenConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DistributionError("cannot open config file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DistributionError(path + ": " + e.what());
  }
}

}  // namespace floorset
