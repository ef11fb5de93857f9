#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "floorset/bookshelf.hpp"
#include "floorset/dataset.hpp"
#include "floorset/lite.hpp"
#include "floorset/report.hpp"
#include "floorset/sa.hpp"

namespace fs = std::filesystem;
using namespace floorset;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitPartial = 2;

// Runs fn(i) for i in [0, n) on `jobs` threads. Results go to caller-owned
// slots; nothing here touches files.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("floorgen");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("FLOORGEN_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour "off" when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("ignoring unknown FLOORGEN_LOG level '{}'", env);
    }
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct GenerateArgs {
  std::string config;
  std::string dist;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string format = "container";
  int jobs = 1;
};

int cmd_generate(const GenerateArgs& a) {
  GenConfig config = GenConfig::load(a.config);
  if (a.seed) config.seed = *a.seed;
  const TargetDistributions targets = a.dist.empty() ? TargetDistributions::defaults() : TargetDistributions::load(a.dist);
  const auto n = static_cast<std::size_t>(config.num_layouts);
  spdlog::info("generating {} {} layouts, seed {}, {} job(s)", n, to_string(config.mode), config.seed, a.jobs);

  std::vector<GenerationResult> results(n);
  parallel_for(n, a.jobs, [&](std::size_t i) { results[i] = generate_instance(config, targets, i); });

  Dataset data;
  data.mode = config.mode;
  std::size_t skipped = 0;
  for (auto& r : results) {
    if (!r.layout) {
      ++skipped;
      spdlog::warn("instance {} skipped: {}", r.index, r.error);
      continue;
    }
    const auto& l = *r.layout;
    spdlog::debug("instance {}: mode={} seed={} index={} parts={} terminals={} nets={} attempts={}", r.index,
                  to_string(l.provenance.mode), l.provenance.seed, l.provenance.index, l.partitions.size(),
                  l.terminals.size(), l.nets.size(), r.trace.attempts);
    for (const auto& note : r.trace.notes) spdlog::debug("instance {}: {}", r.index, note);
    data.instances.push_back(std::move(*r.layout));
  }

  const fs::path out(a.out);
  if (a.format == "container" || a.format == "both") {
    save_dataset(data, out / "dataset.fsd");
    spdlog::info("wrote {}", (out / "dataset.fsd").string());
  }
  if (a.format == "bookshelf" || a.format == "both") {
    for (const auto& l : data.instances) {
      save_bookshelf(write_bookshelf(l), out / "bookshelf", "layout_" + std::to_string(l.provenance.index));
    }
    spdlog::info("wrote {} Bookshelf triples under {}", data.instances.size(), (out / "bookshelf").string());
  }
  spdlog::info("{} written, {} skipped", data.instances.size(), skipped);
  return skipped ? kExitPartial : kExitOk;
}

struct EvaluateArgs {
  std::string dataset;
  std::string solutions;
  std::string out;
};

void emit_report(const std::string& report, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << report;
  } else {
    write_file(out, report);
    spdlog::info("wrote {}", out);
  }
}

void log_summary(const std::vector<ReportRow>& rows) {
  std::size_t ge1 = 0, violated = 0;
  for (const auto& r : rows) {
    ge1 += r.relative.rel_area >= 1.0 && r.relative.rel_b2b_wl >= 1.0;
    violated += r.violations.total() > 0 || r.violations.overflow;
  }
  spdlog::info("{} instances: {} with rel_area >= 1 and rel_b2b_wl >= 1, {} with violations", rows.size(), ge1,
               violated);
}

int cmd_evaluate(const EvaluateArgs& a) {
  const Dataset data = load_dataset(a.dataset);
  const auto rows = evaluate(data, load_solutions(a.solutions));
  emit_report(format_report(rows), a.out);
  log_summary(rows);
  return kExitOk;
}

struct SolveArgs {
  std::string dataset;
  std::string sa_params;
  std::string out = "solve";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int cmd_solve(const SolveArgs& a) {
  const Dataset data = load_dataset(a.dataset);
  SAParams params = a.sa_params.empty() ? SAParams{} : SAParams::load(a.sa_params);
  if (a.seed) params.seed = *a.seed;
  const std::size_t n = data.instances.size();
  spdlog::info("solving {} instances, seed {}, {} job(s)", n, params.seed, a.jobs);

  std::vector<PlacementSolution> solutions(n);
  parallel_for(n, a.jobs, [&](std::size_t i) {
    SAParams p = params;
    Rng seeder = make_stream(params.seed, i, 0x501e);
    p.seed = seeder();
    solutions[i] = solve_baseline(data.instances[i], p).solution;
    spdlog::debug("instance {} solved", i);
  });

  const SolutionSet set = solutions_from_rects(solutions);
  const fs::path out(a.out);
  write_file(out / "solutions.json", write_solutions(set));
  const auto rows = evaluate(data, set);
  write_file(out / "report.tsv", format_report(rows));
  spdlog::info("wrote {} and {}", (out / "solutions.json").string(), (out / "report.tsv").string());
  log_summary(rows);
  return kExitOk;
}

struct StatsArgs {
  std::string dataset;
  std::string dist;
  std::string out = "stats";
};

int cmd_stats(const StatsArgs& a) {
  const Dataset data = load_dataset(a.dataset);
  const TargetDistributions targets = a.dist.empty() ? TargetDistributions::defaults() : TargetDistributions::load(a.dist);
  const DatasetStats s = dataset_stats(data, targets);
  write_stats(s, a.out);
  std::cout << "partitions\t" << s.aspects.size() << "\n"
            << "b2b_nets\t" << s.net_lengths.size() << "\n"
            << "aspect_w1\t" << format_number(s.aspect_w1) << "\n";
  spdlog::info("wrote histograms to {}", a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Synthetic floorplan benchmark generator and baseline solver"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a dataset from a config");
  g->add_option("--config", gen.config, "Generator config (floorset-config v1)")->required()->check(CLI::ExistingFile);
  g->add_option("--dist", gen.dist, "Target distributions (floorset-dist v1); defaults built in")->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();
  g->add_option("--seed", gen.seed, "Overrides the config seed");
  g->add_option("--format", gen.format, "Output format")
      ->check(CLI::IsMember({"container", "bookshelf", "both"}))
      ->capture_default_str();
  g->add_option("--jobs", gen.jobs, "Parallel instance workers")->check(CLI::PositiveNumber)->capture_default_str();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score solutions against a dataset's golden labels");
  e->add_option("dataset", ev.dataset, "Dataset container")->required()->check(CLI::ExistingFile);
  e->add_option("solutions", ev.solutions, "Solutions file or dataset container")->required()->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "Report path (stdout when omitted)");

  SolveArgs so;
  auto* s = app.add_subcommand("solve", "Run the annealing baseline on every instance");
  s->add_option("dataset", so.dataset, "Dataset container")->required()->check(CLI::ExistingFile);
  s->add_option("--sa-params", so.sa_params, "Annealer parameters (floorset-sa v1)")->check(CLI::ExistingFile);
  s->add_option("--out", so.out, "Output directory")->capture_default_str();
  s->add_option("--seed", so.seed, "Overrides the parameter file seed");
  s->add_option("--jobs", so.jobs, "Parallel instance workers")->check(CLI::PositiveNumber)->capture_default_str();

  StatsArgs st;
  auto* t = app.add_subcommand("stats", "Aspect-ratio, net-length and vertex-count histograms");
  t->add_option("dataset", st.dataset, "Dataset container")->required()->check(CLI::ExistingFile);
  t->add_option("--dist", st.dist, "Target distributions for the W1 comparison")->check(CLI::ExistingFile);
  t->add_option("--out", st.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (e->parsed()) return cmd_evaluate(ev);
    if (s->parsed()) return cmd_solve(so);
    if (t->parsed()) return cmd_stats(st);
  } catch (const std::exception& ex) {
    spdlog::error("{}", ex.what());
    return kExitFailure;
  }
  return kExitFailure;
}
