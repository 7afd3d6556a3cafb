// linkbound: run the simulation sweeps, evaluate bounds on a dataset, and
// generate dataset fixtures.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <CLI11.hpp>

#include "linkbound/bounds.hpp"
#include "linkbound/experiment.hpp"
#include "linkbound/io.hpp"
#include "linkbound/rng.hpp"
#include "linkbound/samplers.hpp"
#include "linkbound/simulate.hpp"

namespace fs = std::filesystem;
using namespace linkbound;

namespace {

constexpr int kPropertyViolation = 2;

struct Scale {
  std::size_t grid_points;
  std::size_t iterations;
  std::size_t exact_draws;
};

constexpr Scale kDesk{8, 2000, 2000};
constexpr Scale kPaper{10, 10000, 10000};

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("LINKBOUND_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end) throw Error("LINKBOUND_SEED is not an unsigned integer: " + std::string(s));
  return v;
}

SweepParameter parse_parameter(const std::string& s) {
  if (s == "N") return SweepParameter::entities;
  if (s == "beta") return SweepParameter::distortion;
  if (s == "p") return SweepParameter::fields;
  if (s == "theta") return SweepParameter::theta;
  if (s == "c") return SweepParameter::steepness;
  throw Error("unknown sweep parameter '" + s + "' (expected N, beta, p, theta or c)");
}

ModelKind parse_model(const std::string& s) {
  if (s == "categorical" || s == "cat") return ModelKind::categorical;
  if (s == "string" || s == "str") return ModelKind::string;
  throw Error("unknown model '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
  }
  return out;
}

struct RunPlan {
  std::vector<SweepSpec> sweeps;
  ExperimentConfig config;
  fs::path out;
};

/// INI sections: [sweep] name, model, vary, grid (comma list) or lo/hi/points
/// (+ scale = log), replicates, seed; [fixed] N, beta, p, theta, c;
/// [sampler] iterations, burn_in, mode, exact_draws, workers, timing;
/// [output] dir.
RunPlan plan_from_config(const fs::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ptree_error& e) {
    throw Error(e.what());
  }
  RunPlan plan;
  SweepSpec spec;
  spec.name = tree.get<std::string>("sweep.name", path.stem().string());
  spec.model = parse_model(tree.get<std::string>("sweep.model", "categorical"));
  spec.vary = parse_parameter(tree.get<std::string>("sweep.vary"));
  if (auto grid = tree.get_optional<std::string>("sweep.grid")) {
    spec.grid = parse_list(*grid);
  } else {
    const double lo = tree.get<double>("sweep.lo");
    const double hi = tree.get<double>("sweep.hi");
    const auto points = tree.get<std::size_t>("sweep.points", kDesk.grid_points);
    const bool integer = spec.vary == SweepParameter::entities || spec.vary == SweepParameter::fields;
    spec.grid = tree.get<std::string>("sweep.scale", "linear") == "log" ? log_grid(lo, hi, points)
                                                                        : linear_grid(lo, hi, points, integer);
  }
  spec.replicates = tree.get<std::size_t>("sweep.replicates", spec.replicates);
  spec.root_seed = tree.get<std::uint64_t>("sweep.seed", env_seed().value_or(0));
  spec.fixed.entities = tree.get<std::size_t>("fixed.N", spec.fixed.entities);
  spec.fixed.beta = tree.get<double>("fixed.beta", spec.fixed.beta);
  spec.fixed.fields = tree.get<std::size_t>("fixed.p", spec.fixed.fields);
  spec.fixed.theta = tree.get<double>("fixed.theta", spec.fixed.theta);
  spec.fixed.c = tree.get<double>("fixed.c", spec.fixed.c);

  plan.config.sampler.iterations = tree.get<std::size_t>("sampler.iterations", kDesk.iterations);
  plan.config.sampler.burn_in = tree.get<double>("sampler.burn_in", plan.config.sampler.burn_in);
  const auto mode = tree.get<std::string>("sampler.mode", "fixed");
  if (mode == "hierarchical") plan.config.sampler.mode = SamplerMode::hierarchical;
  else if (mode != "fixed") throw Error("unknown sampler mode '" + mode + "'");
  plan.config.exact_draws = tree.get<std::size_t>("sampler.exact_draws", kDesk.exact_draws);
  plan.config.workers = tree.get<std::size_t>("sampler.workers", 1);
  plan.config.record_timing = tree.get<bool>("sampler.timing", true);
  plan.out = tree.get<std::string>("output.dir", "");
  plan.sweeps.push_back(std::move(spec));
  return plan;
}

int run_plan(const RunPlan& plan) {
  int status = 0;
  for (const auto& spec : plan.sweeps) {
    std::cerr << "running " << spec.name << " (" << spec.grid.size() << " points x "
              << spec.replicates << " replicates)\n";
    const auto result = run_experiment(spec, plan.config);
    emit_csv(result, plan.out / (spec.name + ".csv"));
    emit_json(result, plan.out / (spec.name + ".json"));
    emit_plotdata(result, plan.out / (spec.name + ".plot.json"));
    for (const auto& row : result.rows) {
      if (row.failed()) {
        std::cerr << spec.name << ": " << row.failure << '\n';
        status = 1;
      }
    }
    for (const auto& v : fano_violations(result)) {
      std::cerr << "fano violation: " << v << '\n';
      if (status == 0) status = kPropertyViolation;
    }
    std::cout << spec.name << ": " << result.rows.size() << " rows -> "
              << (plan.out / (spec.name + ".csv")).string() << '\n';
  }
  return status;
}

std::shared_ptr<const StringUniverse> universe_for(const std::string& path) {
  if (path.empty())
    return std::shared_ptr<const StringUniverse>(std::shared_ptr<const StringUniverse>{},
                                                 &StringUniverse::bundled_names());
  return std::make_shared<const StringUniverse>(StringUniverse::load(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian record-linkage bounds and simulation sweeps"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a preset or configured sweep");
  std::string preset, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers, replicates, iterations, grid_points;
  bool paper_scale = false, no_timing = false;
  auto* preset_opt = run->add_option("--preset", preset, "table1a..table2d, 'all' or 'list'");
  run->add_option("--config", config_path, "INI sweep configuration")->excludes(preset_opt)->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "root seed (falls back to LINKBOUND_SEED)");
  run->add_option("--workers", workers, "concurrent replicates");
  run->add_option("--replicates", replicates, "replicates per grid point");
  run->add_option("--iterations", iterations, "Gibbs sweeps and exact draws per replicate");
  run->add_option("--grid-points", grid_points, "points per preset grid");
  run->add_flag("--paper-scale", paper_scale, "10,000 iterations and 10-point grids");
  run->add_flag("--no-timing", no_timing, "write 0 in the seconds column");
  run->add_option("--out", out_dir, "output directory");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "print the bound report for a dataset");
  std::string dataset_path;
  bounds->add_option("--dataset", dataset_path, "dataset JSON")->required()->check(CLI::ExistingFile);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a dataset fixture");
  std::string gen_model = "cat", universe_path, gen_out;
  std::size_t gen_entities = 10, gen_fields = 3, gen_cardinality = 10;
  std::vector<std::size_t> gen_databases;
  double gen_beta = 0.5, gen_c = 1.0;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--model", gen_model, "cat or str")->check(CLI::IsMember({"cat", "str"}));
  gen->add_option("--entities,-N", gen_entities, "latent entities");
  gen->add_option("--databases", gen_databases, "records per database (default: one of N)");
  gen->add_option("--fields,-p", gen_fields, "fields");
  gen->add_option("--cardinality,-M", gen_cardinality, "categories per field (cat)");
  gen->add_option("--beta", gen_beta, "distortion probability");
  gen->add_option("-c", gen_c, "string steepness (str)");
  gen->add_option("--universe", universe_path, "string universe file (str; default bundled names)");
  gen->add_option("--seed", gen_seed, "seed (falls back to LINKBOUND_SEED)");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // sample
  auto* sample = app.add_subcommand("sample", "run a sampler on a dataset and print its summary");
  std::string sample_dataset, sampler_kind = "gibbs", mode = "fixed";
  SamplerConfig sample_config;
  std::optional<std::uint64_t> sample_seed;
  sample->add_option("--dataset", sample_dataset, "dataset JSON")->required()->check(CLI::ExistingFile);
  sample->add_option("--sampler", sampler_kind, "gibbs or exact")->check(CLI::IsMember({"gibbs", "exact"}));
  sample->add_option("--iterations", sample_config.iterations, "sweeps or draws");
  sample->add_option("--burn-in", sample_config.burn_in, "burn-in fraction (gibbs)");
  sample->add_option("--mode", mode, "fixed or hierarchical")->check(CLI::IsMember({"fixed", "hierarchical"}));
  sample->add_option("--seed", sample_seed, "seed (falls back to LINKBOUND_SEED)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (preset == "list") {
        for (const auto& name : preset_names()) std::cout << name << '\n';
        return 0;
      }
      if (preset.empty() && config_path.empty()) throw Error("run needs --preset or --config");
      const Scale scale = paper_scale ? kPaper : kDesk;
      RunPlan plan;
      if (!config_path.empty()) {
        plan = plan_from_config(config_path);
      } else {
        const std::size_t points = grid_points.value_or(scale.grid_points);
        const auto names = preset == "all" ? preset_names() : std::vector<std::string>{preset};
        for (const auto& name : names) {
          auto spec = preset_sweep(name, points);
          spec.root_seed = env_seed().value_or(0);
          plan.sweeps.push_back(std::move(spec));
        }
        plan.config.sampler.iterations = scale.iterations;
        plan.config.exact_draws = scale.exact_draws;
      }
      if (paper_scale && !config_path.empty()) {
        plan.config.sampler.iterations = kPaper.iterations;
        plan.config.exact_draws = kPaper.exact_draws;
      }
      if (iterations) plan.config.sampler.iterations = plan.config.exact_draws = *iterations;
      if (workers) plan.config.workers = *workers;
      if (no_timing) plan.config.record_timing = false;
      for (auto& spec : plan.sweeps) {
        if (seed) spec.root_seed = *seed;
        if (replicates) spec.replicates = *replicates;
      }
      if (!out_dir.empty()) plan.out = out_dir;
      if (plan.out.empty()) throw Error("run needs --out (or output.dir in the config)");
      return run_plan(plan);
    }

    if (*bounds) {
      const auto data = load_dataset(dataset_path);
      const auto report = bound_report(data.model, data.latents, data.linkage);
      std::cout << report_to_json(report) << '\n';
      if (!report.dominance_holds()) {
        std::cerr << "bound dominance violated\n";
        return kPropertyViolation;
      }
      return 0;
    }

    if (*gen) {
      const std::uint64_t s = gen_seed ? *gen_seed : env_seed().value_or(0);
      if (gen_databases.empty()) gen_databases = {gen_entities};
      Dataset data = [&] {
        if (gen_model == "cat") {
          const auto schema = FieldSchema::categorical(gen_fields, gen_cardinality);
          return generate_categorical(gen_entities, gen_databases, schema,
                                      ModelParams::uniform(schema, gen_beta), s);
        }
        const auto schema = FieldSchema::strings(universe_for(universe_path), gen_fields);
        return generate_string(gen_entities, gen_databases, schema,
                               ModelParams::uniform(schema, gen_beta, gen_c), s);
      }();
      if (gen_out.empty()) std::cout << dataset_to_json(data) << '\n';
      else save_dataset(data, gen_out);
      return 0;
    }

    if (*sample) {
      const auto data = load_dataset(sample_dataset);
      sample_config.seed = sample_seed ? *sample_seed : env_seed().value_or(0);
      sample_config.mode = mode == "fixed" ? SamplerMode::fixed_params : SamplerMode::hierarchical;
      sample_config.validate();
      std::vector<LinkageStructure> draws;
      std::size_t burn_in = 0;
      if (sampler_kind == "exact") {
        draws = exact_sample_linkage(data.model, data.records, data.latents,
                                     sample_config.iterations, sample_config.seed);
      } else {
        const auto init = initial_state(data.model, data.records, data.latents, sample_config.mode,
                                        derive_seed(sample_config.seed, {0}));
        for (auto& state : gibbs_run(data.model, data.records, data.latents, init, sample_config))
          draws.push_back(std::move(state.linkage));
        burn_in = sample_config.burn_in_count();
      }
      std::cout << summary_to_json(summarize(draws, data.linkage, sample_config, burn_in)) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "linkbound: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
