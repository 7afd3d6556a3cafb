#include "linkbound/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "linkbound/bounds.hpp"
#include "linkbound/rng.hpp"

namespace linkbound {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicateOutcome {
  double fano_raw = kNaN;
  double fano_clamped = kNaN;
  double kl = kNaN;
  double bound = kNaN;
  ErrorEstimate exact;
  ErrorEstimate gibbs;
  double seconds = 0.0;
  std::string failure;
};

ReplicateOutcome run_replicate(const SweepSpec& spec, std::size_t point, std::size_t replicate,
                               const ExperimentConfig& config) {
  ReplicateOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::uint64_t seed = derive_seed(spec.root_seed, {point, replicate});
    const Dataset data = replicate_dataset(spec, point, replicate);

    out.bound = model_bound(data.model, data.latents, 1);
    out.kl = max_record_kl(data.model, data.latents);
    const auto fano = fano_lower(out.bound, data.entity_count());
    out.fano_raw = fano.raw;
    out.fano_clamped = fano.clamped;

    ErrorAccumulator exact(data.linkage);
    exact_sample_linkage(data.model, data.records, data.latents, config.exact_draws,
                         derive_seed(seed, {1}),
                         [&](std::size_t, const LinkageStructure& s) { exact.add(s); });
    out.exact = exact.estimate();

    SamplerConfig sampler = config.sampler;
    sampler.seed = derive_seed(seed, {3});
    const std::size_t burn_in = sampler.burn_in_count();
    ErrorAccumulator gibbs(data.linkage);
    auto init = initial_state(data.model, data.records, data.latents, sampler.mode, derive_seed(seed, {2}));
    gibbs_run(data.model, data.records, data.latents, std::move(init), sampler,
              [&](const ChainState& s) {
                if (s.iteration > burn_in) gibbs.add(s.linkage);
              });
    out.gibbs = gibbs.estimate();
  } catch (const std::exception& e) {
    out.failure = "replicate " + std::to_string(replicate) + ": " + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double mean_of(const std::vector<ReplicateOutcome>& reps, double ReplicateOutcome::*field) {
  double total = 0.0;
  for (const auto& r : reps) total += r.*field;
  return total / static_cast<double>(reps.size());
}

/// Replicate mean and its standard error; a single replicate falls back to the
/// within-chain standard error.
std::pair<double, double> pooled(const std::vector<ReplicateOutcome>& reps,
                                 ErrorEstimate ReplicateOutcome::*field) {
  const double n = static_cast<double>(reps.size());
  double mean = 0.0;
  for (const auto& r : reps) mean += (r.*field).rate;
  mean /= n;
  if (reps.size() == 1) return {mean, (reps.front().*field).standard_error};
  double ss = 0.0;
  for (const auto& r : reps) ss += ((r.*field).rate - mean) * ((r.*field).rate - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

ExperimentRow aggregate(double value, const std::vector<ReplicateOutcome>& reps, bool timing) {
  ExperimentRow row;
  row.value = value;
  for (const auto& r : reps) {
    if (timing) row.seconds += r.seconds;
    if (!r.failure.empty() && row.failure.empty()) row.failure = r.failure;
  }
  if (row.failed()) {
    row.fano_raw = row.fano_clamped = row.kl_mean = row.bound = kNaN;
    row.err_exact = row.se_exact = row.err_gibbs = row.se_gibbs = kNaN;
    return row;
  }
  row.fano_raw = mean_of(reps, &ReplicateOutcome::fano_raw);
  row.fano_clamped = mean_of(reps, &ReplicateOutcome::fano_clamped);
  row.kl_mean = mean_of(reps, &ReplicateOutcome::kl);
  row.bound = mean_of(reps, &ReplicateOutcome::bound);
  std::tie(row.err_exact, row.se_exact) = pooled(reps, &ReplicateOutcome::exact);
  std::tie(row.err_gibbs, row.se_gibbs) = pooled(reps, &ReplicateOutcome::gibbs);
  return row;
}

std::string format_number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.15g", v);
  return buffer;
}

json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const json& j) {
  if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
  return j.get<double>();
}

const char* const kColumns[] = {"sweep_param", "value",        "fano_raw", "fano_clamped",
                                "kl_mean",     "bound_gamma_or_kappa", "err_exact", "se_exact",
                                "err_gibbs",   "se_gibbs",     "seconds"};

std::vector<double ExperimentRow::*> numeric_columns() {
  return {&ExperimentRow::value,     &ExperimentRow::fano_raw,  &ExperimentRow::fano_clamped,
          &ExperimentRow::kl_mean,   &ExperimentRow::bound,     &ExperimentRow::err_exact,
          &ExperimentRow::se_exact,  &ExperimentRow::err_gibbs, &ExperimentRow::se_gibbs,
          &ExperimentRow::seconds};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double average = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = average;
    i = j + 1;
  }
  return out;
}

}  // namespace

Dataset replicate_dataset(const SweepSpec& spec, std::size_t point, std::size_t replicate) {
  if (point >= spec.grid.size()) throw Error("grid point out of range");
  const std::uint64_t seed = derive_seed(spec.root_seed, {point, replicate});
  return generate_point(spec.model, spec.at(spec.grid[point]), derive_seed(seed, {0}));
}

ExperimentResult run_experiment(const SweepSpec& spec, const ExperimentConfig& config) {
  spec.validate();
  config.sampler.validate();
  if (config.exact_draws < 1) throw Error("exact sampler needs at least one draw");
  const std::size_t points = spec.grid.size();
  const std::size_t tasks = points * spec.replicates;
  std::vector<ReplicateOutcome> outcomes(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++)
      outcomes[t] = run_replicate(spec, t / spec.replicates, t % spec.replicates, config);
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, tasks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  ExperimentResult result;
  result.name = spec.name;
  result.sweep_param = parameter_name(spec.vary);
  for (std::size_t k = 0; k < points; ++k) {
    const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(k * spec.replicates);
    std::vector<ReplicateOutcome> reps(first, first + static_cast<std::ptrdiff_t>(spec.replicates));
    result.rows.push_back(aggregate(spec.grid[k], reps, config.record_timing));
  }
  return result;
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  for (std::size_t c = 0; c < std::size(kColumns); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& row : result.rows) {
    out << result.sweep_param;
    for (auto column : numeric_columns()) out << ',' << format_number(row.*column);
    out << '\n';
  }
}

std::string result_to_json(const ExperimentResult& result) {
  json rows = json::array();
  const auto columns = numeric_columns();
  for (const auto& row : result.rows) {
    json j;
    for (std::size_t c = 0; c < columns.size(); ++c) j[kColumns[c + 1]] = number_to_json(row.*columns[c]);
    j["failure"] = row.failure;
    rows.push_back(std::move(j));
  }
  return json{{"name", result.name}, {"sweep_param", result.sweep_param}, {"rows", rows}}.dump(2);
}

ExperimentResult result_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentResult result;
  result.name = j.at("name").get<std::string>();
  result.sweep_param = j.at("sweep_param").get<std::string>();
  const auto columns = numeric_columns();
  for (const auto& r : j.at("rows")) {
    ExperimentRow row;
    for (std::size_t c = 0; c < columns.size(); ++c) row.*columns[c] = number_from_json(r.at(kColumns[c + 1]));
    row.failure = r.value("failure", "");
    result.rows.push_back(std::move(row));
  }
  return result;
}

ExperimentResult result_from_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV");
  ExperimentResult result;
  result.name = name;
  const auto columns = numeric_columns();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    result.sweep_param = cell;
    ExperimentRow row;
    for (auto column : columns) {
      if (!std::getline(cells, cell, ',')) throw Error("short CSV row");
      row.*column = std::strtod(cell.c_str(), nullptr);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string plotdata_json(const ExperimentResult& result) {
  json bound = json::array(), exact = json::array(), gibbs = json::array();
  for (const auto& row : result.rows) {
    bound.push_back({{"x", number_to_json(row.value)}, {"y", number_to_json(row.fano_clamped)}});
    exact.push_back({{"x", number_to_json(row.value)},
                     {"y", number_to_json(row.err_exact)},
                     {"se", number_to_json(row.se_exact)}});
    gibbs.push_back({{"x", number_to_json(row.value)},
                     {"y", number_to_json(row.err_gibbs)},
                     {"se", number_to_json(row.se_gibbs)}});
  }
  json panel{{"panel", result.name},
             {"x_label", result.sweep_param},
             {"y_label", "linkage error"},
             {"series", {{"bound", bound}, {"exact", exact}, {"gibbs", gibbs}}}};
  return panel.dump(2);
}

void emit_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ostringstream out;
  write_csv(result, out);
  write_file(path, out.str());
}

void emit_json(const ExperimentResult& result, const std::filesystem::path& path) {
  write_file(path, result_to_json(result) + "\n");
}

void emit_plotdata(const ExperimentResult& result, const std::filesystem::path& path) {
  write_file(path, plotdata_json(result) + "\n");
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equal-length series");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::string> fano_violations(const ExperimentResult& result) {
  std::vector<std::string> out;
  for (const auto& row : result.rows) {
    if (row.failed()) continue;
    if (row.fano_clamped > row.err_exact + 3.0 * row.se_exact) {
      out.push_back(result.name + " at " + result.sweep_param + "=" + format_number(row.value) +
                    ": fano " + format_number(row.fano_clamped) + " > error " +
                    format_number(row.err_exact) + " + 3*" + format_number(row.se_exact));
    }
  }
  return out;
}

}  // namespace linkbound
