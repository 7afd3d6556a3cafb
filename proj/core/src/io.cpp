#include "linkbound/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace linkbound {

namespace {

using nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json field_to_json(const FieldSpec& spec) {
  if (spec.kind == FieldKind::categorical)
    return {{"kind", "categorical"}, {"cardinality", spec.cardinality}};
  return {{"kind", "string"},
          {"values", spec.universe->values()},
          {"frequencies", std::vector<double>(spec.universe->frequencies().begin(),
                                              spec.universe->frequencies().end())}};
}

FieldSpec field_from_json(const json& j, std::shared_ptr<const StringUniverse>& last) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "categorical") return FieldSpec::categorical(j.at("cardinality").get<std::size_t>());
  if (kind != "string") throw Error("unknown field kind '" + kind + "'");
  auto values = j.at("values").get<std::vector<std::string>>();
  auto freqs = j.at("frequencies").get<std::vector<double>>();
  // Consecutive fields over the same universe share one distance matrix.
  if (!last || last->values() != values ||
      !std::equal(freqs.begin(), freqs.end(), last->frequencies().begin(), last->frequencies().end(),
                  [](double a, double b) { return std::abs(a - b) <= 1e-15; }))
    last = std::make_shared<const StringUniverse>(std::move(values), std::move(freqs));
  return FieldSpec::string(last);
}

json table_to_json(const ValueTable& table, const FieldSchema& schema) {
  json rows = json::array();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    json row = json::array();
    for (std::size_t f = 0; f < table.fields(); ++f) {
      if (schema.is_string(f)) row.push_back(schema[f].universe->value(table(r, f)));
      else row.push_back(table(r, f));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ValueTable table_from_json(const json& rows, const FieldSchema& schema, const char* what) {
  ValueTable table(rows.size(), schema.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != schema.size())
      throw Error(std::string(what) + " row " + std::to_string(r) + " has the wrong field count");
    for (std::size_t f = 0; f < schema.size(); ++f) {
      table(r, f) = schema.is_string(f) ? schema[f].universe->index_of(row[f].get<std::string>())
                                        : row[f].get<Value>();
    }
  }
  schema.check_values(table);
  return table;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string dataset_to_json(const Dataset& d) {
  const auto& schema = d.model.schema();
  const auto& params = d.model.params();
  json fields = json::array();
  for (const auto& spec : schema.fields()) fields.push_back(field_to_json(spec));

  json z = json::array();
  for (std::size_t r = 0; r < d.distortion.rows(); ++r) {
    json row = json::array();
    for (std::size_t f = 0; f < d.distortion.fields(); ++f) row.push_back(int{d.distortion(r, f)});
    z.push_back(std::move(row));
  }

  json j{{"model", d.model.kind() == ModelKind::categorical ? "categorical" : "string"},
         {"fields", fields},
         {"params", {{"theta", params.theta}, {"beta", params.beta}, {"c", params.c}}},
         {"databases", d.records.database_sizes()},
         {"X", table_to_json(d.records.values(), schema)},
         {"Y", table_to_json(d.latents, schema)},
         {"lambda", d.linkage},
         {"z", z},
         {"seed", d.seed}};
  return j.dump(1);
}

Dataset dataset_from_json(const std::string& text) {
  const json j = json::parse(text);
  const auto kind_name = j.at("model").get<std::string>();
  if (kind_name != "categorical" && kind_name != "string")
    throw Error("unknown model '" + kind_name + "'");
  const ModelKind kind = kind_name == "categorical" ? ModelKind::categorical : ModelKind::string;

  std::vector<FieldSpec> specs;
  std::shared_ptr<const StringUniverse> last;
  for (const auto& f : j.at("fields")) specs.push_back(field_from_json(f, last));
  FieldSchema schema(std::move(specs));

  const auto& p = j.at("params");
  ModelParams params;
  params.theta = p.at("theta").get<std::vector<std::vector<double>>>();
  params.beta = p.at("beta").get<std::vector<double>>();
  params.c = p.value("c", 1.0);

  ValueTable x = table_from_json(j.at("X"), schema, "X");
  ValueTable y = table_from_json(j.at("Y"), schema, "Y");
  auto linkage = j.at("lambda").get<LinkageStructure>();
  if (linkage.size() != x.rows()) throw Error("lambda length does not match the record count");
  for (auto e : linkage)
    if (e >= y.rows()) throw Error("lambda refers to a missing entity");

  DistortionMask z(x.rows(), x.fields());
  const auto& zj = j.at("z");
  if (zj.size() != x.rows()) throw Error("z has the wrong record count");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (zj[r].size() != x.fields()) throw Error("z row has the wrong field count");
    for (std::size_t f = 0; f < x.fields(); ++f) z(r, f) = zj[r][f].get<int>() ? 1 : 0;
  }

  RecordTable records(j.at("databases").get<std::vector<std::size_t>>(), std::move(x));
  if (!verify_consistency(records, y, linkage, z))
    throw Error("dataset is inconsistent: an undistorted field differs from its entity");
  Model model(kind, std::move(schema), std::move(params));
  return Dataset{std::move(model), std::move(records), std::move(y), std::move(linkage),
                 std::move(z), j.value("seed", std::uint64_t{0})};
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return dataset_from_json(buffer.str());
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_text(path, dataset_to_json(dataset) + "\n");
}

std::string report_to_json(const BoundReport& report) {
  json l1 = json::array();
  for (double v : report.l1_per_record) l1.push_back(number(v));
  json j{{"model", report.string_model ? "string" : "categorical"},
         {"exact_kl", number(report.exact_kl)},
         {"l1_per_record", l1},
         {"bound", number(report.bound)},
         {"bound_per_record", number(report.bound_per_record)},
         {"pinsker_lower", number(report.pinsker_lower)},
         {"fano_raw", number(report.fano_raw)},
         {"fano_error_lower", number(report.fano_error_lower)},
         {"r", report.r},
         {"dominance_holds", report.dominance_holds()}};
  if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
  return j.dump(2);
}

std::string summary_to_json(const ChainSummary& summary) {
  json freq = json::array();
  for (double v : summary.match_frequency) freq.push_back(number(v));
  json j{{"error_rate", number(summary.error.rate)},
         {"standard_error", number(summary.error.standard_error)},
         {"samples", summary.error.samples},
         {"match_frequency", freq},
         {"seed", summary.seed},
         {"iterations", summary.config.iterations},
         {"burn_in", summary.config.burn_in},
         {"mode", summary.config.mode == SamplerMode::fixed_params ? "fixed" : "hierarchical"}};
  return j.dump(2);
}

}  // namespace linkbound
