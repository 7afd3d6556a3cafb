#pragma once

#include <filesystem>
#include <string>

#include "linkbound/bounds.hpp"
#include "linkbound/samplers.hpp"
#include "linkbound/simulate.hpp"

namespace linkbound {

/// Dataset fixture JSON: {"model", "fields", "params", "databases", "X", "Y",
/// "lambda", "z", "seed"}. Categorical values and entity ids are 0-based
/// integers; string values are written as the strings themselves.
std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

std::string report_to_json(const BoundReport& report);
std::string summary_to_json(const ChainSummary& summary);

}  // namespace linkbound
