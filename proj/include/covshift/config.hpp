#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "covshift/harness.hpp"
#include "covshift/synth.hpp"

namespace covshift {

/// JSON form of the generator and experiment specs. Readers reject unknown keys
/// and wrong types with DataError naming the offending key.
nlohmann::json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentSpec& spec);
/// Accepts either "sweep": [{"n_P", "n_Q", "rho"}, ...] or a cross product
/// "grid": {"n_P": [...], "n_Q": [...], "rho": [...]}.
ExperimentSpec experiment_from_json(const nlohmann::json& j);

/// A spec file holds one experiment object or {"experiments": [...]}.
std::vector<ExperimentSpec> experiments_from_json(const nlohmann::json& j);

/// Parses JSON text; '#' comment lines before the document are ignored.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::string& path);

/// Names of the experiment sets shipped with the library.
std::vector<std::string> bundled_spec_names();
/// Built-in experiment set by name; throws InputError for an unknown name.
std::vector<ExperimentSpec> bundled_experiments(std::string_view name);

/// `name_or_path` is a bundled name or a JSON file.
std::vector<ExperimentSpec> load_experiments(const std::string& name_or_path);

SolveMode parse_solve_mode(std::string_view name);
std::string_view to_string(SolveMode m);
SlopeAxis parse_slope_axis(std::string_view name);
std::string_view to_string(SlopeAxis a);

}  // namespace covshift
