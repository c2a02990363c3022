#ifndef ISAC_CONFIG_IO_HPP
#define ISAC_CONFIG_IO_HPP

#include "isac/harness.hpp"

#include <json.hpp>

#include <string>

namespace isac {

/// JSON scene schema (documented in README). Degrees, meters, watts and dB at this
/// boundary; everything is converted to radians and linear units on load. Unknown
/// keys are rejected.
ScenarioSpec scenario_from_json(const nlohmann::json& j);
ScenarioSpec load_scenario(const std::string& path);

/// {"scene": {...} | "scene_file": "path", "sweep": {"variable", "values"}, "trials", "seed", "out_dir", "name"}
ExperimentSpec experiment_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentSpec load_experiment(const std::string& path);

enum class Profile { Ci, Paper };

/// ci: N_T = N_R = 32, 100 trials. paper: N_T = N_R = 128, 1000 trials. Applied only to
/// values the file leaves unset.
void apply_profile(ScenarioSpec& spec, Profile profile, const nlohmann::json& source);
int profile_trials(Profile profile);

nlohmann::json read_json_file(const std::string& path);

} // namespace isac

#endif // ISAC_CONFIG_IO_HPP
