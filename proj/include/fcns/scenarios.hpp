#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fcns {

enum class Scenario
{
   profile,
   eps_profile,
   converge,
   simulate,
   stability,
   free_boundary
};

std::string to_string(Scenario s);
// Accepts the command names ("eps-profile", "free-boundary", ...).
Scenario scenario_from_string(const std::string& name);
const std::vector<Scenario>& all_scenarios();

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitAcceptance = 4;

// Invalid, conflicting or missing configuration values.
class ConfigError : public std::invalid_argument
{
public:
   using std::invalid_argument::invalid_argument;
};

enum class KeyKind
{
   number,
   integer,
   boolean,
   text,
   number_list
};

struct KeySpec
{
   std::string name; // snake_case; the flag is the kebab-case form
   KeyKind kind = KeyKind::number;
   std::string help;
};

// Keys understood by a scenario, with their defaults (null: no default).
struct ScenarioKey
{
   const KeySpec* key;
   nlohmann::json default_value;
   bool required = false;
};

const std::vector<KeySpec>& key_registry();
std::vector<ScenarioKey> scenario_keys(Scenario s);
std::string flag_name(const std::string& key);

inline constexpr const char* kOutDirEnv = "FCNS_OUT_DIR";

struct RunConfig
{
   Scenario scenario = Scenario::profile;
   nlohmann::ordered_json values; // every applicable key, resolved
   std::filesystem::path out_dir;

   double num(const std::string& key) const;
   long integer(const std::string& key) const;
   bool flag(const std::string& key) const;
   std::string text(const std::string& key) const;
   std::vector<double> list(const std::string& key) const;
   bool has(const std::string& key) const;
   // {"scenario", "out", values...}
   nlohmann::ordered_json to_json() const;
};

// Layers defaults < config file < flags; the output directory is taken from
// out_flag, then the environment, then the file, then "out". Values are
// type-checked and validated against the module constraints.
RunConfig resolve_config(Scenario s, const nlohmann::json& file_values,
                         const nlohmann::json& flag_values, const std::string& out_flag = {},
                         const char* env_out = nullptr);

// Command-line front end: `fcns <scenario> [--key value ...] [--config f.json] [--out dir]`.
// Throws ConfigError on usage errors. A help request sets `help` and leaves
// the config unresolved.
struct ParsedArgs
{
   RunConfig config;
   bool help = false;
   std::string help_text;
};
ParsedArgs parse_config(int argc, const char* const* argv, const char* env_out = nullptr);

// Executes the scenario and writes its artifacts into config.out_dir.
// Progress and summaries go to `log`. Returns one of the kExit* codes.
int run(const RunConfig& config, std::ostream& log);

} // namespace fcns
