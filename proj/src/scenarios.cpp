#include "fcns/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fcns/csv.hpp"
#include "fcns/errors.hpp"
#include "fcns/experiments.hpp"
#include "fcns/free_boundary.hpp"
#include "fcns/ns_eps_solver.hpp"
#include "fcns/profiles.hpp"

#ifndef FCNS_VERSION
#define FCNS_VERSION "unknown"
#endif

namespace fcns {

using nlohmann::json;
using nlohmann::ordered_json;

// ------------------------------------------------------------------ scenarios

namespace {

const std::vector<std::pair<Scenario, std::string>>& scenario_names()
{
   static const std::vector<std::pair<Scenario, std::string>> names = {
      {Scenario::profile, "profile"},         {Scenario::eps_profile, "eps-profile"},
      {Scenario::converge, "converge"},       {Scenario::simulate, "simulate"},
      {Scenario::stability, "stability"},     {Scenario::free_boundary, "free-boundary"},
   };
   return names;
}

const char* scenario_help(Scenario s)
{
   switch (s) {
   case Scenario::profile: return "closed-form limit traveling wave";
   case Scenario::eps_profile: return "soft-congestion traveling wave";
   case Scenario::converge: return "three-zone convergence sweep over epsilon";
   case Scenario::simulate: return "perturbed soft-congestion run with energy diagnostics";
   case Scenario::stability: return "decay experiment against an unperturbed run";
   case Scenario::free_boundary: return "interface fixed point on the half-line";
   }
   return "";
}

} // namespace

std::string to_string(Scenario s)
{
   for (const auto& [sc, name] : scenario_names())
      if (sc == s)
         return name;
   return "unknown";
}

Scenario scenario_from_string(const std::string& name)
{
   for (const auto& [sc, n] : scenario_names())
      if (n == name)
         return sc;
   throw ConfigError("unknown scenario '" + name + "'");
}

const std::vector<Scenario>& all_scenarios()
{
   static const std::vector<Scenario> all = {Scenario::profile,  Scenario::eps_profile,
                                             Scenario::converge, Scenario::simulate,
                                             Scenario::stability, Scenario::free_boundary};
   return all;
}

// ------------------------------------------------------------------- registry

const std::vector<KeySpec>& key_registry()
{
   using K = KeyKind;
   static const std::vector<KeySpec> keys = {
      {"v_plus", K::number, "free specific volume v+ (> 1)"},
      {"u_minus", K::number, "congested velocity u-"},
      {"u_plus", K::number, "free velocity u+ (< u-)"},
      {"mu", K::number, "viscosity (> 0)"},
      {"epsilon", K::number, "pressure scale (> 0)"},
      {"gamma", K::number, "pressure exponent (>= 1)"},
      {"epsilons", K::number_list, "comma-separated epsilon sweep"},
      {"x_left", K::number, "left end of the sampling grid"},
      {"x_right", K::number, "right end of the sampling grid"},
      {"n", K::integer, "number of samples (>= 3)"},
      {"far_field_tol", K::number, "distance to the end states at the span edges"},
      {"zone_k", K::number, "congested-zone threshold v >= 1 + K eps^(1/gamma)"},
      {"xstar_c0", K::number, "x* search window [-C0 eps^(1/(gamma+1)), 0]"},
      {"dx", K::number, "grid spacing"},
      {"dt", K::number, "time step (default dx^2 for the soft-congestion solver)"},
      {"t_end", K::number, "final time"},
      {"shape", K::text, "perturbation shape: dipole or bump"},
      {"amplitude", K::number, "perturbation amplitude (stability: 0 selects it from the gate)"},
      {"center", K::number, "perturbation center"},
      {"width", K::number, "perturbation width"},
      {"seed", K::integer, "nonzero: pseudo-random sign of the amplitude"},
      {"newton_tol", K::number, "Newton residual tolerance"},
      {"left_margin", K::number, "extra length on the congested side (negative: acoustic default)"},
      {"record_dt", K::number, "interval between energy records"},
      {"snapshot_dt", K::number, "interval between state snapshots"},
      {"delta0", K::number, "smallness constant"},
      {"c", K::number, "X-norm weight in (0, 1]"},
      {"mass_tol", K::number, "relative zero-mass tolerance"},
      {"dt_guard", K::boolean, "cap dt by the pressure-gradient guard"},
      {"profile_n", K::integer, "samples of the reference traveling wave"},
      {"gate_fraction", K::number, "target smallness lhs / rhs when the amplitude is automatic"},
      {"transient", K::number, "time after which the sup deviation must be nonincreasing (negative: front passage time)"},
      {"decay_ratio", K::number, "required final / initial sup deviation"},
      {"x_norm_factor", K::number, "allowed growth of the squared X-norm"},
      {"x_max", K::number, "half-line length"},
      {"picard_tol", K::number, "Picard stopping tolerance"},
      {"picard_max", K::integer, "Picard iterations before T is halved"},
      {"time_order", K::integer, "1: backward Euler, 2: BDF2"},
      {"oracle_tw", K::boolean, "traveling-wave oracle: check x~ = s t and p_s = p-"},
      {"perturb_amp_v", K::number, "bump amplitude added to v0"},
      {"perturb_amp_u", K::number, "bump amplitude added to u0"},
      {"perturb_center", K::number, "bump center (support must avoid x = 0)"},
      {"perturb_radius", K::number, "bump radius"},
      {"h3_tol", K::number, "relative tolerance of the compatibility bracket"},
      {"identity_tol", K::number, "largest accepted identity residual"},
      {"oracle_x_tol", K::number, "oracle bound on max |x~(t) - s t|"},
      {"oracle_p_tol", K::number, "oracle bound on max |p_s - p-|"},
   };
   return keys;
}

namespace {

const KeySpec& key(const std::string& name)
{
   for (const auto& k : key_registry())
      if (k.name == name)
         return k;
   throw std::logic_error("unregistered key " + name);
}

ScenarioKey opt(const std::string& name, json def) { return {&key(name), std::move(def), false}; }
ScenarioKey req(const std::string& name) { return {&key(name), nullptr, true}; }

std::vector<ScenarioKey> eps_run_keys(bool stability)
{
   std::vector<ScenarioKey> k = {
      req("epsilon"),
      opt("gamma", 1.0),
      opt("dx", 0.02),
      opt("dt", nullptr),
      opt("t_end", stability ? 3.0 : 1.0),
      opt("shape", "dipole"),
      opt("amplitude", stability ? 0.0 : 1e-3),
      opt("center", 1.0),
      opt("width", 0.25),
      opt("seed", 0),
      opt("newton_tol", stability ? 1e-13 : 1e-12),
      opt("far_field_tol", 1e-10),
      opt("left_margin", -1.0),
      opt("record_dt", stability ? 0.1 : 0.05),
      opt("delta0", 0.1),
      opt("c", 0.1),
      opt("mass_tol", 1e-8),
      opt("dt_guard", true),
      opt("profile_n", 8001),
   };
   if (stability) {
      k.push_back(opt("gate_fraction", 0.25));
      k.push_back(opt("transient", -1.0));
      k.push_back(opt("decay_ratio", 0.2));
      k.push_back(opt("x_norm_factor", 4.0));
   } else {
      k.push_back(opt("snapshot_dt", 0.25));
   }
   return k;
}

} // namespace

std::vector<ScenarioKey> scenario_keys(Scenario s)
{
   std::vector<ScenarioKey> k = {opt("v_plus", 2.0), opt("u_minus", 1.0), opt("u_plus", 0.0),
                                 opt("mu", 1.0)};
   std::vector<ScenarioKey> extra;
   switch (s) {
   case Scenario::profile:
      extra = {opt("x_left", -5.0), opt("x_right", 10.0), opt("n", 1501)};
      break;
   case Scenario::eps_profile:
      extra = {req("epsilon"), opt("gamma", 1.0), opt("n", 4001), opt("far_field_tol", 1e-10)};
      break;
   case Scenario::converge:
      extra = {req("epsilons"),           opt("gamma", 1.0),   opt("n", 4001),
               opt("far_field_tol", 1e-10), opt("zone_k", 2.0), opt("xstar_c0", 10.0)};
      break;
   case Scenario::simulate: extra = eps_run_keys(false); break;
   case Scenario::stability: extra = eps_run_keys(true); break;
   case Scenario::free_boundary:
      extra = {opt("x_max", 12.0),        opt("dx", 0.01),
               opt("dt", 1e-3),           opt("t_end", 0.5),
               opt("picard_tol", 1e-8),   opt("picard_max", 10),
               opt("time_order", 2),      opt("newton_tol", 1e-12),
               opt("oracle_tw", false),   opt("perturb_amp_v", 0.0),
               opt("perturb_amp_u", 0.0), opt("perturb_center", 3.0),
               opt("perturb_radius", 1.0), opt("snapshot_dt", 0.1),
               opt("h3_tol", 1e-6),       opt("identity_tol", 1e-3),
               opt("oracle_x_tol", 0.02), opt("oracle_p_tol", 0.05)};
      break;
   }
   k.insert(k.end(), extra.begin(), extra.end());
   return k;
}

std::string flag_name(const std::string& key)
{
   std::string f = "--" + key;
   std::replace(f.begin(), f.end(), '_', '-');
   return f;
}

// ---------------------------------------------------------------- RunConfig

double RunConfig::num(const std::string& k) const { return values.at(k).get<double>(); }
long RunConfig::integer(const std::string& k) const { return values.at(k).get<long>(); }
bool RunConfig::flag(const std::string& k) const { return values.at(k).get<bool>(); }
std::string RunConfig::text(const std::string& k) const { return values.at(k).get<std::string>(); }
std::vector<double> RunConfig::list(const std::string& k) const
{
   return values.at(k).get<std::vector<double>>();
}
bool RunConfig::has(const std::string& k) const { return values.contains(k); }

ordered_json RunConfig::to_json() const
{
   ordered_json j;
   j["scenario"] = to_string(scenario);
   j["out"] = out_dir.string();
   for (const auto& [k, v] : values.items())
      j[k] = v;
   return j;
}

// ------------------------------------------------------------- typed values

namespace {

double parse_number(const std::string& name, const std::string& text)
{
   const char* b = text.c_str();
   char* end = nullptr;
   const double v = std::strtod(b, &end);
   if (end == b || *end != '\0' || !std::isfinite(v))
      throw ConfigError(flag_name(name) + ": '" + text + "' is not a finite number");
   return v;
}

json from_text(const KeySpec& k, const std::string& text)
{
   switch (k.kind) {
   case KeyKind::number: return parse_number(k.name, text);
   case KeyKind::integer: {
      const char* b = text.c_str();
      char* end = nullptr;
      const long long v = std::strtoll(b, &end, 10);
      if (end == b || *end != '\0')
         throw ConfigError(flag_name(k.name) + ": '" + text + "' is not an integer");
      return v;
   }
   case KeyKind::boolean:
      if (text == "true" || text == "1")
         return true;
      if (text == "false" || text == "0")
         return false;
      throw ConfigError(flag_name(k.name) + ": '" + text + "' is not a boolean");
   case KeyKind::text: return text;
   case KeyKind::number_list: {
      json arr = json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ','))
         arr.push_back(parse_number(k.name, item));
      return arr;
   }
   }
   return nullptr;
}

// Checks and normalizes a JSON value for a key (from a file or converted flag).
json typed(const KeySpec& k, const json& v)
{
   auto bad = [&](const char* what) {
      return ConfigError("key '" + k.name + "' expects " + what + ", got " + v.dump());
   };
   switch (k.kind) {
   case KeyKind::number:
      if (!v.is_number() || !std::isfinite(v.get<double>()))
         throw bad("a finite number");
      return v.get<double>();
   case KeyKind::integer:
      if (v.is_number_integer())
         return v.get<long long>();
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
         return static_cast<long long>(v.get<double>());
      throw bad("an integer");
   case KeyKind::boolean:
      if (!v.is_boolean())
         throw bad("a boolean");
      return v;
   case KeyKind::text:
      if (!v.is_string())
         throw bad("a string");
      return v;
   case KeyKind::number_list: {
      if (v.is_number())
         return json::array({v.get<double>()});
      if (!v.is_array())
         throw bad("a list of numbers");
      json arr = json::array();
      for (const auto& e : v) {
         if (!e.is_number())
            throw bad("a list of numbers");
         arr.push_back(e.get<double>());
      }
      return arr;
   }
   }
   return v;
}

void require(bool ok, const std::string& msg)
{
   if (!ok)
      throw ConfigError(msg);
}

void validate(const RunConfig& c)
{
   const auto has = [&](const char* k) { return c.has(k); };
   const auto positive = [&](const char* k) {
      if (has(k))
         require(c.num(k) > 0.0, std::string(k) + " must be > 0");
   };

   EndStates es{c.num("v_plus"), c.num("u_minus"), c.num("u_plus"), c.num("mu")};
   require(es.v_plus > 1.0, "v_plus must be > 1");
   require(es.u_minus > es.u_plus, "u_minus must exceed u_plus (entropy condition)");
   require(es.mu > 0.0, "mu must be > 0");

   if (has("gamma"))
      require(c.num("gamma") >= 1.0, "gamma must be >= 1");
   std::vector<double> eps;
   if (has("epsilon"))
      eps.push_back(c.num("epsilon"));
   if (has("epsilons")) {
      eps = c.list("epsilons");
      require(eps.size() >= 2, "epsilons needs at least two values for the exponent fit");
   }
   for (double e : eps) {
      require(e > 0.0, "epsilon must be > 0");
      try {
         eps_speed(PressureLaw(e, c.num("gamma")), es);
      } catch (const std::exception& ex) {
         throw ConfigError(std::string("epsilon = ") + format_double(e) + ": " + ex.what());
      }
   }
   for (const char* k : {"n", "profile_n"})
      if (has(k))
         require(c.integer(k) >= 3, std::string(k) + " must be >= 3");
   if (has("x_left"))
      require(c.num("x_left") < c.num("x_right"), "x_left must be < x_right");
   for (const char* k : {"far_field_tol", "zone_k", "xstar_c0", "dx", "dt", "t_end", "width",
                         "newton_tol", "record_dt", "snapshot_dt", "delta0", "mass_tol",
                         "gate_fraction", "decay_ratio", "x_norm_factor", "x_max", "picard_tol",
                         "perturb_radius", "h3_tol", "identity_tol", "oracle_x_tol",
                         "oracle_p_tol"})
      positive(k);
   if (has("zone_k"))
      require(c.num("zone_k") > 1.0, "zone_k must be > 1");
   if (has("c"))
      require(c.num("c") > 0.0 && c.num("c") <= 1.0, "c must lie in (0, 1]");
   if (has("shape"))
      require(c.text("shape") == "dipole" || c.text("shape") == "bump",
              "shape must be 'dipole' or 'bump'");
   if (has("seed"))
      require(c.integer("seed") >= 0, "seed must be >= 0");
   if (has("record_dt"))
      require(c.num("record_dt") <= c.num("t_end"), "record_dt must not exceed t_end");
   if (has("amplitude") && c.scenario == Scenario::simulate)
      require(c.num("amplitude") >= 0.0, "amplitude must be >= 0 (use seed for the sign)");
   if (has("amplitude") && c.scenario == Scenario::stability)
      require(c.num("amplitude") >= 0.0, "amplitude must be >= 0 (0: chosen from the gate)");
   if (has("picard_max"))
      require(c.integer("picard_max") >= 1, "picard_max must be >= 1");
   if (has("time_order"))
      require(c.integer("time_order") == 1 || c.integer("time_order") == 2,
              "time_order must be 1 or 2");
   if (c.scenario == Scenario::free_boundary) {
      require(c.num("x_max") / c.num("dx") >= 2.0, "x_max must hold at least three nodes");
      const bool perturbed = c.num("perturb_amp_v") != 0.0 || c.num("perturb_amp_u") != 0.0;
      require(!(c.flag("oracle_tw") && perturbed),
              "oracle_tw conflicts with nonzero perturb_amp_v / perturb_amp_u");
      if (perturbed) {
         const double lo = c.num("perturb_center") - c.num("perturb_radius");
         const double hi = c.num("perturb_center") + c.num("perturb_radius");
         require(lo > 0.0 && hi < c.num("x_max"),
                 "perturbation support must lie inside (0, x_max)");
      }
   }
}

} // namespace

RunConfig resolve_config(Scenario s, const json& file_values, const json& flag_values,
                         const std::string& out_flag, const char* env_out)
{
   RunConfig c;
   c.scenario = s;
   const auto keys = scenario_keys(s);
   auto applicable = [&](const std::string& name) {
      return std::any_of(keys.begin(), keys.end(),
                         [&](const ScenarioKey& k) { return k.key->name == name; });
   };

   std::string file_out;
   if (!file_values.is_null()) {
      if (!file_values.is_object())
         throw ConfigError("config file must hold a JSON object");
      for (const auto& [name, v] : file_values.items()) {
         if (name == "scenario") {
            if (!v.is_string() || v.get<std::string>() != to_string(s))
               throw ConfigError("config file is for scenario " + v.dump() + ", not '"
                                 + to_string(s) + "'");
            continue;
         }
         if (name == "out") {
            if (!v.is_string())
               throw ConfigError("key 'out' expects a string");
            file_out = v.get<std::string>();
            continue;
         }
         const bool known = std::any_of(key_registry().begin(), key_registry().end(),
                                        [&](const KeySpec& k) { return k.name == name; });
         if (!known)
            throw ConfigError("unknown key '" + name + "'");
         if (!applicable(name))
            throw ConfigError("key '" + name + "' does not apply to scenario '" + to_string(s)
                              + "'");
      }
   }

   std::vector<std::string> missing;
   for (const auto& sk : keys) {
      const std::string& name = sk.key->name;
      json v = sk.default_value;
      if (file_values.is_object() && file_values.contains(name))
         v = typed(*sk.key, file_values.at(name));
      if (flag_values.is_object() && flag_values.contains(name))
         v = typed(*sk.key, flag_values.at(name));
      if (v.is_null()) {
         if (sk.required)
            missing.push_back(name + " (" + flag_name(name) + ")");
         else if (name == "dt")
            v = c.values.at("dx").get<double>() * c.values.at("dx").get<double>();
      }
      c.values[name] = v;
   }
   if (flag_values.is_object())
      for (const auto& [name, v] : flag_values.items())
         if (!applicable(name))
            throw ConfigError("key '" + name + "' does not apply to scenario '" + to_string(s)
                              + "'");
   if (!missing.empty()) {
      std::string msg = "missing required key(s) for '" + to_string(s) + "':";
      for (const auto& m : missing)
         msg += " " + m;
      throw ConfigError(msg);
   }

   if (!out_flag.empty())
      c.out_dir = out_flag;
   else if (env_out && *env_out)
      c.out_dir = env_out;
   else if (!file_out.empty())
      c.out_dir = file_out;
   else
      c.out_dir = "out";

   validate(c);
   return c;
}

// ------------------------------------------------------------------- parsing

ParsedArgs parse_config(int argc, const char* const* argv, const char* env_out)
{
   CLI::App app{"Numerical laboratory for free-congested Navier-Stokes fronts", "fcns"};
   app.require_subcommand(1, 1);
   app.set_version_flag("--version", FCNS_VERSION);

   struct SubState
   {
      Scenario scenario;
      CLI::App* app = nullptr;
      std::map<std::string, std::string> text;
      std::map<std::string, std::unique_ptr<bool>> flags;
      std::map<std::string, CLI::Option*> options;
      std::string config_path;
      std::string out;
   };
   std::vector<std::unique_ptr<SubState>> subs;
   for (Scenario s : all_scenarios()) {
      auto st = std::make_unique<SubState>();
      st->scenario = s;
      st->app = app.add_subcommand(to_string(s), scenario_help(s));
      for (const auto& sk : scenario_keys(s)) {
         const KeySpec& k = *sk.key;
         std::string help = k.help;
         if (sk.required)
            help += " [required]";
         else if (!sk.default_value.is_null())
            help += " [default " + sk.default_value.dump() + "]";
         if (k.kind == KeyKind::boolean) {
            auto b = std::make_unique<bool>(false);
            const std::string f = flag_name(k.name);
            st->options[k.name] =
               st->app->add_flag(f + ",!--no-" + f.substr(2), *b, help);
            st->flags[k.name] = std::move(b);
         } else {
            st->options[k.name] = st->app->add_option(flag_name(k.name), st->text[k.name], help);
         }
      }
      st->app->add_option("--config", st->config_path, "JSON file with key values (flags win)");
      st->app->add_option("--out", st->out, std::string("output directory (overrides ")
                                               + kOutDirEnv + ")");
      subs.push_back(std::move(st));
   }

   ParsedArgs parsed;
   try {
      app.parse(argc, argv);
   } catch (const CLI::CallForHelp&) {
      parsed.help = true;
      parsed.help_text = app.help();
      for (const auto& st : subs)
         if (st->app->parsed())
            parsed.help_text = st->app->help();
      return parsed;
   } catch (const CLI::Success&) {
      parsed.help = true;
      parsed.help_text = FCNS_VERSION;
      return parsed;
   } catch (const CLI::ParseError& e) {
      throw ConfigError(e.what());
   }

   for (const auto& st : subs) {
      if (!st->app->parsed())
         continue;
      json flags = json::object();
      for (const auto& sk : scenario_keys(st->scenario)) {
         const KeySpec& k = *sk.key;
         if (st->options.at(k.name)->count() == 0)
            continue;
         if (k.kind == KeyKind::boolean)
            flags[k.name] = *st->flags.at(k.name);
         else
            flags[k.name] = from_text(k, st->text.at(k.name));
      }
      json file = nullptr;
      if (!st->config_path.empty()) {
         std::ifstream in(st->config_path);
         if (!in)
            throw ConfigError("cannot open config file '" + st->config_path + "'");
         try {
            file = json::parse(in);
         } catch (const json::parse_error& e) {
            throw ConfigError("config file '" + st->config_path + "': " + e.what());
         }
      }
      parsed.config = resolve_config(st->scenario, file, flags, st->out, env_out);
      return parsed;
   }
   throw ConfigError("no scenario given");
}

// ---------------------------------------------------------------------- run

namespace {

EndStates end_states(const RunConfig& c)
{
   return {c.num("v_plus"), c.num("u_minus"), c.num("u_plus"), c.num("mu")};
}

class Artifacts
{
public:
   Artifacts(const RunConfig& c) : cfg_(c) { std::filesystem::create_directories(c.out_dir); }

   std::filesystem::path path(const std::string& name) const { return cfg_.out_dir / name; }

   void csv(const std::string& name, const CsvTable& t, const ordered_json& results = {})
   {
      write_csv(path(name), t);
      meta(name, t.header, results);
   }

   void json_file(const std::string& name, const ordered_json& j, const ordered_json& results = {})
   {
      write_json(path(name), j);
      meta(name, {}, results);
   }

private:
   void meta(const std::string& name, const std::vector<std::string>& columns,
             const ordered_json& results)
   {
      ordered_json m;
      m["artifact"] = name;
      m["scenario"] = to_string(cfg_.scenario);
      m["code_version"] = FCNS_VERSION;
      if (!columns.empty())
         m["columns"] = columns;
      ordered_json prm;
      for (const auto& [k, v] : cfg_.values.items())
         prm[k] = v;
      m["parameters"] = prm;
      if (!results.is_null())
         m["results"] = results;
      const auto stem = std::filesystem::path(name).stem().string();
      write_json(path(stem + ".meta.json"), m);
   }

   const RunConfig& cfg_;
};

ordered_json num_or_null(double x)
{
   return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

int run_profile(const RunConfig& c, Artifacts& out, std::ostream& log)
{
   const LimitProfile lp(end_states(c));
   const Grid1D g(c.num("x_left"), c.num("x_right"), static_cast<std::size_t>(c.integer("n")));
   CsvTable t{schema::profile, {}};
   for (std::size_t i = 0; i < g.size(); ++i) {
      const auto pv = lp.eval(g.x(i));
      t.rows.push_back({g.x(i), pv.v, pv.u, pv.w, pv.p});
   }
   ordered_json res;
   res["speed"] = lp.speed();
   res["p_minus"] = lp.p_minus();
   out.csv("profile.csv", t, res);
   log << "profile: s = " << format_double(lp.speed()) << ", p_minus = "
       << format_double(lp.p_minus()) << "\n";
   return kExitOk;
}

int run_eps_profile(const RunConfig& c, Artifacts& out, std::ostream& log)
{
   const PressureLaw law(c.num("epsilon"), c.num("gamma"));
   const EndStates es = end_states(c);
   const EpsProfile p = build_eps_profile(law, es, static_cast<std::size_t>(c.integer("n")),
                                          c.num("far_field_tol"));
   CsvTable t{schema::eps_profile, {}};
   const Grid1D& g = p.grid();
   // Tail samples of v (and v') round to the end states, so strict growth is
   // checked on theta.
   bool monotone = true;
   for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = p.v_samples()[i];
      if (!(p.dv_samples()[i] >= 0.0)
          || (i > 0 && !(p.theta_samples()[i] > p.theta_samples()[i - 1])))
         monotone = false;
      t.rows.push_back({g.x(i), v, p.u_samples()[i], p.w_samples()[i], law(v)});
   }
   const double residual = p.ode_residual();
   const double gap_left = p.v_samples().front() - p.v_minus();
   const double gap_right = p.v_plus() - p.v_samples().back();
   ordered_json res;
   res["s_eps"] = p.speed();
   res["s_eps_printed_denominator"] = p.speed_printed();
   res["v_minus_eps"] = p.v_minus();
   res["u_plus_eps"] = p.u_plus();
   res["v_at_origin"] = p.v_at_origin();
   res["ode_residual"] = residual;
   res["gap_left"] = gap_left;
   res["gap_right"] = gap_right;
   res["monotone"] = monotone;
   out.csv("eps_profile.csv", t, res);
   log << "eps-profile: s_eps = " << format_double(p.speed())
       << ", ode residual = " << format_double(residual) << "\n";
   const bool ok = monotone && residual < 1e-8;
   if (!ok)
      log << "eps-profile: invariant check failed\n";
   return ok ? kExitOk : kExitAcceptance;
}

int run_converge(const RunConfig& c, Artifacts& out, std::ostream& log)
{
   const EndStates es = end_states(c);
   const double gam = c.num("gamma");
   // Comparator front whose congested pressure is p(v_minus^eps) = 1.
   const LimitProfile lp(es, 1.0 / std::sqrt(es.v_plus - 1.0));
   ZoneParams zp;
   zp.K = c.num("zone_k");
   zp.C0 = c.num("xstar_c0");
   std::vector<ZoneReport> reps;
   for (double e : c.list("epsilons")) {
      const PressureLaw law(e, gam);
      const EpsProfile p = build_eps_profile(law, es, static_cast<std::size_t>(c.integer("n")),
                                             c.num("far_field_tol"));
      reps.push_back(three_zone_diagnostics(p, lp, zp));
      log << "converge: eps = " << format_double(e)
          << " sup_err_free = " << format_double(reps.back().sup_err_free) << "\n";
   }
   std::vector<double> e_all, sup, e_nd, xm, xs;
   for (const auto& r : reps) {
      e_all.push_back(r.epsilon);
      sup.push_back(r.sup_err_free);
      if (!r.degenerate) {
         e_nd.push_back(r.epsilon);
         xm.push_back(-r.x_min);
         xs.push_back(std::abs(r.x_star));
      }
   }
   const double slope = fit_loglog_slope(e_all, sup);
   const double nan = std::numeric_limits<double>::quiet_NaN();
   const double slope_xm = e_nd.size() >= 2 ? fit_loglog_slope(e_nd, xm) : nan;
   const double slope_xs = e_nd.size() >= 2 ? fit_loglog_slope(e_nd, xs) : nan;
   CsvTable t{schema::convergence, {}};
   for (const auto& r : reps)
      t.rows.push_back({r.epsilon, r.gamma, r.sup_err_free, r.x_min, r.x_star, r.transition_err,
                        slope});
   ordered_json res;
   res["target_exponent"] = 1.0 / (gam + 1.0);
   res["exponent_sup_err_free"] = num_or_null(slope);
   res["exponent_x_min"] = num_or_null(slope_xm);
   res["exponent_x_star"] = num_or_null(slope_xs);
   res["degenerate_points"] = e_all.size() - e_nd.size();
   res["comparator_speed"] = lp.speed();
   out.csv("convergence.csv", t, res);
   log << "converge: fitted exponent " << format_double(slope) << " (target "
       << format_double(1.0 / (gam + 1.0)) << ")\n";
   return kExitOk;
}

PerturbationSpec perturbation(const RunConfig& c)
{
   PerturbationSpec s;
   s.shape = c.text("shape") == "bump" ? PerturbationShape::bump : PerturbationShape::dipole;
   s.amplitude = c.num("amplitude");
   s.center = c.num("center");
   s.width = c.num("width");
   s.seed = static_cast<std::uint64_t>(c.integer("seed"));
   return s;
}

EnergyConstants energy_constants(const RunConfig& c)
{
   EnergyConstants ec;
   ec.delta0 = c.num("delta0");
   ec.c = c.num("c");
   ec.mass_tol = c.num("mass_tol");
   return ec;
}

std::vector<double> energy_row(double t, const EnergyReport& e, const L1Deviation& l1,
                               double sdv, double sdu, double min_v)
{
   return {t,    e.E[0], e.E[1], e.E[2], e.D[0], e.D[1], e.D[2], std::sqrt(e.x_norm_sq),
           l1.v, l1.u,   l1.w,   sdv,    sdu,    min_v};
}

ordered_json gate_json(const SmallnessResult& g) { return ordered_json::parse(g.to_json()); }

int run_simulate(const RunConfig& c, Artifacts& out, std::ostream& log)
{
   const PressureLaw law(c.num("epsilon"), c.num("gamma"));
   const EndStates es = end_states(c);
   const double mu = es.mu;
   const double T = c.num("t_end");
   const EpsProfile profile = build_eps_profile(
      law, es, static_cast<std::size_t>(c.integer("profile_n")), 1e-2 * c.num("far_field_tol"));
   const Grid1D grid =
      simulation_grid(profile, T, c.num("dx"), c.num("far_field_tol"), c.num("left_margin"));
   EpsState st;
   try {
      st = build_initial(profile, perturbation(c), grid);
   } catch (const std::exception& e) {
      log << "simulate: invalid initial data: " << e.what() << "\n";
      return kExitConfig;
   }
   const EnergyConstants ec = energy_constants(c);
   SolverConfig cfg;
   cfg.dt = c.num("dt");
   cfg.newton_tol = c.num("newton_tol");
   cfg.far_field_tol = c.num("far_field_tol");
   cfg.dt_guard = c.flag("dt_guard");

   const SmallnessResult gate = smallness_check(integrated_vars(st, profile, ec), profile, ec);
   out.json_file("smallness.json", gate_json(gate));

   CsvTable energy{schema::energy, {}};
   XNormTracker xt(ec, law);
   double min_v = st.v.min();
   double min_since = min_v;
   auto record = [&]() {
      EnergyReport rep = energy_report(integrated_vars(st, profile, ec), profile, ec);
      xt.add(st.t, rep);
      energy.rows.push_back(energy_row(st.t, rep, l1_diagnostics(st, profile),
                                       sup_dev_v(st, profile), sup_dev_u(st, profile), min_since));
      min_since = std::numeric_limits<double>::infinity();
   };
   auto snapshot = [&]() {
      CsvTable s{schema::state, {}};
      const GridFunction u = st.u(mu);
      for (std::size_t i = 0; i < grid.size(); ++i)
         s.rows.push_back({grid.x(i), st.v[i], u[i], st.w[i]});
      out.csv(snapshot_name("state", st.t), s, {{"t", st.t}, {"min_v", st.v.min()}});
   };

   const double rdt = c.num("record_dt");
   const double sdt = c.num("snapshot_dt");
   const double tiny = 1e-12 * T;
   std::size_t kr = 1, ks = 1, steps = 0;
   int max_newton = 0;
   try {
      record();
      snapshot();
      while (st.t < T - tiny) {
         const double tr = std::min(T, static_cast<double>(kr) * rdt);
         const double ts = std::min(T, static_cast<double>(ks) * sdt);
         const double target = std::min(tr, ts);
         double dt = cfg.dt;
         if (cfg.dt_guard)
            dt = std::min(dt, dt_guard_limit(law, st.v));
         dt = std::min(dt, target - st.t);
         StepStats stats;
         st = step(st, dt, cfg, mu, &stats);
         ++steps;
         max_newton = std::max(max_newton, stats.newton_iterations);
         min_v = std::min(min_v, st.v.min());
         min_since = std::min(min_since, st.v.min());
         if (st.t >= target - tiny) {
            st.t = target;
            if (st.t >= tr - tiny) {
               record();
               ++kr;
            }
            if (st.t >= ts - tiny) {
               snapshot();
               ++ks;
            }
         }
      }
   } catch (const SolverError& e) {
      out.csv("energy.csv", energy);
      log << "simulate: solver failure: " << e.what() << "\n";
      return kExitSolver;
   }

   ordered_json res;
   res["gate"] = gate_json(gate);
   res["grid"] = {{"x_left", grid.x_left()}, {"x_right", grid.x_right()}, {"n", grid.size()}};
   res["steps"] = steps;
   res["max_newton_iterations"] = max_newton;
   res["min_v"] = min_v;
   res["final_sup_dev_v"] = energy.rows.back()[11];
   res["initial_sup_dev_v"] = energy.rows.front()[11];
   res["reference"] = "traveling wave shifted by s_eps t";
   out.csv("energy.csv", energy, res);
   log << "simulate: " << steps << " steps, min v = " << format_double(min_v)
       << ", gate " << (gate.pass ? "pass" : "fail") << "\n";
   return kExitOk;
}

int run_stability(const RunConfig& c, Artifacts& out, std::ostream& log)
{
   const PressureLaw law(c.num("epsilon"), c.num("gamma"));
   const EndStates es = end_states(c);
   const EpsProfile profile = build_eps_profile(
      law, es, static_cast<std::size_t>(c.integer("profile_n")), 1e-2 * c.num("far_field_tol"));
   StabilityParams prm;
   prm.perturbation = perturbation(c);
   prm.gate_fraction = c.num("gate_fraction");
   prm.h = c.num("dx");
   prm.dt = c.num("dt");
   prm.T = c.num("t_end");
   prm.record_dt = c.num("record_dt");
   prm.newton_tol = c.num("newton_tol");
   prm.far_field_tol = c.num("far_field_tol");
   prm.left_margin = c.num("left_margin");
   prm.dt_guard = c.flag("dt_guard");
   prm.constants = energy_constants(c);
   prm.transient = c.num("transient");
   prm.decay_ratio = c.num("decay_ratio");
   prm.x_norm_factor = c.num("x_norm_factor");

   StabilityResult r;
   try {
      r = stability_experiment(profile, prm);
   } catch (const DomainError& e) {
      log << "stability: invalid initial data: " << e.what() << "\n";
      return kExitConfig;
   } catch (const SolverError& e) {
      log << "stability: solver failure: " << e.what() << "\n";
      return kExitSolver;
   }
   out.json_file("smallness.json", gate_json(r.gate));
   CsvTable energy{schema::energy, {}};
   for (const auto& rec : r.records)
      energy.rows.push_back(
         energy_row(rec.t, rec.energy, rec.l1, rec.sup_dev_v, rec.sup_dev_u, rec.min_v));
   ordered_json summary;
   summary["amplitude"] = r.amplitude;
   summary["gate"] = gate_json(r.gate);
   summary["steps"] = r.steps;
   summary["min_v"] = r.min_v;
   summary["transient"] = r.transient;
   summary["decay"] = r.decay;
   summary["x_norm_sq_ratio"] = r.x_norm_ratio;
   summary["checks"] = {{"gate", r.gate.pass},         {"monotone_after_transient", r.monotone_ok},
                        {"decay", r.decay_ok},         {"min_v_above_1", r.min_v_ok},
                        {"x_norm_bounded", r.x_norm_ok}};
   summary["pass"] = r.pass();
   ordered_json res = summary;
   res["reference"] = "unperturbed run on the same grid";
   out.csv("energy.csv", energy, res);
   out.json_file("stability.json", summary);
   log << "stability: amplitude " << format_double(r.amplitude) << ", decay "
       << format_double(r.decay) << ", X-norm ratio " << format_double(r.x_norm_ratio)
       << ", min v " << format_double(r.min_v) << ": " << (r.pass() ? "PASS" : "FAIL") << "\n";
   return r.pass() ? kExitOk : kExitAcceptance;
}

int run_free_boundary(const RunConfig& c, Artifacts& out, std::ostream& log)
{
   const EndStates es = end_states(c);
   const double X = c.num("x_max");
   const auto n = static_cast<std::size_t>(std::lround(X / c.num("dx"))) + 1;
   HalfLineData data = traveling_wave_data(es, X, n);
   const bool perturbed = c.num("perturb_amp_v") != 0.0 || c.num("perturb_amp_u") != 0.0;
   if (perturbed)
      data = perturb_data(data, c.num("perturb_amp_v"), c.num("perturb_amp_u"),
                          c.num("perturb_center"), c.num("perturb_radius"));

   HypothesisTolerances ht;
   ht.h3_tol = c.num("h3_tol");
   HypothesisReport hyp;
   try {
      hyp = validate_hypotheses(data, ht);
   } catch (const DomainError& e) {
      log << "free-boundary: degenerate data: " << e.what() << "\n";
      return kExitAcceptance;
   }
   ordered_json hj;
   hj["h1_ok"] = hyp.h1_ok;
   hj["v_trace"] = hyp.v_trace;
   hj["u_trace"] = hyp.u_trace;
   hj["h2_ok"] = hyp.h2_ok;
   hj["h2_norm_v"] = hyp.h2_norm_v;
   hj["h2_norm_u"] = hyp.h2_norm_u;
   hj["h3_residual"] = hyp.h3_residual;
   hj["h3_scale"] = hyp.h3_scale;
   hj["h3_ok"] = hyp.h3_ok;
   hj["h4_ok"] = hyp.h4_ok;
   hj["dv0"] = hyp.dv0;
   hj["du0"] = hyp.du0;
   hj["min_v_interior"] = hyp.min_v_interior;
   out.json_file("hypotheses.json", hj);
   if (!hyp.all_ok()) {
      log << "free-boundary: hypotheses failed (H1 " << hyp.h1_ok << ", H2 " << hyp.h2_ok
          << ", H3 " << hyp.h3_ok << " residual " << format_double(hyp.h3_residual) << ", H4 "
          << hyp.h4_ok << ")\n";
      return kExitAcceptance;
   }

   FBConfig cfg;
   cfg.T = c.num("t_end");
   cfg.T_min = cfg.T / 16.0;
   cfg.dt = c.num("dt");
   cfg.picard_tol = c.num("picard_tol");
   cfg.picard_max = static_cast<int>(c.integer("picard_max"));
   cfg.time_order = static_cast<int>(c.integer("time_order"));
   cfg.newton_tol = c.num("newton_tol");
   FBSolution sol;
   try {
      sol = picard_solve(data, cfg);
   } catch (const SolverError& e) {
      log << "free-boundary: solver failure: " << e.what() << "\n";
      return kExitSolver;
   }
   ordered_json status;
   status["status"] = to_string(sol.status);
   status["message"] = sol.message;
   status["T"] = sol.T;
   status["iterations"] = sol.iterations;
   status["increments"] = sol.increments;
   if (!sol.ok()) {
      out.json_file("fb_status.json", status);
      log << "free-boundary: " << to_string(sol.status) << ": " << sol.message << "\n";
      return kExitSolver;
   }

   const IdentityReport id = identity_checks(sol);
   CsvTable t{schema::interface, {}};
   for (std::size_t m = 0; m < sol.path.size(); ++m)
      t.rows.push_back({sol.path.times[m], sol.path.x_tilde[m], sol.path.x_tilde_prime[m],
                        id.p_s[m], id.res_edo1[m], id.res_bcw[m], id.res_transport[m],
                        id.res_edo2[m]});
   const double sdt = c.num("snapshot_dt");
   const double step_dt = sol.path.times[1] - sol.path.times[0];
   for (std::size_t k = 0;; ++k) {
      const auto m = static_cast<std::size_t>(std::lround(static_cast<double>(k) * sdt / step_dt));
      if (m >= sol.states.size())
         break;
      const FBState& s = sol.states[m];
      CsvTable snap{schema::fb_state, {}};
      for (std::size_t i = 0; i < data.grid.size(); ++i)
         snap.rows.push_back({data.grid.x(i), s.v_s[i], s.u_s[i], s.w_s[i]});
      out.csv(snapshot_name("fb_state", s.t), snap,
              {{"t", s.t}, {"x_tilde", sol.path.x_tilde[m]}, {"p_s", s.p_s}});
   }

   const double tol = c.num("identity_tol");
   const bool identities_ok = id.max_transport <= tol && id.max_edo1 <= tol
                              && id.max_bcw <= tol && id.max_edo2 <= tol
                              && id.complementarity_ok;
   ordered_json res = status;
   res["fixed_point_residual"] = fixed_point_residual(sol);
   res["h2_norm_path"] = sol.path.h2_norm();
   res["max_res_transport"] = id.max_transport;
   res["max_res_EDO1"] = id.max_edo1;
   res["max_res_BCw"] = id.max_bcw;
   res["max_res_EDO2"] = id.max_edo2;
   res["max_p_s_mismatch"] = id.max_p_s_mismatch;
   res["min_p_s"] = id.min_p_s;
   res["min_v_interior"] = id.min_v_interior;
   res["complementarity_ok"] = id.complementarity_ok;
   res["identities_ok"] = identities_ok;
   bool oracle_ok = true;
   if (c.flag("oracle_tw")) {
      const LimitProfile lp(es);
      double xe = 0.0, pe = 0.0;
      for (std::size_t m = 0; m < sol.path.size(); ++m) {
         xe = std::max(xe, std::abs(sol.path.x_tilde[m] - lp.speed() * sol.path.times[m]));
         pe = std::max(pe, std::abs(id.p_s[m] - lp.p_minus()));
      }
      oracle_ok = xe <= c.num("oracle_x_tol") && pe <= c.num("oracle_p_tol")
                  && sol.status == FBStatus::converged;
      res["oracle"] = {{"max_x_err", xe}, {"max_p_err", pe}, {"pass", oracle_ok}};
   }
   out.csv("interface.csv", t, res);
   log << "free-boundary: " << to_string(sol.status) << " after " << sol.iterations
       << " iterations on T = " << format_double(sol.T) << "; identities "
       << (identities_ok ? "ok" : "above tolerance");
   if (c.flag("oracle_tw"))
      log << "; oracle " << (oracle_ok ? "ok" : "failed");
   log << "\n";
   return identities_ok && oracle_ok ? kExitOk : kExitAcceptance;
}

} // namespace

int run(const RunConfig& config, std::ostream& log)
{
   try {
      Artifacts out(config);
      write_json(out.path("run_config.json"), config.to_json());
      switch (config.scenario) {
      case Scenario::profile: return run_profile(config, out, log);
      case Scenario::eps_profile: return run_eps_profile(config, out, log);
      case Scenario::converge: return run_converge(config, out, log);
      case Scenario::simulate: return run_simulate(config, out, log);
      case Scenario::stability: return run_stability(config, out, log);
      case Scenario::free_boundary: return run_free_boundary(config, out, log);
      }
   } catch (const ConfigError& e) {
      log << "configuration error: " << e.what() << "\n";
      return kExitConfig;
   } catch (const InvalidEndStates& e) {
      log << "configuration error: " << e.what() << "\n";
      return kExitConfig;
   } catch (const std::exception& e) {
      log << to_string(config.scenario) << ": failure: " << e.what() << "\n";
      return kExitSolver;
   }
   return kExitSolver;
}

} // namespace fcns
