#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <vector>

#include "fcns/csv.hpp"
#include "fcns/scenarios.hpp"

using namespace fcns;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ParsedArgs parse(std::vector<const char*> args, const char* env = nullptr)
{
   args.insert(args.begin(), "fcns");
   return parse_config(static_cast<int>(args.size()), args.data(), env);
}

fs::path fresh_dir(const std::string& name)
{
   const fs::path d = fs::temp_directory_path() / "fcns_unit_runs" / name;
   fs::remove_all(d);
   fs::create_directories(d);
   return d;
}

std::string slurp(const fs::path& p)
{
   std::ifstream is(p, std::ios::binary);
   return {std::istreambuf_iterator<char>(is), {}};
}

} // namespace

TEST_CASE("profile flags resolve to the unit speed configuration")
{
   const auto p = parse({"profile", "--v-plus", "2", "--u-minus", "1", "--u-plus", "0", "--mu", "1"});
   CHECK_FALSE(p.help);
   CHECK(p.config.scenario == Scenario::profile);
   CHECK(p.config.num("v_plus") == 2.0);
   CHECK(p.config.integer("n") == 1501);
   CHECK(p.config.out_dir == fs::path("out"));
   std::ostringstream log;
   const fs::path out = fresh_dir("profile");
   RunConfig cfg = p.config;
   cfg.out_dir = out;
   CHECK(run(cfg, log) == kExitOk);
   const json meta = json::parse(slurp(out / "profile.meta.json"));
   CHECK(meta["results"]["speed"].get<double>() == doctest::Approx(1.0));
   CHECK(fs::exists(out / "run_config.json"));
   CHECK_NOTHROW(check_schema(read_csv(out / "profile.csv"), schema::profile));
}

TEST_CASE("usage errors")
{
   CHECK_THROWS_WITH_AS(parse({"simulate", "--epsilon", "1e-2", "--gamma", "0.5"}),
                        doctest::Contains("gamma"), ConfigError);
   CHECK_THROWS_WITH_AS(parse({"eps-profile"}), doctest::Contains("epsilon"), ConfigError);
   CHECK_THROWS_AS(parse({"profile", "--bogus", "1"}), ConfigError);
   CHECK_THROWS_AS(parse({"profile", "--gamma", "2"}), ConfigError); // not a profile key
   CHECK_THROWS_AS(parse({"nonsense"}), ConfigError);
   CHECK_THROWS_WITH_AS(parse({"profile", "--v-plus", "0.5"}), doctest::Contains("v_plus"),
                        ConfigError);
   CHECK_THROWS_AS(parse({"converge", "--epsilons", "1e-2"}), ConfigError);
   CHECK_THROWS_AS(parse({"free-boundary", "--oracle-tw", "--perturb-amp-v", "0.1"}), ConfigError);
   CHECK(parse({"profile", "--help"}).help);
}

TEST_CASE("file values, flags and output precedence")
{
   const json file = {{"scenario", "simulate"}, {"epsilon", 1e-2}, {"dx", 0.05}, {"out", "from_file"}};
   const json flags = {{"dx", 0.04}};
   const RunConfig a = resolve_config(Scenario::simulate, file, flags);
   CHECK(a.num("dx") == 0.04);
   CHECK(a.num("epsilon") == 1e-2);
   CHECK(a.num("dt") == doctest::Approx(0.04 * 0.04));
   CHECK(a.out_dir == fs::path("from_file"));
   CHECK(resolve_config(Scenario::simulate, file, flags, "", "from_env").out_dir == fs::path("from_env"));
   CHECK(resolve_config(Scenario::simulate, file, flags, "from_flag", "from_env").out_dir
         == fs::path("from_flag"));
   CHECK_THROWS_AS(resolve_config(Scenario::profile, file, json::object()), ConfigError);
   CHECK_THROWS_AS(resolve_config(Scenario::simulate, json{{"epsilon", "x"}}, json::object()),
                   ConfigError);
   CHECK_THROWS_AS(resolve_config(Scenario::simulate, json{{"epsilon", 1e-2}, {"what", 1}},
                                  json::object()),
                   ConfigError);
   const fs::path cfgfile = fresh_dir("cfg") / "c.json";
   std::ofstream(cfgfile) << R"({"epsilon": 0.01, "t_end": 0.1})";
   const auto p = parse({"simulate", "--config", cfgfile.c_str(), "--t-end", "0.2"}, "env_out");
   CHECK(p.config.num("t_end") == 0.2);
   CHECK(p.config.out_dir == fs::path("env_out"));
}

TEST_CASE("every scenario is deterministic")
{
   const std::vector<std::vector<const char*>> runs = {
      {"profile"},
      {"eps-profile", "--epsilon", "1e-2", "--n", "1001"},
      {"converge", "--epsilons", "1e-2,1e-3", "--n", "2001"},
      {"simulate", "--epsilon", "1e-2", "--dx", "0.05", "--t-end", "0.1", "--snapshot-dt", "0.05"},
      {"stability", "--epsilon", "1e-2", "--dx", "0.05", "--t-end", "0.2"},
      {"free-boundary", "--oracle-tw", "--dx", "0.02", "--t-end", "0.1", "--snapshot-dt", "0.05"},
   };
   for (const auto& args : runs) {
      const std::string name = args.front();
      CAPTURE(name);
      std::vector<std::map<std::string, std::string>> outputs;
      std::vector<int> codes;
      for (int rep = 0; rep < 2; ++rep) {
         RunConfig cfg = parse(args).config;
         cfg.out_dir = fresh_dir(name);
         std::ostringstream log;
         codes.push_back(run(cfg, log));
         auto& files = outputs.emplace_back();
         for (const auto& e : fs::directory_iterator(cfg.out_dir))
            files[e.path().filename().string()] = slurp(e.path());
      }
      CHECK(codes[0] == codes[1]);
      CHECK(codes[0] != kExitConfig);
      CHECK(codes[0] != kExitSolver);
      CHECK(outputs[0] == outputs[1]);
      const std::size_t files = outputs[0].size();
      CHECK(files >= 3);
   }
}
