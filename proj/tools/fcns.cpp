#include <cstdlib>
#include <iostream>

#include "fcns/scenarios.hpp"

int main(int argc, char** argv)
{
   fcns::ParsedArgs args;
   try {
      args = fcns::parse_config(argc, argv, std::getenv(fcns::kOutDirEnv));
   } catch (const fcns::ConfigError& e) {
      std::cerr << "fcns: " << e.what() << "\nRun 'fcns --help' for usage.\n";
      return fcns::kExitConfig;
   }
   if (args.help) {
      std::cout << args.help_text << "\n";
      return fcns::kExitOk;
   }
   return fcns::run(args.config, std::cerr);
}
