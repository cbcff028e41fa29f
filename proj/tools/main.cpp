#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

extern char** environ;

int main(int argc, char** argv) {
  botscan::cli::Environment env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq != std::string::npos) env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return botscan::cli::run(std::vector<std::string>(argv + 1, argv + argc), env, std::cout,
                           std::cerr);
}
