#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "apcone/planes.hpp"

namespace apcone {

// Contents of a `run` config file.
struct RunConfig {
  // a spec, a builtin id, "random-type1" or "random-type2"
  std::variant<PlaneSpec, std::string> plane = std::string("ex6.1");
  std::string variant;
  std::optional<std::string> start;  // as accepted by parse_start
  long max_iter = 1000;
  double tol = 0;
  long stride = 0;
  std::optional<std::string> output;
  std::uint64_t seed = 1;
};

// Throws DomainError on malformed JSON, unknown keys or invalid values.
RunConfig parse_run_config(const std::string& json_text);

// Subcommands example, verify and run. Exit codes: 0 success, 1 failed
// check or numerical failure, 2 usage or configuration error. `args` excludes
// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace apcone
