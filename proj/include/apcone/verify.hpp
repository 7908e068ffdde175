#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace apcone {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
};

// prop31, thm41, thm62, thm63, lemma64, lemma67, lemma75, prop76, lemma77,
// plucker, properties
const std::vector<std::string>& suite_names();

// Throws DomainError for an unknown suite name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

}  // namespace apcone
