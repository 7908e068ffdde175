#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apcone/planes.hpp"
#include "apcone/rates.hpp"

namespace apcone {

enum class FitKind { geometric, inverse2, inverse6 };

// A hard-coded example plane together with its default run and fit.
struct BuiltinExample {
  std::string id;
  std::string variant;
  AffineSubspace<double> e;
  std::optional<PlaneSpec> spec;  // set for the Type-2 examples
  std::vector<double> p0;
  // a scalar start t0 maps to the first coordinate t0 - start_offset
  double start_offset = 0;
  long iters = 0;
  FitKind fit = FitKind::geometric;
  std::optional<FitWindow> window;  // default_window() when unset
  int singularity_degree = 0;
};

const std::vector<std::string>& builtin_ids();

// Throws DomainError for an unknown id or variant. An empty variant selects
// the default one.
BuiltinExample builtin_example(const std::string& id, const std::string& variant = "");

// Parses "t0", "a,b,c" or "slowest-curve:t0" into coordinates of E. The
// slowest-curve form needs a Type-2 spec with c4 != 0.
std::vector<double> parse_start(const std::string& start, const AffineSubspace<double>& e,
                                const std::optional<PlaneSpec>& spec, double start_offset = 0);

RateFit fit_trace(const APTrace& trace, FitKind kind, std::optional<FitWindow> window);

}  // namespace apcone
