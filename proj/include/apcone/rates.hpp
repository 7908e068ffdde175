#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "apcone/apengine.hpp"
#include "apcone/planes.hpp"

namespace apcone {

struct FitWindow {
  long kmin = 0;
  long kmax = 0;  // inclusive
};

struct RateFit {
  enum class Model { inverse_power, geometric };
  Model model = Model::geometric;
  int power = 0;  // p of the inverse_power model
  FitWindow window;
  std::size_t points = 0;
  // inverse_power: dist^-p = intercept + slope k
  // geometric: log dist = intercept + slope k
  double intercept = 0, slope = 0;
  double rmse = 0;

  double ratio() const;      // geometric: exp(slope)
  double amplitude() const;  // geometric: exp(intercept)
  std::string summary() const;
};

// Drops the first 10% of the trace.
FitWindow default_window(const APTrace& trace);

// Least-squares line through (k, dist_k^-p) on the window.
RateFit fit_inverse_power(const APTrace& trace, int p, FitWindow window);
// Least-squares line through (k, log dist_k) on the window.
RateFit fit_geometric(const APTrace& trace, FitWindow window);

enum class NoiseSign { plus, minus, alternating };

struct RecursiveSequence {
  std::vector<double> x;  // x_0 .. x_n
  double limit_product = 0;  // (qC)^(1/q) n^(1/q) x_n
};

// x_{k+1} = x_k (1 - C x_k^q +- K x_k^(q+1)). Requires x0 > 0, C > 0, K >= 0
// and (q+1)C - (q+2)K x0 > 0.
RecursiveSequence recursive_sequence(double c, double k, int q, double x0, long n,
                                     NoiseSign noise);

// (qC)^(1/q) n^(1/q) x_n computed along the way for n in `checkpoints`.
std::vector<double> recursive_products(double c, double k, int q, double x0,
                                       const std::vector<long>& checkpoints, NoiseSign noise);

// (3 / (32 c4^4 (2 c1^2 + 1)^4))^(1/6)
double thm71_constant(const PlaneSpec& spec);

// CSV with header k,dist,psd_rank,inv2,inv6 and 17 significant digits.
void write_trace_csv(std::ostream& out, const APTrace& trace);
// Skips blank lines and lines starting with '#'.
APTrace read_trace_csv(std::istream& in);

}  // namespace apcone
