#include "apcone/rates.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace apcone {

namespace {

struct Line {
  double intercept, slope, rmse;
  std::size_t n;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("rate fit: window holds fewer than two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (icpt + slope * x[i]);
    ss += r * r;
  }
  return {icpt, slope, std::sqrt(ss / n), n};
}

template <class F>
RateFit fit(const APTrace& trace, FitWindow w, F transform) {
  if (w.kmax < w.kmin) throw DomainError("rate fit: empty window");
  std::vector<double> x, y;
  for (const auto& row : trace.rows) {
    if (row.k < w.kmin || row.k > w.kmax) continue;
    if (!(row.dist > 0)) throw DomainError("rate fit: zero distance inside the window");
    x.push_back(static_cast<double>(row.k));
    y.push_back(transform(row.dist));
  }
  const Line l = least_squares(x, y);
  RateFit f;
  f.window = w;
  f.points = l.n;
  f.intercept = l.intercept;
  f.slope = l.slope;
  f.rmse = l.rmse;
  return f;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double RateFit::ratio() const { return std::exp(slope); }
double RateFit::amplitude() const { return std::exp(intercept); }

std::string RateFit::summary() const {
  char buf[256];
  if (model == Model::geometric)
    std::snprintf(buf, sizeof buf,
                  "geometric fit k in [%ld,%ld]: dist ~ %.6g * (%.6f)^k, rmse(log) %.3g",
                  window.kmin, window.kmax, amplitude(), ratio(), rmse);
  else
    std::snprintf(buf, sizeof buf,
                  "inverse-power fit p=%d k in [%ld,%ld]: 1/dist^%d = %.6g + %.6g k, rmse %.3g",
                  power, window.kmin, window.kmax, power, intercept, slope, rmse);
  return buf;
}

FitWindow default_window(const APTrace& trace) {
  if (trace.rows.empty()) throw DomainError("default_window: empty trace");
  const long last = trace.rows.back().k;
  return {last / 10, last};
}

RateFit fit_inverse_power(const APTrace& trace, int p, FitWindow window) {
  if (p < 1) throw DomainError("fit_inverse_power: p must be positive");
  RateFit f = fit(trace, window, [p](double d) { return std::pow(d, -p); });
  f.model = RateFit::Model::inverse_power;
  f.power = p;
  return f;
}

RateFit fit_geometric(const APTrace& trace, FitWindow window) {
  RateFit f = fit(trace, window, [](double d) { return std::log(d); });
  f.model = RateFit::Model::geometric;
  return f;
}

namespace {

void check_recursion(double c, double k, int q, double x0) {
  if (!(x0 > 0)) throw DomainError("recursive_sequence: x0 must be positive");
  if (!(c > 0) || !(k >= 0) || q < 1)
    throw DomainError("recursive_sequence: need C > 0, K >= 0, q >= 1");
  if (!((q + 1) * c - (q + 2) * k * x0 > 0))
    throw DomainError("recursive_sequence: (q+1)C - (q+2)K x0 must be positive");
}

double next_term(double x, double c, double k, int q, long idx, NoiseSign noise) {
  const double xq = std::pow(x, q);
  double sign = 1;
  if (noise == NoiseSign::minus) sign = -1;
  if (noise == NoiseSign::alternating) sign = idx % 2 == 0 ? 1 : -1;
  return x * (1 - c * xq + sign * k * xq * x);
}

}  // namespace

RecursiveSequence recursive_sequence(double c, double k, int q, double x0, long n,
                                     NoiseSign noise) {
  check_recursion(c, k, q, x0);
  if (n < 1) throw DomainError("recursive_sequence: n must be positive");
  RecursiveSequence out;
  out.x.reserve(static_cast<std::size_t>(n) + 1);
  out.x.push_back(x0);
  for (long i = 0; i < n; ++i) out.x.push_back(next_term(out.x.back(), c, k, q, i, noise));
  out.limit_product = std::pow(q * c * static_cast<double>(n), 1.0 / q) * out.x.back();
  return out;
}

std::vector<double> recursive_products(double c, double k, int q, double x0,
                                       const std::vector<long>& checkpoints, NoiseSign noise) {
  check_recursion(c, k, q, x0);
  std::vector<double> out;
  double x = x0;
  long i = 0;
  for (long n : checkpoints) {
    if (n < i) throw DomainError("recursive_products: checkpoints must be increasing");
    for (; i < n; ++i) x = next_term(x, c, k, q, i, noise);
    out.push_back(std::pow(q * c * static_cast<double>(n), 1.0 / q) * x);
  }
  return out;
}

double thm71_constant(const PlaneSpec& spec) {
  if (spec.kind != PlaneKind::type2) throw DomainError("thm71_constant: spec is not Type 2");
  spec.validate();
  const double c1 = spec.ci(1), c4 = spec.ci(4);
  if (c4 == 0) throw DomainError("thm71_constant: requires c4 != 0");
  return std::pow(3.0 / (32 * std::pow(c4, 4) * std::pow(2 * c1 * c1 + 1, 4)), 1.0 / 6);
}

void write_trace_csv(std::ostream& out, const APTrace& trace) {
  out << "k,dist,psd_rank,inv2,inv6\n";
  for (const auto& r : trace.rows) {
    const double inv2 = r.dist > 0 ? 1 / (r.dist * r.dist) : INFINITY;
    const double inv6 = r.dist > 0 ? std::pow(r.dist, -6) : INFINITY;
    out << r.k << ',' << fmt17(r.dist) << ',' << r.psd_rank << ',' << fmt17(inv2) << ','
        << fmt17(inv6) << '\n';
  }
}

APTrace read_trace_csv(std::istream& in) {
  std::string line;
  // lines starting with '#' carry summaries and are skipped
  auto next = [&] {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next()) throw DomainError("read_trace_csv: empty input");
  if (line != "k,dist,psd_rank,inv2,inv6") throw DomainError("read_trace_csv: unexpected header");
  APTrace t;
  while (next()) {
    std::istringstream ls(line);
    std::string f[5];
    for (auto& s : f)
      if (!std::getline(ls, s, ',')) throw DomainError("read_trace_csv: short row");
    TraceRow r;
    try {
      r.k = std::stol(f[0]);
      r.dist = std::stod(f[1]);
      r.psd_rank = std::stoi(f[2]);
    } catch (const std::exception&) {
      throw DomainError("read_trace_csv: malformed row '" + line + "'");
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace apcone
