#include "apcone/builtin.hpp"

#include <sstream>

#include "apcone/slowcurve.hpp"

namespace apcone {

namespace {

SymMat<double> rows(std::vector<std::vector<double>> r) { return SymMat<double>::from_rows(r); }

AffineSubspace<double> from_spec(const PlaneSpec& s) { return build_plane<double>(s).e; }

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\t')) ++used;
  if (used != s.size() || s.empty()) throw DomainError("bad number in start: '" + s + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& builtin_ids() {
  static const std::vector<std::string> ids = {"ex3.2", "ex3.3", "ex3.4", "ex4.4", "ex6.1"};
  return ids;
}

BuiltinExample builtin_example(const std::string& id, const std::string& variant) {
  const SymMat<double> ustar = intersection_point<double>();
  BuiltinExample ex;
  ex.id = id;
  auto pick = [&](std::initializer_list<const char*> allowed) {
    ex.variant = variant.empty() ? *allowed.begin() : variant;
    for (const char* a : allowed)
      if (ex.variant == a) return;
    throw DomainError("unknown variant '" + variant + "' for " + id);
  };

  if (id == "ex3.2") {
    pick({"pos", "neg"});
    ex.e = AffineSubspace<double>::make(ustar, {rows({{0, 0, -1}, {0, 2, 0}, {-1, 0, 0}})});
    ex.singularity_degree = 2;
    if (ex.variant == "pos") {
      ex.p0 = {0.1};
      ex.iters = 100000;
      ex.fit = FitKind::inverse2;
    } else {
      ex.p0 = {-0.05};
      ex.iters = 30;
      ex.window = FitWindow{5, 30};
    }
  } else if (id == "ex3.3") {
    pick({"neg", "pos"});
    const SymMat<double> b = rows({{-1, 0, 0}, {0, 1, 1}, {0, 1, 1}});
    ex.singularity_degree = 2;
    if (ex.variant == "neg") {
      ex.e = AffineSubspace<double>::make(ustar, {b});
      ex.p0 = {-0.1};
      ex.iters = 15;
      ex.window = FitWindow{1, 15};
    } else {
      // measured from the endpoint U(1) of the intersection segment
      ex.e = AffineSubspace<double>::make(ustar + b, {b});
      ex.start_offset = 1;
      ex.p0 = {0.5};
      ex.iters = 60;
      ex.window = FitWindow{1, 60};
    }
  } else if (id == "ex3.4") {
    pick({"default"});
    SymMat<double> u(4), b1(4), b2(4);
    u.set(0, 0, 1);
    b1.set(0, 2, 1);
    b1.set(1, 2, 1);
    b2.set(0, 3, 1);
    b2.set(1, 3, 1);
    ex.e = AffineSubspace<double>::make(u, {b1, b2});
    ex.p0 = {0.1, 0.0};
    ex.iters = 40;
    ex.window = FitWindow{10, 40};
    ex.singularity_degree = 1;
  } else if (id == "ex4.4") {
    pick({"default"});
    ex.spec = PlaneSpec::type2(0, 0, 1, 1, 0);
    ex.e = AffineSubspace<double>::make(
        ustar, {rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}), rows({{0, 0, -1}, {0, 2, 0}, {-1, 0, 0}}),
                rows({{-2, 0, 0}, {0, 0, 1}, {0, 1, 0}})});
    ex.p0 = parse_start("slowest-curve:0.1", ex.e, ex.spec);
    ex.iters = 10000;
    ex.fit = FitKind::inverse6;
    ex.singularity_degree = 2;
  } else if (id == "ex6.1") {
    pick({"default"});
    ex.spec = PlaneSpec::type2(1, 0, 0, 1, 0);
    ex.e = from_spec(*ex.spec);
    ex.p0 = parse_start("slowest-curve:0.1", ex.e, ex.spec);
    ex.iters = 100000;
    ex.fit = FitKind::inverse6;
    ex.singularity_degree = 2;
  } else {
    throw DomainError("unknown example id '" + id + "'");
  }
  return ex;
}

std::vector<double> parse_start(const std::string& start, const AffineSubspace<double>& e,
                                const std::optional<PlaneSpec>& spec, double start_offset) {
  const std::string tag = "slowest-curve:";
  if (start.rfind(tag, 0) == 0) {
    if (!spec || spec->kind != PlaneKind::type2)
      throw DomainError("slowest-curve start needs a Type-2 plane");
    if (e.dim() != 3) throw DomainError("slowest-curve start needs a 3-plane");
    const double t0 = parse_number(start.substr(tag.size()));
    const auto cp = curve_point<double>(*spec, t0);
    return {t0, cp.g13, cp.g23};
  }
  std::vector<double> p;
  std::stringstream ss(start);
  std::string item;
  while (std::getline(ss, item, ',')) p.push_back(parse_number(item));
  if (p.empty()) throw DomainError("empty start");
  if (p.size() == 1) {
    p[0] -= start_offset;
    p.resize(static_cast<std::size_t>(e.dim()), 0.0);
  }
  if (static_cast<int>(p.size()) != e.dim())
    throw DomainError("start has " + std::to_string(p.size()) + " coordinates, plane has " +
                      std::to_string(e.dim()));
  return p;
}

RateFit fit_trace(const APTrace& trace, FitKind kind, std::optional<FitWindow> window) {
  const FitWindow w = window ? *window : default_window(trace);
  switch (kind) {
    case FitKind::inverse2:
      return fit_inverse_power(trace, 2, w);
    case FitKind::inverse6:
      return fit_inverse_power(trace, 6, w);
    case FitKind::geometric:
      break;
  }
  return fit_geometric(trace, w);
}

}  // namespace apcone
