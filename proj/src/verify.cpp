#include "apcone/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>

#include "apcone/apengine.hpp"
#include "apcone/builtin.hpp"
#include "apcone/errors.hpp"
#include "apcone/planes.hpp"
#include "apcone/rates.hpp"
#include "apcone/series.hpp"
#include "apcone/slowcurve.hpp"

namespace apcone {

namespace {

using HP = HighPrec;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

class Suite {
 public:
  explicit Suite(std::string name) { rep_.suite = std::move(name); }

  void add(std::string name, bool ok, std::string detail) {
    rep_.checks.push_back({std::move(name), ok, std::move(detail)});
  }

  // Runs f and records a failed check if it throws.
  void guard(const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& ex) {
      add(name, false, std::string("exception: ") + ex.what());
    }
  }

  SuiteReport take() { return std::move(rep_); }

 private:
  SuiteReport rep_;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm(const std::vector<double>& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

SymMat<HP> scalar_mat(const HP& v) {
  SymMat<HP> m(1);
  m.set(0, 0, v);
  return m;
}

SymMat<double> random_sym(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  SymMat<double> m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, g(rng));
  return m;
}

// Type-2 spec with c4 != 0 and |c_i| <= 2 whose curve is valid beyond t_min.
PlaneSpec draw_type2(std::mt19937_64& rng, double t_min, bool random_frame = true,
                     bool c3_nonzero = false) {
  RandomSpecOptions opt;
  opt.random_frame = random_frame;
  opt.c3_nonzero = c3_nonzero;
  for (;;) {
    auto s = random_type2_spec(rng, opt);
    if (valid_t_max(s) >= t_min) return s;
  }
}

const PlaneSpec kEx61 = PlaneSpec::type2(1, 0, 0, 1, 0);
const PlaneSpec kEx44 = PlaneSpec::type2(0, 0, 1, 1, 0);

// FD eigenvalue formula against the direct AP step.
SuiteReport suite_prop31(std::uint64_t seed) {
  Suite s("prop31");
  std::mt19937_64 rng(seed);
  const double tol = 1e-6;

  s.guard("ex3.2 t=0.01", [&] {
    const auto e = builtin_example("ex3.2", "pos").e;
    const std::vector<double> p{0.01};
    const auto fd = eig_formula_step(e, p);
    const auto direct = ap_step(e, e.point(p)).coeffs;
    const double gap = std::abs(fd[0] - direct[0]);
    const double t = p[0];
    const double series_gap = std::abs(direct[0] - (t - t * t * t / 3));
    s.add("ex3.2 t=0.01", gap < 1e-9 && series_gap < 10 * std::pow(t, 4),
          fmt("|fd-direct|=%.3g, |direct-(t-t^3/3)|=%.3g", gap, series_gap));
  });

  s.guard("ex3.4 p=(0.1,0.03)", [&] {
    const auto e = builtin_example("ex3.4").e;
    const std::vector<double> p{0.1, 0.03};
    const double gap = max_abs_diff(eig_formula_step(e, p), ap_step(e, e.point(p)).coeffs);
    s.add("ex3.4 p=(0.1,0.03)", gap < tol, fmt("|fd-direct|=%.3g", gap));
  });

  std::uniform_real_distribution<double> small(-0.1, 0.1);
  for (int i = 0; i < 18; ++i) {
    const std::string name = fmt("random type2 #%d", i + 1);
    s.guard(name, [&] {
      RandomSpecOptions opt;
      opt.random_frame = true;
      const auto spec = random_type2_spec(rng, opt);
      const auto e = orthogonalize(build_plane<double>(spec).e);
      const std::vector<double> p{small(rng), small(rng), small(rng)};
      const double gap = max_abs_diff(eig_formula_step(e, p), ap_step(e, e.point(p)).coeffs);
      s.add(name, gap < tol, fmt("%s |fd-direct|=%.3g", describe(spec).c_str(), gap));
    });
  }
  return s.take();
}

// M(x) formula at rank-one points near the slowest curve.
SuiteReport suite_thm41(std::uint64_t seed) {
  Suite s("thm41");
  std::mt19937_64 rng(seed);

  s.guard("ex6.1 G(0.05)", [&] {
    const auto e = build_plane<double>(kEx61).e;
    const auto p = coords_in(e, curve_point<double>(kEx61, 0.05).G);
    const double r = thm41_residual<double>(e, p);
    s.add("ex6.1 G(0.05)", r < 1e-10, fmt("residual=%.3g", r));
  });

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const std::string name = fmt("random type2 #%d", i + 1);
    s.guard(name, [&] {
      const auto spec = draw_type2(rng, 0.04);
      const double tmax = valid_t_max(spec);
      const auto e = build_plane<double>(spec).e;
      // G(t) sits in the rank-one regime; a perturbation of size 0.1 t^6
      // keeps it there
      for (int attempt = 0; attempt < 50; ++attempt) {
        const double t = 0.02 + unit(rng) * (0.5 * tmax - 0.02);
        auto p = coords_in(e, curve_point<double>(spec, t).G);
        for (auto& v : p) v += 0.1 * std::pow(t, 6) * gauss(rng);
        double r = 0;
        try {
          r = thm41_residual<double>(e, p);
        } catch (const DomainError&) {
          continue;
        }
        const double bound = 1e-9 * (1 + norm(p));
        s.add(name, r <= bound,
              fmt("%s t=%.4f residual=%.3g bound=%.3g", describe(spec).c_str(), t, r, bound));
        return;
      }
      s.add(name, false, describe(spec) + ": no rank-one sample found");
    });
  }
  return s.take();
}

// Residual-order checks of the rational PSD-projection and AP-image formulas.
SuiteReport suite_rational(const std::string& name, bool image, std::uint64_t seed) {
  Suite s(name);
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, PlaneSpec>> specs{{"ex6.1", kEx61}};
  for (int i = 0; i < 10; ++i) specs.push_back({fmt("random #%d", i + 1), draw_type2(rng, 0.02)});

  const HP t0(0.01);
  for (const auto& [label, spec] : specs) {
    s.guard(label, [&, &spec = spec, &label = label] {
      std::function<SymMat<HP>(const HP&)> f, g;
      if (image) {
        const auto e = build_plane<HP>(spec).e;
        f = [&spec, e](const HP& t) { return ap_step(e, curve_point<HP>(spec, t).G).next; };
        g = [&spec](const HP& t) { return ap_image_formula<HP>(spec, t); };
      } else {
        f = [&spec](const HP& t) { return project_psd(curve_point<HP>(spec, t).G).matrix; };
        g = [&spec](const HP& t) { return psd_projection_formula<HP>(spec, t); };
      }
      const double order = residual_order<HP>(f, g, t0, 3);
      s.add(label, order >= 7.5, fmt("%s order=%.3f", describe(spec).c_str(), order));
    });
  }
  return s.take();
}

// w recursion, by truncated series and pointwise.
SuiteReport suite_lemma64(std::uint64_t seed) {
  Suite s("lemma64");
  std::mt19937_64 rng(seed);
  RandomSpecOptions opt;
  for (int i = 0; i < 10; ++i) {
    const std::string name = fmt("series random #%d", i + 1);
    s.guard(name, [&] {
      const auto spec = random_type2_spec(rng, opt);
      const double gap = check_lemma64(spec);
      s.add(name, gap <= 1e-10, fmt("%s max coeff gap=%.3g", describe(spec).c_str(), gap));
    });
  }
  for (int i = 0; i < 3; ++i) {
    const std::string name = fmt("pointwise random #%d", i + 1);
    s.guard(name, [&] {
      const auto spec = draw_type2(rng, 0.02, false);
      const HP c1(spec.ci(1)), c2(spec.ci(2)), c3(spec.ci(3));
      std::function<SymMat<HP>(const HP&)> f = [&](const HP& t) {
        return scalar_mat(w_rational<HP>(spec, t));
      };
      std::function<SymMat<HP>(const HP&)> g = [&](const HP& t) {
        const auto cp = curve_point<HP>(spec, t);
        return scalar_mat(1 - 2 * c1 * t + 2 * c2 * cp.g13 - 2 * c3 * cp.g23);
      };
      const double order = residual_order<HP>(f, g, HP(0.01), 3);
      s.add(name, order >= 5.5, fmt("%s order=%.3f", describe(spec).c_str(), order));
    });
  }
  return s.take();
}

// det G(t) = t^10 / (32 c4^6) + O(t^11).
SuiteReport suite_lemma67(std::uint64_t seed) {
  Suite s("lemma67");
  std::mt19937_64 rng(seed);

  s.guard("ex6.1", [&] {
    const double c10 = det_series(kEx61)[10];
    s.add("ex6.1", std::abs(c10 - 0.03125) <= 1e-12, fmt("coeff10=%.17g", c10));
  });

  RandomSpecOptions opt;
  for (int i = 0; i < 10; ++i) {
    const std::string name = fmt("random #%d", i + 1);
    s.guard(name, [&] {
      const auto spec = random_type2_spec(rng, opt);
      const auto d = det_series(spec);
      const auto scale = det_series_scale(spec);
      double low = 0;
      for (int k = 0; k <= 9; ++k) low = std::max(low, std::abs(d[k]) / std::max(scale[k], 1.0));
      const double want = 1 / (32 * std::pow(spec.ci(4), 6));
      const double rel = std::abs(d[10] - want) / want;
      s.add(name, low < 1e-10 && rel < 1e-8,
            fmt("%s max rel coeff0..9=%.3g coeff10 rel err=%.3g", describe(spec).c_str(), low,
                rel));
    });
  }
  return s.take();
}

SuiteReport suite_lemma75(std::uint64_t seed) {
  Suite s("lemma75");
  std::mt19937_64 rng(seed);
  RandomSpecOptions opt;
  opt.random_frame = true;
  s.guard("ex6.1", [&] {
    const auto g = perturb_gain(kEx61);
    s.add("ex6.1", g.spectral_norm < 1, fmt("||R||=%.6f", g.spectral_norm));
  });
  int bad = 0, asym = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = perturb_gain(random_type2_spec(rng, opt));
    worst = std::max(worst, g.spectral_norm);
    if (!(g.spectral_norm < 1)) ++bad;
    if (g.R[0][1] != g.R[1][0]) ++asym;
  }
  s.add("100 random specs", bad == 0 && asym == 0,
        fmt("max ||R||=%.6f, failures=%d, asymmetric=%d", worst, bad, asym));
  return s.take();
}

SuiteReport suite_prop76(std::uint64_t seed) {
  Suite s("prop76");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  const long steps = 10000;
  const double t0 = 0.02;

  s.guard("t0=0", [&] {
    const auto r = tube_check(kEx61, 0.0, 0, 0, steps, 0.1);
    s.add("t0=0", r.passed, "fixed point");
  });

  for (const auto& [label, spec] : {std::pair{"ex6.1", kEx61}, std::pair{"ex4.4", kEx44}}) {
    const std::string base = label;
    s.guard(base + " on curve", [&, &spec = spec] {
      const auto r = tube_check(spec, t0, 0, 0, steps, 0.1);
      s.add(base + " on curve", r.passed,
            fmt("t0=%.2f eps=0.1 max transverse=%.4f K=%.3g max bracket=%.3g %s", t0,
                r.max_transverse, r.fitted_k, r.max_bracket, r.failure.c_str()));
    });
    s.guard(base + " perturbed", [&, &spec = spec] {
      const double eps = 0.2;
      const auto c = orthogonalize(build_plane<double>(spec).e).basis();
      const double a = angle(rng);
      // C2 and C3 are orthogonal, so this offset has norm eps/2
      const double beta = 0.5 * eps * std::cos(a) / frob_norm(c[1]);
      const double gamma = 0.5 * eps * std::sin(a) / frob_norm(c[2]);
      const auto r = tube_check(spec, t0, beta * (1 - 1e-9), gamma * (1 - 1e-9), steps, eps);
      s.add(base + " perturbed", r.passed,
            fmt("t0=%.2f eps=%.1f angle=%.3f max transverse=%.4f K=%.3g max bracket=%.3g %s",
                t0, eps, a, r.max_transverse, r.fitted_k, r.max_bracket, r.failure.c_str()));
    });
  }
  return s.take();
}

SuiteReport suite_lemma77(std::uint64_t) {
  Suite s("lemma77");
  const std::vector<long> decades{1000, 10000, 100000, 1000000};

  auto approach = [&](const std::string& name, double c, double k, int q, double x0,
                      NoiseSign noise, double tol) {
    s.guard(name, [&] {
      const auto prods = recursive_products(c, k, q, x0, decades, noise);
      bool monotone = true;
      for (std::size_t i = 1; i < prods.size(); ++i)
        monotone = monotone && std::abs(prods[i] - 1) < std::abs(prods[i - 1] - 1);
      const double last = prods.back();
      s.add(name, std::abs(last - 1) <= tol && monotone,
            fmt("products %.5f %.5f %.5f %.5f (tol %.2f)", prods[0], prods[1], prods[2],
                prods[3], tol));
    });
  };
  approach("q=2 C=1/3 x0=0.1", 1.0 / 3, 0, 2, 0.1, NoiseSign::plus, 0.01);
  approach("q=6 C=1/24 x0=0.5", 1.0 / 24, 0, 6, 0.5, NoiseSign::plus, 0.10);
  approach("q=2 K=0.1 plus", 1.0 / 3, 0.1, 2, 0.1, NoiseSign::plus, 0.01);
  approach("q=2 K=0.1 minus", 1.0 / 3, 0.1, 2, 0.1, NoiseSign::minus, 0.01);
  approach("q=2 K=0.1 alternating", 1.0 / 3, 0.1, 2, 0.1, NoiseSign::alternating, 0.01);

  s.guard("monotone decrease", [&] {
    const auto seq = recursive_sequence(1.0 / 24, 0.01, 6, 0.5, 100000, NoiseSign::alternating);
    bool ok = true;
    for (std::size_t i = 1; i < seq.x.size(); ++i) ok = ok && seq.x[i] < seq.x[i - 1];
    s.add("monotone decrease", ok, fmt("x_n=%.6g", seq.x.back()));
  });
  s.guard("hypothesis violation", [&] {
    bool threw = false;
    try {
      recursive_sequence(0.01, 10, 2, 0.5, 10, NoiseSign::plus);
    } catch (const DomainError&) {
      threw = true;
    }
    s.add("hypothesis violation", threw, "rejected");
  });
  return s.take();
}

SuiteReport suite_plucker(std::uint64_t seed) {
  Suite s("plucker");
  std::mt19937_64 rng(seed);
  RandomSpecOptions opt;
  opt.random_frame = true;

  for (int i = 0; i < 10; ++i) {
    const bool t1 = i % 2 == 0;
    const std::string name = fmt("random %s #%d", t1 ? "type1" : "type2", i / 2 + 1);
    s.guard(name, [&] {
      const auto spec = t1 ? random_type1_spec(rng, opt) : random_type2_spec(rng, opt);
      const auto p = plucker_coords(build_plane<double>(spec).e);
      double scale = 0;
      for (double v : p) scale = std::max(scale, std::abs(v));
      const double r = plucker_relation_residual(p) / (scale * scale);
      s.add(name, r < 1e-10, fmt("%s relative residual=%.3g", describe(spec).c_str(), r));
    });
  }

  s.guard("standard basis", [&] {
    std::vector<SymMat<double>> basis;
    for (int k = 0; k < 3; ++k) {
      SymMat<double> m(3);
      m.set(k, k, 1);
      basis.push_back(m);
    }
    const auto p = plucker_coords(AffineSubspace<double>::make(SymMat<double>(3), basis));
    double off = 0;
    for (int k = 0; k < 20; ++k)
      if (k != plucker_index(0, 1, 2)) off = std::max(off, std::abs(p[k]));
    const double lead = p[plucker_index(0, 1, 2)];
    s.add("standard basis", std::abs(lead - 1) < 1e-15 && off == 0,
          fmt("p012=%.17g max other=%.3g", lead, off));
  });

  s.guard("scaling and basis change", [&] {
    const auto e = build_plane<double>(random_type2_spec(rng, opt)).e;
    auto b = e.basis();
    const auto p = plucker_coords(e);
    auto scaled = b;
    scaled[0] *= 2.0;
    const auto ps = plucker_coords(AffineSubspace<double>::make(e.anchor(), scaled));
    auto sheared = b;
    sheared[0] += b[1];
    const auto ph = plucker_coords(AffineSubspace<double>::make(e.anchor(), sheared));
    double gs = 0, gh = 0, scale = 0;
    for (int k = 0; k < 20; ++k) {
      gs = std::max(gs, std::abs(ps[k] - 2 * p[k]));
      gh = std::max(gh, std::abs(ph[k] - p[k]));
      scale = std::max(scale, std::abs(p[k]));
    }
    s.add("scaling and basis change", gs <= 1e-12 * scale && gh <= 1e-12 * scale,
          fmt("|p(2B1)-2p|=%.3g |p(B1+B2)-p|=%.3g", gs, gh));
  });
  return s.take();
}

// Projection identities, Fejer monotonicity and Newton-vs-rational agreement.
SuiteReport suite_properties(std::uint64_t seed) {
  Suite s("properties");
  std::mt19937_64 rng(seed);

  s.guard("psd projection", [&] {
    double idem = 0, expand = 0, minimal = 0;
    for (int i = 0; i < 200; ++i) {
      const int n = 3 + i % 3;
      const auto x = random_sym(rng, n, 1.0);
      const auto y = random_sym(rng, n, 1.0);
      const auto px = project_psd(x).matrix;
      const auto py = project_psd(y).matrix;
      idem = std::max(idem, frob_norm(project_psd(px).matrix - px) / (1 + frob_norm(x)));
      expand = std::max(expand, frob_norm(px - py) - frob_norm(x - y));
      // any PSD z is at least as far from x as P(x)
      const auto z = project_psd(random_sym(rng, n, 1.0)).matrix;
      minimal = std::max(minimal, frob_norm(x - px) - frob_norm(x - z));
    }
    s.add("psd projection", idem < 1e-12 && expand < 1e-12 && minimal < 1e-12,
          fmt("idempotence=%.3g expansion=%.3g minimality=%.3g", idem, expand, minimal));
  });

  s.guard("affine projection", [&] {
    double idem = 0, expand = 0, minimal = 0;
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      RandomSpecOptions opt;
      opt.random_frame = true;
      const auto e = build_plane<double>(random_type2_spec(rng, opt)).e;
      const auto x = random_sym(rng, 3, 1.0);
      const auto y = random_sym(rng, 3, 1.0);
      const auto px = project_affine(e, x).point;
      const auto py = project_affine(e, y).point;
      idem = std::max(idem, frob_norm(project_affine(e, px).point - px) / (1 + frob_norm(x)));
      expand = std::max(expand, frob_norm(px - py) - frob_norm(x - y));
      const auto z = e.point(std::vector<double>{g(rng), g(rng), g(rng)});
      minimal = std::max(minimal, frob_norm(x - px) - frob_norm(x - z));
    }
    s.add("affine projection", idem < 1e-12 && expand < 1e-12 && minimal < 1e-12,
          fmt("idempotence=%.3g expansion=%.3g minimality=%.3g", idem, expand, minimal));
  });

  auto fejer = [&](const std::string& name, const AffineSubspace<double>& e,
                   const std::vector<double>& p0, long iters) {
    s.guard(name, [&] {
      RunOptions opt;
      opt.max_iter = iters;
      const auto tr = run_ap(e, p0, opt);
      double worst = 0;
      for (std::size_t k = 1; k < tr.rows.size(); ++k)
        worst = std::max(worst, tr.rows[k].dist - tr.rows[k - 1].dist);
      s.add(name, worst <= 1e-12, fmt("%zu rows, max increase=%.3g", tr.rows.size(), worst));
    });
  };
  for (const auto& id : builtin_ids()) {
    for (const char* v : {"pos", "neg", "default"}) {
      BuiltinExample ex;
      try {
        ex = builtin_example(id, v);
      } catch (const DomainError&) {
        continue;
      }
      fejer("fejer " + id + "/" + v, ex.e, ex.p0, std::min<long>(ex.iters, 20000));
    }
  }
  std::uniform_real_distribution<double> small(-0.2, 0.2);
  for (int i = 0; i < 5; ++i) {
    RandomSpecOptions opt;
    opt.random_frame = true;
    const auto spec = i % 2 ? random_type1_spec(rng, opt) : random_type2_spec(rng, opt);
    fejer(fmt("fejer random #%d", i + 1), build_plane<double>(spec).e,
          {small(rng), small(rng), small(rng)}, 2000);
  }

  for (int i = 0; i < 2; ++i) {
    const std::string name = fmt("newton vs rational #%d", i + 1);
    s.guard(name, [&] {
      const auto spec = i == 0 ? kEx44 : draw_type2(rng, 0.02, false, true);
      const auto e = build_plane<HP>(spec).e;
      std::function<SymMat<HP>(const HP&)> f = [&](const HP& t) {
        const auto sp = newton_slowest_point<HP>(spec, t);
        return e.point(std::vector<HP>(sp.p.begin(), sp.p.end()));
      };
      std::function<SymMat<HP>(const HP&)> g = [&](const HP& t) {
        return curve_point<HP>(spec, t).G;
      };
      const double order = residual_order<HP>(f, g, HP(0.01), 3);
      s.add(name, order >= 6.5, fmt("%s order=%.3f", describe(spec).c_str(), order));
    });
  }
  return s.take();
}

}  // namespace

bool SuiteReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "prop31", "thm41", "thm62",  "thm63",   "lemma64",   "lemma67",
      "lemma75", "prop76", "lemma77", "plucker", "properties"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "prop31") return suite_prop31(seed);
  if (name == "thm41") return suite_thm41(seed);
  if (name == "thm62") return suite_rational("thm62", false, seed);
  if (name == "thm63") return suite_rational("thm63", true, seed);
  if (name == "lemma64") return suite_lemma64(seed);
  if (name == "lemma67") return suite_lemma67(seed);
  if (name == "lemma75") return suite_lemma75(seed);
  if (name == "prop76") return suite_prop76(seed);
  if (name == "lemma77") return suite_lemma77(seed);
  if (name == "plucker") return suite_plucker(seed);
  if (name == "properties") return suite_properties(seed);
  throw DomainError("unknown suite '" + name + "'");
}

}  // namespace apcone
