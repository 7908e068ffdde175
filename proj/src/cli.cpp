#include "apcone/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "apcone/builtin.hpp"
#include "apcone/errors.hpp"
#include "apcone/plane_json.hpp"
#include "apcone/rates.hpp"
#include "apcone/verify.hpp"
#include "json.hpp"

namespace apcone {

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* v = std::getenv("APCONE_LOG");
  if (!v) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::quiet;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::info;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(log_level()) {}
  void info(const std::string& m) const {
    if (level_ != LogLevel::quiet) err_ << "apcone: " << m << '\n';
  }
  void debug(const std::string& m) const {
    if (level_ == LogLevel::debug) err_ << "apcone: " << m << '\n';
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

// Summary lines go to `out`; when the CSV shares that stream they are
// prefixed with "# " so the output stays parseable.
class Report {
 public:
  Report(std::ostream& out, bool commented) : out_(out), prefix_(commented ? "# " : "") {}
  void line(const std::string& s) const { out_ << prefix_ << s << '\n'; }

 private:
  std::ostream& out_;
  std::string prefix_;
};

struct Resolved {
  std::string label;
  AffineSubspace<double> e;
  std::optional<PlaneSpec> spec;
  std::vector<double> p0;
  int singularity_degree = 0;
  FitKind fit = FitKind::geometric;
  std::optional<FitWindow> window;
  bool fixed_fit = false;  // builtin examples use their own fit model
};

// Window clipped to the rows with positive dist.
std::optional<FitWindow> usable_window(const APTrace& trace, std::optional<FitWindow> w) {
  long last = -1;
  for (const auto& r : trace.rows) {
    if (!(r.dist > 0)) break;
    last = r.k;
  }
  if (last < 2) return std::nullopt;
  APTrace head;
  head.rows.assign(trace.rows.begin(), trace.rows.begin() + last + 1);
  FitWindow out = w ? *w : default_window(head);
  out.kmax = std::min(out.kmax, last);
  if (out.kmax - out.kmin < 2) out = default_window(head);
  if (out.kmax - out.kmin < 2) return std::nullopt;
  return out;
}

// Fit error relative to the growth of the fitted line over the window.
double relative_misfit(const RateFit& f) {
  const double span = std::abs(f.slope) * static_cast<double>(f.window.kmax - f.window.kmin);
  return span > 0 ? f.rmse / span : std::numeric_limits<double>::infinity();
}

void report_fit(const Report& rep, const Resolved& r, const APTrace& trace) {
  const auto w = usable_window(trace, r.window);
  if (!w) {
    rep.line("fit: skipped, fewer than 3 rows with positive dist");
    return;
  }
  if (r.fixed_fit) {
    rep.line("fit: " + fit_trace(trace, r.fit, w).summary());
    return;
  }
  const auto geo = fit_geometric(trace, *w);
  if (geo.ratio() < 0.99) {
    rep.line("model: linear convergence");
    rep.line("fit: " + geo.summary());
    return;
  }
  const auto f2 = fit_inverse_power(trace, 2, *w);
  const auto f6 = fit_inverse_power(trace, 6, *w);
  const bool six = relative_misfit(f6) < relative_misfit(f2);
  rep.line(std::string("model: power law, selected p=") + (six ? "6" : "2"));
  rep.line("fit: " + (six ? f6 : f2).summary());
  rep.line("alternative: " + (six ? f2 : f6).summary());
}

int run_and_report(const Resolved& r, const RunOptions& opt, const std::optional<std::string>& path,
                   std::ostream& out, const Log& log) {
  log.info("running " + r.label + " for up to " + std::to_string(opt.max_iter) + " iterations");
  const auto trace = run_ap(r.e, r.p0, opt);
  log.debug("stopped after " + std::to_string(trace.rows.size() - 1) + " steps (" +
            to_string(trace.stop_reason) + ")");

  const bool to_stdout = !path;
  if (path) {
    std::ofstream f(*path);
    if (!f) throw std::runtime_error("cannot open '" + *path + "' for writing");
    write_trace_csv(f, trace);
    if (!f) throw std::runtime_error("write to '" + *path + "' failed");
    log.info("wrote " + *path);
  } else {
    write_trace_csv(out, trace);
  }
  const Report rep(out, to_stdout);
  rep.line("plane: " + r.label);
  rep.line("singularity degree: " + std::to_string(r.singularity_degree));
  rep.line("steps: " + std::to_string(trace.rows.back().k) + ", stop: " +
           to_string(trace.stop_reason) + ", final dist: " + [&] {
             char buf[32];
             std::snprintf(buf, sizeof buf, "%.6g", trace.rows.back().dist);
             return std::string(buf);
           }());
  report_fit(rep, r, trace);
  return 0;
}

std::string start_to_string(const nlohmann::json& j) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return num(j.get<double>());
  if (j.is_array()) {
    std::string s;
    for (const auto& v : j) {
      if (!v.is_number()) throw DomainError("start: array entries must be numbers");
      s += (s.empty() ? "" : ",") + num(v.get<double>());
    }
    return s;
  }
  throw DomainError("start: expected a number, an array or a string");
}

Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  std::optional<PlaneSpec> spec;
  if (const auto* id = std::get_if<std::string>(&cfg.plane)) {
    if (*id == "random-type1" || *id == "random-type2") {
      std::mt19937_64 rng(cfg.seed);
      RandomSpecOptions opt;
      opt.random_frame = true;
      spec = *id == "random-type1" ? random_type1_spec(rng, opt) : random_type2_spec(rng, opt);
    } else {
      const auto ex = builtin_example(*id, cfg.variant);
      r.label = ex.id + "/" + ex.variant;
      r.e = ex.e;
      r.spec = ex.spec;
      r.p0 = cfg.start ? parse_start(*cfg.start, ex.e, ex.spec, ex.start_offset) : ex.p0;
      r.singularity_degree = ex.singularity_degree;
      return r;
    }
  } else {
    spec = std::get<PlaneSpec>(cfg.plane);
  }
  r.label = describe(*spec);
  r.e = build_plane<double>(*spec).e;
  r.spec = spec;
  r.p0 = parse_start(cfg.start.value_or("0.1"), r.e, spec);
  r.singularity_degree = singularity_degree(*spec);
  return r;
}

int guarded(std::ostream& err, const std::function<int()>& f) {
  try {
    return f();
  } catch (const DomainError& ex) {
    err << "apcone: error: " << ex.what() << '\n';
    return 2;
  } catch (const DimensionError& ex) {
    err << "apcone: error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    err << "apcone: failure: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw DomainError(std::string("config: ") + ex.what());
  }
  if (!j.is_object()) throw DomainError("config: expected a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "plane") {
        if (v.is_string()) c.plane = v.get<std::string>();
        else c.plane = plane_spec_from_json(v);
      } else if (key == "variant") {
        c.variant = v.get<std::string>();
      } else if (key == "start") {
        c.start = start_to_string(v);
      } else if (key == "max_iter") {
        c.max_iter = v.get<long>();
      } else if (key == "tol") {
        c.tol = v.get<double>();
      } else if (key == "stride") {
        c.stride = v.get<long>();
      } else if (key == "output") {
        c.output = v.get<std::string>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else {
        throw DomainError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DomainError(std::string("config: ") + ex.what());
  }
  if (!j.contains("plane")) throw DomainError("config: missing key 'plane'");
  if (c.max_iter < 1) throw DomainError("config: max_iter must be at least 1");
  if (!(c.tol >= 0)) throw DomainError("config: tol must be nonnegative");
  if (c.stride < 0) throw DomainError("config: stride must be nonnegative");
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alternating projections between an affine subspace and the PSD cone", "apcone"};
  app.require_subcommand(1);

  std::string id, variant, start, out_path, suite, config_path;
  long iters = 0, stride = 0;
  double tol = 0;
  std::uint64_t seed = 1;

  auto* ex = app.add_subcommand("example", "Run a builtin example and fit its rate");
  ex->add_option("id", id, "Example id")->required();
  ex->add_option("--variant", variant, "Example variant (pos/neg for ex3.2 and ex3.3)");
  ex->add_option("--iters", iters, "Number of AP steps")->check(CLI::PositiveNumber);
  ex->add_option("--tol", tol, "Stop once dist <= tol")->check(CLI::NonNegativeNumber);
  ex->add_option("--stride", stride, "Keep coefficients every stride rows")
      ->check(CLI::NonNegativeNumber);
  ex->add_option("--start", start, "t0, a,b,c or slowest-curve:t0");
  ex->add_option("--out", out_path, "CSV path (default: standard output)");

  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("suite", suite, "Suite name or 'all'")->required();
  ver->add_option("--seed", seed, "Random seed");

  auto* run = app.add_subcommand("run", "Run AP on the plane described by a JSON config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_path, "CSV path, overrides 'output'");
  run->add_option("--seed", seed, "Random seed, overrides 'seed'");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const Log log(err);

  if (ex->parsed()) {
    return guarded(err, [&] {
      const auto b = builtin_example(id, variant);
      Resolved r;
      r.label = b.id + "/" + b.variant;
      r.e = b.e;
      r.spec = b.spec;
      r.p0 = start.empty() ? b.p0 : parse_start(start, b.e, b.spec, b.start_offset);
      r.singularity_degree = b.singularity_degree;
      r.fit = b.fit;
      r.window = b.window;
      r.fixed_fit = true;
      RunOptions opt;
      opt.max_iter = iters > 0 ? iters : b.iters;
      opt.tol = tol;
      opt.stride = stride;
      return run_and_report(r, opt, out_path.empty() ? std::nullopt : std::optional(out_path),
                            out, log);
    });
  }

  if (ver->parsed()) {
    return guarded(err, [&] {
      std::vector<std::string> names;
      if (suite == "all") names = suite_names();
      else names = {suite};
      bool all = true;
      for (const auto& n : names) {
        log.debug("suite " + n + ", seed " + std::to_string(seed));
        const auto rep = run_suite(n, seed);
        std::size_t ok = 0;
        for (const auto& c : rep.checks) {
          out << (c.passed ? "PASS " : "FAIL ") << rep.suite << ": " << c.name << ": " << c.detail
              << '\n';
          ok += c.passed;
        }
        out << rep.suite << ": " << ok << "/" << rep.checks.size() << " checks passed\n";
        all = all && rep.passed();
      }
      return all ? 0 : 1;
    });
  }

  return guarded(err, [&] {
    std::ifstream f(config_path);
    if (!f) throw DomainError("cannot read config '" + config_path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    auto cfg = parse_run_config(ss.str());
    if (!out_path.empty()) cfg.output = out_path;
    if (run->count("--seed")) cfg.seed = seed;
    RunOptions opt;
    opt.max_iter = cfg.max_iter;
    opt.tol = cfg.tol;
    opt.stride = cfg.stride;
    return run_and_report(resolve(cfg), opt, cfg.output, out, log);
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace apcone
