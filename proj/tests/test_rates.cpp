#include <cmath>
#include <limits>
#include <sstream>

#include "apcone/builtin.hpp"
#include "apcone/rates.hpp"
#include "doctest.h"

using namespace apcone;

namespace {

APTrace synthetic(long n, double (*dist)(long)) {
  APTrace t;
  for (long k = 0; k <= n; ++k) {
    TraceRow r;
    r.k = k;
    r.dist = dist(k);
    r.psd_rank = 1;
    t.rows.push_back(r);
  }
  return t;
}

APTrace run_builtin(const std::string& id, const std::string& variant) {
  const auto ex = builtin_example(id, variant);
  RunOptions opt;
  opt.max_iter = ex.iters;
  return run_ap(ex.e, ex.p0, opt);
}

}  // namespace

TEST_CASE("exact recovery on synthetic traces") {
  SUBCASE("geometric") {
    const auto t = synthetic(50, [](long k) { return 3.0 * std::pow(0.7, static_cast<double>(k)); });
    const auto f = fit_geometric(t, {0, 50});
    CHECK(f.ratio() == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(f.amplitude() == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.rmse < 1e-9);
    CHECK(f.points == 51);
    CHECK(f.model == RateFit::Model::geometric);
  }
  SUBCASE("inverse square") {
    const auto t = synthetic(1000, [](long k) { return 1 / std::sqrt(4.0 + 0.5 * k); });
    const auto f = fit_inverse_power(t, 2, {100, 1000});
    CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(f.intercept == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(f.power == 2);
    CHECK(f.points == 901);
  }
  SUBCASE("inverse sixth") {
    const auto t = synthetic(1000, [](long k) { return std::pow(10.0 + 2.0 * k, -1.0 / 6); });
    const auto f = fit_inverse_power(t, 6, default_window(t));
    CHECK(f.window.kmin == 100);
    CHECK(f.window.kmax == 1000);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.intercept == doctest::Approx(10.0).epsilon(1e-9));
  }
}

TEST_CASE("fit errors") {
  const auto t = synthetic(10, [](long k) { return k == 5 ? 0.0 : 1.0 / (k + 1); });
  CHECK_THROWS_AS(fit_geometric(t, {0, 10}), DomainError);
  CHECK_THROWS_AS(fit_geometric(t, {6, 6}), DomainError);
  CHECK_THROWS_AS(fit_geometric(t, {8, 7}), DomainError);
  CHECK_THROWS_AS(fit_inverse_power(t, 0, {6, 10}), DomainError);
  CHECK_NOTHROW(fit_geometric(t, {6, 10}));
  CHECK_THROWS_AS(default_window(APTrace{}), DomainError);
}

TEST_CASE("summaries") {
  const auto t = synthetic(20, [](long k) { return std::pow(0.2, static_cast<double>(k)); });
  CHECK(fit_geometric(t, {1, 15}).summary().find("(0.200000)^k") != std::string::npos);
  CHECK(fit_inverse_power(t, 2, {1, 3}).summary().find("p=2") != std::string::npos);
}

TEST_CASE("linear rates of the builtin examples") {
  CHECK(fit_geometric(run_builtin("ex3.2", "neg"), {5, 30}).ratio() ==
        doctest::Approx(1.0 / 3).epsilon(1e-3));
  CHECK(std::abs(fit_geometric(run_builtin("ex3.3", "neg"), {1, 15}).ratio() - 0.2) < 1e-6);
  CHECK(std::abs(fit_geometric(run_builtin("ex3.3", "pos"), {1, 60}).ratio() - 0.8) < 1e-6);
  CHECK(fit_geometric(run_builtin("ex3.4", ""), {10, 40}).ratio() ==
        doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("fit_trace uses the requested model") {
  const auto t = run_builtin("ex3.3", "neg");
  const auto g = fit_trace(t, FitKind::geometric, FitWindow{1, 15});
  CHECK(g.model == RateFit::Model::geometric);
  const auto s = fit_trace(t, FitKind::inverse2, std::nullopt);
  CHECK(s.power == 2);
  CHECK(s.window.kmin == default_window(t).kmin);
}

TEST_CASE("rate constants") {
  CHECK(thm71_constant(PlaneSpec::type2(1, 0, 0, 1, 0)) == doctest::Approx(0.3240271).epsilon(1e-6));
  CHECK(thm71_constant(PlaneSpec::type2(1, 0, 0, 1, 0)) ==
        doctest::Approx(std::pow(1.0 / 864, 1.0 / 6)).epsilon(1e-14));
  CHECK(thm71_constant(PlaneSpec::type2(0, 0, 1, 1, 0)) == doctest::Approx(0.6740030).epsilon(1e-6));
  const double ref = thm71_constant(PlaneSpec::type2(0.7, 0, 0, -1.3, 0));
  CHECK(thm71_constant(PlaneSpec::type2(0.7, 1.5, -2, -1.3, 0.4)) == ref);
  CHECK(thm71_constant(PlaneSpec::type2(-0.7, 0, 0, 1.3, 0)) == ref);
  CHECK_THROWS_AS(thm71_constant(PlaneSpec::type2(1, 0, 0, 0, 0)), DomainError);
}

TEST_CASE("recursive sequences") {
  SUBCASE("q = 2 approaches 1") {
    const auto p = recursive_products(1.0 / 3, 0, 2, 0.1, {1000000}, NoiseSign::plus);
    CHECK(std::abs(p[0] - 1) < 0.01);
  }
  SUBCASE("q = 6 from x0 = 0.5 approaches 1") {
    const auto p = recursive_products(1.0 / 24, 0, 6, 0.5, {1000000}, NoiseSign::plus);
    CHECK(std::abs(p[0] - 1) < 0.1);
  }
  SUBCASE("q = 6 from x0 = 0.1 follows the closed-form estimate") {
    // x_n^-6 ~ x0^-6 + 6 C n
    const auto p = recursive_products(1.0 / 24, 0, 6, 0.1, {1000000}, NoiseSign::plus);
    CHECK(p[0] == doctest::Approx(std::pow(0.25e6 / 1.25e6, 1.0 / 6)).epsilon(0.01));
  }
  SUBCASE("the perturbation sign does not change the limit") {
    for (auto sign : {NoiseSign::plus, NoiseSign::minus, NoiseSign::alternating}) {
      const auto p =
          recursive_products(1.0 / 3, 0.1, 2, 0.1, {1000, 10000, 100000, 1000000}, sign);
      for (std::size_t i = 1; i < p.size(); ++i)
        CHECK(std::abs(p[i] - 1) < std::abs(p[i - 1] - 1));
      CHECK(std::abs(p.back() - 1) < 0.01);
    }
  }
  SUBCASE("the sequence decreases") {
    const auto s = recursive_sequence(1.0 / 3, 0.1, 2, 0.1, 1000, NoiseSign::alternating);
    REQUIRE(s.x.size() == 1001);
    for (std::size_t i = 1; i < s.x.size(); ++i) CHECK(s.x[i] < s.x[i - 1]);
    CHECK(s.x[0] == 0.1);
    CHECK(s.limit_product == doctest::Approx(std::sqrt(2.0 / 3 * 1000) * s.x.back()));
  }
  SUBCASE("hypotheses") {
    CHECK_THROWS_AS(recursive_sequence(1, 0, 2, 0, 10, NoiseSign::plus), DomainError);
    CHECK_THROWS_AS(recursive_sequence(0, 0, 2, 0.1, 10, NoiseSign::plus), DomainError);
    CHECK_THROWS_AS(recursive_sequence(1, -1, 2, 0.1, 10, NoiseSign::plus), DomainError);
    CHECK_THROWS_AS(recursive_sequence(0.1, 1, 2, 0.9, 10, NoiseSign::plus), DomainError);
    CHECK_THROWS_AS(recursive_sequence(1, 0, 2, 0.1, 0, NoiseSign::plus), DomainError);
    CHECK_THROWS_AS(recursive_products(1, 0, 2, 0.1, {10, 5}, NoiseSign::plus), DomainError);
  }
}

TEST_CASE("trace CSV round trip") {
  APTrace t;
  for (long k = 0; k < 4; ++k) {
    TraceRow r;
    r.k = k;
    r.dist = k == 3 ? 0.0 : 1.0 / 3.0 / (k + 1);
    r.psd_rank = static_cast<int>(k % 3);
    t.rows.push_back(r);
  }
  std::ostringstream out;
  write_trace_csv(out, t);
  const std::string csv = out.str();
  CHECK(csv.rfind("k,dist,psd_rank,inv2,inv6\n", 0) == 0);
  CHECK(csv.find("inf") != std::string::npos);

  std::istringstream in("# summary line\n\n" + csv + "# trailing\n");
  const auto back = read_trace_csv(in);
  REQUIRE(back.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.rows[i].k == t.rows[i].k);
    CHECK(back.rows[i].dist == t.rows[i].dist);
    CHECK(back.rows[i].psd_rank == t.rows[i].psd_rank);
  }

  std::istringstream crlf("k,dist,psd_rank,inv2,inv6\r\n0,0.5,1,4,64\r\n");
  CHECK(read_trace_csv(crlf).rows.size() == 1);
}

TEST_CASE("trace CSV errors") {
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_trace_csv(empty), DomainError);
  std::istringstream header("k,dist\n0,1\n");
  CHECK_THROWS_AS(read_trace_csv(header), DomainError);
  std::istringstream shortrow("k,dist,psd_rank,inv2,inv6\n0,1,1\n");
  CHECK_THROWS_AS(read_trace_csv(shortrow), DomainError);
  std::istringstream bad("k,dist,psd_rank,inv2,inv6\nx,1,1,1,1\n");
  CHECK_THROWS_AS(read_trace_csv(bad), DomainError);
}
