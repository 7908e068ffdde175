#include <filesystem>
#include <fstream>
#include <sstream>

#include "apcone/cli.hpp"
#include "apcone/plane_json.hpp"
#include "apcone/rates.hpp"
#include "doctest.h"

using namespace apcone;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content = "") {
  const auto dir = fs::temp_directory_path() / "apcone_test_cli";
  fs::create_directories(dir);
  const auto p = dir / name;
  if (!content.empty()) std::ofstream(p) << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"example", "ex9.9"}).code == 2);
  CHECK(cli({"example", "ex3.3", "--variant", "sideways"}).code == 2);
  CHECK(cli({"example", "ex3.3", "--iters", "0"}).code == 2);
  CHECK(cli({"verify", "nosuch"}).code == 2);
  CHECK(cli({"run", temp_file("missing.json").string() + ".none"}).code == 2);
  const auto r = cli({"example", "ex3.3", "--out", "/nonexistent-dir/x.csv"});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "cannot open"));
}

TEST_CASE("example output") {
  const auto r = cli({"example", "ex3.3", "--variant", "neg"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("k,dist,psd_rank,inv2,inv6\n", 0) == 0);
  CHECK(contains(r.out, "# plane: ex3.3/neg"));
  CHECK(contains(r.out, "# singularity degree: 2"));
  CHECK(contains(r.out, "(0.200000)^k"));
  std::istringstream in(r.out);
  const auto t = read_trace_csv(in);
  CHECK(t.rows.size() == 16);
  CHECK(t.rows.front().k == 0);
}

TEST_CASE("example output is deterministic and round-trips through a file") {
  const auto a = temp_file("a.csv"), b = temp_file("b.csv");
  const auto ra = cli({"example", "ex3.2", "--variant", "neg", "--out", a.string()});
  const auto rb = cli({"example", "ex3.2", "--variant", "neg", "--out", b.string()});
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(ra.out == rb.out);
  CHECK(contains(ra.out, "plane: ex3.2/neg"));
  CHECK_FALSE(contains(ra.out, "# "));
  std::ifstream f(a);
  const auto t = read_trace_csv(f);
  CHECK(t.rows.size() == 31);
  CHECK(fit_geometric(t, {5, 30}).ratio() == doctest::Approx(1.0 / 3).epsilon(1e-3));
}

TEST_CASE("start override") {
  const auto r = cli({"example", "ex3.3", "--variant", "pos", "--start", "1.5"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "(0.800000)^k"));
  CHECK(cli({"example", "ex3.3", "--start", "x"}).code == 2);
}

TEST_CASE("verify") {
  const auto r = cli({"verify", "lemma67", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "lemma67: 11/11 checks passed"));
  CHECK_FALSE(contains(r.out, "FAIL"));
}

TEST_CASE("run configs") {
  SUBCASE("singularity degree one for c4 = 0") {
    const auto cfg = temp_file(
        "sd1.json",
        R"({"plane": {"kind": "type2", "c": [1, 0.5, 0, 0, 0.3]}, "start": [0.1, 0.1, 0.1], "max_iter": 200})");
    const auto r = cli({"run", cfg.string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "# singularity degree: 1"));
  }
  SUBCASE("power law selected from the slowest curve") {
    const auto cfg = temp_file(
        "sd2.json",
        R"({"plane": {"kind": "type2", "c": [1, 0, 0, 1, 0]}, "start": "slowest-curve:0.1", "max_iter": 20000})");
    const auto r = cli({"run", cfg.string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "# singularity degree: 2"));
    CHECK(contains(r.out, "model: power law, selected p=6"));
  }
  SUBCASE("a start at the intersection point gives one row") {
    const auto cfg =
        temp_file("zero.json", R"({"plane": "ex6.1", "start": [0, 0, 0], "max_iter": 10})");
    const auto r = cli({"run", cfg.string()});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    CHECK(read_trace_csv(in).rows.size() == 1);
    CHECK(contains(r.out, "fit: skipped"));
  }
  SUBCASE("random planes depend on the seed only") {
    const auto cfg = temp_file("rnd.json", R"({"plane": "random-type2", "max_iter": 50})");
    const auto a = cli({"run", cfg.string(), "--seed", "5"});
    const auto b = cli({"run", cfg.string(), "--seed", "5"});
    const auto c = cli({"run", cfg.string(), "--seed", "6"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
  }
  SUBCASE("configuration errors") {
    CHECK(cli({"run", temp_file("bad1.json", "{").string()}).code == 2);
    CHECK(cli({"run", temp_file("bad2.json", R"({"plane": "ex6.1", "speed": 1})").string()}).code == 2);
    CHECK(cli({"run", temp_file("bad3.json", R"({"max_iter": 10})").string()}).code == 2);
    CHECK(cli({"run", temp_file("bad4.json", R"({"plane": "ex6.1", "max_iter": 0})").string()}).code == 2);
  }
}

TEST_CASE("parse_run_config") {
  const auto c = parse_run_config(
      R"({"plane": "ex3.2", "variant": "neg", "start": -0.05, "max_iter": 30, "tol": 1e-9, "stride": 2, "output": "x.csv", "seed": 9})");
  CHECK(std::get<std::string>(c.plane) == "ex3.2");
  CHECK(c.variant == "neg");
  CHECK(c.start == "-0.050000000000000003");
  CHECK(c.max_iter == 30);
  CHECK(c.tol == 1e-9);
  CHECK(c.stride == 2);
  CHECK(c.output == "x.csv");
  CHECK(c.seed == 9);
  CHECK(parse_run_config(R"({"plane": "ex6.1", "start": [1, 2, 3]})").start == "1,2,3");
  CHECK_THROWS_AS(parse_run_config("[1]"), DomainError);
  CHECK_THROWS_AS(parse_run_config(R"({"plane": "ex6.1", "tol": -1})"), DomainError);
  CHECK_THROWS_AS(parse_run_config(R"({"plane": "ex6.1", "stride": -1})"), DomainError);
  CHECK_THROWS_AS(parse_run_config(R"({"plane": "ex6.1", "start": [1, "a"]})"), DomainError);
  CHECK_THROWS_AS(parse_run_config(R"({"plane": "ex6.1", "max_iter": "many"})"), DomainError);
}

TEST_CASE("plane spec JSON") {
  using nlohmann::json;
  const auto s = plane_spec_from_json(json::parse(R"({"kind": "type2", "c": [1, 0, 0, 1, 0]})"));
  CHECK(s.kind == PlaneKind::type2);
  CHECK(s.c == std::vector<double>{1, 0, 0, 1, 0});
  CHECK(s.theta == 0);
  CHECK_FALSE(s.reflect);

  PlaneSpec t1;
  t1.kind = PlaneKind::type1;
  t1.c = {0.5, -0.3, 0.2, 0.4, 1, 0.3, -0.2, 0.6};
  t1.mu = 1.5;
  t1.theta = 0.3;
  t1.reflect = true;
  const auto back = plane_spec_from_json(plane_spec_to_json(t1));
  CHECK(back.kind == t1.kind);
  CHECK(back.c == t1.c);
  CHECK(back.mu == t1.mu);
  CHECK(back.theta == t1.theta);
  CHECK(back.reflect == t1.reflect);

  CHECK_THROWS_AS(plane_spec_from_json(json::parse(R"({"kind": "type3", "c": []})")), DomainError);
  CHECK_THROWS_AS(plane_spec_from_json(json::parse(R"({"kind": "type2", "c": [1, 0, 0, 1, 0], "mu": 1})")),
                  DomainError);
  CHECK_THROWS_AS(plane_spec_from_json(json::parse(R"({"kind": "type1", "c": [1, 0, 0, 0, 1, 0, 0, 0]})")),
                  DomainError);
  CHECK_THROWS_AS(plane_spec_from_json(json::parse(R"({"kind": "type2", "c": [1, 0, 0, 1]})")), DomainError);
  CHECK_THROWS_AS(plane_spec_from_json(json::parse(R"({"kind": "type2", "c": [1, 0, 0, 1, 0], "x": 1})")),
                  DomainError);
}
