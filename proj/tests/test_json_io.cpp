#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "support.hpp"
#include "adelikit/json_io.hpp"

using namespace adelikit;
namespace fs = std::filesystem;

namespace {

std::string error_path(const std::function<void()>& f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.path();
  }
  return "<no error>";
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / ("adelikit_json_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(JsonRoundTrip, Rationals) {
  testkit::Rng rng(801);
  for (int it = 0; it < 200; ++it) {
    Rational q = testkit::small_rational(rng, 1000000);
    Json j = to_json(q);
    EXPECT_EQ(Node(j, "").rational(), q);
  }
  EXPECT_EQ(to_json(Rational(4)), "4");
  EXPECT_EQ(to_json(make_rational(-6, 4)), "-3/2");
}

TEST(JsonRoundTrip, Polynomials) {
  testkit::Rng rng(802);
  std::vector<std::string> vars{"x", "y", "z"};
  for (int it = 0; it < 100; ++it) {
    Poly f = testkit::random_poly(rng, 3, 4, 6, 20, true, true);
    Json j = to_json(f);
    EXPECT_EQ(parse_poly(Node(j, ""), vars), f);
    EXPECT_EQ(parse_poly(Node(Json(to_string(f, vars)), ""), vars), f);
  }
}

TEST(JsonRoundTrip, Series) {
  testkit::Rng rng(803);
  IdealInput ring{{"x", "y"}, groebner_basis({parse_poly("y^2-x^3", {"x", "y"})}, 2)};
  std::vector<std::string> sv{"u", "v"};
  for (int it = 0; it < 30; ++it) {
    Series s(ring.ideal, 2, 6);
    for (auto& J : monomials_up_to(2, 5))
      if (testkit::uniform(rng, 0, 2) == 0) s.set(J, reduce_mod(testkit::random_poly(rng, 2, 3, 3, 9, true, true), *ring.ideal));
    Json j = to_json(s);
    EXPECT_EQ(parse_series(Node(j, ""), ring, sv, 99), s);
  }
  Series e = exact_series(ring.ideal, parse_poly("u+3*v^2", sv));
  Series back = parse_series(Node(to_json(e), ""), ring, sv, 3);
  EXPECT_TRUE(back.exact());
  EXPECT_EQ(back, e);
}

TEST(JsonRoundTrip, Matrices) {
  testkit::Rng rng(804);
  for (int it = 0; it < 50; ++it) {
    size_t r = static_cast<size_t>(testkit::uniform(rng, 1, 5)), c = static_cast<size_t>(testkit::uniform(rng, 1, 5));
    Matrix m(r, c);
    for (size_t i = 0; i < r; ++i)
      for (size_t k = 0; k < c; ++k) m(i, k) = testkit::small_rational(rng, 40);
    EXPECT_EQ(parse_matrix(Node(to_json(m), "")), m);
  }
}

TEST(JsonSchema, ErrorsCarryPaths) {
  Json doc = Json::parse(R"({"schema":"adelikit/1","ideal":{"vars":["x","x"]}})");
  EXPECT_EQ(error_path([&] { parse_ideal(Node(doc, "")["ideal"]); }), "/ideal/vars/1");
  Json poly = Json::parse(R"([["1",[1,2]],["2",[0,-1]]])");
  EXPECT_EQ(error_path([&] { parse_poly(Node(poly, "/f"), {"x", "y"}); }), "/f/1/1/1");
  Json conn = Json::parse(R"({"dim":2,"entries":["0","1","0"]})");
  EXPECT_EQ(error_path([&] { parse_connection(Node(conn, "/connection")); }), "/connection/entries");
  Json strata = Json::parse(R"({"components":[{"h2":1},{"h1":-2}]})");
  EXPECT_EQ(error_path([&] { parse_strata(Node(strata, "/strata")); }), "/strata");
  EXPECT_EQ(error_path([&] { Node(doc, "")["missing"]; }), "/missing");
  EXPECT_EQ(error_path([] { require_schema(Json::parse(R"({"schema":"adelikit/0"})")); }), "/schema");
  EXPECT_EQ(error_path([] { require_schema(Json::parse(R"({"k":2})")); }), "/schema");
  Json bad_rat = Json::parse(R"("3/0")");
  EXPECT_EQ(error_path([&] { Node(bad_rat, "/xi").rational(); }), "/xi");
}

TEST(JsonFiles, AtomicWriteLeavesNoTemporaries) {
  auto dir = scratch();
  std::string out = (dir / "out.json").string();
  Json doc{{"schema", kSchema}, {"value", "1/3"}};
  write_json_atomic(out, doc);
  write_json_atomic(out, doc);
  EXPECT_EQ(read_json_file(out), doc);
  size_t files = 0;
  for (auto& p : fs::directory_iterator(dir)) files += p.is_regular_file();
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(read_json_file((dir / "absent.json").string()), DomainError);
  fs::remove_all(dir);
}

#ifdef ADELIKIT_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  int rc = std::system((std::string(ADELIKIT_CLI_PATH) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

}  // namespace

TEST(Cli, ExitCodes) {
  auto dir = scratch();
  auto in = dir / "in.json", out = dir / "out.json";

  write_text(in, R"({"schema":"adelikit/1","k":2,"family":"K3"})");
  ASSERT_EQ(run_cli("threshold " + in.string() + " " + out.string()), 0);
  auto res = read_json_file(out.string());
  EXPECT_EQ(res["result"]["jump"], 3);

  write_text(in, R"({"schema":"adelikit/1","k":4,"family":"K3"})");
  EXPECT_EQ(run_cli("threshold " + in.string() + " " + out.string()), 2);
  EXPECT_EQ(read_json_file(out.string())["error"]["kind"], "domain");

  write_text(in, R"({"schema":"adelikit/1","family":"K3"})");
  EXPECT_EQ(run_cli("threshold " + in.string() + " " + out.string()), 2);
  auto err = read_json_file(out.string())["error"];
  EXPECT_EQ(err["kind"], "schema");
  EXPECT_EQ(err["path"], "/k");

  write_text(in, R"({"schema":"adelikit/1","ideal":{"vars":["x","y"],"gens":["3*x-y"]},"f":"x",)"
                 R"("oracle":{"deg_bound":4,"height_bound":2}})");
  EXPECT_EQ(run_cli("norm " + in.string() + " " + out.string() + " --places 3 --budget 10"), 3);
  EXPECT_EQ(read_json_file(out.string())["error"]["kind"], "budget");

  EXPECT_NE(run_cli("threshold " + in.string() + " " + out.string() + " --bogus 1"), 0);
  EXPECT_NE(run_cli("nonsense " + in.string() + " " + out.string()), 0);
  fs::remove_all(dir);
}

TEST(Cli, OutputsReparse) {
  auto dir = scratch();
  auto out = dir / "out.json";
  std::string jobs = std::string(ADELIKIT_CORPUS_DIR) + "/jobs/";
  ASSERT_EQ(run_cli("flat-section " + jobs + "flat_section_hypergeometric.json " + out.string() + " --order 16"), 0);
  auto doc = read_json_file(out.string());
  EXPECT_NO_THROW(require_schema(doc));
  auto comps = doc["result"]["components"][0];
  EXPECT_EQ(comps[0], "1");
  EXPECT_EQ(comps[1], "1/4");
  EXPECT_EQ(comps[2], "9/64");
  fs::remove_all(dir);
}
#endif
