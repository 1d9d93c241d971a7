#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "focklab/classify.hpp"
#include "focklab/report.hpp"

using namespace focklab;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("curve CSV header and precision") {
  const std::string s = curve_csv({{1.0, 0.1, 0.0}, {2.0, 1.0 / 3.0, 1e-9}});
  CHECK(s.rfind("parameter,value,est_err\n", 0) == 0);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("reports carry schema and command; writing twice is byte-identical") {
  const fs::path dir = fs::temp_directory_path() / "focklab_report_test";
  fs::remove_all(dir);
  const json body = {{"z", 1.5}, {"a", {1, 2}}};
  const auto p1 = write_report(dir, "x", "kernel", body);
  const std::string first = slurp(p1);
  write_report(dir, "x", "kernel", body);
  CHECK(slurp(p1) == first);
  const json back = json::parse(first);
  CHECK(back["schema"] == kReportSchema);
  CHECK(back["command"] == "kernel");
  CHECK(first.find("\"a\"") < first.find("\"z\""));  // sorted keys
  fs::remove_all(dir);
}

TEST_CASE("fnv1a_hex") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("to_json shapes") {
  CHECK(to_json(cplx{1.0, -2.0}) == json::array({1.0, -2.0}));
  RaySweep s;
  s.xs = {1.0};
  s.log_values = {0.5};
  s.est_err = {0.0};
  CHECK(to_json(s)["xs"].size() == 1);
}

TEST_CASE("thresholds file") {
  const Thresholds t = Thresholds::load(default_thresholds_path());
  CHECK(t.plateau == doctest::Approx(1.05));
  CHECK(t.blowup == doctest::Approx(5.0));
  CHECK(t.rate_tolerance == doctest::Approx(0.25));
  CHECK(t.provenance.contains("blowup"));
  const fs::path bad = fs::temp_directory_path() / "focklab_bad_thresholds.json";
  std::ofstream(bad) << R"({"plateau": 2.0, "blowup": 1.5, "rate_tolerance": 0.25, "bounded_growth_slope": 0.1})";
  CHECK_THROWS(Thresholds::load(bad));
  std::ofstream(bad) << "{not json";
  CHECK_THROWS(Thresholds::load(bad));
  CHECK_THROWS(Thresholds::load("/nonexistent/thresholds.json"));
  fs::remove(bad);
}

TEST_CASE("classify: verdict depends only on deg g against m") {
  const Thresholds th = Thresholds::load(default_thresholds_path());
  const FockContext c1(1.0);
  const ClassifierVerdict zero = classify(PolynomialSymbol({0}), c1, th);
  CHECK(zero.verdict == TheoremVerdict::bounded);
  CHECK(zero.consistent);
  for (const auto& e : zero.evidence) CHECK(e.status == Evidence::supports);

  const ClassifierVerdict out = classify(PolynomialSymbol({0, 0, 0, 1}), c1, th);
  CHECK(out.verdict == TheoremVerdict::not_applicable);
  CHECK(out.reason.rfind("symbol not in space", 0) == 0);
}

TEST_CASE("classify: m = 1, g = a z is bounded with constant Berezin product e^{2a^2}") {
  const Thresholds th = Thresholds::load(default_thresholds_path());
  const FockContext c1(1.0);
  const double a = 0.5;
  const ClassifierVerdict v = classify(PolynomialSymbol({0, a}), c1, th);
  CHECK(v.verdict == TheoremVerdict::bounded);
  CHECK(v.consistent);
  for (const auto& e : v.evidence) {
    if (e.name != "berezin_ray") continue;
    for (const auto& lv : e.data["log_values"]) CHECK(lv.get<double>() == doctest::Approx(2 * a * a).epsilon(1e-7));
  }
}

TEST_CASE("classify: verdict invariant under rotation and g -> -g") {
  const Thresholds th = Thresholds::load(default_thresholds_path());
  const FockContext ctx(1.5);
  ClassifyOptions opt;
  opt.Ns = {8, 32};
  opt.ray_xs = {1.5, 2.5};
  opt.f_caps = {1.0, 2.0};
  const PolynomialSymbol g({0, 0.2, cplx{1.0, 0.5}});
  for (const PolynomialSymbol& h : {g, g.rotated(0.7), -g}) {
    const ClassifierVerdict v = classify(h, ctx, th, opt);
    CAPTURE(h.to_string());
    CHECK(v.verdict == TheoremVerdict::unbounded);
    CHECK(v.consistent);
  }
}
