#include <doctest.h>

#include <cstdlib>

#include "tiedpools/errors.hpp"
#include "tiedpools/reporting.hpp"

using namespace tiedpools;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

}  // namespace

TEST_CASE("ratings anchored on one player") {
  RatingScale scale;
  scale.anchor = "C";
  const auto r = to_ratings({"B", "C", "D"}, vec({0.54821, 0.13929, 0.31250}), scale);
  CHECK(r[0].first == "B");
  CHECK(std::abs(r[0].second - 238.0135) < 1e-2);
  CHECK(r[1].second == 0);
  CHECK(std::abs(r[2].second - 140.3728) < 1e-2);
}

TEST_CASE("ratings are log strengths on the chosen scale") {
  const auto even = to_ratings({"a", "b"}, vec({0.5, 0.5}), {});
  CHECK(even[0].second == doctest::Approx(even[1].second));

  RatingScale s;
  s.offset = 1500;
  const auto r = to_ratings({"a", "b"}, vec({10, 1}), s);
  CHECK(r[0].second == doctest::Approx(1900));
  CHECK(r[1].second == doctest::Approx(1500));

  s.anchor = "b";
  const auto x = to_ratings({"a", "b", "c"}, vec({0.2, 0.3, 0.5}), s);
  const auto y = to_ratings({"a", "b", "c"}, vec({0.4, 0.6, 1.0}), s);
  for (int i = 0; i < 3; ++i) CHECK(x[i].second == doctest::Approx(y[i].second).epsilon(1e-12));

  s.base = std::exp(1.0);
  s.scale = 1;
  s.anchor.reset();
  s.offset = 0;
  CHECK(to_ratings({"a"}, vec({2}), s)[0].second == doctest::Approx(std::log(2.0)));
}

TEST_CASE("rating errors") {
  RatingScale s;
  s.anchor = "z";
  CHECK_THROWS_AS(to_ratings({"a", "b"}, vec({1, 1}), s), ValidationError);
  CHECK_THROWS_AS(to_ratings({"a", "b"}, vec({1, 0}), {}), ValidationError);
  CHECK_THROWS_AS(to_ratings({"a"}, vec({1, 1}), {}), ValidationError);
  RatingScale bad;
  bad.base = 1;
  CHECK_THROWS_AS(to_ratings({"a"}, vec({1}), bad), ValidationError);
}

TEST_CASE("FNV-1a digests") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
  CHECK(hex64(1) == "0000000000000001");
}

TEST_CASE("reals are rounded to ten significant digits") {
  CHECK(report_real(0.1 + 0.2).get<double>() == 0.3);
  CHECK(report_real(2.0 / 3).get<double>() == 0.6666666667);
  CHECK(report_real(-123456.78901234).get<double>() == -123456.789);
  CHECK(report_real(1e-300).get<double>() == 1e-300);
  CHECK(report_real(0).get<double>() == 0);
  CHECK(report_real(std::nan("")).is_null());
  CHECK(report_real(HUGE_VAL).is_null());
}

TEST_CASE("timestamp honors SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(current_timestamp() == "1970-01-01T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(current_timestamp() == "2023-11-14T22:13:20Z");
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(current_timestamp().size() == 20);
}

TEST_CASE("fit report layout") {
  Matrix w(2, 2), t(2, 2);
  w << 0, 3, 1, 0;
  t << 0, 2, 2, 0;
  const ComparisonData data({"a", "b"}, w, t);
  const auto fit = fit_model(ModelKind::ConstrainedAlternative, data);
  const auto j = fit_to_json(fit, data, {});
  CHECK(j["model"] == "alt-c");
  CHECK(j["converged"] == true);
  CHECK(j.contains("stage1_log_lik"));
  CHECK(j["strengths"]["a"].template get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-9));
  REQUIRE(j["pairs"].size() == 1);
  const auto& p = j["pairs"][0];
  CHECK(p["games"] == 6);
  const double total =
      p["p_win"].template get<double>() + p["p_loss"].template get<double>() + p["p_draw"].template get<double>();
  CHECK(total == doctest::Approx(1).epsilon(1e-9));

  const auto bt = fit_model(ModelKind::BradleyTerry, data);
  CHECK_FALSE(fit_to_json(bt, data, {}).contains("stage1_log_lik"));
}

TEST_CASE("wrapped report records a digest of its body") {
  RunManifest m;
  m.command = "fit";
  m.input_digest = fnv1a64("xyz");
  m.timestamp = "1970-01-01T00:00:00Z";
  ReportJson body;
  body["value"] = 1.5;
  const auto out = wrap_report(m, body);
  CHECK(out["manifest"]["command"] == "fit");
  CHECK(out["manifest"]["input_digest"] == hex64(fnv1a64("xyz")));
  CHECK(out["manifest"]["body_digest"] == hex64(fnv1a64(body.dump())));
  CHECK(out["manifest"]["tool_version"] == "0.1.0");
  CHECK(out["report"] == body);
  CHECK(out.begin().key() == "manifest");
}

TEST_CASE("simulation and pool reports are keyed by label") {
  SimConfig cfg;
  cfg.strengths = {0.5, 0.3, 0.2};
  cfg.nu = 0.5;
  cfg.rounds = 1000;
  const auto rep = simulate_series(cfg);
  const std::array<std::string, 3> labels{"x", "y", "z"};
  const auto j = simulation_to_json(rep, labels);
  CHECK(j.dump().find("\"x-y\"") != std::string::npos);
  const auto ex = expectations_to_json(expected_per_round(cfg), labels);
  CHECK(ex.dump().find("\"z>y\"") != std::string::npos);
  const auto zs = z_scores_to_json(z_scores(rep, expected_per_round(cfg), labels));
  CHECK(zs.is_array());
  CHECK(zs.size() > 10);

  const auto inf = infer_pools({{"B", "C", "D"}, {14, 1, 6}});
  const auto pj = pool_inference_to_json(inf);
  CHECK(pj.dump().find("\"D\"") != std::string::npos);
  const auto ij = imputed_to_json(impute_draws(inf, 0.5), inf.labels);
  CHECK(ij.dump().find("\"B-C\"") != std::string::npos);
}
