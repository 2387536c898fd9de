//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <limits>

#include "roikit/construct.hpp"
#include "roikit/io.hpp"
#include "roikit/oracle.hpp"
#include "roikit/roi.hpp"
#include "roikit/sdp_compile.hpp"
#include "test_util.hpp"

using namespace roikit;
using Catch::Matchers::ContainsSubstring;

namespace {

// Byte-level round trip: serialize, parse, re-serialize, compare.
std::string rewrite(const std::string& text) {
  return canonical_json(Json::parse(text));
}

}  // namespace

TEST_CASE("canonical writer is stable and strict", "[io]") {
  Json j;
  j["b"] = 0.1;
  j["a"] = Json::array({1, 2, 3});
  j["c"] = Json{{"nested", true}, {"also", "text"}};
  const std::string once = canonical_json(j);
  CHECK(once == rewrite(once));
  // Keys come out sorted regardless of insertion order.
  CHECK(once.find("\"a\"") < once.find("\"b\""));
  CHECK(once.find("\"b\"") < once.find("\"c\""));

  // Doubles are written with enough digits to reproduce the exact value.
  Json awkward;
  awkward["v"] = Json::array({0.1, 1.0 / 3.0, 1e-17, 6.02214076e23, -0.0});
  const std::string text = canonical_json(awkward);
  const Json back = Json::parse(text);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(back["v"][i].get<double>() == awkward["v"][i].get<double>());
  CHECK(text == rewrite(text));

  Json bad;
  bad["x"] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(canonical_json(bad), SchemaError);
  bad["x"] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(canonical_json(bad), SchemaError);
}

TEST_CASE("measurement set round trip is byte identical", "[io]") {
  const MeasurementSet set = testutil::xz_set();
  const std::string text = canonical_json(to_json(set));
  const MeasurementSet loaded = measurement_set_from_json(Json::parse(text));
  CHECK(canonical_json(to_json(loaded)) == text);
  CHECK(loaded.dim() == set.dim());
  CHECK(loaded.n_measurements() == set.n_measurements());
  for (int k = 0; k < set.n_measurements(); ++k)
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c)
      CHECK((loaded.effect(k, c) - set.effect(k, c)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("task round trip is byte identical", "[io]") {
  const DiscriminationTask task = random_task({2, 2}, 3, 2, 97);
  const std::string text = canonical_json(to_json(task));
  const DiscriminationTask loaded = task_from_json(Json::parse(text));
  CHECK(canonical_json(to_json(loaded)) == text);
  CHECK(loaded.party_dims == task.party_dims);
  REQUIRE(loaded.n_ensembles() == task.n_ensembles());
  for (int y = 0; y < task.n_ensembles(); ++y) {
    CHECK(loaded.ensembles[y].prior == task.ensembles[y].prior);
    REQUIRE(loaded.ensembles[y].states.size() == task.ensembles[y].states.size());
  }
}

TEST_CASE("roi certificate round trip is byte identical", "[io]") {
  const RoiCertificate cert = compute_roi(testutil::xz_set());
  const std::string text = canonical_json(to_json(cert));
  const RoiCertificate loaded = roi_cert_from_json(Json::parse(text));
  CHECK(canonical_json(to_json(loaded)) == text);
  CHECK(loaded.roi == cert.roi);
  CHECK(loaded.strings == cert.strings);
  CHECK(loaded.residuals.gap == cert.residuals.gap);
}

TEST_CASE("bound report round trip preserves optional fields", "[io]") {
  BoundReport rep;
  rep.parties = 2;
  rep.roi = {0.17157287525380996, 0.17157287525380996};
  rep.product = 1.3725830020304792;
  rep.parent_guess = 0.5;
  rep.bound = rep.product * rep.parent_guess + BoundReport::margin;
  rep.p_lo = 0.62;
  rep.pass = true;

  SECTION("without the optional blocks") {
    const std::string text = canonical_json(to_json(rep));
    const BoundReport loaded = bound_report_from_json(Json::parse(text));
    CHECK(canonical_json(to_json(loaded)) == text);
    CHECK_FALSE(loaded.has_locc1);
    CHECK_FALSE(loaded.has_seesaw);
    CHECK(loaded.bound == rep.bound);
  }

  SECTION("with one-shot classical communication and ascent values") {
    rep.has_locc1 = true;
    rep.p_locc1 = 0.64;
    rep.has_seesaw = true;
    rep.seesaw_value = 0.66;
    rep.ratio_seesaw = 0.97;
    const std::string text = canonical_json(to_json(rep));
    const BoundReport loaded = bound_report_from_json(Json::parse(text));
    CHECK(canonical_json(to_json(loaded)) == text);
    CHECK(loaded.has_locc1);
    CHECK(loaded.p_locc1 == rep.p_locc1);
    CHECK(loaded.has_seesaw);
    CHECK(loaded.seesaw_value == rep.seesaw_value);
  }
}

TEST_CASE("bundle metadata round trip is byte identical", "[io]") {
  const RoiCertificate cert = compute_roi(testutil::xz_set());
  const OptimalTaskBundle bundle = build_optimal_task(cert, cert);
  const std::string text = canonical_json(bundle_meta_to_json(bundle));
  const OptimalTaskBundle loaded = bundle_meta_from_json(Json::parse(text));
  CHECK(canonical_json(bundle_meta_to_json(loaded)) == text);
  CHECK(loaded.m_star == bundle.m_star);
  CHECK(loaded.ensemble_labels == bundle.ensemble_labels);
  CHECK(loaded.state_labels == bundle.state_labels);
}

TEST_CASE("sdp dump round trip is byte identical", "[io]") {
  const MeasurementSet set = testutil::xz_set();
  const auto strings = deterministic_strings(set.outcome_counts());
  const sdp::BlockProblem bp =
      sdp_detail::lower_primal(build_roi_primal(set, strings)).bp;
  const std::string text = canonical_json(sdp_dump_to_json(bp));
  const sdp::BlockProblem loaded = sdp_dump_from_json(Json::parse(text));
  CHECK(canonical_json(sdp_dump_to_json(loaded)) == text);
  CHECK(loaded.dims == bp.dims);
  REQUIRE(loaded.rows.size() == bp.rows.size());
  CHECK(loaded.b.size() == bp.b.size());
}

TEST_CASE("loaders report the offending location as a pointer", "[io]") {
  Json j = to_json(testutil::xz_set());

  SECTION("missing top-level field") {
    j.erase("dim");
    CHECK_THROWS_WITH(measurement_set_from_json(j), ContainsSubstring("/dim"));
  }
  SECTION("missing nested field") {
    j["measurements"][0][1].erase("re");
    CHECK_THROWS_WITH(measurement_set_from_json(j),
                      ContainsSubstring("/measurements/0/1/re"));
  }
  SECTION("wrong type") {
    j["dim"] = "two";
    CHECK_THROWS_WITH(measurement_set_from_json(j), ContainsSubstring("/dim"));
  }
  SECTION("wrong schema id") {
    j["schema"] = "task.v1";
    CHECK_THROWS_WITH(measurement_set_from_json(j), ContainsSubstring("/schema"));
  }
  SECTION("ragged matrix") {
    j["measurements"][0][0]["re"][0] = Json::array({1.0});
    CHECK_THROWS_WITH(measurement_set_from_json(j),
                      ContainsSubstring("/measurements/0/0/re/0"));
  }
}

TEST_CASE("semantically invalid inputs load as schema errors", "[io]") {
  // A numerically broken input file is an input problem, not a failure of a
  // mathematical check performed by this library.
  Json j = to_json(random_task({2}, 2, 2, 5));
  j["ensembles"][0]["prior"] = -0.25;
  CHECK_THROWS_AS(task_from_json(j), SchemaError);

  Json m = to_json(testutil::xz_set());
  m["measurements"][0][0]["re"][0][0] = 25.0;
  CHECK_THROWS_AS(measurement_set_from_json(m), SchemaError);
}

TEST_CASE("file save and load round trip", "[io]") {
  const auto dir = std::filesystem::temp_directory_path() / "roikit_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "set.json";
  const Json j = to_json(testutil::xz_set());
  save_json(path, j);
  CHECK(load_json(path) == j);
  // A second save produces identical bytes.
  const auto size_first = std::filesystem::file_size(path);
  save_json(path, load_json(path));
  CHECK(std::filesystem::file_size(path) == size_first);

  CHECK_THROWS_AS(load_json(dir / "absent.json"), SchemaError);
  std::ofstream(dir / "garbage.json") << "{ not json";
  CHECK_THROWS_AS(load_json(dir / "garbage.json"), SchemaError);
  std::filesystem::remove_all(dir);
}
