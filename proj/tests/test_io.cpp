#include <doctest.h>

#include <sstream>

#include "ontosim/io.hpp"
#include "support.hpp"

using namespace ontosim;
using io::json;

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(1.0) == "1");
  CHECK(std::stod(io::format_double(3.141592653589793)) == 3.141592653589793);
}

TEST_CASE("law documents round trip and are validated") {
  const PermutationLaw law = PermutationLaw::from_successors({2, 0, 1, 3});
  CHECK(io::law_from_json(io::law_to_json(law)) == law);
  CHECK_THROWS_AS(io::law_from_json(json{{"size", 3}, {"image", {0, 1}}}), MalformedLaw);
  CHECK_THROWS_AS(io::law_from_json(json{{"image", {0, 0}}}), MalformedLaw);
  CHECK_THROWS_AS(io::law_from_json(json{{"image", "oops"}}), ParseError);
  CHECK_THROWS_AS(io::law_from_json(json{{"size", 2}}), ParseError);
  CHECK_THROWS_AS(io::law_from_json(json::array()), ParseError);
}

TEST_CASE("files: missing and corrupted inputs raise distinct errors") {
  CHECK_THROWS_AS(io::read_json(testkit::fixture("does_not_exist.json")), io::FileNotFound);
  CHECK_THROWS_AS(io::read_json(testkit::fixture("corrupted_permutation.json")), ParseError);
  CHECK_THROWS_AS(io::write_text("/nonexistent-dir/x.txt", "x"), io::WriteError);
}

TEST_CASE("model documents round trip") {
  const json doc = io::read_json(testkit::fixture("two_state_10_7.json"));
  const OntologicalModel m = io::model_from_json(doc);
  CHECK(m.slow_count() == 2);
  CHECK(m.periods()[0] == 10);
  CHECK(m.periods()[1] == 7);
  REQUIRE(m.special_points().size() == 1);
  CHECK(m.special_points()[0] == SpecialPoint{0, 1, 0, 0});
  CHECK(m.site_labels().size() == 2);
  CHECK(io::model_to_json(m) == doc);

  CHECK_THROWS_AS(io::model_from_json(json{{"slow_count", 2}, {"periods", {3, 4}}, {"special_points", {{{"pair", {0}}, {"trigger", {0, 0}}}}}}),
                  ParseError);
  CHECK_THROWS_AS(io::model_from_json(json{{"slow_count", 2}, {"periods", {3, -4}}}), InvalidModel);
  CHECK_THROWS_AS(io::model_from_json(json{{"slow_count", 2}, {"periods", {3, 4}},
                                           {"special_points", {{{"pair", {0, 1}}, {"trigger", {1, 1}}},
                                                               {{"pair", {1, 0}}, {"trigger", {1, 1}}}}}}),
                  ConflictingSpecialPoints);
}

TEST_CASE("spectrum CSV rows follow cycle order") {
  const CycleDecomposition d = decompose(PermutationLaw::from_successors({1, 0, 2}));
  std::ostringstream out;
  io::write_spectrum_csv(out, d);
  CHECK(out.str() ==
        "cycle_index,n,energy,re_phase,im_phase\n"
        "0,0,0,1,0\n"
        "0,1,3.141592653589793,-1,-1.2246467991473532e-16\n"
        "1,0,0,1,0\n");
}

TEST_CASE("occupation CSV header names every slow state") {
  const OntologicalModel m = OntologicalModel::build(3, {2, 2, 2}, {});
  std::ostringstream out;
  io::write_occupation_csv(out, enumerate_exact(m, 2, 1));
  CHECK(out.str() == "t,state_0_freq,state_1_freq,state_2_freq\n0,0,0,1\n1,0,0,1\n");
}

TEST_CASE("effective Hamiltonians serialise exact fractions") {
  const OntologicalModel m = OntologicalModel::build(2, {10, 7}, {{0, 1, 0, 0}});
  const json doc = io::effective_to_json(ground_project(m, interaction_terms(m)));
  REQUIRE(doc["couplings"].size() == 1);
  CHECK(doc["couplings"][0]["pair"] == json{0, 1});
  CHECK(doc["couplings"][0]["num"] == 1);
  CHECK(doc["couplings"][0]["den"] == 70);
  CHECK(doc["matrix"]["im"][0][1].get<double>() == doctest::Approx(-kHalfPi / 70));
}

TEST_CASE("target documents") {
  CHECK_NOTHROW(io::target_from_json(io::read_json(testkit::fixture("target_two_state_exact.json"))));
  CHECK_THROWS_AS(io::target_from_json(io::read_json(testkit::fixture("target_diagonal.json"))), NotRepresentable);
  CHECK_THROWS_AS(io::target_from_json(json{{"im", {{0, 1}}}}), ParseError);
  CHECK_THROWS_AS(io::target_from_json(json{{"re", {{0}}}}), ParseError);
}

TEST_CASE("CHSH report carries the bound and settings in degrees") {
  const ChshResult r = chsh_score(quantum_correlation, standard_chsh_settings());
  const json doc = io::chsh_report(r);
  CHECK(doc["bound"] == 2);
  CHECK(doc["quantum_max"].get<double>() == doctest::Approx(2.8284271));
  CHECK(doc["S"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(doc["settings_deg"][2].get<double>() == doctest::Approx(22.5));
}
