#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "lovesim/error.hpp"
#include "lovesim/personality.hpp"

using namespace lovesim;

TEST_SUITE("personality") {

TEST_CASE("canonical names follow the personality table") {
  CHECK(kProfileItemNames.size() == 25);
  CHECK(kScaleNames.size() == 32);
  CHECK(kProfileItemNames.front() == "Age");
  CHECK(kProfileItemNames.back() == "Self-Introduction");
  CHECK(kScaleNames.front() == "Rosenberg’s Self Esteem Scale (RSES)");
  CHECK(kScaleNames.back() == "Situational Interpersonal Anxiety Scale");
  std::set<std::string_view> items(kProfileItemNames.begin(), kProfileItemNames.end());
  std::set<std::string_view> scales(kScaleNames.begin(), kScaleNames.end());
  CHECK(items.size() == 25);
  CHECK(scales.size() == 32);
}

TEST_CASE("validate accepts a complete profile and rejects broken ones") {
  auto p = testing::full_profile("x");
  CHECK_NOTHROW(p.validate());

  auto missing = p;
  missing.profile_items.pop_back();
  CHECK_THROWS_AS(missing.validate(), ValidationError);

  auto renamed = p;
  renamed.scales[3].name = "Big Six Scale";
  CHECK_THROWS_AS(renamed.validate(), ValidationError);

  auto dup = p;
  dup.profile_items[1].name = dup.profile_items[0].name;
  CHECK_THROWS_AS(dup.validate(), ValidationError);

  auto nan = p;
  nan.scales[5].scores.push_back(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(nan.validate(), ValidationError);

  auto inf = p;
  inf.scales[0].scores[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(inf.validate(), ValidationError);
}

TEST_CASE("lookup by name") {
  auto p = testing::full_profile("x", 0.7, 0.1);
  CHECK(p.item("Occupation") == "value5");
  CHECK(p.scale("Self-Consciousness Scale").scores.front() == doctest::Approx(0.1));
  CHECK_THROWS_AS(p.item("Shoe Size"), ValidationError);
}

TEST_CASE("rendering walks the table row by row") {
  auto p = testing::full_profile("x", 0.25, 0.5);
  const auto text = render_personality(p);
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 57);
  // Row r holds profile item r then scale r for the first 25 rows.
  for (std::size_t r = 0; r < 25; ++r) {
    CHECK(lines[2 * r].rfind(std::string(kProfileItemNames[r]) + ": ", 0) == 0);
    CHECK(lines[2 * r + 1].rfind(std::string(kScaleNames[r]) + ":", 0) == 0);
  }
  for (std::size_t r = 25; r < 32; ++r) {
    CHECK(lines[25 + r].rfind(std::string(kScaleNames[r]) + ":", 0) == 0);
  }
  CHECK(lines[0] == "Age: value0");
  CHECK(lines[1] == "Rosenberg’s Self Esteem Scale (RSES): 0.25 2");
}

TEST_CASE("score formatting") {
  CHECK(format_score(0.5) == "0.5");
  CHECK(format_score(3.0) == "3");
  CHECK(format_score(1.0 / 3.0) == "0.333333");
}

}
