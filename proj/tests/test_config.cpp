#include "qlab/config.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace qlab;

namespace {

std::vector<std::string> violations_of(std::string_view text, Scenario s) {
  try {
    parse_config(text, s);
  } catch (const config_error& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, ScenarioNamesRoundTrip) {
  for (auto name : kScenarioNames) {
    const auto s = parse_scenario(name);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(to_string(*s), name);
  }
  EXPECT_FALSE(parse_scenario("bogus").has_value());
}

TEST(Config, DefaultsFilledIn) {
  const auto cfg = parse_config("", Scenario::coherent);
  EXPECT_EQ(cfg.count("n"), 1024u);
  EXPECT_DOUBLE_EQ(cfg.real("length"), 100.0);
  EXPECT_EQ(cfg.text("propagator"), "exact");
  EXPECT_TRUE(cfg.given.empty());
  for (auto name : kScenarioNames) {
    const auto s = *parse_scenario(name);
    if (s == Scenario::classify) continue;
    EXPECT_NO_THROW(parse_config("", s)) << name;
  }
}

TEST(Config, ParsesValuesAndComments) {
  const auto cfg = parse_config("# header\nscenario = collide\n  k1 = 2.5   # faster\nstatistics=boson\n\nn = 512\n",
                                Scenario::collide);
  EXPECT_DOUBLE_EQ(cfg.real("k1"), 2.5);
  EXPECT_EQ(cfg.text("statistics"), "boson");
  EXPECT_EQ(cfg.count("n"), 512u);
  EXPECT_TRUE(cfg.given.contains("k1"));
  EXPECT_FALSE(cfg.given.contains("c1"));
}

TEST(Config, RoundsGridSizeWithNote) {
  const auto cfg = parse_config("n = 1000", Scenario::coherent);
  EXPECT_EQ(cfg.count("n"), 1024u);
  ASSERT_EQ(cfg.notes.size(), 1u);
  EXPECT_NE(cfg.notes[0].find("1024"), std::string::npos);
  EXPECT_EQ(parse_config("n = 3", Scenario::coherent).count("n"), 8u);
}

TEST(Config, CollectsEveryViolation) {
  const auto v = violations_of("sigma2 = -1\nn_steps = 3\nbogus = 1\npropagator = magic\nt_max = abc\nnoequals\n",
                               Scenario::coherent);
  EXPECT_EQ(v.size(), 6u);
  EXPECT_TRUE(mentions(v, "sigma2"));
  EXPECT_TRUE(mentions(v, "n_steps"));
  EXPECT_TRUE(mentions(v, "bogus"));
  EXPECT_TRUE(mentions(v, "propagator"));
  EXPECT_TRUE(mentions(v, "t_max"));
  EXPECT_TRUE(mentions(v, "line 6"));
}

TEST(Config, CrossFieldRules) {
  EXPECT_TRUE(mentions(violations_of("c1 = 5\nc2 = -5", Scenario::collide), "c1"));
  EXPECT_TRUE(mentions(violations_of("k_min = 3\nk_max = 1", Scenario::dispersion_table), "k_min"));
  EXPECT_TRUE(mentions(violations_of("", Scenario::classify), "series"));
  EXPECT_TRUE(mentions(violations_of("scenario = collide", Scenario::coherent), "scenario"));
  EXPECT_TRUE(mentions(violations_of("k1 = 1\nk1 = 2", Scenario::collide), "more than once"));
}

TEST(Config, TypeErrors) {
  EXPECT_TRUE(mentions(violations_of("n = 12.5", Scenario::coherent), "integer"));
  EXPECT_TRUE(mentions(violations_of("k0 = inf", Scenario::coherent), "finite"));
  EXPECT_TRUE(mentions(violations_of("k0 = 1x", Scenario::coherent), "k0"));
  EXPECT_TRUE(mentions(violations_of("n = 0", Scenario::coherent), "n"));
}
