#include "adate/config.hpp"

#include <gtest/gtest.h>

#include <string>

namespace adate {
namespace {

Config parse(const std::string& text) { return Config::parse(text); }

TEST(ConfigParse, SectionsAndDottedKeysAreEquivalent) {
  const Config a = parse(
      "[run]\n"
      "seed = 7\n"
      "out = results\n");
  const Config b = parse(
      "run.seed = 7\n"
      "run.out = results\n");
  EXPECT_EQ(a.get_string("run.seed", ""), "7");
  EXPECT_EQ(a.get_string("run.out", ""), "results");
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(ConfigParse, CommentsBlanksAndWhitespaceIgnored) {
  const Config c = parse(
      "# leading comment\n"
      "\n"
      "  [campaign]  \n"
      "  episodes =   250   # trailing comment\n"
      "# another comment\n");
  EXPECT_EQ(c.get_int("campaign.episodes", 0), 250);
}

TEST(ConfigParse, DuplicateKeyNamesLine) {
  try {
    parse("a = 1\na = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "config: line 2: duplicate key 'a'");
  }
}

TEST(ConfigParse, UnterminatedSectionNamesLine) {
  try {
    parse("x = 1\n[run\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()),
              "config: line 2: unterminated section header");
  }
}

TEST(ConfigParse, MissingEqualsRejected) {
  try {
    parse("just a bare line\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "config: line 1: expected key = value");
  }
}

TEST(ConfigParse, EmptySectionNameRejected) {
  EXPECT_THROW(parse("[]\n"), ConfigError);
  EXPECT_THROW(parse("[run]\n = 3\n"), ConfigError);
}

TEST(ConfigSet, OverrideWinsAndDropsLineNumber) {
  Config c = parse("run.seed = 1\n");
  c.set("run.seed", "42");
  EXPECT_EQ(c.get_int("run.seed", 0), 42);
  EXPECT_EQ(c.where("run.seed"), "key 'run.seed'");
  const Config d = parse("run.seed = 1\n");
  EXPECT_EQ(d.where("run.seed"), "line 1, key 'run.seed'");
}

TEST(ConfigHash, IndependentOfKeyOrderAndLayout) {
  const Config a = parse("b = 2\na = 1\n");
  const Config b = parse("a = 1\nb = 2\n");
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(ConfigHash, SensitiveToValuesAndSetOverrides) {
  Config a = parse("a = 1\nb = 2\n");
  const Config b = parse("a = 1\nb = 3\n");
  EXPECT_NE(a.hash(), b.hash());
  const std::uint64_t before = a.hash();
  a.set("b", "3");
  EXPECT_NE(a.hash(), before);
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(ConfigTyped, NumberAndBoolErrorsNameTheKey) {
  const Config c = parse("x = banana\nf = maybe\nl = 1,,3\n");
  try {
    c.get_double("x", 0.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("key 'x'"), std::string::npos);
    EXPECT_NE(msg.find("expected a number, got 'banana'"), std::string::npos);
  }
  EXPECT_THROW(c.get_bool("f", false), ConfigError);
  EXPECT_THROW(c.get_double_list("l"), ConfigError);
  EXPECT_TRUE(parse("f = true\n").get_bool("f", false));
  EXPECT_FALSE(parse("f = 0\n").get_bool("f", true));
}

TEST(ConfigTyped, RequireMissingKey) {
  const Config c = parse("a = 1\n");
  try {
    c.require("zz");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "config: missing required key 'zz'");
  }
}

TEST(Presets, TinyAndDeskValidate) {
  const GridSpec tiny = presets::tiny_grid();
  tiny.validate();
  EXPECT_EQ(tiny.cell_count(), 2 * 4 * 3 * 5 * 3);
  const GridSpec desk = presets::desk_grid();
  desk.validate();
  EXPECT_EQ(desk.cell_count(), 10 * 12 * 7 * 12 * 7);
}

TEST(ParseGrid, DefaultIsTinyPreset) {
  const GridSpec g = parse_grid(parse(""));
  EXPECT_EQ(g.hash(), presets::tiny_grid().hash());
}

TEST(ParseGrid, DimensionOverrideRebuildsEdges) {
  const GridSpec g = parse_grid(parse("grid.r1 = 0,60,6\n"));
  ASSERT_EQ(g.edges[1].size(), 7u);
  EXPECT_DOUBLE_EQ(g.edges[1].front(), 0.0);
  EXPECT_DOUBLE_EQ(g.edges[1].back(), 60.0);
  EXPECT_DOUBLE_EQ(g.edges[1][1], 10.0);
  EXPECT_NE(g.hash(), presets::tiny_grid().hash());
}

TEST(ParseGrid, BadInputsRejected) {
  EXPECT_THROW(parse_grid(parse("grid.preset = huge\n")), ConfigError);
  EXPECT_THROW(parse_grid(parse("grid.r1 = 0,60\n")), ConfigError);
  EXPECT_THROW(parse_grid(parse("grid.r1 = 0,60,2.5\n")), ConfigError);
  EXPECT_THROW(parse_grid(parse("grid.r1 = 60,0,6\n")), ConfigError);
  EXPECT_THROW(parse_grid(parse("grid.dt = 0\n")), ConfigError);
}

TEST(ResolveModel, BuiltinNames) {
  const Config c = parse("");
  const DriverModelParams sm1 = resolve_model(c, "sm1", "av.model");
  EXPECT_EQ(sm1.kind, ModelKind::kIdm);
  const DriverModelParams sm2 = resolve_model(c, "sm2", "av.model");
  EXPECT_EQ(sm2.kind, ModelKind::kFvdm);
  EXPECT_DOUBLE_EQ(sm2.a_min, -1.0);
  const DriverModelParams sm3 = resolve_model(c, "sm3", "av.model");
  EXPECT_EQ(sm3.kind, ModelKind::kFvdm);
  EXPECT_DOUBLE_EQ(sm3.a_min, -6.0);
  EXPECT_EQ(resolve_model(c, "scripted", "av.model").kind,
            ModelKind::kScripted);
}

TEST(ResolveModel, CustomSectionOverridesDefaults) {
  const Config c = parse(
      "[model.gentle]\n"
      "kind = fvdm\n"
      "a_min = -2.5\n"
      "fvdm_v0 = 28\n");
  const DriverModelParams p = resolve_model(c, "gentle", "av.model");
  EXPECT_EQ(p.kind, ModelKind::kFvdm);
  EXPECT_DOUBLE_EQ(p.a_min, -2.5);
  EXPECT_DOUBLE_EQ(p.fvdm_v0, 28.0);
}

TEST(ResolveModel, UnknownNameAndKindRejected) {
  try {
    resolve_model(parse(""), "mystery", "av.model");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown model 'mystery'"),
              std::string::npos);
  }
  EXPECT_THROW(
      resolve_model(parse("[model.x]\nkind = cellular\n"), "x", "av.model"),
      ConfigError);
  EXPECT_THROW(resolve_model(parse("[model.x]\na_min = -2\n"), "x", "av.model"),
               ConfigError);
}

TEST(RunConfig, DefaultsAreComplete) {
  const RunConfig r = parse_run_config(parse(""));
  EXPECT_EQ(r.grid.hash(), presets::tiny_grid().hash());
  EXPECT_EQ(r.av.kind, ModelKind::kIdm);
  ASSERT_EQ(r.surrogate_names.size(), 3u);
  EXPECT_EQ(r.surrogate_names[0], "sm1");
  EXPECT_EQ(r.surrogate_names[1], "sm2");
  EXPECT_EQ(r.surrogate_names[2], "sm3");
  EXPECT_EQ(r.lv_model.kind, ModelKind::kIdm);
  EXPECT_EQ(r.bv_model.kind, ModelKind::kIdm);
  EXPECT_DOUBLE_EQ(r.nat.sigma_a, 1.0);
  EXPECT_DOUBLE_EQ(r.nat.rho, 1e-3);
  EXPECT_DOUBLE_EQ(r.adate.c, 2.0);
  EXPECT_DOUBLE_EQ(r.adate.omega, 0.85);
  EXPECT_DOUBLE_EQ(r.adate.gamma, 1.0);
  EXPECT_EQ(r.adate.delta, 10);
  EXPECT_DOUBLE_EQ(r.adate.asd_threshold, 0.02);
  EXPECT_EQ(r.adate.max_episodes, 200000u);
  EXPECT_DOUBLE_EQ(r.campaign.epsilon, 0.1);
  EXPECT_EQ(r.campaign.episodes, 100000u);
  EXPECT_DOUBLE_EQ(r.campaign.rhw_threshold, 0.3);
  EXPECT_DOUBLE_EQ(r.campaign.confidence, 0.95);
  EXPECT_EQ(r.campaign.n_min, 100u);
  EXPECT_EQ(r.sm_horizon, -1);
  EXPECT_EQ(r.seed, 1u);
  EXPECT_EQ(r.out_dir, "out");
  EXPECT_EQ(r.threads, 1);
  EXPECT_EQ(r.adate.seed, r.seed);
  EXPECT_EQ(r.config_hash, parse("").hash());
  for (int d = 0; d < kStateDims; ++d) {
    EXPECT_DOUBLE_EQ(r.init.lo[d], r.grid.edges[d].front());
    EXPECT_DOUBLE_EQ(r.init.hi[d], r.grid.edges[d].back());
  }
}

TEST(RunConfig, InitBoxNarrowsSelectedDims) {
  const RunConfig r = parse_run_config(parse(
      "[init]\n"
      "v_bv = 22,28\n"
      "r2 = 10,20\n"));
  EXPECT_DOUBLE_EQ(r.init.lo[0], 22.0);
  EXPECT_DOUBLE_EQ(r.init.hi[0], 28.0);
  EXPECT_DOUBLE_EQ(r.init.lo[3], 10.0);
  EXPECT_DOUBLE_EQ(r.init.hi[3], 20.0);
  EXPECT_DOUBLE_EQ(r.init.lo[1], r.grid.edges[1].front());
  EXPECT_DOUBLE_EQ(r.init.hi[1], r.grid.edges[1].back());
}

TEST(RunConfig, SurrogateListAndHorizonMode) {
  const RunConfig r = parse_run_config(parse(
      "surrogates.models = sm3 , sm1\n"
      "dp.sm_mode = horizon\n"));
  ASSERT_EQ(r.surrogates.size(), 2u);
  EXPECT_DOUBLE_EQ(r.surrogates[0].a_min, -6.0);
  EXPECT_EQ(r.surrogates[1].kind, ModelKind::kIdm);
  EXPECT_EQ(r.sm_horizon, r.grid.horizon);
}

TEST(RunConfig, OutOfRangeParametersRejected) {
  EXPECT_THROW(parse_run_config(parse("learner.omega = 0.5\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("learner.omega = 1.01\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("learner.gamma = 0\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("learner.gamma = 1.5\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("learner.delta = 0\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("campaign.epsilon = 1.0\n")),
               ConfigError);
  EXPECT_THROW(parse_run_config(parse("campaign.confidence = 1.0\n")),
               ConfigError);
  EXPECT_THROW(parse_run_config(parse("dp.sm_mode = loop\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("run.threads = 0\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("init.r1 = 5\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("init.r1 = 9,4\n")), ConfigError);
  EXPECT_THROW(parse_run_config(parse("surrogates.models = sm1,,sm2\n")),
               ConfigError);
  EXPECT_THROW(parse_run_config(parse("naturalistic.sigma_a = 0\n")),
               ConfigError);
}

TEST(RunConfig, LoadRejectsMissingFile) {
  EXPECT_THROW(Config::load("/nonexistent/adate.ini"), ConfigError);
}

}  // namespace
}  // namespace adate
