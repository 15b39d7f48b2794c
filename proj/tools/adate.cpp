#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adate/cli.hpp"
#include "adate/config.hpp"
#include "adate/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;
  std::string episodes;
  std::string threads;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags* f, bool need_config = true) {
  auto* opt = cmd->add_option("--config", f->config_path, "configuration file");
  if (need_config) opt->required();
  cmd->add_option("--set", f->sets, "override a config key (key=value)");
  cmd->add_option("--seed", f->seed, "master seed (overrides run.seed)");
  cmd->add_option("--episodes", f->episodes,
                  "campaign episodes (overrides campaign.episodes)");
  cmd->add_option("--threads", f->threads,
                  "worker threads (overrides run.threads)");
  cmd->add_option("--out", f->out, "output directory (overrides run.out)");
}

adate::RunConfig load_run_config(const CommonFlags& f) {
  adate::Config c = f.config_path.empty() ? adate::Config()
                                          : adate::Config::load(f.config_path);
  for (const auto& kv : f.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw adate::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.seed.empty()) c.set("run.seed", f.seed);
  if (!f.episodes.empty()) c.set("campaign.episodes", f.episodes);
  if (!f.threads.empty()) c.set("run.threads", f.threads);
  if (!f.out.empty()) c.set("run.out", f.out);
  return adate::parse_run_config(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive testing environment for discretized overtaking scenarios"};
  app.set_version_flag("--version", adate::kVersionString);
  app.require_subcommand(1);

  CommonFlags sur_f;
  bool sur_oracle = false;
  auto* sur = app.add_subcommand(
      "surrogates", "build maneuver challenge tables for the surrogate models");
  add_common(sur, &sur_f);
  sur->add_flag("--oracle", sur_oracle,
                "also build the exact AV table and report coverage violations");

  CommonFlags ora_f;
  auto* ora =
      app.add_subcommand("oracle", "build the exact value table for the AV");
  add_common(ora, &ora_f);

  CommonFlags ada_f;
  auto* ada = app.add_subcommand(
      "adate", "learn mixture coefficients against the configured AV");
  add_common(ada, &ada_f);

  CommonFlags test_f;
  std::string env_kind;
  auto* tst = app.add_subcommand("test", "run a testing campaign");
  add_common(tst, &test_f);
  tst->add_option("--env", env_kind, "environment kind: nde|nade|adate")
      ->required();

  CommonFlags rep_f;
  std::vector<std::string> summaries;
  auto* rep =
      app.add_subcommand("report", "compare campaign summaries side by side");
  add_common(rep, &rep_f, false);
  rep->add_option("summaries", summaries, "summary JSON files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sur->parsed()) return adate::cmd_surrogates(load_run_config(sur_f), sur_oracle);
    if (ora->parsed()) return adate::cmd_oracle(load_run_config(ora_f));
    if (ada->parsed()) return adate::cmd_adate(load_run_config(ada_f));
    if (tst->parsed()) {
      return adate::cmd_test(load_run_config(test_f),
                             adate::parse_env_kind(env_kind));
    }
    if (rep->parsed()) {
      std::string out = rep_f.out.empty() ? "." : rep_f.out;
      return adate::cmd_report(summaries, out);
    }
  } catch (const adate::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return adate::kExitConfig;
  } catch (const adate::ArtifactError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return adate::kExitArtifact;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
