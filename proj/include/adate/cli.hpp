#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adate/artifacts.hpp"
#include "adate/campaign.hpp"
#include "adate/config.hpp"
#include "adate/densrl.hpp"
#include "adate/env.hpp"
#include "adate/io.hpp"
#include "adate/mixture.hpp"
#include "adate/qtable.hpp"
#include "adate/surrogate.hpp"

namespace adate {

// Exit codes: 0 success, 2 configuration error, 3 missing or inconsistent
// artifact, 4 generation hit the episode cap without converging.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitArtifact = 3;
inline constexpr int kExitNoConverge = 4;

struct ArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cli_detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void ensure_out_dir(const RunConfig& rc) {
  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) {
    throw ArtifactError("cannot create output directory " + rc.out_dir + ": " +
                        ec.message());
  }
}

inline QTable load_table_checked(const std::string& path, const GridSpec& g,
                                 std::uint32_t kind = 0) {
  if (!std::filesystem::exists(path)) {
    throw ArtifactError("missing table file: " + path +
                        " (run the surrogates command first)");
  }
  QTable t = QTable::load(path, kind);
  if (t.grid_hash != g.hash()) {
    throw ArtifactError("grid hash mismatch: " + path +
                        " was built for a different grid than this config");
  }
  if (t.n_actions != g.n_actions() || t.n_states != g.state_count()) {
    throw ArtifactError("table shape mismatch: " + path);
  }
  return t;
}

inline std::vector<QTable> load_sm_tables(const RunConfig& rc) {
  std::vector<QTable> tables;
  for (const auto& name : rc.surrogate_names) {
    tables.push_back(load_table_checked(
        join_path(rc.out_dir, "sm_" + name + ".qtab"), rc.grid));
  }
  return tables;
}

inline std::vector<const QTable*> table_ptrs(const std::vector<QTable>& tables) {
  std::vector<const QTable*> p;
  for (const auto& t : tables) p.push_back(&t);
  return p;
}

inline GridChainEnv make_av_env(const RunConfig& rc) {
  return GridChainEnv(rc.grid, rc.av,
                      build_phi(rc.grid, rc.lv_model, rc.bv_model, rc.nat));
}

}  // namespace cli_detail

// Builds one table per configured surrogate. With the oracle flag the real
// AV's exact values are computed as well and every state the surrogate set
// cannot see (oracle-critical but mean-surrogate-silent) is reported.
inline int cmd_surrogates(const RunConfig& rc, bool with_oracle) {
  cli_detail::ensure_out_dir(rc);
  const std::vector<double> phi =
      build_phi(rc.grid, rc.lv_model, rc.bv_model, rc.nat);
  std::vector<QTable> tables;
  for (std::size_t i = 0; i < rc.surrogates.size(); ++i) {
    GridChainEnv env(rc.grid, rc.surrogates[i], phi);
    DpStats stats;
    QTable q =
        backward_induction_q(env, rc.adate.gamma, rc.sm_horizon, rc.dp, &stats);
    q.config_hash = rc.config_hash;
    q.seed = rc.seed;
    const std::string path = cli_detail::join_path(
        rc.out_dir, "sm_" + rc.surrogate_names[i] + ".qtab");
    q.save(path);
    std::printf("surrogate %s: %d sweeps, wrote %s\n",
                rc.surrogate_names[i].c_str(), stats.sweeps, path.c_str());
    tables.push_back(std::move(q));
  }
  if (with_oracle) {
    GridChainEnv env_av(rc.grid, rc.av, phi);
    QTable oracle =
        backward_induction_q(env_av, rc.adate.gamma, rc.sm_horizon, rc.dp);
    oracle.config_hash = rc.config_hash;
    oracle.seed = rc.seed;
    oracle.save(cli_detail::join_path(rc.out_dir, "oracle.qtab"));
    const ValueTable v_star = criticality(oracle, env_av);
    const CriticalSet sc =
        critical_set(cli_detail::table_ptrs(tables), env_av);
    const std::vector<CellIndex> bad = coverage_violations(v_star, sc);
    std::string report =
        "coverage violations (oracle-critical states invisible to the "
        "surrogate set): " +
        std::to_string(bad.size()) + "\n";
    report += "state_index,v_bv,r1,r1dot,r2,r2dot,v_oracle\n";
    for (CellIndex s : bad) {
      const ScenarioState st = rc.grid.center(s);
      report += std::to_string(s);
      for (double x : st.as_array()) {
        report += ',';
        report += fmt_double(x);
      }
      report += ',';
      report += fmt_double(v_star.at(s));
      report += '\n';
    }
    write_text_file(cli_detail::join_path(rc.out_dir, "coverage_report.txt"),
                    report);
    std::printf("coverage violations: %zu (coverage_report.txt)\n", bad.size());
  }
  return kExitOk;
}

// Exact value table for the configured AV itself.
inline int cmd_oracle(const RunConfig& rc) {
  cli_detail::ensure_out_dir(rc);
  GridChainEnv env = cli_detail::make_av_env(rc);
  DpStats stats;
  QTable q =
      backward_induction_q(env, rc.adate.gamma, rc.sm_horizon, rc.dp, &stats);
  q.config_hash = rc.config_hash;
  q.seed = rc.seed;
  const std::string path = cli_detail::join_path(rc.out_dir, "oracle.qtab");
  q.save(path);
  const ValueTable v = criticality(q, env);
  const std::vector<CellIndex> init = init_cells(rc.grid, rc.init);
  double mu = 0.0;
  for (CellIndex s : init) mu += v.at(s);
  mu /= static_cast<double>(init.size());
  std::printf("oracle: %d sweeps, mean criticality over %zu init cells = %s, "
              "wrote %s\n",
              stats.sweeps, init.size(), fmt_double(mu).c_str(), path.c_str());
  return kExitOk;
}

inline int cmd_adate(const RunConfig& rc) {
  cli_detail::ensure_out_dir(rc);
  const std::vector<QTable> tables = cli_detail::load_sm_tables(rc);
  const std::vector<const QTable*> ptrs = cli_detail::table_ptrs(tables);
  GridChainEnv env = cli_detail::make_av_env(rc);
  const CriticalSet sc = critical_set(ptrs, env);
  if (sc.cells.empty()) {
    throw ArtifactError(
        "critical set is empty: the surrogate tables see no crash risk "
        "anywhere on this grid");
  }
  const AdateResult res = adate_generate(ptrs, env, sc, rc.adate);

  write_text_file(cli_detail::join_path(rc.out_dir, "alpha_history.csv"),
                  write_alpha_history_csv(res.history));
  write_text_file(cli_detail::join_path(rc.out_dir, "alpha_final.json"),
                  write_alpha_final_json(res, rc.seed, rc.config_hash));
  QTable lq = res.learner.q;
  lq.config_hash = rc.config_hash;
  lq.seed = rc.seed;
  lq.save(cli_detail::join_path(rc.out_dir, "learner_q.qtab"));
  QTable ln = lq;
  for (std::size_t i = 0; i < ln.values.size(); ++i) {
    ln.values[i] = static_cast<double>(res.learner.n[i]);
  }
  ln.save(cli_detail::join_path(rc.out_dir, "learner_n.qtab"), 1);
  const double linf = linf_to_mixture(res.learner, ptrs, res.alpha.alpha);
  write_text_file(cli_detail::join_path(rc.out_dir, "learner.json"),
                  write_learner_json(res.learner, linf, rc.seed,
                                     rc.config_hash));
  std::printf("adate: %llu episodes, %d coefficient updates, terminated by "
              "%s, alpha = [",
              static_cast<unsigned long long>(res.episodes),
              res.history.size(), res.terminated_by.c_str());
  for (std::size_t i = 0; i < res.alpha.alpha.size(); ++i) {
    std::printf("%s%s", i ? ", " : "", fmt_double(res.alpha.alpha[i]).c_str());
  }
  std::printf("]\n");
  return res.terminated_by == "asd" ? kExitOk : kExitNoConverge;
}

inline EnvKind parse_env_kind(const std::string& s) {
  if (s == "nde") return EnvKind::kNde;
  if (s == "nade") return EnvKind::kNade;
  if (s == "adate") return EnvKind::kAdate;
  throw ConfigError("config: campaign.env: expected nde|nade|adate, got '" + s +
                    "'");
}

inline int cmd_test(const RunConfig& rc, EnvKind kind) {
  cli_detail::ensure_out_dir(rc);
  GridChainEnv env = cli_detail::make_av_env(rc);
  const std::vector<CellIndex> init = init_cells(rc.grid, rc.init);

  std::vector<QTable> tables;
  std::vector<const QTable*> ptrs;
  std::optional<CriticalSet> sc;
  std::optional<IsPolicyPack> pack;
  std::vector<double> alpha;
  if (kind != EnvKind::kNde) {
    tables = cli_detail::load_sm_tables(rc);
    ptrs = cli_detail::table_ptrs(tables);
    sc = critical_set(ptrs, env);
    if (kind == EnvKind::kNade) {
      alpha.assign(tables.size(), 1.0 / static_cast<double>(tables.size()));
    } else {
      const std::string path =
          cli_detail::join_path(rc.out_dir, "alpha_final.json");
      if (!std::filesystem::exists(path)) {
        throw ArtifactError("missing " + path + " (run the adate command first)");
      }
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text_file(path));
        alpha = j.at("alpha").get<std::vector<double>>();
      } catch (const std::exception& e) {
        throw ArtifactError("cannot parse " + path + ": " + e.what());
      }
      if (alpha.size() != tables.size()) {
        throw ArtifactError(path + " has " + std::to_string(alpha.size()) +
                            " coefficients but the config lists " +
                            std::to_string(tables.size()) + " surrogates");
      }
    }
    pack = build_is_pack(ptrs, alpha, env, *sc, rc.campaign.epsilon);
  }

  const std::string label = std::string("campaign.") + to_string(kind);
  const std::vector<WeightedSample> samples =
      run_campaign(env, init, pack ? &*pack : nullptr, rc.campaign.episodes,
                   rc.seed, label, rc.threads);
  const Estimate est = estimate(samples, rc.campaign.confidence);
  const auto required =
      required_tests(samples, rc.campaign.rhw_threshold, rc.campaign.n_min,
                     rc.campaign.confidence);
  Rng boot_rng = make_rng(rc.seed, std::string("bootstrap.") + to_string(kind));
  const BootstrapSummary boot = bootstrap_required_tests(
      samples, rc.campaign.rhw_threshold, rc.campaign.n_min,
      rc.campaign.bootstrap_reps, boot_rng, rc.campaign.confidence);

  const std::string csv_name = std::string("campaign_") + to_string(kind) + ".csv";
  write_text_file(cli_detail::join_path(rc.out_dir, csv_name),
                  write_campaign_csv(samples, rc.campaign.confidence));
  write_text_file(
      cli_detail::join_path(rc.out_dir,
                            std::string("summary_") + to_string(kind) + ".json"),
      write_summary_json(kind, est, required, &boot, rc.seed, rc.config_hash,
                         csv_name));
  std::printf(
      "%s: n=%zu mu=%s rhw=%s required=%s bootstrap_mean=%s unreached=%zu\n",
      to_string(kind), est.n, fmt_double(est.mu).c_str(),
      fmt_double(est.rhw).c_str(),
      required ? std::to_string(*required).c_str() : "none",
      fmt_double(boot.mean).c_str(), boot.unreached);
  return kExitOk;
}

struct SummaryRow {
  std::string path;
  std::string env;
  std::uint64_t n = 0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double rhw = std::numeric_limits<double>::infinity();
  std::optional<std::uint64_t> required;
  std::optional<double> bootstrap_mean;
  std::string config_hash;
  std::string campaign_csv;
};

inline SummaryRow parse_summary(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ArtifactError("missing summary file: " + path);
  }
  SummaryRow row;
  row.path = path;
  try {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    row.env = j.at("env").get<std::string>();
    row.n = j.at("n").get<std::uint64_t>();
    row.mu = j.at("mu").get<double>();
    row.sigma2 = j.at("sigma2").get<double>();
    if (!j.at("rhw").is_null()) row.rhw = j.at("rhw").get<double>();
    if (!j.at("required_tests").is_null()) {
      row.required = j.at("required_tests").get<std::uint64_t>();
    }
    if (j.contains("bootstrap")) {
      row.bootstrap_mean = j.at("bootstrap").at("mean").get<double>();
    }
    row.config_hash = j.at("config_hash").get<std::string>();
    row.campaign_csv = j.value("campaign_csv", "");
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError("cannot parse summary " + path + ": " + e.what());
  }
  return row;
}

// Side-by-side comparison of campaign summaries. Acceleration ratios are
// computed against the NDE row's required-test count (bootstrap mean when
// available); mixed config hashes are flagged, never silently compared.
inline int cmd_report(const std::vector<std::string>& summary_paths,
                      const std::string& out_dir) {
  if (summary_paths.empty()) {
    throw ConfigError("report: needs at least one summary file");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw ArtifactError("cannot create output directory " + out_dir + ": " +
                        ec.message());
  }
  std::vector<SummaryRow> rows;
  for (const auto& p : summary_paths) rows.push_back(parse_summary(p));

  const std::string& base_hash = rows[0].config_hash;
  const SummaryRow* nde = nullptr;
  for (const auto& r : rows) {
    if (r.env == "nde") {
      nde = &r;
      break;
    }
  }
  auto required_of = [](const SummaryRow& r) -> std::optional<double> {
    if (r.bootstrap_mean) return *r.bootstrap_mean;
    if (r.required) return static_cast<double>(*r.required);
    return std::nullopt;
  };

  std::string csv =
      "env,n,mu,sigma2,rhw,required_tests,bootstrap_mean_required,aar,"
      "aar_ratio,warning\n";
  std::string txt = "env      n          mu            rhw       required   "
                    "aar   warning\n";
  bool mixed = false;
  for (const auto& r : rows) {
    std::string warning;
    if (r.config_hash != base_hash) {
      warning = "config-mismatch";
      mixed = true;
    }
    std::string aar_s = "null";
    std::string ratio_s = "null";
    const auto mine = required_of(r);
    if (nde && mine) {
      const auto base = required_of(*nde);
      if (base && *mine > 0.0) {
        const AarResult a = aar(*base, *mine);
        aar_s = std::to_string(a.rounded);
        ratio_s = fmt_double(a.ratio);
      }
    }
    csv += r.env + "," + std::to_string(r.n) + "," + fmt_double(r.mu) + "," +
           fmt_double(r.sigma2) + "," + fmt_double(r.rhw) + "," +
           (r.required ? std::to_string(*r.required) : "null") + "," +
           (r.bootstrap_mean ? fmt_double(*r.bootstrap_mean) : "null") + "," +
           aar_s + "," + ratio_s + "," + warning + "\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-8s %-10llu %-13.6g %-9.4g %-10s %-5s %s\n",
                  r.env.c_str(), static_cast<unsigned long long>(r.n), r.mu,
                  r.rhw,
                  r.required ? std::to_string(*r.required).c_str() : "none",
                  aar_s.c_str(), warning.c_str());
    txt += line;

    if (!r.campaign_csv.empty()) {
      const std::string csv_path =
          (std::filesystem::path(r.path).parent_path() / r.campaign_csv)
              .string();
      if (std::filesystem::exists(csv_path)) {
        const std::string body = read_text_file(csv_path);
        std::string curve = "episode_index,running_rhw\n";
        std::size_t pos = body.find('\n');
        pos = pos == std::string::npos ? body.size() : pos + 1;
        while (pos < body.size()) {
          std::size_t nl = body.find('\n', pos);
          if (nl == std::string::npos) nl = body.size();
          const std::string line_s = body.substr(pos, nl - pos);
          pos = nl + 1;
          const std::size_t first = line_s.find(',');
          const std::size_t last = line_s.rfind(',');
          if (first == std::string::npos || last <= first) continue;
          curve += line_s.substr(0, first) + "," + line_s.substr(last + 1) + "\n";
        }
        write_text_file((std::filesystem::path(out_dir) /
                         ("rhw_curve_" + r.env + ".csv"))
                            .string(),
                        curve);
      }
    }
  }
  write_text_file((std::filesystem::path(out_dir) / "report.csv").string(), csv);
  write_text_file((std::filesystem::path(out_dir) / "report.txt").string(), txt);
  std::fputs(txt.c_str(), stdout);
  if (mixed) {
    std::fputs("warning: summaries come from different configurations\n",
               stderr);
  }
  return kExitOk;
}

}  // namespace adate
