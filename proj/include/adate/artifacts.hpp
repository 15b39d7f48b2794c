#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adate/campaign.hpp"
#include "adate/densrl.hpp"
#include "adate/io.hpp"
#include "adate/mixture.hpp"
#include "adate/version.hpp"

namespace adate {

// All artifact text is produced here with one number formatter and fixed key
// order, so a rerun with the same seed and config is byte-identical.

inline std::string write_alpha_history_csv(const CoefficientHistory& h) {
  std::string out = "k";
  const std::size_t j = h.alphas.empty() ? 0 : h.alphas[0].alpha.size();
  for (std::size_t i = 1; i <= j; ++i) {
    out += ",alpha_" + std::to_string(i);
  }
  out += ",asd\n";
  for (int k = 1; k <= h.size(); ++k) {
    out += std::to_string(k);
    for (double a : h.alphas[static_cast<std::size_t>(k - 1)].alpha) {
      out += ',';
      out += fmt_double(a);
    }
    out += ',';
    out += fmt_double(h.asd_values[static_cast<std::size_t>(k - 1)]);
    out += '\n';
  }
  return out;
}

inline std::string write_alpha_final_json(const AdateResult& res,
                                          std::uint64_t seed,
                                          std::uint64_t config_hash) {
  std::string out = "{\n  \"alpha\": [";
  for (std::size_t i = 0; i < res.alpha.alpha.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(res.alpha.alpha[i]);
  }
  out += "],\n";
  out += "  \"config_hash\": \"" + fmt_hex64(config_hash) + "\",\n";
  out += "  \"episodes\": " + std::to_string(res.episodes) + ",\n";
  out += "  \"iterations\": " + std::to_string(res.history.size()) + ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"terminated_by\": \"" + res.terminated_by + "\",\n";
  out += std::string("  \"tool_version\": \"") + kVersionString + "\"\n";
  out += "}\n";
  return out;
}

inline std::string write_campaign_csv(const std::vector<WeightedSample>& samples,
                                      double confidence) {
  const double z = normal_quantile_two_sided(confidence);
  std::string out = "episode_index,crash,weight,term,running_mu,running_rhw\n";
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = samples[i].term();
    sum += t;
    sumsq += t * t;
    const double n = static_cast<double>(i + 1);
    const double mu = sum / n;
    double rhw = std::numeric_limits<double>::infinity();
    if (mu > 0.0 && i > 0) {
      const double var = std::max(0.0, (sumsq - n * mu * mu) / (n - 1.0));
      rhw = z * std::sqrt(var) / (std::sqrt(n) * mu);
    }
    out += std::to_string(i);
    out += ',';
    out += fmt_double(samples[i].crash);
    out += ',';
    out += fmt_double(samples[i].weight);
    out += ',';
    out += fmt_double(t);
    out += ',';
    out += fmt_double(mu);
    out += ',';
    out += fmt_double(rhw);
    out += '\n';
  }
  return out;
}

inline std::string write_summary_json(
    EnvKind kind, const Estimate& est,
    const std::optional<std::size_t>& required,
    const BootstrapSummary* bootstrap, std::uint64_t seed,
    std::uint64_t config_hash, const std::string& campaign_csv_name) {
  std::string out = "{\n";
  if (bootstrap) {
    out += "  \"bootstrap\": {\n";
    out += "    \"max\": " + std::to_string(bootstrap->max) + ",\n";
    out += "    \"mean\": " + fmt_double(bootstrap->mean) + ",\n";
    out += "    \"min\": " + std::to_string(bootstrap->min) + ",\n";
    out += "    \"reps\": " +
           std::to_string(bootstrap->values.size() + bootstrap->unreached) +
           ",\n";
    out += "    \"unreached\": " + std::to_string(bootstrap->unreached) + "\n";
    out += "  },\n";
  }
  out += "  \"campaign_csv\": \"" + campaign_csv_name + "\",\n";
  out += "  \"config_hash\": \"" + fmt_hex64(config_hash) + "\",\n";
  out += std::string("  \"env\": \"") + to_string(kind) + "\",\n";
  out += "  \"mu\": " + fmt_double(est.mu) + ",\n";
  out += "  \"n\": " + std::to_string(est.n) + ",\n";
  out += "  \"required_tests\": " +
         (required ? std::to_string(*required) : std::string("null")) + ",\n";
  out += "  \"rhw\": " + (std::isfinite(est.rhw) ? fmt_double(est.rhw)
                                                 : std::string("null")) +
         ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"sigma2\": " + fmt_double(est.sigma2) + ",\n";
  out += std::string("  \"tool_version\": \"") + kVersionString + "\"\n";
  out += "}\n";
  return out;
}

inline std::string write_learner_json(const LearnerState& L, double linf,
                                      std::uint64_t seed,
                                      std::uint64_t config_hash) {
  std::string out = "{\n";
  out += "  \"c\": " + fmt_double(L.c) + ",\n";
  out += "  \"config_hash\": \"" + fmt_hex64(config_hash) + "\",\n";
  out += "  \"episodes\": " + std::to_string(L.episodes) + ",\n";
  out += "  \"gamma\": " + fmt_double(L.gamma) + ",\n";
  out += "  \"linf_to_mixture\": " + fmt_double(linf) + ",\n";
  out += "  \"omega\": " + fmt_double(L.omega) + ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"steps\": " + std::to_string(L.total_steps) + ",\n";
  out += std::string("  \"tool_version\": \"") + kVersionString + "\"\n";
  out += "}\n";
  return out;
}

}  // namespace adate
