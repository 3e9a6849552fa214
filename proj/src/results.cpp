#include "ltree/results.hpp"

#include "ltree/csv.hpp"
#include "ltree/error.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace ltree {

namespace {

const char* const kColumns[] = {"m",        "trial",     "kl_em",     "kl_prior",
                                "kl_oracle", "iterations", "stop_reason"};

nlohmann::json stats_json(const ColumnStats& s) {
  return {{"mean", s.mean}, {"std_error", s.std_error}};
}

}  // namespace

void write_results_csv(std::ostream& out, const SweepResult& result) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    out << (i ? "," : "") << kColumns[i];
  }
  out << '\n';
  for (const auto& t : result.trials) {
    out << t.m << ',' << t.trial << ',' << format_double(t.kl_em) << ','
        << format_double(t.kl_prior) << ',' << format_double(t.kl_oracle) << ','
        << t.iterations << ',' << to_string(t.stop_reason) << '\n';
  }
}

void write_results_json(std::ostream& out, const SweepResult& result,
                        const std::string& csv_name, const std::string& timestamp) {
  using nlohmann::json;
  json config = json::object();
  for (const auto& [k, v] : result.config.entries()) config[k] = v;

  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"m", f.m}, {"trial", f.trial}, {"error", f.message}});
  }

  json meta = {
      {"tool", "ltree"},
      {"version", LTREE_VERSION},
      {"seed", result.config.seed},
      {"config", config},
      {"snr_definition", "10*log10(tr(H Sigma H^T) / tr(D)), D = sigma^2 I"},
      {"kl_units", "nats"},
      {"completed_trials", result.trials.size()},
      {"failed_trials", result.failures.size()},
      {"failures", failures},
  };
  if (!timestamp.empty()) meta["generated_at"] = timestamp;

  json rows = json::array();
  for (const auto& t : result.trials) {
    rows.push_back({t.m, t.trial, t.kl_em, t.kl_prior, t.kl_oracle, t.iterations,
                    to_string(t.stop_reason)});
  }
  json summary = json::array();
  for (const auto& s : result.summaries) {
    summary.push_back({{"m", s.m},
                       {"completed", s.completed},
                       {"failed", s.failed},
                       {"kl_em", stats_json(s.kl_em)},
                       {"kl_prior", stats_json(s.kl_prior)},
                       {"kl_oracle", stats_json(s.kl_oracle)},
                       {"iterations", stats_json(s.iterations)}});
  }
  json data = {{"columns", kColumns}, {"rows", rows}, {"summary", summary}};
  if (!csv_name.empty()) data["csv"] = csv_name;

  out << json{{"meta", meta}, {"data", data}}.dump(2) << '\n';
}

void emit_results(const SweepResult& result, const std::string& stem) {
  const std::string csv_path = stem + ".csv";
  const std::string json_path = stem + ".json";
  {
    std::ofstream out(csv_path);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + csv_path + "' for writing");
    write_results_csv(out, result);
    if (!out) throw Error(ErrorCode::Io, "write to '" + csv_path + "' failed");
  }
  std::ofstream out(json_path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + json_path + "' for writing");
  write_results_json(out, result,
                     std::filesystem::path(csv_path).filename().string(),
                     utc_timestamp());
  if (!out) throw Error(ErrorCode::Io, "write to '" + json_path + "' failed");
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ltree
