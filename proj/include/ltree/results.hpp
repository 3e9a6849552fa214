#pragma once

#include "ltree/experiment.hpp"

#include <iosfwd>
#include <string>

namespace ltree {

/// Flat table: m,trial,kl_em,kl_prior,kl_oracle,iterations,stop_reason
void write_results_csv(std::ostream& out, const SweepResult& result);

/// JSON document with a `meta` section (config echo, tool version, seed,
/// SNR definition, failures) and a `data` section (column names, the full
/// per-trial table, per-m aggregates). `timestamp` lands in
/// meta.generated_at and is omitted when empty.
void write_results_json(std::ostream& out, const SweepResult& result,
                        const std::string& csv_name = {},
                        const std::string& timestamp = {});

/// Writes <stem>.json and <stem>.csv. Throws ErrorCode::Io naming the path.
void emit_results(const SweepResult& result, const std::string& stem);

std::string utc_timestamp();

}  // namespace ltree
