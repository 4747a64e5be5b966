#pragma once

// Tabular and JSON serialization of protocol reports.
//
// CSV is canonical: a fixed 14-column layout whose numbers use the shortest
// round-trip decimal form, so identical runs give byte-identical files. The
// JSON object mirrors the CSV row field for field.

#include <array>
#include <string>
#include <string_view>

#include "tdfr/protocol.hpp"

namespace tdfr {

inline constexpr std::array<std::string_view, 14> kReportColumns = {
    "scenario_id", "pipeline", "dim",      "beta",     "alpha_final",        "tau_total",   "mean_work",
    "delta_F",     "lhs",      "rhs",      "residual", "entropy_production", "final_basis", "steps"};

std::string format_number(double x);

/// Header line (with trailing newline).
std::string csv_header();
/// One data line (with trailing newline).
std::string to_csv_row(const ProtocolReport& r);
std::string to_json(const ProtocolReport& r);

/// `w,prob` table of the report's work atoms.
std::string atoms_csv(const ProtocolReport& r);

/// `samples,seed,estimate,std_error,exact` table with one row.
std::string monte_carlo_csv(const MonteCarloSummary& mc);

}  // namespace tdfr
