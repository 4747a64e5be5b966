#include "tdfr/report.hpp"

#include <fmt/format.h>

#include "json.hpp"

namespace tdfr {

std::string format_number(double x) { return fmt::format("{}", x); }

namespace {

std::string basis_label(const ProtocolReport& r) {
  return r.final_basis ? std::string(to_string(*r.final_basis)) : std::string("none");
}

}  // namespace

std::string csv_header() {
  std::string out;
  for (std::size_t k = 0; k < kReportColumns.size(); ++k) {
    if (k > 0) out += ',';
    out += kReportColumns[k];
  }
  out += '\n';
  return out;
}

std::string to_csv_row(const ProtocolReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario_id, to_string(r.pipeline),
                     r.dim, format_number(r.beta), format_number(r.alpha_final),
                     format_number(r.tau_total), format_number(r.mean_work), format_number(r.delta_F),
                     format_number(r.lhs), format_number(r.rhs), format_number(r.residual),
                     format_number(r.entropy_production), basis_label(r), r.steps);
}

std::string to_json(const ProtocolReport& r) {
  nlohmann::ordered_json j;
  j["scenario_id"] = r.scenario_id;
  j["pipeline"] = std::string(to_string(r.pipeline));
  j["dim"] = r.dim;
  j["beta"] = r.beta;
  j["alpha_final"] = r.alpha_final;
  j["tau_total"] = r.tau_total;
  j["mean_work"] = r.mean_work;
  j["delta_F"] = r.delta_F;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["residual"] = r.residual;
  j["entropy_production"] = r.entropy_production;
  j["final_basis"] = basis_label(r);
  j["steps"] = r.steps;
  return j.dump(2) + "\n";
}

std::string atoms_csv(const ProtocolReport& r) {
  std::string out = "w,prob\n";
  for (const auto& a : r.work_atoms) {
    out += format_number(a.w) + "," + format_number(a.prob) + "\n";
  }
  return out;
}

std::string monte_carlo_csv(const MonteCarloSummary& mc) {
  return fmt::format("samples,seed,estimate,std_error,exact\n{},{},{},{},{}\n", mc.samples, mc.seed,
                     format_number(mc.estimate), format_number(mc.std_error), format_number(mc.exact));
}

}  // namespace tdfr
