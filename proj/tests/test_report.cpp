#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "tdfr/protocol.hpp"
#include "tdfr/report.hpp"
#include "tdfr/scenarios.hpp"

using namespace tdfr;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string strip_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.0, 1.0, -0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.2250738585072014e-308,
                   0.25031350734645631}) {
    const std::string s = format_number(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("csv layout") {
  CHECK(csv_header() ==
        "scenario_id,pipeline,dim,beta,alpha_final,tau_total,mean_work,delta_F,lhs,rhs,residual,"
        "entropy_production,final_basis,steps\n");

  ProtocolReport r;
  r.scenario_id = "demo";
  r.pipeline = Pipeline::Appendix;
  r.dim = 3;
  r.beta = 0.5;
  r.alpha_final = 1.25;
  r.tau_total = 2.0;
  r.mean_work = -0.125;
  r.delta_F = 0.75;
  r.lhs = 1.0;
  r.rhs = 1.0;
  r.residual = 0.0;
  r.entropy_production = 1e-17;
  r.final_basis = FinalBasis::Instantaneous;
  r.steps = 400;
  CHECK(to_csv_row(r) == "demo,appendix,3,0.5,1.25,2,-0.125,0.75,1,1,0,1e-17,instantaneous,400\n");

  r.final_basis.reset();
  r.pipeline = Pipeline::Flat;
  const auto cells = split(strip_newline(to_csv_row(r)));
  CHECK(cells.size() == kReportColumns.size());
  CHECK(cells[12] == "none");
}

TEST_CASE("every emitted row has 14 columns") {
  for (const char* file : {"/comoving.json", "/oscillator_blue.json", "/amplitude_damping.json",
                           "/quench_schedule.json"}) {
    const ProtocolReport r = run_protocol(load_scenario_file(std::string(TDFR_TEST_DATA_DIR) + file));
    CHECK(split(strip_newline(to_csv_row(r))).size() == 14);
  }
}

TEST_CASE("json mirrors csv") {
  const ProtocolReport r = run_protocol(load_scenario_file(TDFR_TEST_DATA_DIR "/oscillator_blue.json"));
  const auto j = nlohmann::ordered_json::parse(to_json(r));
  const auto cells = split(strip_newline(to_csv_row(r)));
  REQUIRE(j.size() == kReportColumns.size());
  std::size_t k = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++k) {
    CHECK(it.key() == kReportColumns[k]);
    if (it->is_string()) {
      CHECK(it->get<std::string>() == cells[k]);
    } else {
      double from_csv = 0.0;
      std::from_chars(cells[k].data(), cells[k].data() + cells[k].size(), from_csv);
      CHECK(it->get<double>() == from_csv);
    }
  }
}

TEST_CASE("identical inputs give identical bytes") {
  const ScenarioConfig cfg = load_scenario_file(TDFR_TEST_DATA_DIR "/oscillator_blue.json");
  const ProtocolReport a = run_protocol(cfg);
  const ProtocolReport b = run_protocol(cfg);
  CHECK(to_csv_row(a) == to_csv_row(b));
  CHECK(to_json(a) == to_json(b));
  CHECK(atoms_csv(a) == atoms_csv(b));
  REQUIRE(a.monte_carlo.has_value());
  CHECK(monte_carlo_csv(*a.monte_carlo) == monte_carlo_csv(*b.monte_carlo));
}

TEST_CASE("side tables") {
  ProtocolReport r;
  r.work_atoms = {{-0.5, 0.25}, {0.5, 0.75}};
  CHECK(atoms_csv(r) == "w,prob\n-0.5,0.25\n0.5,0.75\n");
  const MonteCarloSummary mc{.samples = 10, .seed = 3, .estimate = 1.5, .std_error = 0.25, .exact = 1.25};
  CHECK(monte_carlo_csv(mc) == "samples,seed,estimate,std_error,exact\n10,3,1.5,0.25,1.25\n");
}
