#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdfr/verification.hpp"

namespace tdfr::cli {

enum class ExitCode : int { Ok = 0, VerifyFailed = 1, Validation = 2, Io = 3 };

enum class Format { Csv, Json };

struct SweepSpec {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;

  /// Linear grid with exact endpoints.
  std::vector<double> grid() const;
};

/// "param=start:stop:count". Throws ValidationError on syntax errors, an
/// unknown parameter or count < 2.
SweepSpec parse_sweep(const std::string& text);

struct RunManifest {
  std::vector<std::filesystem::path> scenarios;
  std::filesystem::path out_dir = "results";
  Format format = Format::Csv;
  std::optional<std::uint64_t> seed;  // overrides scenario seeds when set
  std::optional<SweepSpec> sweep;
  std::optional<std::size_t> steps;  // appendix pipeline override
  bool quiet = false;
  std::string version;
  std::string timestamp;  // ISO 8601 UTC, recorded in manifest.json only
};

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_verify(std::ostream& out, const VerifyOptions& opts = {});

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace tdfr::cli
