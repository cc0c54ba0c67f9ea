#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "incdist/fit.hpp"

namespace incdist::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct FitArgs {
  std::filesystem::path input;
  int degree = 2;
  Transform transform = Transform::linear;
  std::filesystem::path output;
  std::optional<std::filesystem::path> plot;
  std::optional<std::filesystem::path> cpi;
  std::optional<int> cpi_base_year;
};

struct RoundtripArgs {
  std::optional<std::filesystem::path> fixtures;  // embedded table if unset
  double tolerance = 1e-6;
};

struct SampleArgs {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double p_low = 10.0;
  double p_high = 100.0;
  std::filesystem::path output;
  std::optional<std::filesystem::path> report;  // <output>.report.json if unset
};

struct FiguresArgs {
  std::filesystem::path output_dir;
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmd_roundtrip(const RoundtripArgs& args, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleArgs& args, std::ostream& out, std::ostream& err);
int cmd_figures(const FiguresArgs& args, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and dispatches to a command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Plot file for one of `count` series written under `base`.
/// A single series uses `base` as is; otherwise the series label is
/// inserted before the extension.
std::filesystem::path plot_path_for(const std::filesystem::path& base,
                                    const SeriesMeta& meta, std::size_t count);

}  // namespace incdist::cli
