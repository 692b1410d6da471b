#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mangrad::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kCheckFailed = 4 };

struct Options {
  std::string config_path;
  bool check = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

/// Entry point shared by the executable and the tests. argv[0] is ignored.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_rgd_run(const Options& opts, std::ostream& out);
int cmd_saddle_hitting(const Options& opts, std::ostream& out);
int cmd_ou_hitting(const Options& opts, std::ostream& out);
int cmd_design_verify(const Options& opts, std::ostream& out);
int cmd_stats_check(const Options& opts, std::ostream& out);

}  // namespace mangrad::cli
