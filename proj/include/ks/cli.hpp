#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ks/density.hpp"
#include "ks/stieltjes.hpp"

namespace ks::cli {

enum class Command { Transform, KreinCheck, ClassBuild, ClassVerify, Example };
enum class Format { CSV, JSON };
enum class Spacing { Linear, LogSymmetric };
enum class LogLevel { Off, Info, Debug };

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kPrecondition = 2;
inline constexpr int kIoOrParse = 3;

// Bad configuration, unreadable input, malformed density spec.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double t_min = 1e-2;
  double t_max = 1e2;
  int count = 20;
  Spacing spacing = Spacing::LogSymmetric;
};

struct RunConfig {
  Command command = Command::Example;
  // Path, or inline JSON when the text starts with '{'.
  std::optional<std::string> density_spec;
  std::optional<std::string> family;  // odd-normal-power | abs-normal-power
  std::optional<int> n;
  std::optional<double> r;
  PerturbationKind kind = PerturbationKind::CosH;
  std::optional<GridSpec> grid;
  int max_order = 8;
  double tolerance = 1e-7;
  std::optional<std::string> output;
  std::optional<Format> format;
  bool force_numeric = false;
  LogLevel log_level = LogLevel::Off;
};

// "tmin,tmax,count[,log]". Throws ConfigError.
GridSpec parse_grid(const std::string& text);

// Linear: count points from t_min to t_max. LogSymmetric: real line gives
// count/2 log-spaced magnitudes in [t_min, t_max] mirrored about 0 (count
// even, 0 < t_min); half line keeps the count positive points.
std::vector<double> make_grid(const GridSpec& g, Support support);

// Density from a JSON spec (unknown fields rejected). Throws ConfigError.
Density parse_density_spec(const std::string& json_text);

// Parses argv (argv[0] is skipped). Throws ConfigError on bad usage; returns
// nullopt after printing help, with *exit_code set.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out,
                                    int* exit_code);

LogLevel log_level_from_env();

// Runs one command. Artifacts go to config.output (and a sibling
// ".members.csv" for class commands) or to `out` when no path is given.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run, with usage errors mapped to exit code 3.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace ks::cli
