#ifndef GABDEN_RUNNER_HPP
#define GABDEN_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace gabden {

enum class Command { stft, density, bounds, verify, report };

Command parse_command(const std::string& name);
std::string to_string(Command c);

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitHypothesis = 2;
inline constexpr int kExitVerification = 3;

struct RunConfig {
  Command command = Command::verify;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = "gabden-out";
  /// Overrides every seed in the config.
  std::optional<std::uint64_t> seed;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Reads and validates the whole config before anything is written, runs the
/// command, writes its artifacts plus manifest.json and returns the exit code:
/// 0 pass, 1 config error, 2 hypothesis failure, 3 verification failure.
int run(const RunConfig& config, std::ostream& log);

}  // namespace gabden

#endif  // GABDEN_RUNNER_HPP
