#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ringbdg/double_well.hpp"
#include "ringbdg/ring_model.hpp"

namespace ringbdg {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Command { kSpectrum, kStabilityMap, kEvolve, kDwellSolve, kDwellSweep };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

struct SpectrumConfig {
  RingParams ring;
  Parity parity = Parity::kAntisymmetric;
  int m_max = 6;
};

struct StabilityMapConfig {
  double eps_min = 0.0;
  double eps_max = 10.0;
  int eps_steps = 100;
  double kappa_min = 0.0;
  double kappa_max = 10.0;
  int kappa_steps = 100;
  int kappa_sign = -1;
  Parity parity = Parity::kAntisymmetric;
  int m_max = 6;
};

struct EvolveConfig {
  RingParams ring;
  Parity parity = Parity::kAntisymmetric;
  int n_points = 128;
  double dt = 1e-4;
  double tau_max = 10.0;
  int record_every = 100;
  double noise = 1e-4;
  std::vector<int> modes{1, 2, 3};
};

struct DwellSolveConfig {
  DWellParams base;
  std::vector<double> g_values;
  std::vector<Parity> parities;
  SolveOptions solver;
};

struct DwellSweepConfig {
  DWellParams base;  // h overridden per curve
  std::vector<double> h_values;
  std::vector<double> g_values;
  SolveOptions solver;
};

using CommandConfig =
    std::variant<SpectrumConfig, StabilityMapConfig, EvolveConfig, DwellSolveConfig, DwellSweepConfig>;

struct RunConfig {
  Command command = Command::kSpectrum;
  CommandConfig params;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
  // Every key with its effective value, defaults included.
  nlohmann::json echo;
};

// Names the offending key (empty for syntax errors) and, for syntax errors,
// the 1-based line and column.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message, int line = 0, int column = 0);
  const std::string& key() const { return key_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

// JSON syntax check; errors carry the 1-based line and column.
nlohmann::json parse_document(std::string_view text);

// Parses a JSON document in the documented schema and fills defaults.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json& doc);

// Embedded presets: "fig1", "fig2", "paper-instability", "paper-spectrum".
std::optional<nlohmann::json> preset_document(std::string_view name);
std::vector<std::string> preset_names();

struct OutputRecord {
  std::string file;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string version{kToolVersion};
  std::string started_at;
  std::string finished_at;
  std::vector<OutputRecord> outputs;
  bool ok = true;
  nlohmann::json error;     // null when ok
  nlohmann::json failures;  // per-item failures that did not abort the run

  nlohmann::json to_json() const;
};

// Runs the configured computation, writes CSV/JSON outputs into
// config.output_dir and writes manifest.json last.
RunManifest run(const RunConfig& config);

std::string sha256_hex(std::string_view data);
// %.17g rendering; "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double v);

}  // namespace ringbdg
