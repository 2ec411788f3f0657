// ringbdg <command> --config <file> [--out <dir>] [--seed <u64>] [--preset <name>]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ringbdg/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  using nlohmann::json;

  CLI::App app{"Two-ring BEC spectra, dynamics and double-well splitting"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::uint64_t seed = 0;

  std::string commands;
  for (auto c : {"spectrum", "stability-map", "evolve", "dwell-solve", "dwell-sweep"})
    commands += std::string(commands.empty() ? "" : "|") + c;
  app.add_option("command", command, commands)->required();
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides seed)");
  std::string presets;
  for (const auto& p : ringbdg::preset_names()) presets += (presets.empty() ? "" : ", ") + p;
  app.add_option("--preset", preset, "embedded configuration: " + presets);
  CLI11_PARSE(app, argc, argv);

  try {
    if (!ringbdg::parse_command(command)) {
      std::cerr << "error: unknown command \"" << command << "\" (expected " << commands << ")\n";
      return 2;
    }
    if (config_path.empty() && preset.empty()) {
      std::cerr << "error: one of --config or --preset is required\n";
      return 2;
    }

    json doc = json::object();
    if (!preset.empty()) {
      auto p = ringbdg::preset_document(preset);
      if (!p) {
        std::cerr << "error: unknown preset \"" << preset << "\" (available: " << presets << ")\n";
        return 2;
      }
      doc = *p;
    }
    if (!config_path.empty()) {
      const json file_doc = ringbdg::parse_document(read_file(config_path));
      if (!file_doc.is_object()) throw ringbdg::ConfigError("", "top level must be a JSON object");
      doc.update(file_doc);
    }
    if (!doc.contains("command")) doc["command"] = command;
    if (doc["command"] != command) {
      std::cerr << "error: command \"" << command << "\" does not match configuration command "
                << doc["command"] << "\n";
      return 2;
    }

    auto config = ringbdg::config_from_json(doc);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (*seed_opt) config.seed = seed;
    config.echo["output_dir"] = config.output_dir.string();
    config.echo["seed"] = config.seed;
    if (!preset.empty()) config.echo["preset"] = preset;

    const auto manifest = ringbdg::run(config);
    for (const auto& o : manifest.outputs) std::cout << (config.output_dir / o.file).string() << "\n";
    if (!manifest.ok) {
      std::cerr << "run finished with errors; see " << (config.output_dir / "manifest.json").string()
                << "\n";
      if (!manifest.error.is_null()) std::cerr << "error: " << manifest.error["message"] << "\n";
      for (const auto& f : manifest.failures) std::cerr << "failure: " << f.dump() << "\n";
      return 1;
    }
    return 0;
  } catch (const ringbdg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
