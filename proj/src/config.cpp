#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ringbdg/cli.hpp"

namespace ringbdg {

using nlohmann::json;

namespace {

std::string describe(const std::string& key, const std::string& message) {
  if (key.empty()) return message;
  return key + ": " + message;
}

std::string at_position(const std::string& message, int line, int column) {
  if (line <= 0) return message;
  std::ostringstream os;
  os << message << " (line " << line << ", column " << column << ")";
  return os.str();
}

// Tracks which keys of the document have been consumed.
class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  bool has(const std::string& key) const { return doc_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return doc_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (!fallback) throw ConfigError(key, "required");
      return *fallback;
    }
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
    return d;
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
    if (!has(key)) {
      if (!fallback) throw ConfigError(key, "required");
      return *fallback;
    }
    return as_integer(key, raw(key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
  }

  // A number or an array of numbers.
  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback) {
    if (!has(key)) {
      if (!fallback) throw ConfigError(key, "required");
      return *fallback;
    }
    const json& v = raw(key);
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    } else {
      throw ConfigError(key, "expected a number or an array of numbers");
    }
    if (out.empty()) throw ConfigError(key, "must not be empty");
    for (double d : out)
      if (!std::isfinite(d)) throw ConfigError(key, "values must be finite");
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(key, "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : v) out.push_back(static_cast<int>(as_integer(key, e)));
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : doc_.items())
      if (!used_.count(key)) throw ConfigError(key, "unknown key");
  }

 private:
  static long as_integer(const std::string& key, const json& v) {
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long>(d);
    }
    throw ConfigError(key, "expected an integer");
  }

  const json& doc_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

int read_kappa_sign(Reader& r) {
  const long s = r.integer("kappa_sign", -1);
  require(s == -1 || s == 1, "kappa_sign", "must be -1 or +1");
  return static_cast<int>(s);
}

Parity read_parity(Reader& r, Parity fallback) {
  if (!r.has("parity")) return fallback;
  const std::string text = r.text("parity", "");
  try {
    return parse_parity(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError("parity", "expected \"symmetric\" or \"antisymmetric\"");
  }
}

RingParams read_ring(Reader& r, json& echo) {
  RingParams p;
  p.kappa_mag = r.number("kappa_mag", 0.0);
  require(p.kappa_mag >= 0.0, "kappa_mag", "must be >= 0");
  p.kappa_sign = read_kappa_sign(r);
  if (r.has("eps")) {
    require(!r.has("gamma") && !r.has("n0"), "eps", "give either eps or (gamma, n0), not both");
    p = RingParams::from_epsilon(r.number("eps"), p.kappa_mag, p.kappa_sign);
  } else if (r.has("gamma")) {
    p.gamma = r.number("gamma");
    p.n0 = r.number("n0", kTwoPi);
    require(p.n0 > 0.0, "n0", "must be > 0");
  } else {
    throw ConfigError("eps", "required (or gamma with optional n0)");
  }
  echo["kappa_mag"] = p.kappa_mag;
  echo["kappa_sign"] = p.kappa_sign;
  echo["gamma"] = p.gamma;
  echo["n0"] = p.n0;
  echo["eps"] = epsilon(p);
  return p;
}

void read_dwell_grid(Reader& r, DWellParams& p, json& echo) {
  p.xi0 = r.number("xi0", 5.0);
  require(p.xi0 > 0.0, "xi0", "must be > 0");
  const std::string pot = r.text("potential", "quartic");
  if (pot == "quartic")
    p.potential = PotentialKind::kQuarticDoubleWell;
  else if (pot == "harmonic")
    p.potential = PotentialKind::kHarmonic;
  else
    throw ConfigError("potential", "expected \"quartic\" or \"harmonic\"");

  const DWellParams standard = DWellParams::standard(p.xi0, 1.0, 0.0);
  p.half_length = r.number("half_length", standard.half_length);
  require(p.half_length > p.xi0, "half_length", "must exceed xi0");
  const long default_n = 2 * static_cast<long>(std::ceil(p.half_length / 0.01)) + 1;
  const long n = r.integer("n_grid", default_n);
  require(n >= 201 && n % 2 == 1, "n_grid", "must be odd and >= 201");
  p.n_grid = static_cast<int>(n);

  echo["xi0"] = p.xi0;
  echo["potential"] = pot;
  echo["half_length"] = p.half_length;
  echo["n_grid"] = p.n_grid;
}

void read_solver(Reader& r, SolveOptions& s, json& echo) {
  const std::string scheme = r.text("scheme", "backward-euler");
  if (scheme == "backward-euler")
    s.scheme = ImaginaryTimeScheme::kBackwardEuler;
  else if (scheme == "strang")
    s.scheme = ImaginaryTimeScheme::kStrangSplit;
  else
    throw ConfigError("scheme", "expected \"backward-euler\" or \"strang\"");
  s.dtau = r.number("dtau", s.dtau);
  require(s.dtau > 0.0, "dtau", "must be > 0");
  s.max_iterations = r.integer("max_iterations", s.max_iterations);
  require(s.max_iterations >= 1, "max_iterations", "must be >= 1");
  s.residual_tolerance = r.number("residual_tolerance", s.residual_tolerance);
  require(s.residual_tolerance > 0.0, "residual_tolerance", "must be > 0");
  echo["scheme"] = scheme;
  echo["dtau"] = s.dtau;
  echo["max_iterations"] = s.max_iterations;
  echo["residual_tolerance"] = s.residual_tolerance;
}

json parity_echo(Parity p) { return std::string(to_string(p)); }

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message, int line, int column)
    : std::runtime_error(at_position(describe(key, message), line, column)),
      key_(std::move(key)),
      line_(line),
      column_(column) {}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kSpectrum: return "spectrum";
    case Command::kStabilityMap: return "stability-map";
    case Command::kEvolve: return "evolve";
    case Command::kDwellSolve: return "dwell-solve";
    case Command::kDwellSweep: return "dwell-sweep";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::kSpectrum, Command::kStabilityMap, Command::kEvolve,
                    Command::kDwellSolve, Command::kDwellSweep})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

json parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("", std::string("syntax error: ") + e.what(), line, column);
  }
  return doc;
}

RunConfig parse_config(std::string_view text) { return config_from_json(parse_document(text)); }

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "top level must be a JSON object");
  Reader r(doc);
  RunConfig cfg;
  json echo;

  const std::string name = r.text("command", "");
  if (name.empty()) throw ConfigError("command", "required");
  const auto command = parse_command(name);
  if (!command) throw ConfigError("command", "unknown command \"" + name + "\"");
  cfg.command = *command;
  echo["command"] = name;

  if (r.has("seed")) {
    const json& s = r.raw("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      throw ConfigError("seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  echo["seed"] = cfg.seed;
  cfg.output_dir = r.text("output_dir", ".");
  echo["output_dir"] = cfg.output_dir.string();

  switch (cfg.command) {
    case Command::kSpectrum: {
      SpectrumConfig c;
      c.ring = read_ring(r, echo);
      c.parity = read_parity(r, Parity::kSymmetric);
      c.m_max = static_cast<int>(r.integer("m_max", c.m_max));
      require(c.m_max >= 1, "m_max", "must be >= 1");
      echo["parity"] = parity_echo(c.parity);
      echo["m_max"] = c.m_max;
      cfg.params = c;
      break;
    }
    case Command::kStabilityMap: {
      StabilityMapConfig c;
      c.eps_min = r.number("eps_min", c.eps_min);
      c.eps_max = r.number("eps_max", c.eps_max);
      require(c.eps_max >= c.eps_min, "eps_max", "must be >= eps_min");
      c.eps_steps = static_cast<int>(r.integer("eps_steps", c.eps_steps));
      require(c.eps_steps >= 1, "eps_steps", "must be >= 1");
      c.kappa_min = r.number("kappa_min", c.kappa_min);
      require(c.kappa_min >= 0.0, "kappa_min", "must be >= 0");
      c.kappa_max = r.number("kappa_max", c.kappa_max);
      require(c.kappa_max >= c.kappa_min, "kappa_max", "must be >= kappa_min");
      c.kappa_steps = static_cast<int>(r.integer("kappa_steps", c.kappa_steps));
      require(c.kappa_steps >= 1, "kappa_steps", "must be >= 1");
      c.kappa_sign = read_kappa_sign(r);
      c.parity = read_parity(r, Parity::kAntisymmetric);
      c.m_max = static_cast<int>(r.integer("m_max", c.m_max));
      require(c.m_max >= 1, "m_max", "must be >= 1");
      echo.update(json{{"eps_min", c.eps_min}, {"eps_max", c.eps_max}, {"eps_steps", c.eps_steps},
                       {"kappa_min", c.kappa_min}, {"kappa_max", c.kappa_max},
                       {"kappa_steps", c.kappa_steps}, {"kappa_sign", c.kappa_sign},
                       {"parity", parity_echo(c.parity)}, {"m_max", c.m_max}});
      cfg.params = c;
      break;
    }
    case Command::kEvolve: {
      EvolveConfig c;
      c.ring = read_ring(r, echo);
      c.parity = read_parity(r, Parity::kAntisymmetric);
      const long n = r.integer("n_points", c.n_points);
      require(n >= 16 && (n & (n - 1)) == 0, "n_points", "must be a power of two >= 16");
      c.n_points = static_cast<int>(n);
      c.dt = r.number("dt", c.dt);
      require(c.dt > 0.0, "dt", "must be > 0");
      c.tau_max = r.number("tau_max", c.tau_max);
      require(c.tau_max > 0.0, "tau_max", "must be > 0");
      c.record_every = static_cast<int>(r.integer("record_every", c.record_every));
      require(c.record_every >= 1, "record_every", "must be >= 1");
      c.noise = r.number("noise", c.noise);
      require(c.noise >= 0.0, "noise", "must be >= 0");
      c.modes = r.integers("modes", c.modes);
      for (int m : c.modes)
        require(m >= 1 && m < c.n_points / 2, "modes", "entries must lie in [1, n_points/2)");
      echo.update(json{{"parity", parity_echo(c.parity)}, {"n_points", c.n_points}, {"dt", c.dt},
                       {"tau_max", c.tau_max}, {"record_every", c.record_every},
                       {"noise", c.noise}, {"modes", c.modes}});
      cfg.params = c;
      break;
    }
    case Command::kDwellSolve: {
      DwellSolveConfig c;
      read_dwell_grid(r, c.base, echo);
      c.base.h = r.number("h", 0.05);
      if (c.base.potential == PotentialKind::kQuarticDoubleWell)
        require(c.base.h > 0.0, "h", "must be > 0");
      c.g_values = r.numbers("g_tilde", std::vector<double>{0.0});
      const std::string parity = r.text("parity", "both");
      if (parity == "both") {
        c.parities = {Parity::kSymmetric, Parity::kAntisymmetric};
      } else {
        try {
          c.parities = {parse_parity(parity)};
        } catch (const std::invalid_argument&) {
          throw ConfigError("parity", "expected \"symmetric\", \"antisymmetric\" or \"both\"");
        }
      }
      read_solver(r, c.solver, echo);
      echo["h"] = c.base.h;
      echo["g_tilde"] = c.g_values;
      echo["parity"] = parity;
      cfg.params = c;
      break;
    }
    case Command::kDwellSweep: {
      DwellSweepConfig c;
      read_dwell_grid(r, c.base, echo);
      require(c.base.potential == PotentialKind::kQuarticDoubleWell, "potential",
              "dwell-sweep needs the quartic double well");
      c.h_values = r.numbers("h", std::nullopt);
      for (double h : c.h_values) require(h > 0.0, "h", "values must be > 0");
      c.g_values = r.numbers("g_values", std::nullopt);
      require(std::is_sorted(c.g_values.begin(), c.g_values.end()), "g_values",
              "must be sorted ascending");
      read_solver(r, c.solver, echo);
      echo["h"] = c.h_values;
      echo["g_values"] = c.g_values;
      cfg.params = c;
      break;
    }
  }
  r.reject_unknown();
  cfg.echo = echo;
  return cfg;
}

std::optional<json> preset_document(std::string_view name) {
  static const std::map<std::string, json, std::less<>> presets = {
      {"fig1", json{{"command", "dwell-sweep"},
                    {"xi0", 5},
                    {"h", {0.002, 0.02, 0.05}},
                    {"g_values", {0, 30, 60, 90, 120, 150, 180, 210, 240, 270, 300}}}},
      {"fig2", json{{"command", "dwell-solve"},
                    {"xi0", 5},
                    {"h", 0.05},
                    {"g_tilde", {30, 300}},
                    {"parity", "both"}}},
      {"paper-instability", json{{"command", "evolve"},
                                 {"eps", 2.0},
                                 {"kappa_mag", 1.5},
                                 {"kappa_sign", -1},
                                 {"parity", "antisymmetric"},
                                 {"n_points", 128},
                                 {"dt", 1e-4},
                                 {"tau_max", 10.0},
                                 {"record_every", 100},
                                 {"noise", 1e-4},
                                 {"modes", {1, 2, 3}},
                                 {"seed", 1}}},
      {"paper-spectrum", json{{"command", "spectrum"},
                              {"eps", 2.0},
                              {"kappa_mag", 1.5},
                              {"kappa_sign", -1},
                              {"parity", "antisymmetric"},
                              {"m_max", 4}}},
  };
  const auto it = presets.find(name);
  if (it == presets.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "paper-instability", "paper-spectrum"}; }

}  // namespace ringbdg
