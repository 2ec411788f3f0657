#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ringbdg/cli.hpp"
#include "ringbdg/parallel.hpp"
#include "ringbdg/ring_dynamics.hpp"
#include "ringbdg/spectra.hpp"

namespace ringbdg {

using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Comma-separated rows with a fixed header.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) : columns_(header.size()) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }
  explicit Csv(const std::vector<std::string>& header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  Csv& cell(double v) { return put(format_double(v)); }
  Csv& cell(long v) { return put(std::to_string(v)); }
  Csv& cell(int v) { return put(std::to_string(v)); }
  Csv& cell(bool v) { return put(v ? "true" : "false"); }

  void end_row() {
    if (in_row_ != columns_) throw std::logic_error("csv row has wrong column count");
    out_ << '\n';
    in_row_ = 0;
  }
  std::string str() const { return out_.str(); }

 private:
  Csv& put(const std::string& s) {
    if (in_row_) out_ << ',';
    out_ << s;
    ++in_row_;
    return *this;
  }

  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::ostringstream out_;
};

class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, RunManifest& manifest)
      : dir_(std::move(dir)), manifest_(manifest) {}

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
    manifest_.outputs.push_back(OutputRecord{name, sha256_hex(content), content.size()});
  }

 private:
  std::filesystem::path dir_;
  RunManifest& manifest_;
};

std::string tag(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json rate_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void run_spectrum(const SpectrumConfig& c, OutputWriter& out) {
  const auto report = stability_report(c.ring, c.parity, c.m_max);
  Csv csv{"m", "re_omega1", "im_omega1", "re_omega2", "im_omega2", "unstable"};
  for (const auto& f : report.modes) {
    csv.cell(f.m)
        .cell(f.omega1.real())
        .cell(f.omega1.imag())
        .cell(f.omega2.real())
        .cell(f.omega2.imag())
        .cell(report.is_unstable(f.m));
    csv.end_row();
  }
  out.write("spectrum.csv", csv.str());
}

double grid_value(double lo, double hi, int steps, int i) {
  return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
}

void run_stability_map(const StabilityMapConfig& c, OutputWriter& out) {
  struct Cell {
    double eps, kappa, rate;
    int m_star;
  };
  std::vector<std::vector<Cell>> rows(c.eps_steps);
  parallel_for(rows.size(), [&](std::size_t i) {
    const double eps = grid_value(c.eps_min, c.eps_max, c.eps_steps, static_cast<int>(i));
    for (int j = 0; j < c.kappa_steps; ++j) {
      const double kappa = grid_value(c.kappa_min, c.kappa_max, c.kappa_steps, j);
      const auto rep = stability_report(RingParams::from_epsilon(eps, kappa, c.kappa_sign),
                                        c.parity, c.m_max);
      rows[i].push_back(rep.max_growth ? Cell{eps, kappa, rep.max_growth->growth_rate, rep.max_growth->m}
                                       : Cell{eps, kappa, 0.0, -1});
    }
  });
  Csv csv{"eps", "kappa_mag", "max_growth", "m_star"};
  for (const auto& row : rows)
    for (const auto& cell : row) {
      csv.cell(cell.eps).cell(cell.kappa).cell(cell.rate).cell(cell.m_star);
      csv.end_row();
    }
  out.write("stability_map.csv", csv.str());
}

void run_evolve(const EvolveConfig& c, std::uint64_t seed, OutputWriter& out) {
  const RingGrid grid(c.n_points);
  RingFields fields = prepare_uniform(c.ring, c.parity, grid);
  if (c.noise > 0.0) fields = seed_noise(std::move(fields), c.noise, seed);
  const long n_steps = std::lround(c.tau_max / c.dt);
  const auto rec = evolve(fields, c.dt, n_steps, c.ring, c.record_every, c.modes);

  std::vector<std::string> header{"tau", "norm_u", "norm_d", "energy", "L_u", "L_d"};
  for (int m : c.modes) {
    header.push_back("abs_alpha_u_" + std::to_string(m));
    header.push_back("abs_alpha_d_" + std::to_string(m));
  }
  Csv csv(header);
  for (std::size_t i = 0; i < rec.tau.size(); ++i) {
    csv.cell(rec.tau[i])
        .cell(rec.norm_u[i])
        .cell(rec.norm_d[i])
        .cell(rec.energy[i])
        .cell(rec.angular_momentum_u[i])
        .cell(rec.angular_momentum_d[i]);
    for (const auto& t : rec.modes) csv.cell(t.up_plus[i]).cell(t.down_plus[i]);
    csv.end_row();
  }
  out.write("evolve.csv", csv.str());

  const auto report = stability_report(c.ring, c.parity, *std::max_element(c.modes.begin(), c.modes.end()));
  json growth = json::array();
  for (int m : c.modes) {
    const auto& f = report.modes.at(m);
    json entry{{"m", m}, {"analytic_rate", std::max(f.omega1.imag(), f.omega2.imag())}};
    try {
      const auto fit = measure_growth_rate(rec, m);
      entry["measured_rate"] = rate_or_null(fit.rate);
      entry["tau_begin"] = fit.tau_begin;
      entry["tau_end"] = fit.tau_end;
      entry["fit_residual"] = fit.residual;
      entry["fit_samples"] = fit.samples;
    } catch (const NoGrowthWindow& e) {
      entry["measured_rate"] = nullptr;
      entry["no_growth_window"] = e.what();
    }
    growth.push_back(entry);
  }
  out.write("growth.json", growth.dump(2) + "\n");
}

json solution_summary(const DWellSolution& s) {
  return json{{"parity", std::string(to_string(s.parity))},
              {"g_tilde", s.params.g_tilde},
              {"xi0", s.params.xi0},
              {"h", s.params.h},
              {"half_length", s.params.half_length},
              {"n_grid", s.params.n_grid},
              {"mu", s.mu},
              {"energy", s.energy},
              {"residual", s.residual},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"sign_changes", s.sign_changes()},
              {"density_at_center", s.density_at_center()}};
}

void run_dwell_solve(const DwellSolveConfig& c, OutputWriter& out, json& failures) {
  for (double g : c.g_values) {
    for (Parity parity : c.parities) {
      DWellParams p = c.base;
      p.g_tilde = g;
      const std::string stem = "dwell_" + std::string(to_string(parity)) + "_g" + tag(g);
      try {
        const auto sol = solve_stationary(p, parity, c.solver);
        Csv csv{"xi", "phi"};
        for (int i = 0; i < sol.params.n_grid; ++i) {
          csv.cell(sol.params.xi(i)).cell(sol.phi[i]);
          csv.end_row();
        }
        out.write(stem + ".csv", csv.str());
        out.write(stem + ".json", solution_summary(sol).dump(2) + "\n");
      } catch (const std::exception& e) {
        failures.push_back(json{{"item", stem}, {"message", e.what()}});
      }
    }
  }
}

void run_dwell_sweep(const DwellSweepConfig& c, OutputWriter& out, json& failures) {
  std::vector<SplittingCurve> curves(c.h_values.size());
  parallel_for(curves.size(), [&](std::size_t i) {
    DWellParams p = c.base;
    p.h = c.h_values[i];
    curves[i] = sweep_g(p, c.g_values, c.solver);
  });
  for (std::size_t i = 0; i < curves.size(); ++i) {
    Csv csv{"g_tilde", "E_S", "E_A", "delta_E", "mu_S", "mu_A", "delta_mu"};
    const std::string name = "dwell_sweep_h" + tag(c.h_values[i]) + ".csv";
    for (const auto& r : curves[i].rows) {
      const double nan = std::nan("");
      csv.cell(r.g_tilde)
          .cell(r.ok ? r.energy_s : nan)
          .cell(r.ok ? r.energy_a : nan)
          .cell(r.ok ? r.delta_energy : nan)
          .cell(r.ok ? r.mu_s : nan)
          .cell(r.ok ? r.mu_a : nan)
          .cell(r.ok ? r.delta_mu : nan);
      csv.end_row();
      if (!r.ok)
        failures.push_back(json{{"item", name}, {"g_tilde", r.g_tilde}, {"message", r.error}});
    }
    out.write(name, csv.str());
  }
}

json error_record(const std::exception& e) {
  json err{{"message", e.what()}};
  if (const auto* b = dynamic_cast<const BlowUpError*>(&e)) {
    err["kind"] = "blow-up";
    err["tau"] = b->tau();
  } else if (dynamic_cast<const NotConverged*>(&e)) {
    err["kind"] = "not-converged";
  } else if (dynamic_cast<const DomainTooSmall*>(&e)) {
    err["kind"] = "domain-too-small";
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    err["kind"] = "invalid-argument";
  } else {
    err["kind"] = "runtime";
  }
  return err;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[digest[i] >> 4];
    s += hex[digest[i] & 0xF];
  }
  return s;
}

json RunManifest::to_json() const {
  json outs = json::array();
  for (const auto& o : outputs) outs.push_back(json{{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  return json{{"tool", "ringbdg"},
              {"version", version},
              {"config", config},
              {"started_at", started_at},
              {"finished_at", finished_at},
              {"outputs", outs},
              {"status", ok ? "ok" : "error"},
              {"error", error},
              {"failures", failures.is_null() ? json::array() : failures}};
}

RunManifest run(const RunConfig& config) {
  RunManifest manifest;
  manifest.config = config.echo;
  manifest.started_at = utc_now();
  manifest.failures = json::array();

  std::filesystem::create_directories(config.output_dir);
  OutputWriter out(config.output_dir, manifest);
  try {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SpectrumConfig>) run_spectrum(c, out);
          if constexpr (std::is_same_v<T, StabilityMapConfig>) run_stability_map(c, out);
          if constexpr (std::is_same_v<T, EvolveConfig>) run_evolve(c, config.seed, out);
          if constexpr (std::is_same_v<T, DwellSolveConfig>) run_dwell_solve(c, out, manifest.failures);
          if constexpr (std::is_same_v<T, DwellSweepConfig>) run_dwell_sweep(c, out, manifest.failures);
        },
        config.params);
    manifest.ok = manifest.failures.empty();
  } catch (const std::exception& e) {
    manifest.ok = false;
    manifest.error = error_record(e);
  }
  manifest.finished_at = utc_now();

  const std::string text = manifest.to_json().dump(2) + "\n";
  std::ofstream f(config.output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw std::runtime_error("cannot write manifest.json");
  return manifest;
}

}  // namespace ringbdg
