#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nldelta/bound_states.hpp"
#include "nldelta/config.hpp"
#include "nldelta/scattering.hpp"
#include "nldelta/sweep.hpp"
#include "nldelta/validate.hpp"

namespace nldelta::cli {
namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string g12(double v) { return fmt("%.12g", v); }

std::string cplx(Complex z) {
  return g12(z.real()) + (z.imag() < 0.0 ? " - " : " + ") + g12(std::abs(z.imag())) + "i";
}

json pair(Complex z) { return json::array({z.real(), z.imag()}); }

// Shared problem source: a config file, a preset, or both (file wins for centers).
struct Source {
  std::string config;
  std::string preset;

  void attach(CLI::App* cmd) {
    cmd->add_option("config", config, "problem JSON file");
    cmd->add_option("--preset", preset, "named figure parameter set (see 'preset list')");
  }

  ScatterConfig load() const {
    if (!config.empty()) return parse_scatter_config(read_text_file(config));
    if (!preset.empty()) return find_preset(preset).config;
    throw ValidationError("config", "give a config file or --preset");
  }
};

struct ScanFlags {
  double r_max = 0.0;
  int n_scan = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--r-max", r_max, "upper end of the |psi(c_N)| scan (disables auto-widening)");
    cmd->add_option("--n-scan", n_scan, "scan grid nodes");
  }

  std::optional<RootScanConfig> config(const ScatteringProblem& p) const {
    if (r_max <= 0.0 && n_scan <= 0) return std::nullopt;
    RootScanConfig cfg = default_scan_config(p);
    if (r_max > 0.0) cfg.r_max = r_max;
    if (n_scan > 0) cfg.n_scan = n_scan;
    cfg.validate();
    return cfg;
  }
};

int cmd_scatter(const Source& src, std::optional<double> k, const ScanFlags& scan, bool as_json, std::ostream& out) {
  const ScatteringProblem problem = src.load().problem(k);
  const auto branches = solve_scattering(problem, scan.config(problem));

  if (as_json) {
    json arr = json::array();
    for (const auto& b : branches) {
      json psi = json::array();
      for (const auto& v : b.psi_at_centers) psi.push_back(pair(v));
      arr.push_back({{"branch", b.branch_index}, {"T2", b.t_intensity()}, {"R2", b.r_intensity()},
                     {"T", pair(b.transmission)}, {"R", pair(b.reflection)}, {"psi", psi},
                     {"psi_cN", b.psi_cn_modulus}, {"residual", b.closure_residual}, {"grazing", b.grazing}});
    }
    out << json{{"k", problem.wavenumber()}, {"incidence", to_string(problem.incidence())}, {"branches", arr}}.dump(2)
        << "\n";
    return kOk;
  }

  out << "k = " << g12(problem.wavenumber()) << ", " << to_string(problem.incidence()) << " incidence, "
      << branches.size() << " branch" << (branches.size() == 1 ? "" : "es") << "\n";
  for (const auto& b : branches) {
    out << "\nbranch " << b.branch_index << (b.grazing ? " (grazing)" : "") << "\n";
    out << "  |T|^2 = " << g12(b.t_intensity()) << "   |R|^2 = " << g12(b.r_intensity()) << "\n";
    out << "  T = " << cplx(b.transmission) << "\n";
    out << "  R = " << cplx(b.reflection) << "\n";
    out << "  closure residual = " << fmt("%.3e", b.closure_residual) << "\n";
    out << "  center        psi(c)                              |psi(c)|\n";
    for (std::size_t i = 0; i < b.psi_at_centers.size(); ++i) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-12.6g  %-34s  %.12g\n", problem.centers()[i].position,
                    cplx(b.psi_at_centers[i]).c_str(), std::abs(b.psi_at_centers[i]));
      out << line;
    }
  }
  return kOk;
}

struct SweepFlags {
  std::optional<double> k_min, k_max;
  int n = 400;
  bool log = false;
  std::string out_path;
  unsigned threads = 0;
};

int cmd_sweep(const Source& src, const SweepFlags& f, const ScanFlags& scan, bool as_json, std::ostream& out,
              std::ostream& err) {
  SweepSpec spec;
  spec.problem = src.load();
  if (!src.preset.empty() && src.config.empty()) {
    const Preset& p = find_preset(src.preset);
    spec.k_min = p.k_min;
    spec.k_max = p.k_max;
  }
  if (f.k_min) spec.k_min = *f.k_min;
  if (f.k_max) spec.k_max = *f.k_max;
  spec.n_points = f.n;
  spec.log_spacing = f.log;
  spec.validate();
  spec.scan = scan.config(spec.problem.problem(spec.k_min));

  const SweepResult res = run_sweep(spec, f.threads);
  for (double k : res.skipped_k) err << "warning: no branch at k = " << fmt("%.17g", k) << " (row skipped)\n";

  auto emit = [&](std::ostream& os) {
    if (as_json) {
      os << sweep_json(res.records);
    } else {
      write_sweep_csv(os, res.records);
    }
  };
  if (f.out_path.empty()) {
    emit(out);
  } else {
    std::ofstream file(f.out_path, std::ios::binary);
    if (!file) throw IoError(f.out_path + ": cannot open for writing");
    emit(file);
    file.close();
    if (!file) throw IoError(f.out_path + ": write failed");
  }
  return kOk;
}

int cmd_bound(const std::string& path, bool as_json, std::ostream& out) {
  const BoundProblem problem = parse_bound_config(read_text_file(path));
  const BoundReport report = solve_bound(problem);

  if (as_json) {
    json states = json::array();
    for (const auto& s : report.states) {
      json psi = json::array();
      for (const auto& v : s.psi_at_centers) psi.push_back(pair(v));
      states.push_back({{"branch", s.branch_index}, {"nu", s.nu}, {"E", s.energy}, {"parity", to_string(s.parity)},
                        {"psi", psi}, {"norm_residual", s.norm_residual}});
    }
    json diags = json::array();
    for (const auto& d : report.diagnostics)
      diags.push_back({{"parity", to_string(d.parity)}, {"roots", d.roots}, {"note", d.note}});
    out << json{{"method", to_string(report.method)}, {"states", states}, {"diagnostics", diags}}.dump(2) << "\n";
    return kOk;
  }

  out << report.states.size() << " bound state" << (report.states.size() == 1 ? "" : "s") << " ("
      << to_string(report.method) << ")\n";
  for (const auto& s : report.states) {
    out << "\nstate " << s.branch_index << ": nu = " << g12(s.nu) << "   E = " << g12(s.energy)
        << "   parity = " << to_string(s.parity) << "   norm residual = " << fmt("%.3e", s.norm_residual) << "\n";
    for (std::size_t i = 0; i < s.psi_at_centers.size(); ++i)
      out << "  psi(" << g12(problem.centers()[i].position) << ") = " << g12(s.psi_at_centers[i].real()) << "\n";
  }
  for (const auto& d : report.diagnostics) out << "\n" << d.note;
  if (!report.diagnostics.empty()) out << "\n";
  return kOk;
}

int cmd_validate(const CorpusOptions& opts, bool as_json, std::ostream& out) {
  const ValidationReport rep = run_validation(opts);
  if (as_json) {
    json cols = json::array();
    for (const auto& c : rep.columns)
      cols.push_back({{"check", c.name}, {"max_deviation", c.max_deviation}, {"tolerance", c.tolerance},
                      {"evaluated", c.evaluated}, {"failures", c.failures}});
    out << json{{"problems", rep.problems}, {"passed", rep.passed()}, {"columns", cols}, {"failures", rep.failures}}
               .dump(2)
        << "\n";
    return rep.passed() ? kOk : kFailure;
  }
  out << "corpus " << rep.problems << " problems, seed " << opts.seed << (opts.allow_singular ? ", singular exponents on" : "")
      << "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %10s %12s %12s %8s\n", "check", "evaluated", "max dev", "tolerance", "status");
  out << line;
  for (const auto& c : rep.columns) {
    std::snprintf(line, sizeof line, "%-14s %10d %12.3e %12.0e %8s\n", c.name.c_str(), c.evaluated, c.max_deviation,
                  c.tolerance, c.passed() ? "pass" : "FAIL");
    out << line;
  }
  for (const auto& f : rep.failures) out << "  " << f << "\n";
  out << "\n" << (rep.passed() ? "all checks passed" : "validation FAILED") << "\n";
  return rep.passed() ? kOk : kFailure;
}

int cmd_preset_list(std::ostream& out) {
  for (const auto& p : presets()) {
    char line[200];
    std::snprintf(line, sizeof line, "%-16s %s  (k in [%g, %g])\n", p.name.c_str(), p.description.c_str(), p.k_min,
                  p.k_max);
    out << line;
  }
  return kOk;
}

int cmd_preset_show(const std::string& name, std::ostream& out) {
  const Preset& p = find_preset(name);
  json centers = json::array();
  for (const auto& c : p.config.centers)
    centers.push_back({{"c", c.position}, {"z", pair(coupling_of(c.response))}, {"alpha", exponent_of(c.response)}});
  out << json{{"centers", centers}, {"A", pair(p.config.amplitude)}, {"incidence", to_string(p.config.incidence)}}.dump(2)
      << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scattering branches and bound states of nonlinear delta-potential chains"};
  app.name("nldelta");
  app.require_subcommand(1);

  bool as_json = false;
  ScanFlags scan;

  Source scatter_src;
  std::optional<double> scatter_k;
  auto* scatter = app.add_subcommand("scatter", "all self-consistent branches at one wavenumber");
  scatter_src.attach(scatter);
  scatter->add_option("-k,--k", scatter_k, "wavenumber (overrides the config)");
  scatter->add_flag("--json", as_json, "emit JSON");
  scan.attach(scatter);

  Source sweep_src;
  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "transmission intensities over a k grid (CSV)");
  sweep_src.attach(sweep);
  sweep->add_option("--k-min", sweep_flags.k_min, "first wavenumber (preset default 0.1)");
  sweep->add_option("--k-max", sweep_flags.k_max, "last wavenumber (preset default 6)");
  sweep->add_option("-n,--n", sweep_flags.n, "number of k points")->capture_default_str();
  sweep->add_flag("--log", sweep_flags.log, "log-spaced k points");
  sweep->add_option("-o,--out", sweep_flags.out_path, "output file (default stdout)");
  sweep->add_option("--threads", sweep_flags.threads, "worker threads (0 = all cores)");
  sweep->add_flag("--json", as_json, "emit one JSON document with a records array");
  scan.attach(sweep);

  std::string bound_path;
  auto* bound = app.add_subcommand("bound", "bound states of an attractive delta chain");
  bound->add_option("config", bound_path, "bound-problem JSON file")->required();
  bound->add_flag("--json", as_json, "emit JSON");

  CorpusOptions corpus;
  auto* validate = app.add_subcommand("validate", "random corpus: consistency-matrix path vs transfer oracle");
  validate->add_option("--corpus", corpus.size, "number of problems")->capture_default_str();
  validate->add_option("--seed", corpus.seed, "generator seed")->capture_default_str();
  validate->add_flag("--allow-singular", corpus.allow_singular, "include negative exponents");
  validate->add_flag("--json", as_json, "emit JSON");

  auto* preset = app.add_subcommand("preset", "figure parameter sets");
  preset->require_subcommand(1);
  auto* preset_list = preset->add_subcommand("list", "list presets");
  std::string preset_name;
  auto* preset_show = preset->add_subcommand("show", "print a preset as a config file");
  preset_show->add_option("name", preset_name)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*scatter) return cmd_scatter(scatter_src, scatter_k, scan, as_json, out);
    if (*sweep) return cmd_sweep(sweep_src, sweep_flags, scan, as_json, out, err);
    if (*bound) return cmd_bound(bound_path, as_json, out);
    if (*validate) return cmd_validate(corpus, as_json, out);
    if (*preset_list) return cmd_preset_list(out);
    if (*preset_show) return cmd_preset_show(preset_name, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NoBranchError& e) {
    err << "error: " << e.what() << "\n";
    return kNoBranch;
  } catch (const NoBoundStateError& e) {
    err << "error: " << e.what() << "\n";
    return kNoBoundState;
  } catch (const ConvergenceError& e) {
    err << "error: no bound state found: " << e.what() << "\n";
    return kNoBoundState;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace nldelta::cli
