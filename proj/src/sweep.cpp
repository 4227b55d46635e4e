#include "nldelta/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "nldelta/scattering.hpp"

namespace nldelta {
namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<SweepRecord> records_at(const ScatteringProblem& problem, const std::optional<RootScanConfig>& scan) {
  std::vector<SweepRecord> rows;
  for (const auto& s : solve_scattering(problem, scan)) {
    rows.push_back({problem.wavenumber(), s.branch_index, s.t_intensity(), s.r_intensity(), s.psi_cn_modulus,
                    s.closure_residual, s.reflection, s.transmission});
  }
  return rows;
}

Preset make_preset(std::string name, std::string description, std::vector<double> positions, Complex z,
                   double alpha) {
  Preset p;
  p.name = std::move(name);
  p.description = std::move(description);
  for (double c : positions) p.config.centers.push_back(DeltaCenter::power_law(c, z, alpha));
  return p;
}

}  // namespace

void SweepSpec::validate() const {
  if (!(k_min > 0.0) || !std::isfinite(k_min)) throw ValidationError("k_min", "must be > 0");
  if (!(k_max > k_min) || !std::isfinite(k_max)) throw ValidationError("k_max", "must exceed k_min");
  if (n_points < 2) throw ValidationError("n", "at least two points");
  if (scan) scan->validate();
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  spec.validate();
  std::vector<double> ks(static_cast<std::size_t>(spec.n_points));
  const double last = spec.n_points - 1;
  for (int i = 0; i < spec.n_points; ++i) {
    const double t = i / last;
    ks[i] = spec.log_spacing ? spec.k_min * std::pow(spec.k_max / spec.k_min, t)
                             : spec.k_min + (spec.k_max - spec.k_min) * t;
  }
  ks.back() = spec.k_max;
  return ks;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  const std::vector<double> ks = sweep_grid(spec);
  const ScatteringProblem base = spec.problem.problem(ks.front());

  std::vector<std::vector<SweepRecord>> rows(ks.size());
  std::vector<char> skipped(ks.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    for (std::size_t i = next++; i < ks.size(); i = next++) {
      try {
        rows[i] = records_at(base.with_wavenumber(ks[i]), spec.scan);
      } catch (const NoBranchError&) {
        skipped[i] = 1;
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = ks.size();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(ks.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (skipped[i]) out.skipped_k.push_back(ks[i]);
    out.records.insert(out.records.end(), rows[i].begin(), rows[i].end());
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "k,branch,T2,R2,psi_cN,residual\n";
  for (const auto& r : records) {
    out << g17(r.k) << ',' << r.branch_index << ',' << g17(r.t_intensity) << ',' << g17(r.r_intensity) << ','
        << g17(r.psi_cn_modulus) << ',' << g17(r.residual) << '\n';
  }
}

std::string sweep_json(const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"k", r.k},
                   {"branch", r.branch_index},
                   {"T2", r.t_intensity},
                   {"R2", r.r_intensity},
                   {"psi_cN", r.psi_cn_modulus},
                   {"residual", r.residual},
                   {"R", {r.reflection.real(), r.reflection.imag()}},
                   {"T", {r.transmission.real(), r.transmission.imag()}}});
  }
  return nlohmann::json{{"records", std::move(arr)}}.dump(2) + "\n";
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    const std::vector<double> fig1{0.0, 1.0, 2.0};
    const std::vector<double> fig2{-1.0, 0.0, 1.0};
    const Complex i{0.0, 1.0};
    return std::vector<Preset>{
        make_preset("fig1-linear", "c = {0,1,2}, z = 2, alpha = 0, |A| = 1", fig1, 2.0, 0.0),
        make_preset("fig1-weak", "c = {0,1,2}, z = 2, alpha = 2, |A| = 1", fig1, 2.0, 2.0),
        make_preset("fig1-strong", "c = {0,1,2}, z = 20, alpha = 2, |A| = 1", fig1, 20.0, 2.0),
        make_preset("fig2-alpha-0.7", "c = {-1,0,1}, z = i, alpha = -0.7, |A| = 1", fig2, i, -0.7),
        make_preset("fig2-alpha-0.5", "c = {-1,0,1}, z = i, alpha = -0.5, |A| = 1", fig2, i, -0.5),
        make_preset("fig2-alpha0", "c = {-1,0,1}, z = i, alpha = 0, |A| = 1", fig2, i, 0.0),
        make_preset("fig2-alpha1", "c = {-1,0,1}, z = i, alpha = 1, |A| = 1", fig2, i, 1.0),
        make_preset("fig2-alpha2", "c = {-1,0,1}, z = i, alpha = 2, |A| = 1", fig2, i, 2.0),
    };
  }();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ValidationError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace nldelta
