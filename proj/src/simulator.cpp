#include "qwalk/simulator.hpp"

#include <algorithm>

#include "qwalk/config.hpp"
#include "qwalk/errors.hpp"

namespace qw {

WaveState centered_window(long size) {
  if (size < 2 || size % 2 != 0) throw ValidationError("window", "size must be even and at least 2");
  return WaveState::zeros(-size / 2, size / 2 - 1);
}

namespace {

// Rows of the coin matrix per site, including the e^{i delta} factor.
struct SiteRows {
  std::vector<cplx> a, b, c, d;
};

SiteRows site_rows(const ModelSpec& model, const WaveState& s) {
  SiteRows r;
  const std::size_t n = s.values.size();
  r.a.resize(n);
  r.b.resize(n);
  r.c.resize(n);
  r.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const C2Matrix m = coin_matrix(model.coin_at(s.x_min + static_cast<long>(i)));
    r.a[i] = m.a;
    r.b[i] = m.b;
    r.c[i] = m.c;
    r.d[i] = m.d;
  }
  return r;
}

void apply(const SiteRows& r, const std::vector<C2Vector>& in, std::vector<C2Vector>& out) {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = i + 1 == n ? 0 : i + 1;
    const std::size_t im = i == 0 ? n - 1 : i - 1;
    out[i].l = r.a[ip] * in[ip].l + r.b[ip] * in[ip].r;
    out[i].r = r.c[im] * in[im].l + r.d[im] * in[im].r;
  }
}

void check_window(const WaveState& s) {
  if (s.values.size() < 2 || s.values.size() % 2 != 0) {
    throw ValidationError("window", "size must be even and at least 2");
  }
}

std::vector<double> masses(const std::vector<C2Vector>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].norm2();
  return out;
}

}  // namespace

WaveState step(const ModelSpec& model, const WaveState& state) {
  check_window(state);
  WaveState out = WaveState::zeros(state.x_min, state.x_max());
  apply(site_rows(model, state), state.values, out.values);
  return out;
}

SimulationRun evolve(const ModelSpec& model, const WaveState& initial, long steps, bool keep_distributions) {
  check_window(initial);
  if (steps < 0) throw ValidationError("steps", "must be non-negative");
  SimulationRun run;
  run.model = model;
  run.initial = initial;
  run.steps = steps;

  long lo = initial.x_max() + 1, hi = initial.x_min - 1;
  for (long x = initial.x_min; x <= initial.x_max(); ++x) {
    if (initial.at(x).norm2() > 0.0) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (lo <= hi) {
    run.seam_contaminated =
        lo - steps < initial.x_min + kSeamClearance || hi + steps > initial.x_max() - kSeamClearance;
  }

  const SiteRows rows = site_rows(model, initial);
  std::vector<C2Vector> cur = initial.values;
  std::vector<C2Vector> next(cur.size());
  run.time_averaged.assign(cur.size(), 0.0);
  const double norm0 = initial.norm2();

  for (long t = 0; t <= steps; ++t) {
    std::vector<double> mu = masses(cur);
    double total = 0.0;
    for (double m : mu) total += m;
    run.max_norm_drift = std::max(run.max_norm_drift, std::abs(total - norm0));
    if (t < steps || steps == 0) {
      for (std::size_t i = 0; i < mu.size(); ++i) run.time_averaged[i] += mu[i];
    }
    if (keep_distributions) run.distributions.push_back(std::move(mu));
    if (t < steps) {
      apply(rows, cur, next);
      std::swap(cur, next);
    }
  }
  const double denom = steps == 0 ? 1.0 : static_cast<double>(steps);
  for (double& v : run.time_averaged) v /= denom;
  run.final_state = WaveState{initial.x_min, std::move(cur)};
  return run;
}

std::string distributions_csv(const SimulationRun& run) {
  std::string out = "t,x,mu\n";
  for (std::size_t t = 0; t < run.distributions.size(); ++t) {
    const auto& mu = run.distributions[t];
    for (std::size_t i = 0; i < mu.size(); ++i) {
      out += std::to_string(t) + ',' + std::to_string(run.initial.x_min + static_cast<long>(i)) + ',' +
             format_double(mu[i]) + '\n';
    }
  }
  return out;
}

std::string time_averaged_csv(const SimulationRun& run) {
  std::string out = "x,nu\n";
  for (std::size_t i = 0; i < run.time_averaged.size(); ++i) {
    out += std::to_string(run.initial.x_min + static_cast<long>(i)) + ',' +
           format_double(run.time_averaged[i]) + '\n';
  }
  return out;
}

}  // namespace qw
