#include "qwalk/eigenfunction.hpp"

#include <algorithm>
#include <charconv>

#include "qwalk/config.hpp"
#include "qwalk/errors.hpp"

namespace qw {

double WaveState::norm2() const {
  double s = 0.0;
  for (const auto& v : values) s += v.norm2();
  return s;
}

bool WaveState::finite() const {
  return std::all_of(values.begin(), values.end(), [](const C2Vector& v) { return v.finite(); });
}

WaveState WaveState::zeros(long x_min, long x_max) {
  WaveState s;
  s.x_min = x_min;
  s.values.assign(static_cast<std::size_t>(std::max(0L, x_max - x_min + 1)), C2Vector{});
  return s;
}

WaveState WaveState::delta(long x_min, long x_max, long x, C2Vector v) {
  WaveState s = zeros(x_min, x_max);
  s.at(x) = v;
  return s;
}

namespace {

struct ModeSplit {
  C2Vector kept;
  double dropped_rel;  ///< size of the removed component relative to the input
};

// Writes psi = c_+ v_+ + c_- v_- and keeps the term with the given mode.
ModeSplit keep_mode(const TransferData& td, const C2Vector& psi, bool keep_plus) {
  const C2Vector& vp = td.v_plus;
  const C2Vector& vm = td.v_minus;
  const cplx det = vp.l * vm.r - vp.r * vm.l;
  const cplx cp = (psi.l * vm.r - psi.r * vm.l) / det;
  const cplx cm = (vp.l * psi.r - vp.r * psi.l) / det;
  const double n = psi.norm();
  ModeSplit out;
  if (keep_plus) {
    out.kept = cp * vp;
    out.dropped_rel = n > 0.0 ? std::abs(cm) * vm.norm() / n : 0.0;
  } else {
    out.kept = cm * vm;
    out.dropped_rel = n > 0.0 ? std::abs(cp) * vp.norm() / n : 0.0;
  }
  return out;
}

[[noreturn]] void expanding(const std::string& side, double rel) {
  throw ExpandingModeError("expanding mode not annihilated on the " + side +
                           " side (relative component " + format_double(rel) + ")");
}

}  // namespace

WaveState build_psi_tilde(const ModelSpec& spec, const EigenvalueRecord& rec, long half_width) {
  if (half_width < 10) throw ValidationError("half_width", "must be at least 10");
  const double lambda = rec.lambda;
  const DMatrix dm = d_matrix(spec, lambda);
  const C2Vector phi = rec.kernel_vector.l * dm.v_o_plus + rec.kernel_vector.r * dm.v_o_minus;
  const double phi_norm = phi.norm();
  if (!(phi_norm > 0.0)) throw ExpandingModeError("phi vanishes");

  const TransferData to = transfer_at(spec.origin, lambda);
  const TransferData tp = transfer_at(spec.plus, lambda);
  const TransferData tm = transfer_at(spec.minus, lambda);
  const C2Matrix tm_inv = transfer_inverse(spec.minus, lambda);
  // Rightward the kept mode shrinks under T_p; leftward it shrinks under T_m^{-1}.
  const bool plus_keep = std::abs(tp.zeta_plus) < std::abs(tp.zeta_minus);
  const bool minus_keep = std::abs(tm.zeta_plus) > std::abs(tm.zeta_minus);

  WaveState s = WaveState::zeros(-half_width, half_width);
  s.at(0) = phi;

  ModeSplit seed = keep_mode(tp, to.t * phi, plus_keep);
  if (seed.dropped_rel > kExpandingSeedTol) expanding("plus", seed.dropped_rel);
  s.at(1) = seed.kept;
  for (long x = 1; x < half_width; ++x) {
    const C2Vector next = keep_mode(tp, tp.t * s.at(x), plus_keep).kept;
    if (!(next.norm() <= kOverflowGuard * phi_norm)) expanding("plus", next.norm() / phi_norm);
    s.at(x + 1) = next;
  }

  seed = keep_mode(tm, phi, minus_keep);
  if (seed.dropped_rel > kExpandingSeedTol) expanding("minus", seed.dropped_rel);
  for (long x = 0; x > -half_width; --x) {
    const C2Vector next = keep_mode(tm, tm_inv * s.at(x), minus_keep).kept;
    if (!(next.norm() <= kOverflowGuard * phi_norm)) expanding("minus", next.norm() / phi_norm);
    s.at(x - 1) = next;
  }
  return s;
}

WaveState unshift(const WaveState& s) {
  if (s.values.size() < 2) return WaveState{s.x_min, {}};
  WaveState out = WaveState::zeros(s.x_min, s.x_max() - 1);
  for (long x = out.x_min; x <= out.x_max(); ++x) out.at(x) = {s.at(x + 1).l, s.at(x).r};
  return out;
}

WaveState shift_j(const WaveState& s) {
  if (s.values.size() < 2) return WaveState{s.x_min + 1, {}};
  WaveState out = WaveState::zeros(s.x_min + 1, s.x_max());
  for (long x = out.x_min; x <= out.x_max(); ++x) out.at(x) = {s.at(x - 1).l, s.at(x).r};
  return out;
}

C2Vector apply_walk_at(const ModelSpec& spec, const WaveState& s, long x) {
  const Coin& right = spec.coin_at(x + 1);
  const Coin& left = spec.coin_at(x - 1);
  const C2Vector& a = s.at(x + 1);
  const C2Vector& b = s.at(x - 1);
  return {std::polar(1.0, right.delta()) * (right.alpha() * a.l + right.beta() * a.r),
          std::polar(1.0, left.delta()) * (-std::conj(left.beta()) * b.l + std::conj(left.alpha()) * b.r)};
}

double verify_eigen(const ModelSpec& spec, double lambda, const WaveState& s) {
  const cplx e = std::polar(1.0, lambda);
  double worst = 0.0;
  for (long x = s.x_min + kInteriorMargin; x <= s.x_max() - kInteriorMargin; ++x) {
    worst = std::max(worst, (apply_walk_at(spec, s, x) - e * s.at(x)).norm());
  }
  return worst;
}

double recursion_residual(const ModelSpec& spec, double lambda, const WaveState& s) {
  const WaveState j = shift_j(s);
  double worst = 0.0;
  for (long x = j.x_min + kInteriorMargin; x < j.x_max() - kInteriorMargin; ++x) {
    const C2Matrix t = transfer_at(spec.coin_at(x), lambda).t;
    worst = std::max(worst, (j.at(x + 1) - t * j.at(x)).norm());
  }
  return worst;
}

namespace {

double fitted_rate(const WaveState& s, bool right) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (long x = s.x_min; x <= s.x_max(); ++x) {
    if (right ? x < 2 : x > -2) continue;
    const double a = s.at(x).norm();
    if (!(a > kDecayFloor)) continue;
    const double u = static_cast<double>(std::abs(x));
    const double y = std::log(a);
    sx += u;
    sy += y;
    sxx += u * u;
    sxy += u * y;
    ++n;
  }
  if (n < kMinDecaySites) {
    throw InsufficientData(std::string("decay fit needs ") + std::to_string(kMinDecaySites) +
                           " sites above the floor on the " + (right ? "right" : "left") + ", found " +
                           std::to_string(n));
  }
  const double dn = static_cast<double>(n);
  return std::exp((dn * sxy - sx * sy) / (dn * sxx - sx * sx));
}

}  // namespace

DecayRates decay_fit(const WaveState& s) { return {fitted_rate(s, false), fitted_rate(s, true)}; }

void normalize_state(WaveState& s) {
  const double n = std::sqrt(s.norm2());
  if (!(n > 0.0)) return;
  cplx lead{0.0, 0.0};
  for (const auto& v : s.values) {
    if (std::abs(v.l) > std::abs(lead)) lead = v.l;
    if (std::abs(v.r) > std::abs(lead)) lead = v.r;
  }
  const cplx rot = std::conj(lead) / (std::abs(lead) * n);
  for (auto& v : s.values) v *= rot;
}

EigenfunctionProfile eigenfunction(const ModelSpec& spec, const EigenvalueRecord& rec, long half_width) {
  EigenfunctionProfile p;
  p.lambda = rec.lambda;
  p.state = unshift(build_psi_tilde(spec, rec, half_width));
  normalize_state(p.state);
  p.residual = verify_eigen(spec, rec.lambda, p.state);
  p.recursion_residual = recursion_residual(spec, rec.lambda, p.state);
  try {
    p.rates = decay_fit(p.state);
    p.rates_fitted = true;
  } catch (const InsufficientData&) {
    p.rates_fitted = false;
  }
  const long inner = half_width / 2;
  for (long x = p.state.x_min; x <= p.state.x_max(); ++x) {
    if (std::abs(x) > inner) p.tail_mass += p.state.at(x).norm2();
  }
  auto series = [](double edge2, double r) { return r < 1.0 ? edge2 * r * r / (1.0 - r * r) : INFINITY; };
  p.beyond_window = series(p.state.at(p.state.x_min).norm2(), rec.decay_minus) +
                    series(p.state.at(p.state.x_max()).norm2(), rec.decay_plus);
  return p;
}

std::string state_to_csv(const WaveState& s) {
  std::string out = "x,re_L,im_L,re_R,im_R,norm2\n";
  for (long x = s.x_min; x <= s.x_max(); ++x) {
    const C2Vector& v = s.at(x);
    out += std::to_string(x) + ',' + format_double(v.l.real()) + ',' + format_double(v.l.imag()) + ',' +
           format_double(v.r.real()) + ',' + format_double(v.r.imag()) + ',' + format_double(v.norm2()) +
           '\n';
  }
  return out;
}

WaveState state_from_csv(std::string_view text) {
  WaveState s;
  int lineno = 0;
  bool header = true;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("x,", 0) == 0) continue;
    }
    double f[6];
    std::size_t pos = 0;
    for (int k = 0; k < 6; ++k) {
      const std::size_t comma = k < 5 ? line.find(',', pos) : line.size();
      if (comma == std::string_view::npos) throw ParseError(lineno, "expected 6 columns");
      const char* b = line.data() + pos;
      const char* e = line.data() + comma;
      auto r = std::from_chars(b, e, f[k]);
      if (r.ec != std::errc{} || r.ptr != e) throw ParseError(lineno, "bad number in column " + std::to_string(k + 1));
      pos = comma + 1;
    }
    const long x = std::lround(f[0]);
    if (static_cast<double>(x) != f[0]) throw ParseError(lineno, "site index must be an integer");
    if (s.values.empty()) {
      s.x_min = x;
    } else if (x != s.x_max() + 1) {
      throw ParseError(lineno, "sites must be consecutive");
    }
    s.values.push_back({{f[1], f[2]}, {f[3], f[4]}});
  }
  if (s.values.empty()) throw ParseError(lineno, "no sites");
  if (!s.finite()) throw ParseError(lineno, "non-finite amplitude");
  return s;
}

}  // namespace qw
