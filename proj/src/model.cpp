#include "qwalk/model.hpp"

#include <algorithm>
#include <sstream>

#include "qwalk/errors.hpp"

namespace qw {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

Coin Coin::make(cplx alpha, cplx beta, double delta) {
  if (!finite(alpha)) throw ValidationError("alpha", "not a finite complex number");
  if (!finite(beta)) throw ValidationError("beta", "not a finite complex number");
  if (!std::isfinite(delta)) throw ValidationError("delta", "not a finite phase");
  if (std::abs(alpha) <= kMinAlpha) {
    throw ValidationError("alpha", "alpha = 0 makes the site a reflecting boundary");
  }
  const double total = std::norm(alpha) + std::norm(beta);
  if (std::abs(total - 1.0) > kUnitarityTol) {
    throw ValidationError("beta", "|alpha|^2 + |beta|^2 = " + fmt(total) + " (expected 1)");
  }
  return Coin(alpha, beta, wrap_phase(delta));
}

ModelSpec homogeneous(const Coin& c) { return {c, c, c}; }

C2Matrix coin_matrix(const Coin& c) {
  const cplx e = std::polar(1.0, c.delta());
  return {e * c.alpha(), e * c.beta(), -e * std::conj(c.beta()), e * std::conj(c.alpha())};
}

PQ pq_matrices(const Coin& c) {
  const C2Matrix m = coin_matrix(c);
  return {{m.a, m.b, 0.0, 0.0}, {0.0, 0.0, m.c, m.d}};
}

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"ekst2014", {{"xi", 0.0, kPi / 2, true, true}}},
      {"wojcik2012", {{"phi", 0.0, 1.0, true, true}}},
      {"eko2015",
       {{"sigma_plus", 0.0, kTwoPi, false, true}, {"sigma_minus", 0.0, kTwoPi, false, true}}},
      {"ekst2015",
       {{"sigma_plus", 0.0, kTwoPi, false, true}, {"sigma_minus", 0.0, kTwoPi, false, true}}},
      {"hadamard", {}},
  };
  return catalog;
}

const PresetInfo& preset_info(std::string_view name) {
  const auto& cat = preset_catalog();
  auto it = std::find_if(cat.begin(), cat.end(), [&](const PresetInfo& p) { return p.name == name; });
  if (it == cat.end()) throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
  return *it;
}

ModelSpec preset(std::string_view name, const ParamMap& params) {
  const PresetInfo& info = preset_info(name);
  std::vector<double> values;
  for (const auto& p : info.params) {
    auto it = params.find(p.name);
    if (it == params.end()) {
      throw ValidationError("params." + p.name, "missing parameter for preset " + info.name);
    }
    values.push_back(it->second);
  }
  for (const auto& [key, _] : params) {
    const bool known = std::any_of(info.params.begin(), info.params.end(),
                                   [&](const PresetParam& p) { return p.name == key; });
    if (!known) throw ValidationError("params." + key, "not a parameter of preset " + info.name);
  }
  return preset(name, values);
}

ModelSpec preset(std::string_view name, const std::vector<double>& params) {
  const PresetInfo& info = preset_info(name);
  if (params.size() != info.params.size()) {
    throw ValidationError("params", "preset " + info.name + " takes " +
                                        std::to_string(info.params.size()) + " parameter(s)");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const PresetParam& p = info.params[i];
    const double v = params[i];
    const bool below = p.lo_open ? v <= p.lo : v < p.lo;
    const bool above = p.hi_open ? v >= p.hi : v > p.hi;
    if (!std::isfinite(v) || below || above) {
      throw ValidationError("params." + p.name, "value " + fmt(v) + " outside " +
                                                    (p.lo_open ? "(" : "[") + fmt(p.lo) + ", " +
                                                    fmt(p.hi) + (p.hi_open ? ")" : "]"));
    }
  }

  const double s = 1.0 / std::sqrt(2.0);
  const cplx i{0.0, 1.0};
  const double three_half_pi = 1.5 * kPi;
  const Coin bulk = Coin::make(i * s, i * s, three_half_pi);

  if (info.name == "hadamard") return homogeneous(Coin::make(s, s, 0.0));
  if (info.name == "ekst2014") {
    const double xi = params[0];
    return {bulk, Coin::make(i * std::cos(xi), i * std::sin(xi), three_half_pi), bulk};
  }
  if (info.name == "wojcik2012") {
    const double phi = params[0];
    return {bulk, Coin::make(i * s, i * s, three_half_pi + kTwoPi * phi), bulk};
  }
  const double sp = params[0];
  const double sm = params[1];
  const Coin plus = Coin::make(i * s, i * std::polar(s, sp), three_half_pi);
  const Coin minus = Coin::make(i * s, i * std::polar(s, sm), three_half_pi);
  if (info.name == "eko2015") return {minus, plus, plus};
  // ekst2015
  return {minus, Coin::make(i, 0.0, three_half_pi), plus};
}

}  // namespace qw
