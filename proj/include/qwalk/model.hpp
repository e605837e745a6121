#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwalk/numerics.hpp"

namespace qw {

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kMinAlpha = 1e-12;

/// Coin parameters (alpha, beta, delta) of C = e^{i delta} [[alpha, beta], [-conj beta, conj alpha]].
///
/// Invariants: |alpha|^2 + |beta|^2 = 1 within kUnitarityTol, |alpha| > kMinAlpha
/// (alpha = 0 would make the site a reflecting wall), delta in [0, 2pi).
class Coin {
 public:
  /// Validates and normalizes delta. Throws ValidationError naming the violated invariant.
  static Coin make(cplx alpha, cplx beta, double delta);
  /// The identity coin (1, 0, 0).
  Coin() = default;

  [[nodiscard]] cplx alpha() const { return alpha_; }
  [[nodiscard]] cplx beta() const { return beta_; }
  [[nodiscard]] double delta() const { return delta_; }

  friend bool operator==(const Coin&, const Coin&) = default;

 private:
  Coin(cplx a, cplx b, double d) : alpha_(a), beta_(b), delta_(d) {}
  cplx alpha_{1.0, 0.0};
  cplx beta_{0.0, 0.0};
  double delta_ = 0.0;
};

/// Which coin a site uses: minus for x < 0, origin at x = 0, plus for x > 0.
enum class Phase { minus, origin, plus };

struct ModelSpec {
  Coin minus;
  Coin origin;
  Coin plus;

  [[nodiscard]] const Coin& coin_at(long x) const {
    return x < 0 ? minus : (x == 0 ? origin : plus);
  }
  [[nodiscard]] const Coin& coin(Phase p) const {
    return p == Phase::minus ? minus : (p == Phase::origin ? origin : plus);
  }
  [[nodiscard]] Coin& coin(Phase p) {
    return p == Phase::minus ? minus : (p == Phase::origin ? origin : plus);
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

[[nodiscard]] ModelSpec homogeneous(const Coin& c);

[[nodiscard]] C2Matrix coin_matrix(const Coin& c);

struct PQ {
  C2Matrix p;  ///< top row of the coin matrix
  C2Matrix q;  ///< bottom row of the coin matrix
};
[[nodiscard]] PQ pq_matrices(const Coin& c);

// Named parameter sets from earlier studies.

struct PresetParam {
  std::string name;
  double lo;
  double hi;
  bool lo_open;
  bool hi_open;
};

struct PresetInfo {
  std::string name;
  std::vector<PresetParam> params;
};

using ParamMap = std::map<std::string, double, std::less<>>;

/// ekst2014 (xi), wojcik2012 (phi), eko2015 (sigma_plus, sigma_minus),
/// ekst2015 (sigma_plus, sigma_minus), and the homogeneous hadamard walk
/// (alpha = beta = 1/sqrt 2, delta = 0) with no parameters.
[[nodiscard]] const std::vector<PresetInfo>& preset_catalog();
[[nodiscard]] const PresetInfo& preset_info(std::string_view name);

/// Instantiates a preset. Missing parameters are an error; unknown ones too.
[[nodiscard]] ModelSpec preset(std::string_view name, const ParamMap& params);
/// Positional form: params in the order listed by preset_info(name).params.
[[nodiscard]] ModelSpec preset(std::string_view name, const std::vector<double>& params);

}  // namespace qw
