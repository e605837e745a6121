#pragma once

#include <vector>

#include "qwalk/model.hpp"
#include "qwalk/numerics.hpp"

namespace qw {

/// Coins with |beta| at or below this use the standard basis as eigenvectors.
inline constexpr double kBetaZeroTol = 1e-12;

/// Transfer matrix T(lambda) of one coin with its eigen-decomposition.
///
/// T = (1/alpha) [[e^{i(lambda-delta)}, -beta], [-conj beta, e^{-i(lambda-delta)}]]
/// zeta_pm = (cos(lambda-delta) ± sqrt(disc)) / alpha, disc = cos^2(lambda-delta) - |alpha|^2
/// v_pm = [beta, i sin(lambda-delta) ∓ sqrt(disc)] (standard basis when beta = 0).
/// The same principal-branch sqrt value feeds both zeta and v.
struct TransferData {
  C2Matrix t;
  cplx zeta_plus;
  cplx zeta_minus;
  C2Vector v_plus;
  C2Vector v_minus;
  double discriminant;
};

[[nodiscard]] TransferData transfer_at(const Coin& c, double lambda);
[[nodiscard]] C2Matrix transfer_inverse(const Coin& c, double lambda);

enum class Sign { plus, minus };

struct SignPair {
  Sign s_p;
  Sign s_m;
};

/// True when |cos(lambda - delta_j)| > |alpha_j| for both bulk coins.
[[nodiscard]] bool is_admissible(const ModelSpec& spec, double lambda);

/// s_p = + iff cos(lambda - delta_p) < 0; s_m = + iff cos(lambda - delta_m) > 0.
/// Throws OutsideAdmissibleRegion unless is_admissible(spec, lambda).
[[nodiscard]] SignPair sign_selectors(const ModelSpec& spec, double lambda);

/// The 2x2 matching matrix whose determinant vanishes exactly at eigenphases.
struct DMatrix {
  C2Matrix d;
  Sign s_p;
  Sign s_m;
  double lambda;
  /// Origin transfer eigenvectors the kernel coefficients refer to.
  C2Vector v_o_plus;
  C2Vector v_o_minus;
};

/// Rows: perp of the selected plus/minus bulk eigenvector against v_{o,±},
/// the top row weighted by zeta_{o,±}. Throws OutsideAdmissibleRegion.
[[nodiscard]] DMatrix d_matrix(const ModelSpec& spec, double lambda);

/// Open arc (lo, hi) on the circle. 0 <= lo < 2pi and lo < hi; hi may exceed
/// 2pi when the arc wraps through 0.
struct Arc {
  double lo;
  double hi;

  [[nodiscard]] bool contains(double lambda) const;
  [[nodiscard]] double width() const { return hi - lo; }
};

/// Admissible set {|cos(lambda-delta_p)| > |alpha_p|} ∩ {|cos(lambda-delta_m)| > |alpha_m|}
/// as disjoint open arcs sorted by lo.
[[nodiscard]] std::vector<Arc> admissible_intervals(const ModelSpec& spec);

/// Modulus of the contracting transfer eigenvalue of a bulk coin (< 1 inside the
/// admissible region). Tail decay rate of an eigenfunction on that side.
[[nodiscard]] double contracting_rate(const Coin& c, double lambda);

}  // namespace qw
