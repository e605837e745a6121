#include "qwalk/transfer.hpp"

#include <algorithm>

#include "qwalk/errors.hpp"

namespace qw {

TransferData transfer_at(const Coin& c, double lambda) {
  const double theta = lambda - c.delta();
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const cplx alpha = c.alpha();
  const cplx beta = c.beta();
  const cplx inv_alpha = 1.0 / alpha;
  const cplx e_plus{cs, sn};
  const cplx e_minus{cs, -sn};

  TransferData out;
  out.t = {e_plus * inv_alpha, -beta * inv_alpha, -std::conj(beta) * inv_alpha,
           e_minus * inv_alpha};
  out.discriminant = cs * cs - std::norm(alpha);

  if (std::abs(beta) <= kBetaZeroTol) {
    out.zeta_plus = e_plus * inv_alpha;
    out.zeta_minus = e_minus * inv_alpha;
    out.v_plus = {1.0, 0.0};
    out.v_minus = {0.0, 1.0};
    return out;
  }
  const cplx root = principal_sqrt(out.discriminant);
  out.zeta_plus = (cs + root) * inv_alpha;
  out.zeta_minus = (cs - root) * inv_alpha;
  out.v_plus = {beta, cplx{0.0, sn} - root};
  out.v_minus = {beta, cplx{0.0, sn} + root};
  return out;
}

C2Matrix transfer_inverse(const Coin& c, double lambda) {
  const double theta = lambda - c.delta();
  const cplx alpha = c.alpha();
  const cplx pre = alpha / std::norm(alpha);
  const cplx beta = c.beta();
  return {pre * std::polar(1.0, -theta), pre * beta, pre * std::conj(beta),
          pre * std::polar(1.0, theta)};
}

bool is_admissible(const ModelSpec& spec, double lambda) {
  return std::abs(std::cos(lambda - spec.plus.delta())) > std::abs(spec.plus.alpha()) &&
         std::abs(std::cos(lambda - spec.minus.delta())) > std::abs(spec.minus.alpha());
}

SignPair sign_selectors(const ModelSpec& spec, double lambda) {
  if (!is_admissible(spec, lambda)) {
    throw OutsideAdmissibleRegion("lambda = " + std::to_string(lambda) +
                                  " is outside the admissible region");
  }
  return {std::cos(lambda - spec.plus.delta()) < 0.0 ? Sign::plus : Sign::minus,
          std::cos(lambda - spec.minus.delta()) > 0.0 ? Sign::plus : Sign::minus};
}

DMatrix d_matrix(const ModelSpec& spec, double lambda) {
  const SignPair signs = sign_selectors(spec, lambda);
  const TransferData p = transfer_at(spec.plus, lambda);
  const TransferData m = transfer_at(spec.minus, lambda);
  const TransferData o = transfer_at(spec.origin, lambda);

  const C2Vector wp = perp(signs.s_p == Sign::plus ? p.v_plus : p.v_minus);
  const C2Vector wm = perp(signs.s_m == Sign::plus ? m.v_plus : m.v_minus);

  DMatrix out;
  out.d = {inner(wp, o.v_plus) * o.zeta_plus, inner(wp, o.v_minus) * o.zeta_minus,
           inner(wm, o.v_plus), inner(wm, o.v_minus)};
  out.s_p = signs.s_p;
  out.s_m = signs.s_m;
  out.lambda = lambda;
  out.v_o_plus = o.v_plus;
  out.v_o_minus = o.v_minus;
  return out;
}

bool Arc::contains(double lambda) const {
  double x = wrap_phase(lambda);
  if (x <= lo) x += kTwoPi;
  return x > lo && x < hi;
}

namespace {

// Arcs where |cos(lambda - delta)| > |alpha|: two arcs of half-width arccos|alpha|
// centred on delta and delta + pi.
std::vector<Arc> hyperbolic_arcs(const Coin& c) {
  const double half = std::acos(std::min(1.0, std::abs(c.alpha())));
  if (half <= 0.0) return {};
  std::vector<Arc> arcs;
  for (double centre : {c.delta(), c.delta() + kPi}) {
    const double lo = wrap_phase(centre - half);
    arcs.push_back({lo, lo + 2.0 * half});
  }
  return arcs;
}

}  // namespace

std::vector<Arc> admissible_intervals(const ModelSpec& spec) {
  std::vector<Arc> out;
  for (const Arc& a : hyperbolic_arcs(spec.plus)) {
    for (const Arc& b : hyperbolic_arcs(spec.minus)) {
      for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
        const double lo = std::max(a.lo, b.lo + shift);
        const double hi = std::min(a.hi, b.hi + shift);
        if (hi > lo) {
          const double wlo = wrap_phase(lo);
          out.push_back({wlo, wlo + (hi - lo)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  return out;
}

double contracting_rate(const Coin& c, double lambda) {
  const TransferData t = transfer_at(c, lambda);
  return std::min(std::abs(t.zeta_plus), std::abs(t.zeta_minus));
}

}  // namespace qw
