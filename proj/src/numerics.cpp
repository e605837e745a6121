#include "qwalk/numerics.hpp"

#include <algorithm>

namespace qw {

C2Matrix mat_mul(const C2Matrix& x, const C2Matrix& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

C2Vector mat_vec(const C2Matrix& m, const C2Vector& v) {
  return {m.a * v.l + m.b * v.r, m.c * v.l + m.d * v.r};
}

cplx det2(const C2Matrix& m) { return m.a * m.d - m.b * m.c; }

C2Matrix inverse2(const C2Matrix& m) {
  const cplx inv_det = 1.0 / det2(m);
  return {m.d * inv_det, -m.b * inv_det, -m.c * inv_det, m.a * inv_det};
}

cplx inner(const C2Vector& u, const C2Vector& v) {
  return std::conj(u.l) * v.l + std::conj(u.r) * v.r;
}

C2Vector perp(const C2Vector& v) { return {-std::conj(v.r), std::conj(v.l)}; }

namespace {

C2Vector normalized(const C2Vector& v) {
  const double n = v.norm();
  return n > 0.0 ? (1.0 / n) * v : v;
}

// Null vector of the singular matrix m - z I. Picks the row with the larger
// norm so the result does not degenerate when one row vanishes.
C2Vector null_vector(const C2Matrix& m, cplx z) {
  const cplx r00 = m.a - z, r01 = m.b;
  const cplx r10 = m.c, r11 = m.d - z;
  const double n0 = std::norm(r00) + std::norm(r01);
  const double n1 = std::norm(r10) + std::norm(r11);
  if (n0 >= n1) return normalized({r01, -r00});
  return normalized({r11, -r10});
}

}  // namespace

Eigen2Result eigen2(const C2Matrix& m, double tol) {
  const cplx half_tr = 0.5 * m.trace();
  const cplx disc = std::sqrt(half_tr * half_tr - det2(m));
  // Pick the root that avoids cancellation, then recover the other from the determinant.
  cplx z1 = std::abs(half_tr + disc) >= std::abs(half_tr - disc) ? half_tr + disc : half_tr - disc;
  cplx z2 = std::abs(z1) > 0.0 ? det2(m) / z1 : half_tr - disc;
  if (std::abs(z1) == 0.0) z2 = 0.0;

  const double scale = std::max(1.0, m.norm());
  Eigen2Result out;
  out.repeated = std::abs(z1 - z2) <= tol * scale;

  const double offdiag = std::abs(m.b) + std::abs(m.c);
  if (out.repeated && offdiag <= tol * scale) {
    // Scalar multiple of the identity: any basis works.
    out.pairs[0] = {m.a, {1.0, 0.0}};
    out.pairs[1] = {m.d, {0.0, 1.0}};
    return out;
  }
  if (offdiag <= tol * scale) {
    // Diagonal: keep the natural ordering of the basis vectors.
    out.pairs[0] = {m.a, {1.0, 0.0}};
    out.pairs[1] = {m.d, {0.0, 1.0}};
    return out;
  }
  if (std::real(z1) > std::real(z2) ||
      (std::real(z1) == std::real(z2) && std::imag(z1) > std::imag(z2))) {
    std::swap(z1, z2);
  }
  out.pairs[0] = {z1, null_vector(m, z1)};
  out.pairs[1] = {z2, out.repeated ? out.pairs[0].vector : null_vector(m, z2)};
  return out;
}

Svd2Result svd2(const C2Matrix& m) {
  // Eigen-decomposition of the Hermitian Gram matrix G = m^* m = [[p, q], [conj q, s]].
  const double p = std::norm(m.a) + std::norm(m.c);
  const double s = std::norm(m.b) + std::norm(m.d);
  const cplx q = std::conj(m.a) * m.b + std::conj(m.c) * m.d;
  const double frob2 = p + s;
  const double adet = std::abs(det2(m));

  Svd2Result out;
  const double root = std::sqrt(std::max(0.0, frob2 * frob2 - 4.0 * adet * adet));
  out.sigma_max = std::sqrt(0.5 * (frob2 + root));
  out.sigma_min = out.sigma_max > 0.0 ? adet / out.sigma_max : 0.0;

  // Eigenvector of G for its smaller eigenvalue mu = sigma_min^2.
  const double mu = out.sigma_min * out.sigma_min;
  if (std::abs(q) == 0.0) {
    out.null_direction = p <= s ? C2Vector{1.0, 0.0} : C2Vector{0.0, 1.0};
    return out;
  }
  // Rows of G - mu I: (p - mu, q) and (conj q, s - mu); use the larger one.
  const cplx r00 = p - mu, r01 = q;
  const cplx r10 = std::conj(q), r11 = s - mu;
  C2Vector v = (std::norm(r00) + std::norm(r01) >= std::norm(r10) + std::norm(r11))
                   ? C2Vector{r01, -r00}
                   : C2Vector{r11, -r10};
  out.null_direction = normalized(v);
  return out;
}

double wrap_phase(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

double angular_distance(double a, double b) {
  const double d = std::abs(wrap_phase(a) - wrap_phase(b));
  return std::min(d, kTwoPi - d);
}

}  // namespace qw
