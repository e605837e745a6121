#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace qw {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultTol = 1e-10;

/// Two-component amplitude (left, right) at one lattice site.
struct C2Vector {
  cplx l{};
  cplx r{};

  constexpr C2Vector() = default;
  constexpr C2Vector(cplx left, cplx right) : l(left), r(right) {}

  C2Vector& operator+=(const C2Vector& o) {
    l += o.l;
    r += o.r;
    return *this;
  }
  C2Vector& operator-=(const C2Vector& o) {
    l -= o.l;
    r -= o.r;
    return *this;
  }
  C2Vector& operator*=(cplx s) {
    l *= s;
    r *= s;
    return *this;
  }

  friend C2Vector operator+(C2Vector a, const C2Vector& b) { return a += b; }
  friend C2Vector operator-(C2Vector a, const C2Vector& b) { return a -= b; }
  friend C2Vector operator*(cplx s, C2Vector v) { return v *= s; }
  friend C2Vector operator*(C2Vector v, cplx s) { return v *= s; }
  friend bool operator==(const C2Vector&, const C2Vector&) = default;

  [[nodiscard]] double norm2() const { return std::norm(l) + std::norm(r); }
  [[nodiscard]] double norm() const { return std::sqrt(norm2()); }
  [[nodiscard]] bool finite() const {
    return std::isfinite(l.real()) && std::isfinite(l.imag()) && std::isfinite(r.real()) &&
           std::isfinite(r.imag());
  }
};

/// Row-major 2x2 complex matrix [[a, b], [c, d]].
struct C2Matrix {
  cplx a{}, b{}, c{}, d{};

  static constexpr C2Matrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr C2Matrix diag(cplx x, cplx y) { return {x, 0.0, 0.0, y}; }

  C2Matrix& operator+=(const C2Matrix& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  C2Matrix& operator-=(const C2Matrix& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    d -= o.d;
    return *this;
  }
  C2Matrix& operator*=(cplx s) {
    a *= s;
    b *= s;
    c *= s;
    d *= s;
    return *this;
  }

  friend C2Matrix operator+(C2Matrix x, const C2Matrix& y) { return x += y; }
  friend C2Matrix operator-(C2Matrix x, const C2Matrix& y) { return x -= y; }
  friend C2Matrix operator*(cplx s, C2Matrix m) { return m *= s; }
  friend bool operator==(const C2Matrix&, const C2Matrix&) = default;

  [[nodiscard]] C2Matrix adjoint() const {
    return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
  }
  [[nodiscard]] cplx trace() const { return a + d; }
  /// Frobenius norm.
  [[nodiscard]] double norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
  }
  [[nodiscard]] bool finite() const {
    return C2Vector{a, b}.finite() && C2Vector{c, d}.finite();
  }
};

[[nodiscard]] C2Matrix mat_mul(const C2Matrix& x, const C2Matrix& y);
[[nodiscard]] C2Vector mat_vec(const C2Matrix& m, const C2Vector& v);
[[nodiscard]] cplx det2(const C2Matrix& m);

inline C2Matrix operator*(const C2Matrix& x, const C2Matrix& y) { return mat_mul(x, y); }
inline C2Vector operator*(const C2Matrix& m, const C2Vector& v) { return mat_vec(m, v); }

/// Inverse by the adjugate formula. Caller guarantees det != 0.
[[nodiscard]] C2Matrix inverse2(const C2Matrix& m);

/// <u, v> = conj(u)·v, conjugate-linear in the first slot.
[[nodiscard]] cplx inner(const C2Vector& u, const C2Vector& v);

/// perp(v) = (-conj(v.r), conj(v.l)); satisfies inner(perp(v), v) == 0.
[[nodiscard]] C2Vector perp(const C2Vector& v);

/// Principal square root of a real number: sqrt(x) for x >= 0, i*sqrt(|x|) otherwise.
[[nodiscard]] inline cplx principal_sqrt(double x) {
  return x >= 0.0 ? cplx{std::sqrt(x), 0.0} : cplx{0.0, std::sqrt(-x)};
}

struct EigenPair {
  cplx value;
  C2Vector vector;
};

struct Eigen2Result {
  std::array<EigenPair, 2> pairs;
  /// Set when both eigenvalues coincide. For a defective matrix the two
  /// returned vectors are equal.
  bool repeated = false;
};

/// Eigen-decomposition of a general 2x2 complex matrix. Vectors are unit norm.
[[nodiscard]] Eigen2Result eigen2(const C2Matrix& m, double tol = kDefaultTol);

struct Svd2Result {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  /// Unit right-singular vector for sigma_min (spans ker m when sigma_min == 0).
  C2Vector null_direction;
};

/// Singular values and the smaller right-singular direction of m.
[[nodiscard]] Svd2Result svd2(const C2Matrix& m);

/// Smallest distance between two angles on the circle, in [0, pi].
[[nodiscard]] double angular_distance(double a, double b);

/// Wraps an angle into [0, 2pi).
[[nodiscard]] double wrap_phase(double x);

}  // namespace qw
