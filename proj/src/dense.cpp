#include <algorithm>
#include <array>
#include <complex>
#include <random>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include "qwalk/simulator.hpp"

namespace qw {

namespace {

constexpr int kBand = 5;

// Ring of sites -N .. N, ordered 0, 1, -1, 2, -2, ... so that neighbours are at
// most two positions apart.
struct Ring {
  long half_width;
  std::size_t sites;

  [[nodiscard]] std::size_t pos(long x) const {
    return x == 0 ? 0 : (x > 0 ? static_cast<std::size_t>(2 * x - 1) : static_cast<std::size_t>(-2 * x));
  }
  [[nodiscard]] long site(std::size_t p) const {
    if (p == 0) return 0;
    const long k = static_cast<long>((p + 1) / 2);
    return p % 2 == 1 ? k : -k;
  }
  [[nodiscard]] long wrap(long x) const {
    if (x > half_width) return -half_width;
    if (x < -half_width) return half_width;
    return x;
  }
  [[nodiscard]] std::size_t dim() const { return 2 * sites; }
};

struct Entry {
  std::size_t col;
  cplx val;
};

// Two nonzeros per row of U.
struct SparseWalk {
  std::vector<std::array<Entry, 2>> rows;

  void apply(const std::vector<cplx>& v, std::vector<cplx>& out) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out[i] = rows[i][0].val * v[rows[i][0].col] + rows[i][1].val * v[rows[i][1].col];
    }
  }
};

SparseWalk build_walk(const ModelSpec& model, const Ring& ring) {
  SparseWalk u;
  u.rows.resize(ring.dim());
  for (long x = -ring.half_width; x <= ring.half_width; ++x) {
    const long xr = ring.wrap(x + 1);
    const long xl = ring.wrap(x - 1);
    const C2Matrix cr = coin_matrix(model.coin_at(xr));
    const C2Matrix cl = coin_matrix(model.coin_at(xl));
    const std::size_t p = ring.pos(x);
    u.rows[2 * p] = {Entry{2 * ring.pos(xr), cr.a}, Entry{2 * ring.pos(xr) + 1, cr.b}};
    u.rows[2 * p + 1] = {Entry{2 * ring.pos(xl), cl.c}, Entry{2 * ring.pos(xl) + 1, cl.d}};
  }
  return u;
}

// Upper band storage (column major, ldab = kBand + 1) of H = (U + U*)/2.
std::vector<cplx> hermitian_band(const SparseWalk& u) {
  const std::size_t n = u.rows.size();
  const std::size_t ld = kBand + 1;
  std::vector<cplx> ab(ld * n, cplx{0.0, 0.0});
  auto add_upper = [&](std::size_t i, std::size_t j, cplx v) {
    if (j - i > static_cast<std::size_t>(kBand)) throw std::logic_error("walk matrix exceeds band");
    ab[(kBand + i - j) + j * ld] += v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (const Entry& e : u.rows[i]) {
      const std::size_t j = e.col;
      if (i == j) {
        add_upper(i, i, e.val.real());
      } else if (i < j) {
        add_upper(i, j, 0.5 * e.val);
      } else {
        add_upper(j, i, 0.5 * std::conj(e.val));
      }
    }
  }
  return ab;
}

cplx band_at(const std::vector<cplx>& ab, std::size_t i, std::size_t j) {
  const std::size_t ld = kBand + 1;
  if (i <= j) return j - i > static_cast<std::size_t>(kBand) ? cplx{} : ab[(kBand + i - j) + j * ld];
  return std::conj(band_at(ab, j, i));
}

// H in general band storage (ldab = 3 * kBand + 1, kBand rows reserved for fill-in).
std::vector<cplx> general_band(const std::vector<cplx>& hb, std::size_t n) {
  const std::size_t ld = 3 * kBand + 1;
  std::vector<cplx> ab(ld * n, cplx{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i0 = j > static_cast<std::size_t>(kBand) ? j - kBand : 0;
    const std::size_t i1 = std::min(n - 1, j + kBand);
    for (std::size_t i = i0; i <= i1; ++i) ab[(2 * kBand + i - j) + j * ld] = band_at(hb, i, j);
  }
  return ab;
}

// LU of H - sigma I.
class ShiftedSolver {
 public:
  ShiftedSolver(const std::vector<cplx>& gb, std::size_t n, double sigma) : n_(n) {
    const std::size_t ld = 3 * kBand + 1;
    for (double nudge = 0.0;; nudge = nudge == 0.0 ? 1e-13 : nudge * 10.0) {
      ab_ = gb;
      for (std::size_t j = 0; j < n; ++j) ab_[2 * kBand + j * ld] -= sigma + nudge;
      ipiv_.assign(n, 0);
      const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n),
                                             static_cast<lapack_int>(n), kBand, kBand, ab_.data(),
                                             static_cast<lapack_int>(ld), ipiv_.data());
      if (info == 0) return;
      if (info < 0 || nudge > 1e-8) throw std::runtime_error("banded factorization failed");
    }
  }

  void solve(std::vector<cplx>& b) const {
    LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), kBand, kBand, 1, ab_.data(),
                   static_cast<lapack_int>(3 * kBand + 1), ipiv_.data(), b.data(),
                   static_cast<lapack_int>(n_));
  }

 private:
  std::size_t n_;
  std::vector<cplx> ab_;
  std::vector<lapack_int> ipiv_;
};

double vec_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cplx vec_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void orthonormalize(std::vector<cplx>& v, const std::vector<std::vector<cplx>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const cplx c = vec_dot(q, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
  const double n = vec_norm(v);
  for (cplx& z : v) z /= n;
}

using Basis = std::vector<std::vector<cplx>>;

Eigen::MatrixXcd restricted(const SparseWalk& u, const Basis& left, const Basis& right) {
  const std::size_t n = u.rows.size();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(left.size()), static_cast<Eigen::Index>(right.size()));
  std::vector<cplx> image(n);
  for (std::size_t j = 0; j < right.size(); ++j) {
    u.apply(right[j], image);
    for (std::size_t i = 0; i < left.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vec_dot(left[i], image);
    }
  }
  return m;
}

bool inner_site(const Ring& ring, std::size_t p) { return std::abs(ring.site(p)) <= ring.half_width / 2; }

double inner_mass(const Ring& ring, const std::vector<cplx>& v) {
  double inside = 0.0, total = 0.0;
  for (std::size_t p = 0; p < ring.sites; ++p) {
    const double m = std::norm(v[2 * p]) + std::norm(v[2 * p + 1]);
    total += m;
    if (inner_site(ring, p)) inside += m;
  }
  return total > 0.0 ? inside / total : 0.0;
}

// Rotates an orthonormal set within its span to the eigenvectors of the
// projector onto |x| <= N/2.
Basis localize(const Ring& ring, const Basis& group) {
  const auto g = static_cast<Eigen::Index>(group.size());
  Eigen::MatrixXcd m(g, g);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) {
      cplx s{0.0, 0.0};
      for (std::size_t p = 0; p < ring.sites; ++p) {
        if (!inner_site(ring, p)) continue;
        for (std::size_t c = 2 * p; c < 2 * p + 2; ++c) {
          s += std::conj(group[static_cast<std::size_t>(i)][c]) * group[static_cast<std::size_t>(j)][c];
        }
      }
      m(i, j) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  Basis out;
  const std::size_t n = group.front().size();
  for (Eigen::Index q = g - 1; q >= 0; --q) {
    std::vector<cplx> v(n, cplx{0.0, 0.0});
    for (Eigen::Index j = 0; j < g; ++j) {
      const cplx c = es.eigenvectors()(j, q);
      for (std::size_t i = 0; i < n; ++i) v[i] += c * group[static_cast<std::size_t>(j)][i];
    }
    orthonormalize(v, out);
    out.push_back(std::move(v));
  }
  return out;
}

double pair_residual(const SparseWalk& u, const std::vector<cplx>& v, cplx z) {
  std::vector<cplx> w(v.size());
  u.apply(v, w);
  for (std::size_t i = 0; i < v.size(); ++i) w[i] -= z * v[i];
  return vec_norm(w);
}

}  // namespace

DenseSpectrum dense_point_spectrum(const ModelSpec& model, long half_width, double mass_threshold) {
  if (half_width < 1) throw std::invalid_argument("half_width must be positive");
  const Ring ring{half_width, static_cast<std::size_t>(2 * half_width + 1)};
  const std::size_t n = ring.dim();
  const SparseWalk u = build_walk(model, ring);
  const std::vector<cplx> hb = hermitian_band(u);

  std::vector<double> w(n);
  {
    std::vector<cplx> work = hb;
    const lapack_int info = LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n), kBand,
                                          work.data(), kBand + 1, w.data(), nullptr, 1);
    if (info != 0) throw std::runtime_error("banded Hermitian eigensolver failed");
  }

  DenseSpectrum out;
  out.dimension = n;
  const std::vector<cplx> gb = general_band(hb, n);
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;

  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && w[end] - w[end - 1] <= kDenseClusterGap) ++end;

    // Orthonormal basis of the H-eigenspace of the cluster by inverse iteration.
    Basis basis;
    for (std::size_t k = start; k < end; ++k) {
      const ShiftedSolver solver(gb, n, w[k]);
      std::vector<cplx> v(n);
      for (cplx& z : v) z = {gauss(rng), gauss(rng)};
      orthonormalize(v, basis);
      for (int it = 0; it < 2; ++it) {
        solver.solve(v);
        orthonormalize(v, basis);
      }
      basis.push_back(std::move(v));
    }

    // U restricted to the cluster; its eigenvalues are e^{i lambda} with cos lambda in the cluster.
    Eigen::MatrixXcd proj = restricted(u, basis, basis);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(proj, true);
    const auto k = static_cast<Eigen::Index>(basis.size());
    std::vector<std::pair<double, Eigen::Index>> order;
    // Phases of one cluster sit near +-acos(w); cut the circle away from them.
    const bool near_zero = w[start] > 0.0;
    for (Eigen::Index m = 0; m < k; ++m) {
      const double a = std::arg(es.eigenvalues()(m));
      order.emplace_back(near_zero ? a : wrap_phase(a), m);
    }
    std::sort(order.begin(), order.end());

    // Eigenvectors sharing an eigenvalue are rotated to extremize their mass
    // near the origin, separating origin-bound states from seam-bound ones.
    std::size_t g0 = 0;
    while (g0 < order.size()) {
      std::size_t g1 = g0 + 1;
      while (g1 < order.size() && order[g1].first - order[g1 - 1].first <= kDenseDegeneratePhase) ++g1;
      Basis group;
      for (std::size_t q = g0; q < g1; ++q) {
        std::vector<cplx> v(n, cplx{0.0, 0.0});
        for (Eigen::Index j = 0; j < k; ++j) {
          const cplx c = es.eigenvectors()(j, order[q].second);
          for (std::size_t i = 0; i < n; ++i) v[i] += c * basis[static_cast<std::size_t>(j)][i];
        }
        orthonormalize(v, group);
        group.push_back(std::move(v));
      }
      if (group.size() > 1) group = localize(ring, group);

      for (const auto& v : group) {
        std::vector<cplx> uv(n);
        u.apply(v, uv);
        cplx z = vec_dot(v, uv);
        z /= std::abs(z);
        const double res = pair_residual(u, v, z);
        out.max_residual = std::max(out.max_residual, res);
        const double mass = inner_mass(ring, v);
        if (mass < mass_threshold) continue;
        if (!(res < kDenseResidualTol)) {
          ++out.residual_rejections;
          continue;
        }
        out.points.push_back({wrap_phase(std::arg(z)), mass, res});
      }
      g0 = g1;
    }
    start = end;
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const DensePoint& a, const DensePoint& b) { return a.lambda < b.lambda; });
  return out;
}

std::vector<DensePoint> dense_all_eigenpairs(const ModelSpec& model, long half_width) {
  const Ring ring{half_width, static_cast<std::size_t>(2 * half_width + 1)};
  const std::size_t n = ring.dim();
  const SparseWalk u = build_walk(model, ring);
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (const Entry& e : u.rows[i]) dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.col)) += e.val;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense, true);
  std::vector<DensePoint> out;
  for (std::size_t m = 0; m < n; ++m) {
    const cplx zraw = es.eigenvalues()(static_cast<Eigen::Index>(m));
    const cplx z = zraw / std::abs(zraw);
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
    const double nv = vec_norm(v);
    for (cplx& e : v) e /= nv;
    out.push_back({wrap_phase(std::arg(z)), inner_mass(ring, v), pair_residual(u, v, z)});
  }
  std::sort(out.begin(), out.end(), [](const DensePoint& a, const DensePoint& b) { return a.lambda < b.lambda; });
  return out;
}

}  // namespace qw
