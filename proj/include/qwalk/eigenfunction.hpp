#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qwalk/model.hpp"
#include "qwalk/spectrum.hpp"

namespace qw {

/// Two-component amplitudes on the sites x_min .. x_min + size - 1.
struct WaveState {
  long x_min = 0;
  std::vector<C2Vector> values;

  [[nodiscard]] long x_max() const { return x_min + static_cast<long>(values.size()) - 1; }
  [[nodiscard]] bool contains(long x) const { return x >= x_min && x <= x_max(); }
  [[nodiscard]] const C2Vector& at(long x) const { return values.at(static_cast<std::size_t>(x - x_min)); }
  [[nodiscard]] C2Vector& at(long x) { return values.at(static_cast<std::size_t>(x - x_min)); }
  [[nodiscard]] double norm2() const;
  [[nodiscard]] bool finite() const;

  /// Zero state on [x_min, x_max].
  static WaveState zeros(long x_min, long x_max);
  /// Single site x carrying v on [x_min, x_max].
  static WaveState delta(long x_min, long x_max, long x, C2Vector v);
};

/// Relative size of the expanding-mode component tolerated in the seed vectors.
inline constexpr double kExpandingSeedTol = 1e-6;
/// Growth of ||psi~|| over ||phi|| that aborts the recursion.
inline constexpr double kOverflowGuard = 1e6;

/// psi~ = J psi on [-half_width, half_width]: psi~(0) = phi, psi~(1) = T_o phi,
/// psi~(x+1) = T_p psi~(x) for x >= 1 and psi~(x-1) = T_m^{-1} psi~(x) for x <= 0.
/// After each product the component along the growing bulk mode is projected out,
/// so roundoff cannot feed it. Throws ExpandingModeError if the seeds carry that
/// mode, i.e. rec is not an eigenvalue of spec or its kernel vector is wrong.
[[nodiscard]] WaveState build_psi_tilde(const ModelSpec& spec, const EigenvalueRecord& rec,
                                        long half_width);

/// (J^{-1} psi)(x) = [psi_L(x+1), psi_R(x)]. The rightmost site is dropped.
[[nodiscard]] WaveState unshift(const WaveState& s);
/// (J psi)(x) = [psi_L(x-1), psi_R(x)]. The leftmost site is dropped.
[[nodiscard]] WaveState shift_j(const WaveState& s);

/// Interior sites skipped on each side by verify_eigen.
inline constexpr long kInteriorMargin = 2;

/// One application of U at site x; x +- 1 must lie in the window.
[[nodiscard]] C2Vector apply_walk_at(const ModelSpec& spec, const WaveState& s, long x);

/// max over interior x of ||(U psi)(x) - e^{i lambda} psi(x)||.
[[nodiscard]] double verify_eigen(const ModelSpec& spec, double lambda, const WaveState& s);

/// max over interior x of ||(J psi)(x+1) - T_x(lambda) (J psi)(x)||.
[[nodiscard]] double recursion_residual(const ModelSpec& spec, double lambda, const WaveState& s);

struct DecayRates {
  double left;
  double right;
};

inline constexpr double kDecayFloor = 1e-14;
inline constexpr std::size_t kMinDecaySites = 10;

/// exp of the least-squares slope of log||psi(x)|| against |x| on each side,
/// using sites |x| >= 2 with ||psi(x)|| > kDecayFloor. Throws InsufficientData.
[[nodiscard]] DecayRates decay_fit(const WaveState& s);

struct EigenfunctionProfile {
  WaveState state;  ///< unit norm, largest-modulus component real positive
  double lambda = 0.0;
  double residual = 0.0;
  double recursion_residual = 0.0;
  bool rates_fitted = false;
  DecayRates rates{0.0, 0.0};
  double tail_mass = 0.0;        ///< mass outside |x| <= half_width / 2
  double beyond_window = 0.0;    ///< geometric-series bound on the mass cut off by the window
};

inline constexpr long kDefaultHalfWidth = 80;

/// Builds, unshifts, normalizes and checks the eigenfunction of rec.
[[nodiscard]] EigenfunctionProfile eigenfunction(const ModelSpec& spec, const EigenvalueRecord& rec,
                                                 long half_width = kDefaultHalfWidth);

/// Scales to unit norm and rotates the largest-modulus component to the positive real axis.
void normalize_state(WaveState& s);

/// CSV with header "x,re_L,im_L,re_R,im_R,norm2" and 17 significant digits.
[[nodiscard]] std::string state_to_csv(const WaveState& s);
/// Reads a consecutive-site CSV as written by state_to_csv. Throws ParseError.
[[nodiscard]] WaveState state_from_csv(std::string_view text);

}  // namespace qw
