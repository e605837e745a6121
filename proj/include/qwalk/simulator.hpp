#pragma once

#include <string>
#include <vector>

#include "qwalk/eigenfunction.hpp"
#include "qwalk/model.hpp"

namespace qw {

/// Window [-size/2, size/2 - 1] used by the simulator; size must be even and >= 2.
[[nodiscard]] WaveState centered_window(long size);

/// One application of U on the ring formed by the window. Sites keep their
/// labels, so coin_at(x) decides the coin of every site including the wrapped
/// neighbours. Throws ValidationError unless the window size is even and >= 2.
[[nodiscard]] WaveState step(const ModelSpec& model, const WaveState& state);

/// Sites of clearance the light cone must keep from the wrap seam.
inline constexpr long kSeamClearance = 10;

struct SimulationRun {
  ModelSpec model;
  WaveState initial;
  long steps = 0;
  /// mu_t(x) for t = 0 .. steps, indexed from initial.x_min. Empty when not kept.
  std::vector<std::vector<double>> distributions;
  /// (1/T) sum_{t<T} mu_t(x) with T = steps; mu_0 when steps = 0.
  std::vector<double> time_averaged;
  WaveState final_state;
  bool seam_contaminated = false;
  double max_norm_drift = 0.0;  ///< max_t |sum_x mu_t(x) - ||initial||^2|

  [[nodiscard]] double nu_at(long x) const {
    return time_averaged.at(static_cast<std::size_t>(x - initial.x_min));
  }
};

/// Runs `steps` applications of step(). The run is flagged seam_contaminated when
/// the light cone of the initial support comes within kSeamClearance sites of the
/// window edge.
[[nodiscard]] SimulationRun evolve(const ModelSpec& model, const WaveState& initial, long steps,
                                   bool keep_distributions = true);

/// "t,x,mu" rows for every kept time and site.
[[nodiscard]] std::string distributions_csv(const SimulationRun& run);
/// "x,nu" rows.
[[nodiscard]] std::string time_averaged_csv(const SimulationRun& run);

struct DensePoint {
  double lambda;    ///< in [0, 2pi)
  double mass;      ///< eigenvector mass within |x| <= N/2
  double residual;  ///< ||U v - e^{i lambda} v||
};

struct DenseSpectrum {
  std::vector<DensePoint> points;  ///< localized eigenpairs, sorted by lambda
  std::size_t dimension = 0;
  std::size_t residual_rejections = 0;  ///< localized vectors failing kDenseResidualTol
  double max_residual = 0.0;            ///< over all computed eigenpairs
};

inline constexpr double kDenseResidualTol = 1e-8;
inline constexpr double kDenseClusterGap = 1e-6;
/// U-eigenvalues closer than this are treated as one eigenspace.
inline constexpr double kDenseDegeneratePhase = 1e-9;

/// Localized eigenpairs of the walk on the ring of sites -N .. N.
///
/// H = (U + U*)/2 is banded (bandwidth 5) in the site order 0, 1, -1, 2, -2, ...
/// Its eigenvalues come from a banded Hermitian solver; each cluster of
/// eigenvalues closer than kDenseClusterGap gets an orthonormal basis by inverse
/// iteration, and U restricted to that basis is diagonalized. Within a degenerate
/// eigenspace the vectors are rotated to diagonalize the mass in |x| <= N/2, which
/// splits states bound at the origin from states bound at the seam. Eigenvectors with
/// at least mass_threshold of their weight in |x| <= N/2 and residual below
/// kDenseResidualTol are returned.
[[nodiscard]] DenseSpectrum dense_point_spectrum(const ModelSpec& model, long half_width = 128,
                                                 double mass_threshold = 0.99);

/// Every eigenpair of the ring walk as (lambda, mass, residual), via a dense
/// general eigensolver. Reference path for small rings.
[[nodiscard]] std::vector<DensePoint> dense_all_eigenpairs(const ModelSpec& model, long half_width);

}  // namespace qw
