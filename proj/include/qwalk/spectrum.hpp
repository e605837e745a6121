#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qwalk/model.hpp"
#include "qwalk/transfer.hpp"

namespace qw {

/// Model classes with closed-form eigenphases.
enum class TheoremClass {
  one_defect_phase_free,   ///< bulk coins equal, delta_o = delta           ("3.1")
  one_defect_phase_shift,  ///< bulk coins equal, (alpha_o, beta_o) = (alpha, beta)  ("3.2")
  two_phase_equal_arg,     ///< origin = plus, arg beta_p = arg beta_m      ("3.3")
  two_phase_equal_delta,   ///< origin = plus, delta_p = delta_m            ("3.4")
  two_phase_diag_defect,   ///< beta_o = 0, |beta_p| = |beta_m|, delta_p = delta_m  ("3.5")
};

enum class Provenance { numerical, theorem_3_1, theorem_3_2, theorem_3_3, theorem_3_4, theorem_3_5 };

[[nodiscard]] const char* to_string(TheoremClass c);
[[nodiscard]] const char* to_string(Provenance p);
[[nodiscard]] Provenance provenance_of(TheoremClass c);

struct EigenvalueRecord {
  double lambda = 0.0;  ///< in [0, 2pi)
  cplx eigphase;        ///< e^{i lambda}
  Provenance provenance = Provenance::numerical;
  /// Unit vector [a, b] in ker D(lambda); phi = a v_{o,+} + b v_{o,-}.
  /// First nonzero component is real and positive.
  C2Vector kernel_vector;
  double decay_plus = 0.0;   ///< |zeta| of the contracting plus-side mode
  double decay_minus = 0.0;  ///< |zeta| of the contracting minus-side mode
  double residual = 0.0;     ///< |det D(lambda)|
  double singular_ratio = 0.0;  ///< sigma_max / sigma_min of D(lambda)
};

struct NumericOptions {
  std::size_t grid_points = 200000;
  double tol = 1e-9;             ///< acceptance threshold on |det D|
  double merge_tol = 1e-7;       ///< roots closer than this (radians) are merged
  double refine_width = 1e-13;   ///< golden-section stopping width
  /// Grid minima of |det D| / (||row 1|| ||row 2||) below this are refined. The
  /// ratio is at most 1, and near arc ends a root's dip can be narrower than the
  /// grid spacing, so by default every local minimum is refined.
  double coarse_ratio = 1.0;
  /// Roots also need |det D| / (||row 1|| ||row 2||) below this, which rejects the
  /// zeros of det D where a row vanishes at an arc end.
  double max_row_sine = 1e-6;
  double min_phi_norm = 1e-6;    ///< rejects roots where phi = a v_{o,+} + b v_{o,-} vanishes
};

struct SpectrumReport {
  ModelSpec model;
  std::vector<EigenvalueRecord> records;  ///< sorted by lambda
  std::vector<Arc> intervals;
  NumericOptions options;
  std::size_t candidates = 0;          ///< grid minima that were refined
  std::size_t rejected_degenerate = 0; ///< zeros of det D with vanishing phi
};

/// Fills kernel vector, decay rates, residual and singular ratio for an
/// admissible lambda. Throws OutsideAdmissibleRegion.
[[nodiscard]] EigenvalueRecord make_record(const ModelSpec& spec, double lambda, Provenance prov);

/// All eigenphases via the zeros of det D(lambda) on the admissible arcs.
[[nodiscard]] SpectrumReport solve_numeric(const ModelSpec& spec, const NumericOptions& opt = {});

/// Output of a closed-form solver.
struct ClosedFormResult {
  TheoremClass cls;
  std::vector<EigenvalueRecord> records;  ///< sorted by lambda
  /// Set when an existence condition is within kConditionMargin of equality.
  /// Such a condition counts as failed, so its phases are not in `records`.
  bool indeterminate = false;
};

inline constexpr double kConditionMargin = 1e-12;
inline constexpr double kClassTol = 1e-10;

// Raw closed-form eigenphases e^{i lambda}, each followed by its negative.
// Empty when the existence condition fails.
struct PhaseList {
  std::vector<cplx> phases;
  bool indeterminate = false;
};
[[nodiscard]] PhaseList theorem_3_1_phases(cplx alpha, cplx beta, double delta, cplx beta_o);
[[nodiscard]] PhaseList theorem_3_2_phases(cplx alpha, cplx beta, double delta, double delta_o);
[[nodiscard]] PhaseList theorem_3_3_phases(const Coin& plus, const Coin& minus);
[[nodiscard]] PhaseList theorem_3_4_phases(const Coin& plus, const Coin& minus);
[[nodiscard]] PhaseList theorem_3_5_phases(const ModelSpec& spec);

// Parameter forms. The missing coin data is filled canonically (real positive
// alpha_o for the first form); the phases do not depend on it.
[[nodiscard]] ClosedFormResult solve_theorem_3_1(cplx alpha, cplx beta, double delta, cplx beta_o);
[[nodiscard]] ClosedFormResult solve_theorem_3_2(cplx alpha, cplx beta, double delta, double delta_o);
[[nodiscard]] ClosedFormResult solve_theorem_3_3(const Coin& plus, const Coin& minus);
[[nodiscard]] ClosedFormResult solve_theorem_3_4(const Coin& plus, const Coin& minus);

// Model-level solvers. Throw ClassMismatch when spec is outside the class.
[[nodiscard]] ClosedFormResult solve_theorem_3_1(const ModelSpec& spec);
[[nodiscard]] ClosedFormResult solve_theorem_3_2(const ModelSpec& spec);
[[nodiscard]] ClosedFormResult solve_theorem_3_3(const ModelSpec& spec);
[[nodiscard]] ClosedFormResult solve_theorem_3_4(const ModelSpec& spec);
[[nodiscard]] ClosedFormResult solve_theorem_3_5(const ModelSpec& spec);
[[nodiscard]] ClosedFormResult solve_closed_form(const ModelSpec& spec, TheoremClass cls);

/// Every class whose assumptions hold within kClassTol.
[[nodiscard]] std::vector<TheoremClass> classify_model(const ModelSpec& spec);
[[nodiscard]] bool in_class(const ModelSpec& spec, TheoremClass cls);

struct ClassComparison {
  ClosedFormResult closed;
  std::vector<double> unmatched_numeric;  ///< numeric phases with no closed-form partner
  std::vector<double> unmatched_closed;   ///< closed-form phases with no numeric partner
  [[nodiscard]] bool agrees() const { return unmatched_numeric.empty() && unmatched_closed.empty(); }
};

struct CrossCheckReport {
  SpectrumReport numeric;
  std::vector<ClassComparison> comparisons;
  std::vector<double> range_violations;  ///< phases failing |cos(lambda-delta_j)| > |alpha_j|
  std::size_t discrepancies = 0;         ///< unmatched phases in determinate comparisons
  std::vector<std::string> notes;
  [[nodiscard]] bool ok() const { return discrepancies == 0 && range_violations.empty(); }
};

inline constexpr double kPhaseMatchTol = 1e-8;

[[nodiscard]] CrossCheckReport cross_check(const ModelSpec& spec, const NumericOptions& opt = {},
                                           double match_tol = kPhaseMatchTol);

/// Matches two phase sets within tol (angular distance). Returns the
/// elements of each side left without a partner.
struct PhaseMatch {
  std::vector<double> only_a;
  std::vector<double> only_b;
};
[[nodiscard]] PhaseMatch match_phases(std::vector<double> a, std::vector<double> b, double tol);

}  // namespace qw
