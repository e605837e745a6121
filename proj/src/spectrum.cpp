#include "qwalk/spectrum.hpp"

#include <algorithm>
#include <limits>

#include "qwalk/errors.hpp"

namespace qw {

const char* to_string(TheoremClass c) {
  switch (c) {
    case TheoremClass::one_defect_phase_free: return "3.1";
    case TheoremClass::one_defect_phase_shift: return "3.2";
    case TheoremClass::two_phase_equal_arg: return "3.3";
    case TheoremClass::two_phase_equal_delta: return "3.4";
    case TheoremClass::two_phase_diag_defect: return "3.5";
  }
  return "?";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::numerical: return "numerical";
    case Provenance::theorem_3_1: return "theorem-3.1";
    case Provenance::theorem_3_2: return "theorem-3.2";
    case Provenance::theorem_3_3: return "theorem-3.3";
    case Provenance::theorem_3_4: return "theorem-3.4";
    case Provenance::theorem_3_5: return "theorem-3.5";
  }
  return "?";
}

Provenance provenance_of(TheoremClass c) {
  switch (c) {
    case TheoremClass::one_defect_phase_free: return Provenance::theorem_3_1;
    case TheoremClass::one_defect_phase_shift: return Provenance::theorem_3_2;
    case TheoremClass::two_phase_equal_arg: return Provenance::theorem_3_3;
    case TheoremClass::two_phase_equal_delta: return Provenance::theorem_3_4;
    case TheoremClass::two_phase_diag_defect: return Provenance::theorem_3_5;
  }
  return Provenance::numerical;
}

namespace {

C2Vector canonical_kernel(C2Vector k) {
  const double n = k.norm();
  if (n > 0.0) k *= 1.0 / n;
  const cplx lead = std::abs(k.l) > 1e-12 ? k.l : k.r;
  if (std::abs(lead) > 0.0) k *= std::conj(lead) / std::abs(lead);
  // Remove the rounding residue left in the imaginary part of the lead component.
  if (std::abs(k.l) > 1e-12) {
    k.l = std::abs(k.l);
  } else {
    k.r = std::abs(k.r);
  }
  return k;
}

double phi_relative_norm(const DMatrix& dm, const C2Vector& kernel) {
  const C2Vector phi = kernel.l * dm.v_o_plus + kernel.r * dm.v_o_minus;
  const double scale = std::max(dm.v_o_plus.norm(), dm.v_o_minus.norm());
  return scale > 0.0 ? phi.norm() / scale : 0.0;
}

// |det D| / (||row 1|| ||row 2||), the sine of the angle between the rows.
// When origin = plus (or minus), one row of D shrinks like sqrt(disc) towards an
// arc end, so |det D| tends to zero there without an eigenvalue; the ratio does not.
double row_sine(const C2Matrix& d) {
  const double r1 = std::sqrt(std::norm(d.a) + std::norm(d.b));
  const double r2 = std::sqrt(std::norm(d.c) + std::norm(d.d));
  const double den = r1 * r2;
  return den > 0.0 ? std::abs(det2(d)) / den : 1.0;
}

double search_value(const ModelSpec& spec, double lambda) {
  if (!is_admissible(spec, lambda)) return std::numeric_limits<double>::infinity();
  return row_sine(d_matrix(spec, lambda).d);
}

double golden_section(const ModelSpec& spec, double lo, double hi, double width) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = search_value(spec, x1);
  double f2 = search_value(spec, x2);
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = search_value(spec, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = search_value(spec, x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

void sort_and_merge(std::vector<EigenvalueRecord>& recs, double merge_tol) {
  std::sort(recs.begin(), recs.end(),
            [](const EigenvalueRecord& a, const EigenvalueRecord& b) { return a.lambda < b.lambda; });
  std::vector<EigenvalueRecord> out;
  for (const auto& r : recs) {
    if (!out.empty() && angular_distance(out.back().lambda, r.lambda) < merge_tol) {
      if (r.residual < out.back().residual) out.back() = r;
      continue;
    }
    out.push_back(r);
  }
  if (out.size() > 1 && angular_distance(out.front().lambda, out.back().lambda) < merge_tol) {
    if (out.back().residual < out.front().residual) out.front() = out.back();
    out.pop_back();
    std::sort(out.begin(), out.end(),
              [](const EigenvalueRecord& a, const EigenvalueRecord& b) { return a.lambda < b.lambda; });
  }
  recs = std::move(out);
}

}  // namespace

EigenvalueRecord make_record(const ModelSpec& spec, double lambda, Provenance prov) {
  lambda = wrap_phase(lambda);
  const DMatrix dm = d_matrix(spec, lambda);
  const Svd2Result sv = svd2(dm.d);
  EigenvalueRecord r;
  r.lambda = lambda;
  r.eigphase = std::polar(1.0, lambda);
  r.provenance = prov;
  r.kernel_vector = canonical_kernel(sv.null_direction);
  r.decay_plus = contracting_rate(spec.plus, lambda);
  r.decay_minus = contracting_rate(spec.minus, lambda);
  r.residual = std::abs(det2(dm.d));
  r.singular_ratio = sv.sigma_min > 0.0 ? sv.sigma_max / sv.sigma_min
                                        : std::numeric_limits<double>::infinity();
  return r;
}

SpectrumReport solve_numeric(const ModelSpec& spec, const NumericOptions& opt) {
  SpectrumReport rep;
  rep.model = spec;
  rep.options = opt;
  rep.intervals = admissible_intervals(spec);

  const double spacing = kTwoPi / static_cast<double>(std::max<std::size_t>(opt.grid_points, 1));
  std::vector<EigenvalueRecord> found;
  std::vector<double> f;

  std::vector<double> xs;
  for (const Arc& arc : rep.intervals) {
    const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(arc.width() / spacing)));
    const double h = arc.width() / static_cast<double>(n);
    // Keep every sample strictly inside the open arc.
    const double edge = 1e-14 * std::max(1.0, arc.hi);
    // Uniform cell midpoints, plus points approaching each end geometrically:
    // roots close to an arc end belong to eigenfunctions with decay near 1.
    std::vector<double> near_edge;
    for (double off = 0.25 * h; off > edge; off *= 0.5) near_edge.push_back(off);
    xs.clear();
    for (auto it = near_edge.rbegin(); it != near_edge.rend(); ++it) xs.push_back(arc.lo + *it);
    for (std::size_t k = 0; k < n; ++k) xs.push_back(arc.lo + (static_cast<double>(k) + 0.5) * h);
    for (double off : near_edge) xs.push_back(arc.hi - off);

    const std::size_t m = xs.size();
    f.resize(m);
    for (std::size_t k = 0; k < m; ++k) f[k] = search_value(spec, xs[k]);
    for (std::size_t k = 0; k < m; ++k) {
      const bool left_ok = k == 0 || f[k] <= f[k - 1];
      const bool right_ok = k + 1 == m || f[k] <= f[k + 1];
      if (!left_ok || !right_ok || !(f[k] < opt.coarse_ratio)) continue;
      ++rep.candidates;
      const double lo = k == 0 ? arc.lo + edge : xs[k - 1];
      const double hi = k + 1 == m ? arc.hi - edge : xs[k + 1];
      const double root = golden_section(spec, lo, hi, opt.refine_width);
      if (!is_admissible(spec, root)) continue;

      const DMatrix dm = d_matrix(spec, root);
      if (!(std::abs(det2(dm.d)) < opt.tol) || !(row_sine(dm.d) < opt.max_row_sine)) continue;
      const Svd2Result sv = svd2(dm.d);
      if (phi_relative_norm(dm, sv.null_direction) < opt.min_phi_norm) {
        ++rep.rejected_degenerate;
        continue;
      }
      found.push_back(make_record(spec, root, Provenance::numerical));
    }
  }
  sort_and_merge(found, opt.merge_tol);
  rep.records = std::move(found);
  return rep;
}

// ---------------------------------------------------------------------------
// Closed forms

PhaseList theorem_3_1_phases(cplx alpha, cplx beta, double delta, cplx beta_o) {
  (void)alpha;
  PhaseList out;
  const double b2 = std::norm(beta);
  const double re = std::real(std::conj(beta_o) * beta);
  const double margin = b2 - re;
  out.indeterminate = std::abs(margin) <= kConditionMargin;
  if (!(margin > kConditionMargin)) return out;
  const double den = std::sqrt(1.0 + b2 - 2.0 * re);
  const double q = std::sqrt(std::max(0.0, b2 - re * re));
  const cplx rot = std::polar(1.0, delta);
  const cplx e1 = cplx{re - 1.0, q} / den * rot;
  const cplx e3 = cplx{re - 1.0, -q} / den * rot;
  out.phases = {e1, -e1, e3, -e3};
  return out;
}

PhaseList theorem_3_2_phases(cplx alpha, cplx beta, double delta, double delta_o) {
  PhaseList out;
  const double a = std::abs(alpha);
  const double b = std::abs(beta);
  const double c = std::cos(delta_o - delta);
  const double s = std::sin(delta_o - delta);
  const double m1 = b - (b * c - a * s);
  const double m2 = b - (b * c + a * s);
  out.indeterminate = std::abs(m1) <= kConditionMargin || std::abs(m2) <= kConditionMargin;
  const cplx eo = std::polar(1.0, delta_o);
  const cplx e = std::polar(1.0, delta);
  if (m1 > kConditionMargin) {
    cplx z = b * cplx{b, a} * eo - e;
    z /= std::abs(z);
    out.phases.push_back(z);
    out.phases.push_back(-z);
  }
  if (m2 > kConditionMargin) {
    cplx z = b * cplx{b, -a} * eo - e;
    z /= std::abs(z);
    out.phases.push_back(z);
    out.phases.push_back(-z);
  }
  return out;
}

PhaseList theorem_3_3_phases(const Coin& plus, const Coin& minus) {
  PhaseList out;
  const double bp = std::abs(plus.beta()), bm = std::abs(minus.beta());
  const double ap = std::abs(plus.alpha()), am = std::abs(minus.alpha());
  const double margin = bm * bp - am * ap - std::cos(minus.delta() - plus.delta());
  out.indeterminate = std::abs(margin) <= kConditionMargin;
  if (!(margin > kConditionMargin)) return out;
  cplx z = bp * std::polar(1.0, minus.delta()) - bm * std::polar(1.0, plus.delta());
  z /= std::abs(z);
  out.phases = {z, -z};
  return out;
}

PhaseList theorem_3_4_phases(const Coin& plus, const Coin& minus) {
  PhaseList out;
  const cplx cross = minus.beta() * std::conj(plus.beta());
  const double re = cross.real();
  const double margin = (re - std::norm(plus.beta())) * (re - std::norm(minus.beta()));
  out.indeterminate = std::abs(margin) <= kConditionMargin;
  if (!(margin > kConditionMargin)) return out;
  const double aa = std::abs(plus.alpha()) * std::abs(minus.alpha());
  const double radicand = std::max(0.0, (re + aa - 1.0) * (re - aa - 1.0));
  cplx z = std::polar(1.0, plus.delta()) * cplx{std::sqrt(radicand), cross.imag()} /
           std::abs(plus.beta() - minus.beta());
  out.phases = {z, -z};
  return out;
}

PhaseList theorem_3_5_phases(const ModelSpec& spec) {
  PhaseList out;
  const double b = std::abs(spec.plus.beta());
  const double delta = spec.plus.delta();
  const double c = spec.origin.delta() + (std::arg(spec.plus.beta()) - std::arg(spec.minus.beta())) / 2.0;
  const double s = std::sin(delta - c);
  // Condition 1: s in [-1, |b|); condition 2: s in (-|b|, 1].
  const double m1 = b - s;
  const double m2 = s + b;
  out.indeterminate = std::abs(m1) <= kConditionMargin || std::abs(m2) <= kConditionMargin;
  const cplx e = std::polar(1.0, delta);
  const cplx ec = std::polar(1.0, c);
  const cplx i{0.0, 1.0};
  if (m1 > kConditionMargin) {
    cplx z = e - i * b * ec;
    z /= std::abs(z);
    out.phases.push_back(z);
    out.phases.push_back(-z);
  }
  if (m2 > kConditionMargin) {
    cplx z = e + i * b * ec;
    z /= std::abs(z);
    out.phases.push_back(z);
    out.phases.push_back(-z);
  }
  return out;
}

namespace {

bool coins_equal(const Coin& x, const Coin& y, double tol) {
  return std::abs(x.alpha() - y.alpha()) <= tol && std::abs(x.beta() - y.beta()) <= tol &&
         angular_distance(x.delta(), y.delta()) <= tol;
}

ClosedFormResult finish(const ModelSpec& spec, TheoremClass cls, const PhaseList& pl) {
  ClosedFormResult out;
  out.cls = cls;
  out.indeterminate = pl.indeterminate;
  for (const cplx z : pl.phases) {
    out.records.push_back(make_record(spec, std::arg(z), provenance_of(cls)));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const EigenvalueRecord& a, const EigenvalueRecord& b) { return a.lambda < b.lambda; });
  return out;
}

void require(const ModelSpec& spec, TheoremClass cls) {
  if (!in_class(spec, cls)) {
    throw ClassMismatch(std::string("model does not satisfy the assumptions of theorem ") +
                        to_string(cls));
  }
}

}  // namespace

bool in_class(const ModelSpec& s, TheoremClass cls) {
  const double tol = kClassTol;
  switch (cls) {
    case TheoremClass::one_defect_phase_free:
      return coins_equal(s.plus, s.minus, tol) &&
             angular_distance(s.origin.delta(), s.plus.delta()) <= tol;
    case TheoremClass::one_defect_phase_shift:
      return coins_equal(s.plus, s.minus, tol) && std::abs(s.origin.alpha() - s.plus.alpha()) <= tol &&
             std::abs(s.origin.beta() - s.plus.beta()) <= tol;
    case TheoremClass::two_phase_equal_arg:
      return coins_equal(s.origin, s.plus, tol) && std::abs(s.plus.beta()) > kBetaZeroTol &&
             std::abs(s.minus.beta()) > kBetaZeroTol &&
             angular_distance(std::arg(s.plus.beta()), std::arg(s.minus.beta())) <= tol;
    case TheoremClass::two_phase_equal_delta:
      return coins_equal(s.origin, s.plus, tol) &&
             angular_distance(s.plus.delta(), s.minus.delta()) <= tol;
    case TheoremClass::two_phase_diag_defect:
      return std::abs(s.origin.beta()) <= kBetaZeroTol && std::abs(s.plus.beta()) > kBetaZeroTol &&
             std::abs(s.minus.beta()) > kBetaZeroTol &&
             std::abs(std::abs(s.plus.beta()) - std::abs(s.minus.beta())) <= tol &&
             angular_distance(s.plus.delta(), s.minus.delta()) <= tol;
  }
  return false;
}

std::vector<TheoremClass> classify_model(const ModelSpec& spec) {
  std::vector<TheoremClass> out;
  for (auto c : {TheoremClass::one_defect_phase_free, TheoremClass::one_defect_phase_shift,
                 TheoremClass::two_phase_equal_arg, TheoremClass::two_phase_equal_delta,
                 TheoremClass::two_phase_diag_defect}) {
    if (in_class(spec, c)) out.push_back(c);
  }
  return out;
}

ClosedFormResult solve_theorem_3_1(const ModelSpec& spec) {
  require(spec, TheoremClass::one_defect_phase_free);
  const Coin& c = spec.plus;
  return finish(spec, TheoremClass::one_defect_phase_free,
                theorem_3_1_phases(c.alpha(), c.beta(), c.delta(), spec.origin.beta()));
}

ClosedFormResult solve_theorem_3_2(const ModelSpec& spec) {
  require(spec, TheoremClass::one_defect_phase_shift);
  const Coin& c = spec.plus;
  return finish(spec, TheoremClass::one_defect_phase_shift,
                theorem_3_2_phases(c.alpha(), c.beta(), c.delta(), spec.origin.delta()));
}

ClosedFormResult solve_theorem_3_3(const ModelSpec& spec) {
  require(spec, TheoremClass::two_phase_equal_arg);
  return finish(spec, TheoremClass::two_phase_equal_arg, theorem_3_3_phases(spec.plus, spec.minus));
}

ClosedFormResult solve_theorem_3_4(const ModelSpec& spec) {
  require(spec, TheoremClass::two_phase_equal_delta);
  return finish(spec, TheoremClass::two_phase_equal_delta, theorem_3_4_phases(spec.plus, spec.minus));
}

ClosedFormResult solve_theorem_3_5(const ModelSpec& spec) {
  require(spec, TheoremClass::two_phase_diag_defect);
  return finish(spec, TheoremClass::two_phase_diag_defect, theorem_3_5_phases(spec));
}

ClosedFormResult solve_theorem_3_1(cplx alpha, cplx beta, double delta, cplx beta_o) {
  const Coin bulk = Coin::make(alpha, beta, delta);
  const Coin origin = Coin::make(std::sqrt(std::max(0.0, 1.0 - std::norm(beta_o))), beta_o, delta);
  return solve_theorem_3_1(ModelSpec{bulk, origin, bulk});
}

ClosedFormResult solve_theorem_3_2(cplx alpha, cplx beta, double delta, double delta_o) {
  const Coin bulk = Coin::make(alpha, beta, delta);
  return solve_theorem_3_2(ModelSpec{bulk, Coin::make(alpha, beta, delta_o), bulk});
}

ClosedFormResult solve_theorem_3_3(const Coin& plus, const Coin& minus) {
  return solve_theorem_3_3(ModelSpec{minus, plus, plus});
}

ClosedFormResult solve_theorem_3_4(const Coin& plus, const Coin& minus) {
  return solve_theorem_3_4(ModelSpec{minus, plus, plus});
}

ClosedFormResult solve_closed_form(const ModelSpec& spec, TheoremClass cls) {
  switch (cls) {
    case TheoremClass::one_defect_phase_free: return solve_theorem_3_1(spec);
    case TheoremClass::one_defect_phase_shift: return solve_theorem_3_2(spec);
    case TheoremClass::two_phase_equal_arg: return solve_theorem_3_3(spec);
    case TheoremClass::two_phase_equal_delta: return solve_theorem_3_4(spec);
    case TheoremClass::two_phase_diag_defect: return solve_theorem_3_5(spec);
  }
  throw ClassMismatch("unknown class");
}

PhaseMatch match_phases(std::vector<double> a, std::vector<double> b, double tol) {
  PhaseMatch out;
  std::vector<bool> used(b.size(), false);
  for (double x : a) {
    std::size_t best = b.size();
    double best_d = tol;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = angular_distance(x, b[j]);
      if (d <= best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == b.size()) {
      out.only_a.push_back(x);
    } else {
      used[best] = true;
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!used[j]) out.only_b.push_back(b[j]);
  }
  return out;
}

CrossCheckReport cross_check(const ModelSpec& spec, const NumericOptions& opt, double match_tol) {
  CrossCheckReport rep;
  rep.numeric = solve_numeric(spec, opt);
  std::vector<double> numeric_phases;
  for (const auto& r : rep.numeric.records) {
    numeric_phases.push_back(r.lambda);
    if (!is_admissible(spec, r.lambda)) rep.range_violations.push_back(r.lambda);
  }
  for (TheoremClass cls : classify_model(spec)) {
    ClassComparison cmp;
    cmp.closed = solve_closed_form(spec, cls);
    std::vector<double> closed_phases;
    for (const auto& r : cmp.closed.records) {
      closed_phases.push_back(r.lambda);
      if (!is_admissible(spec, r.lambda)) rep.range_violations.push_back(r.lambda);
    }
    PhaseMatch m = match_phases(numeric_phases, closed_phases, match_tol);
    cmp.unmatched_numeric = std::move(m.only_a);
    cmp.unmatched_closed = std::move(m.only_b);
    const std::size_t n = cmp.unmatched_numeric.size() + cmp.unmatched_closed.size();
    if (n > 0 && cmp.closed.indeterminate) {
      rep.notes.push_back(std::string("theorem ") + to_string(cls) +
                          ": existence condition at its boundary; mismatch not counted");
    } else {
      rep.discrepancies += n;
    }
    rep.comparisons.push_back(std::move(cmp));
  }
  return rep;
}

}  // namespace qw
