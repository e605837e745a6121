#include "qwalk/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "qwalk/eigenfunction.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/simulator.hpp"

namespace qw::cli {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, std::string_view content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double plain_number(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ValidationError("", "not a number: '" + std::string(whole) + "'");
  }
  return v;
}

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  std::string s(buf.data(), r.ptr);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (s.front() == '-') s.erase(0, 1);
  }
  return s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string_view s = trim(text);
  const std::size_t at = s.find("pi");
  if (at == std::string_view::npos) return plain_number(s, text);
  std::string_view coef = trim(s.substr(0, at));
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (!coef.empty() && coef != "+") {
    c = plain_number(coef, text);
  }
  std::string_view rest = trim(s.substr(at + 2));
  double d = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ValidationError("", "not a number: '" + std::string(text) + "'");
    d = plain_number(trim(rest.substr(1)), text);
  }
  return c * kPi / d;
}

ModelSpec apply_field(const ModelSpec& spec, std::string_view field, double value) {
  const std::size_t dot = field.find('.');
  if (dot == std::string_view::npos) throw ValidationError(std::string(field), "expected <coin>.<field>");
  const std::string_view coin = field.substr(0, dot);
  const std::string_view what = field.substr(dot + 1);
  auto modify = [&](const Coin& c) {
    cplx a = c.alpha(), b = c.beta();
    double d = c.delta();
    if (what == "delta") {
      d = value;
    } else if (what == "alpha_arg") {
      a = std::polar(std::abs(a), value);
    } else if (what == "beta_arg") {
      b = std::polar(std::abs(b), value);
    } else if (what == "theta") {
      a = std::polar(std::cos(value), std::arg(a));
      b = std::polar(std::sin(value), std::arg(b));
    } else {
      throw ValidationError(std::string(field), "unknown coin field '" + std::string(what) + "'");
    }
    try {
      return Coin::make(a, b, d);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(field), e.what());
    }
  };
  ModelSpec out = spec;
  if (coin == "minus") {
    out.minus = modify(spec.minus);
  } else if (coin == "origin") {
    out.origin = modify(spec.origin);
  } else if (coin == "plus") {
    out.plus = modify(spec.plus);
  } else if (coin == "bulk") {
    out.minus = modify(spec.minus);
    out.plus = modify(spec.plus);
  } else {
    throw ValidationError(std::string(field), "unknown coin '" + std::string(coin) + "'");
  }
  return out;
}

std::vector<EigenvalueRecord> labelled_spectrum(const CrossCheckReport& report) {
  std::vector<EigenvalueRecord> out = report.numeric.records;
  for (auto& r : out) {
    for (const auto& cmp : report.comparisons) {
      const bool hit = std::any_of(cmp.closed.records.begin(), cmp.closed.records.end(), [&](const auto& c) {
        return angular_distance(c.lambda, r.lambda) <= kPhaseMatchTol;
      });
      if (hit) {
        r.provenance = provenance_of(cmp.closed.cls);
        break;
      }
    }
  }
  return out;
}

std::string spectrum_csv(const std::vector<EigenvalueRecord>& records) {
  std::string out = "lambda,re,im,provenance,decay_plus,decay_minus,residual\n";
  for (const auto& r : records) {
    out += format_double(r.lambda) + ',' + format_double(std::cos(r.lambda)) + ',' +
           format_double(std::sin(r.lambda)) + ',' + to_string(r.provenance) + ',' +
           format_double(r.decay_plus) + ',' + format_double(r.decay_minus) + ',' +
           format_double(r.residual) + '\n';
  }
  return out;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "param,branch,lambda,lambda_rot,re,im,exists,classes\n";
  for (const auto& r : rows) {
    out += format_double(r.param) + ',' + std::to_string(r.branch) + ',';
    if (r.branch < 0) {
      out += "nan,nan,nan,nan,0,";
    } else {
      out += format_double(r.lambda) + ',' + format_double(r.lambda_rot) + ',' +
             format_double(std::cos(r.lambda_rot)) + ',' + format_double(std::sin(r.lambda_rot)) + ",1,";
    }
    out += r.classes + '\n';
  }
  return out;
}

std::vector<ScanRow> parse_scan_csv(std::string_view text) {
  std::vector<ScanRow> rows;
  int lineno = 0;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "param,branch,lambda,lambda_rot,re,im,exists,classes") {
        throw ParseError(lineno, "not a scan CSV (unexpected header)");
      }
      header = false;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t c = line.find(',', pos);
      f.push_back(line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
    if (f.size() != 8) throw ParseError(lineno, "expected 8 columns");
    auto num = [&](std::string_view s) {
      if (s == "nan") return std::nan("");
      double v = 0.0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw ParseError(lineno, "bad number '" + std::string(s) + "'");
      }
      return v;
    };
    ScanRow r;
    r.param = num(f[0]);
    const double b = num(f[1]);
    if (!(b >= -1.0) || b != std::floor(b)) throw ParseError(lineno, "bad branch index");
    r.branch = static_cast<int>(b);
    r.lambda = num(f[2]);
    r.lambda_rot = num(f[3]);
    const bool exists = f[6] == "1";
    if (exists != (r.branch >= 0) || (f[6] != "0" && f[6] != "1")) {
      throw ParseError(lineno, "exists flag disagrees with branch");
    }
    if (exists && !std::isfinite(r.lambda_rot)) throw ParseError(lineno, "missing phase");
    r.classes = std::string(f[7]);
    rows.push_back(std::move(r));
  }
  if (header) throw ParseError(lineno, "empty scan CSV");
  return rows;
}

std::string render_svg(const std::vector<ScanRow>& rows, std::string_view title) {
  constexpr double kW = 520, kH = 580, kCx = 260, kCy = 280, kR = 200;
  static const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto px = [&](double re) { return fixed(kCx + kR * re, 2); };
  auto py = [&](double im) { return fixed(kCy - kR * im, 2); };

  // Sweep points in row order with their branches.
  std::vector<double> params;
  std::vector<std::vector<const ScanRow*>> at;
  std::set<std::string> classes;
  for (const auto& r : rows) {
    if (params.empty() || params.back() != r.param) {
      params.push_back(r.param);
      at.emplace_back();
    }
    if (r.branch >= 0) at.back().push_back(&r);
    classes.insert(r.classes);
  }
  std::size_t with_eigs = 0;
  for (const auto& a : at) with_eigs += a.empty() ? 0 : 1;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"580\" viewBox=\"0 0 520 580\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fixed(kW, 0) + "\" height=\"" + fixed(kH, 0) + "\" fill=\"white\"/>\n";
  s += "<text x=\"260\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       xml_escape(title) + "</text>\n";
  s += "<line x1=\"" + px(-1.1) + "\" y1=\"" + py(0) + "\" x2=\"" + px(1.1) + "\" y2=\"" + py(0) +
       "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + px(0) + "\" y1=\"" + py(-1.1) + "\" x2=\"" + px(0) + "\" y2=\"" + py(1.1) +
       "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  s += "<circle cx=\"" + px(0) + "\" cy=\"" + py(0) + "\" r=\"" + fixed(kR, 2) +
       "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  int max_branch = -1;
  for (const auto& r : rows) max_branch = std::max(max_branch, r.branch);
  for (int b = 0; b <= max_branch; ++b) {
    const char* color = kPalette[b % 6];
    std::vector<std::pair<double, double>> run;
    auto flush = [&] {
      if (run.size() >= 2) {
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < run.size(); ++i) {
          if (i > 0) s += ' ';
          s += px(run[i].first) + ',' + py(run[i].second);
        }
        s += "\"/>\n";
      }
      run.clear();
    };
    const ScanRow* prev = nullptr;
    std::size_t prev_count = 0;
    for (const auto& a : at) {
      const ScanRow* cur = b < static_cast<int>(a.size()) ? a[static_cast<std::size_t>(b)] : nullptr;
      const bool joined = cur != nullptr && prev != nullptr && prev_count == a.size() &&
                          angular_distance(prev->lambda_rot, cur->lambda_rot) < 0.35;
      if (!joined) flush();
      if (cur != nullptr) run.emplace_back(std::cos(cur->lambda_rot), std::sin(cur->lambda_rot));
      prev = cur;
      prev_count = a.size();
    }
    flush();
  }
  for (const auto& r : rows) {
    if (r.branch < 0) continue;
    s += "<circle cx=\"" + px(std::cos(r.lambda_rot)) + "\" cy=\"" + py(std::sin(r.lambda_rot)) +
         "\" r=\"2.5\" fill=\"" + kPalette[r.branch % 6] + "\"/>\n";
  }

  std::string cls;
  for (const auto& c : classes) cls += (cls.empty() ? "" : ", ") + c;
  const std::string lines[] = {
      "model class: " + cls,
      "sweep points with eigenvalues: " + std::to_string(with_eigs) + " of " + std::to_string(params.size()),
      "eigenvalues rotated by -delta_p",
  };
  double y = 520;
  for (const auto& l : lines) {
    s += "<text x=\"20\" y=\"" + fixed(y, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(l) +
         "</text>\n";
    y += 18;
  }
  s += "</svg>\n";
  return s;
}

namespace {

struct ModelOptions {
  std::string config;
  std::string preset;
  std::vector<std::string> params;
};

void add_model_options(CLI::App* app, ModelOptions& m) {
  app->add_option("--config", m.config, "model file (see docs/formats.md)");
  app->add_option("--preset", m.preset, "named model: ekst2014, wojcik2012, eko2015, ekst2015, hadamard");
  app->add_option("--param", m.params, "preset parameter as name=value (value may use pi)");
}

struct ResolvedModel {
  ModelSpec spec;
  std::optional<std::string> preset;
  ParamMap params;
  std::string description;
};

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& it : items) {
    const std::size_t eq = it.find('=');
    if (eq == std::string::npos) throw ValidationError("param", "expected name=value, got '" + it + "'");
    const std::string name(trim(std::string_view(it).substr(0, eq)));
    double v = 0.0;
    try {
      v = parse_real(std::string_view(it).substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError("params." + name, e.what());
    }
    if (!out.emplace(name, v).second) throw ValidationError("params." + name, "given twice");
  }
  return out;
}

ResolvedModel resolve(const ModelOptions& m, bool allow_missing_params = false) {
  if (m.config.empty() == m.preset.empty()) {
    throw CLI::ValidationError("model", "give exactly one of --config or --preset");
  }
  ResolvedModel r;
  if (!m.config.empty()) {
    if (!m.params.empty()) throw CLI::ValidationError("--param", "--param needs --preset");
    ModelConfig cfg = load_model_file(m.config);
    r.spec = cfg.spec;
    r.preset = cfg.preset;
    r.params = cfg.params;
    r.description = "config " + m.config;
    return r;
  }
  r.preset = m.preset;
  r.params = parse_params(m.params);
  r.description = "preset " + m.preset;
  for (const auto& [k, v] : r.params) r.description += " " + k + "=" + format_double(v);
  if (!allow_missing_params) r.spec = preset(m.preset, r.params);
  return r;
}

std::string out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QWALK_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string angle(double rad, bool degrees) {
  return degrees ? fixed(rad * 180.0 / kPi, 10) + " deg" : fixed(rad, 12);
}

std::string classes_label(const std::vector<TheoremClass>& cls) {
  if (cls.empty()) return "none";
  std::string s;
  for (auto c : cls) s += (s.empty() ? "" : "+") + std::string(to_string(c));
  return s;
}

std::string spectrum_table(const ResolvedModel& model, const CrossCheckReport& rep,
                           const std::vector<EigenvalueRecord>& recs, bool degrees) {
  std::ostringstream o;
  o << "model: " << model.description << "\n";
  std::vector<TheoremClass> cls;
  for (const auto& c : rep.comparisons) cls.push_back(c.closed.cls);
  o << "closed-form classes: " << classes_label(cls) << "\n";
  o << "admissible arcs:";
  if (rep.numeric.intervals.empty()) o << " none";
  for (const auto& a : rep.numeric.intervals) o << " (" << angle(a.lo, degrees) << ", " << angle(a.hi, degrees) << ")";
  o << "\n";
  o << "eigenvalues: " << recs.size() << "\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    o << "  " << i + 1 << "  lambda=" << angle(r.lambda, degrees) << "  e^{i lambda}=" << fixed(std::cos(r.lambda), 12)
      << (std::sin(r.lambda) < 0 ? " - " : " + ") << fixed(std::abs(std::sin(r.lambda)), 12) << "i  "
      << to_string(r.provenance) << "  decay+=" << fixed(r.decay_plus, 9) << "  decay-=" << fixed(r.decay_minus, 9)
      << "  |det D|=" << format_double(r.residual) << "\n";
  }
  for (const auto& c : rep.comparisons) {
    o << "theorem " << to_string(c.closed.cls) << ": " << c.closed.records.size() << " phase(s), "
      << (c.agrees() ? "agrees with the numeric roots" : "DISAGREES with the numeric roots")
      << (c.closed.indeterminate ? " (existence condition at its boundary)" : "") << "\n";
  }
  if (!rep.range_violations.empty()) o << "range filter violations: " << rep.range_violations.size() << "\n";
  for (const auto& n : rep.notes) o << "note: " << n << "\n";
  return o.str();
}

// --- subcommands -----------------------------------------------------------

struct SolveOptions {
  ModelOptions model;
  std::size_t grid = 200000;
  double tol = 1e-9;
  bool strict = false;
  bool eigenfunctions = false;
  long half_width = kDefaultHalfWidth;
};

int cmd_solve(const SolveOptions& o, const std::string& dir, bool degrees, std::ostream& out) {
  const ResolvedModel model = resolve(o.model);
  NumericOptions opt;
  opt.grid_points = o.grid;
  opt.tol = o.tol;
  const CrossCheckReport rep = cross_check(model.spec, opt);
  const auto recs = labelled_spectrum(rep);
  const std::string table = spectrum_table(model, rep, recs, degrees);
  write_atomic(join_path(dir, "spectrum.csv"), spectrum_csv(recs));
  write_atomic(join_path(dir, "spectrum.txt"), table);
  if (o.eigenfunctions) {
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const EigenfunctionProfile p = eigenfunction(model.spec, recs[i], o.half_width);
      write_atomic(join_path(dir, "eigenfunction_" + std::to_string(i + 1) + ".csv"), state_to_csv(p.state));
    }
  }
  out << table;
  if (o.strict && !rep.ok()) {
    out << "strict: closed-form and numeric spectra disagree\n";
    return kVerifyFailed;
  }
  return kOk;
}

struct ScanOptions {
  ModelOptions model;
  std::string sweep;
  std::string from, to;
  std::size_t count = 50;
  bool open = false;
  std::size_t grid = 200000;
  double tol = 1e-9;
  std::string output;
};

int cmd_scan(const ScanOptions& o, const std::string& dir, std::ostream& out) {
  const bool coin_field = o.sweep.find('.') != std::string::npos;
  ResolvedModel base = resolve(o.model, !coin_field);
  if (!coin_field && !base.preset) throw CLI::ValidationError("--sweep", "a preset parameter sweep needs a preset");
  if (!coin_field) {
    const auto& info = preset_info(*base.preset);
    const bool known = std::any_of(info.params.begin(), info.params.end(),
                                   [&](const PresetParam& p) { return p.name == o.sweep; });
    if (!known) throw ValidationError("sweep", "'" + o.sweep + "' is not a parameter of preset " + info.name);
  }
  if (o.count == 0) throw ValidationError("count", "must be positive");
  const double a = parse_real(o.from), b = parse_real(o.to);
  NumericOptions opt;
  opt.grid_points = o.grid;
  opt.tol = o.tol;

  std::vector<ScanRow> rows;
  std::size_t nonempty = 0;
  for (std::size_t k = 0; k < o.count; ++k) {
    const double t = o.open ? (static_cast<double>(k) + 0.5) / static_cast<double>(o.count)
                            : (o.count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(o.count - 1));
    const double v = a + (b - a) * t;
    ModelSpec spec;
    if (coin_field) {
      spec = apply_field(base.spec, o.sweep, v);
    } else {
      ParamMap p = base.params;
      p[o.sweep] = v;
      spec = preset(*base.preset, p);
    }
    const std::string cls = classes_label(classify_model(spec));
    const SpectrumReport rep = solve_numeric(spec, opt);
    std::vector<std::pair<double, double>> phases;
    for (const auto& r : rep.records) phases.emplace_back(wrap_phase(r.lambda - spec.plus.delta()), r.lambda);
    std::sort(phases.begin(), phases.end());
    if (phases.empty()) rows.push_back({v, -1, std::nan(""), std::nan(""), cls});
    for (std::size_t i = 0; i < phases.size(); ++i) {
      rows.push_back({v, static_cast<int>(i), phases[i].second, phases[i].first, cls});
    }
    nonempty += phases.empty() ? 0 : 1;
  }
  const std::string path = o.output.empty() ? join_path(dir, "scan.csv") : o.output;
  write_atomic(path, scan_csv(rows));
  out << "scan " << base.description << " over " << o.sweep << ": " << o.count << " point(s), " << nonempty
      << " with eigenvalues -> " << path << "\n";
  return kOk;
}

struct PlotOptions {
  std::string input;
  std::string output;
  std::string title;
};

int cmd_plot(const PlotOptions& o, const std::string& dir, std::ostream& out) {
  const std::string in = o.input.empty() ? join_path(dir, "scan.csv") : o.input;
  std::ifstream f(in, std::ios::binary);
  if (!f) throw ParseError(0, "cannot open " + in);
  std::ostringstream ss;
  ss << f.rdbuf();
  const auto rows = parse_scan_csv(ss.str());
  const std::string title = o.title.empty() ? fs::path(in).filename().string() : o.title;
  const std::string path = o.output.empty() ? join_path(dir, "scan.svg") : o.output;
  write_atomic(path, render_svg(rows, title));
  out << "plot -> " << path << "\n";
  return kOk;
}

struct SimulateOptions {
  ModelOptions model;
  long steps = 100;
  long window = 0;
  long site = 0;
  std::string state = "1,0,0,0";
  std::string initial_csv;
  bool no_distributions = false;
};

int cmd_simulate(const SimulateOptions& o, const std::string& dir, std::ostream& out) {
  const ResolvedModel model = resolve(o.model);
  if (o.steps < 0) throw ValidationError("steps", "must be non-negative");
  long window = o.window;
  if (window == 0) window = 2 * (o.steps + kSeamClearance + std::abs(o.site) + 1);
  WaveState init = centered_window(window);
  if (!o.initial_csv.empty()) {
    std::ifstream f(o.initial_csv, std::ios::binary);
    if (!f) throw ParseError(0, "cannot open " + o.initial_csv);
    std::ostringstream ss;
    ss << f.rdbuf();
    const WaveState imported = state_from_csv(ss.str());
    for (long x = imported.x_min; x <= imported.x_max(); ++x) {
      if (!init.contains(x)) throw ValidationError("initial", "site " + std::to_string(x) + " outside the window");
      init.at(x) = imported.at(x);
    }
  } else {
    std::vector<double> c;
    std::string_view s = o.state;
    for (;;) {
      const std::size_t k = s.find(',');
      c.push_back(parse_real(s.substr(0, k)));
      if (k == std::string_view::npos) break;
      s.remove_prefix(k + 1);
    }
    if (c.size() != 4) throw ValidationError("state", "expected re_L,im_L,re_R,im_R");
    if (!init.contains(o.site)) throw ValidationError("site", "outside the window");
    init.at(o.site) = {{c[0], c[1]}, {c[2], c[3]}};
  }
  const double n2 = init.norm2();
  if (!(n2 > 0.0)) throw ValidationError("state", "initial state is zero");
  for (auto& v : init.values) v *= 1.0 / std::sqrt(n2);

  const SimulationRun run = evolve(model.spec, init, o.steps, !o.no_distributions);
  std::ostringstream meta;
  meta << "model: " << model.description << "\n"
       << "steps: " << o.steps << "\n"
       << "window: [" << init.x_min << ", " << init.x_max() << "]\n"
       << "seam_contaminated: " << (run.seam_contaminated ? "yes" : "no") << "\n"
       << "max_norm_drift: " << format_double(run.max_norm_drift) << "\n"
       << "nu(0): " << format_double(run.nu_at(0)) << "\n";
  if (run.seam_contaminated) {
    meta << "warning: the light cone comes within " << kSeamClearance << " sites of the wrap seam\n";
  }
  if (!o.no_distributions) write_atomic(join_path(dir, "distributions.csv"), distributions_csv(run));
  write_atomic(join_path(dir, "time_averaged.csv"), time_averaged_csv(run));
  write_atomic(join_path(dir, "simulate.txt"), meta.str());
  out << meta.str();
  return kOk;
}

struct VerifyOptions {
  ModelOptions model;
  std::size_t grid = 200000;
  double tol = 1e-9;
  long half_width = kDefaultHalfWidth;
  long dense_n = 128;
  double mass_threshold = 0.99;
};

constexpr double kVerifyResidual = 1e-9;
constexpr double kVerifyDecayRel = 1e-6;
constexpr double kVerifyDenseTol = 1e-6;

int cmd_verify(const VerifyOptions& o, const std::string& dir, bool degrees, std::ostream& out) {
  const ResolvedModel model = resolve(o.model);
  NumericOptions opt;
  opt.grid_points = o.grid;
  opt.tol = o.tol;
  const CrossCheckReport rep = cross_check(model.spec, opt);
  const auto recs = labelled_spectrum(rep);
  const DenseSpectrum dense = dense_point_spectrum(model.spec, o.dense_n, o.mass_threshold);

  std::vector<std::string> failures;
  for (const auto& c : rep.comparisons) {
    if (!c.agrees() && !c.closed.indeterminate) {
      failures.push_back("closed form " + std::string(to_string(c.closed.cls)) + " vs numeric roots: " +
                         std::to_string(c.unmatched_closed.size()) + " closed-form and " +
                         std::to_string(c.unmatched_numeric.size()) + " numeric phase(s) unmatched");
    }
  }
  if (!rep.range_violations.empty()) failures.push_back("admissible-range filter violated");

  std::ostringstream t;
  t << "model: " << model.description << "\n";
  t << "  #  lambda              closed-form    eigenfunction residual  decay fit    dense match\n";
  std::vector<double> numeric;
  for (const auto& r : recs) numeric.push_back(r.lambda);
  std::vector<double> dense_phases;
  for (const auto& p : dense.points) dense_phases.push_back(p.lambda);

  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    std::string ef = "failed";
    std::string fit = "-";
    try {
      const EigenfunctionProfile p = eigenfunction(model.spec, r, o.half_width);
      ef = format_double(p.residual);
      if (!(p.residual < kVerifyResidual)) failures.push_back("eigenfunction residual at lambda=" + angle(r.lambda, degrees));
      if (p.rates_fitted) {
        const double e = std::max(std::abs(p.rates.left - r.decay_minus) / r.decay_minus,
                                  std::abs(p.rates.right - r.decay_plus) / r.decay_plus);
        fit = format_double(e);
        if (!(e < kVerifyDecayRel)) failures.push_back("decay fit at lambda=" + angle(r.lambda, degrees));
      }
    } catch (const Error& e) {
      failures.push_back(std::string("eigenfunction construction: ") + e.what());
    }
    double best = INFINITY;
    for (double d : dense_phases) best = std::min(best, angular_distance(d, r.lambda));
    t << "  " << i + 1 << "  " << angle(r.lambda, degrees) << "  " << to_string(r.provenance) << "  " << ef << "  "
      << fit << "  " << (std::isfinite(best) ? format_double(best) : std::string("none")) << "\n";
  }
  const PhaseMatch dm = match_phases(numeric, dense_phases, kVerifyDenseTol);
  if (!dm.only_a.empty() || !dm.only_b.empty()) {
    failures.push_back("dense diagonalization vs numeric roots: " + std::to_string(dense_phases.size()) +
                       " dense vs " + std::to_string(numeric.size()) + " numeric phase(s), " +
                       std::to_string(dm.only_a.size() + dm.only_b.size()) + " unmatched");
  }
  std::size_t closed_total = 0;
  for (const auto& c : rep.comparisons) closed_total += c.closed.records.size();
  if (failures.empty() && recs.empty() && dense.points.empty() && closed_total == 0) {
    t << "empty spectrum, all oracles agree\n";
  } else if (failures.empty()) {
    t << "all oracles agree (" << recs.size() << " eigenvalue(s))\n";
  } else {
    t << "FAILED: " << failures.front() << "\n";
    for (std::size_t i = 1; i < failures.size(); ++i) t << "also: " << failures[i] << "\n";
  }
  write_atomic(join_path(dir, "verify.txt"), t.str());
  out << t.str();
  return failures.empty() ? kOk : kVerifyFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenvalues, eigenfunctions and dynamics of one-dimensional coined quantum walks\n"
               "with a defect at the origin.",
               "qwalk"};
  app.require_subcommand(1);
  std::string out_flag;
  bool degrees = false;
  app.add_option("--out", out_flag, "output directory (default: $QWALK_OUT_DIR or .)");
  app.add_flag("--degrees", degrees, "print angles in degrees (files stay in radians)");

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "eigenvalues by root finding, checked against closed forms");
  add_model_options(solve, so.model);
  solve->add_option("--grid", so.grid, "grid points on the circle")->check(CLI::PositiveNumber);
  solve->add_option("--tol", so.tol, "acceptance threshold on |det D|");
  solve->add_flag("--strict", so.strict, "exit 2 when closed forms and root finding disagree");
  solve->add_flag("--eigenfunctions", so.eigenfunctions, "also write eigenfunction_<k>.csv");
  solve->add_option("--half-width", so.half_width, "eigenfunction window half-width");

  ScanOptions sc;
  auto* scan = app.add_subcommand("scan", "sweep one parameter and record the eigenvalue loci");
  add_model_options(scan, sc.model);
  scan->add_option("--sweep", sc.sweep, "preset parameter or <coin>.<field>")->required();
  scan->add_option("--from", sc.from, "first value")->required();
  scan->add_option("--to", sc.to, "last value")->required();
  scan->add_option("--count", sc.count, "number of sweep points");
  scan->add_flag("--open", sc.open, "sample cell midpoints, excluding both ends");
  scan->add_option("--grid", sc.grid, "grid points on the circle")->check(CLI::PositiveNumber);
  scan->add_option("--tol", sc.tol, "acceptance threshold on |det D|");
  scan->add_option("--output", sc.output, "CSV path (default <out>/scan.csv)");

  PlotOptions po;
  auto* plot = app.add_subcommand("plot", "draw a scan CSV as an SVG figure");
  plot->add_option("--input", po.input, "scan CSV (default <out>/scan.csv)");
  plot->add_option("--output", po.output, "SVG path (default <out>/scan.svg)");
  plot->add_option("--title", po.title, "figure title");

  SimulateOptions si;
  auto* sim = app.add_subcommand("simulate", "run the walk on a periodic window");
  add_model_options(sim, si.model);
  sim->add_option("--steps", si.steps, "number of steps");
  sim->add_option("--window", si.window, "window size, even (default: light cone plus margin)");
  sim->add_option("--site", si.site, "site of the initial delta state");
  sim->add_option("--state", si.state, "initial amplitudes re_L,im_L,re_R,im_R");
  sim->add_option("--initial-csv", si.initial_csv, "initial state from an eigenfunction CSV");
  sim->add_flag("--no-distributions", si.no_distributions, "skip distributions.csv");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "compare root finding, closed forms, eigenfunctions and dense diagonalization");
  add_model_options(verify, vo.model);
  verify->add_option("--grid", vo.grid, "grid points on the circle")->check(CLI::PositiveNumber);
  verify->add_option("--tol", vo.tol, "acceptance threshold on |det D|");
  verify->add_option("--half-width", vo.half_width, "eigenfunction window half-width");
  verify->add_option("--dense-n", vo.dense_n, "ring half-width N for dense diagonalization");
  verify->add_option("--mass-threshold", vo.mass_threshold, "dense oracle localization threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const std::string dir = out_dir(out_flag);
  try {
    if (*solve) return cmd_solve(so, dir, degrees, out);
    if (*scan) return cmd_scan(sc, dir, out);
    if (*plot) return cmd_plot(po, dir, out);
    if (*sim) return cmd_simulate(si, dir, out);
    if (*verify) return cmd_verify(vo, dir, degrees, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace qw::cli
