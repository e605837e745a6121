#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/config.hpp"
#include "qwalk/spectrum.hpp"

namespace qw::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2 };

/// Entry point of the qwalk tool. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes content to path through a temporary file in the same directory and a rename.
void write_atomic(const std::string& path, std::string_view content);

/// Parses a real number, also accepting multiples of pi: "pi", "-pi/4", "3*pi/2", "0.5pi".
[[nodiscard]] double parse_real(std::string_view text);

/// Returns the model with one coin field replaced. Field syntax:
/// <minus|origin|plus|bulk>.<delta|alpha_arg|beta_arg|theta>, where theta sets
/// |alpha| = cos theta, |beta| = sin theta keeping both arguments and bulk
/// changes the minus and plus coins together.
[[nodiscard]] ModelSpec apply_field(const ModelSpec& spec, std::string_view field, double value);

/// One spectrum row: the numeric record, labelled by the first closed form that
/// reproduces it.
[[nodiscard]] std::vector<EigenvalueRecord> labelled_spectrum(const CrossCheckReport& report);

/// "lambda,re,im,provenance,decay_plus,decay_minus,residual" rows.
[[nodiscard]] std::string spectrum_csv(const std::vector<EigenvalueRecord>& records);

struct ScanRow {
  double param;
  int branch;  ///< -1 when no eigenvalue exists at this point
  double lambda;
  double lambda_rot;
  std::string classes;
};

/// "param,branch,lambda,lambda_rot,re,im,exists,classes" rows.
[[nodiscard]] std::string scan_csv(const std::vector<ScanRow>& rows);
/// Throws ParseError on malformed input.
[[nodiscard]] std::vector<ScanRow> parse_scan_csv(std::string_view text);

/// Self-contained SVG of the rotated loci on the unit circle.
[[nodiscard]] std::string render_svg(const std::vector<ScanRow>& rows, std::string_view title);

}  // namespace qw::cli
