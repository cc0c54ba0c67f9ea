#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incdist/fit.hpp"
#include "incdist/ingest.hpp"
#include "incdist/synth.hpp"

namespace incdist {

// ---------------------------------------------------------------------------
// Published coefficient tables
// ---------------------------------------------------------------------------

/// One published quadratic: P1 x^2 + P2 x + P3 with the printed R^2 (%).
struct PaperFixtureRow {
  std::string dataset;
  int year = 0;
  std::string currency;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double r2_percent = 0.0;
  int line = 0;  // source line in the fixture file, 0 if built in code

  Polynomial poly() const { return Polynomial::quadratic(p1, p2, p3); }
};

inline constexpr std::string_view kFixtureCsvHeader =
    "dataset,year,currency,p1,p2,p3,r2_percent";

/// Parses the fixture CSV. Lines whose first non-blank character is '#'
/// are comments. Every row must satisfy p1 > 0, p2 < 0, p3 > 0 and
/// 90 < r2_percent <= 100; violations raise ParseError naming the line,
/// dataset and year.
std::vector<PaperFixtureRow> parse_fixture_csv(std::string_view text);

/// Contents of data/appendix_coefficients.csv, compiled into the library.
std::string_view embedded_fixture_csv() noexcept;

/// A published figure: which statistic it shows and its printed equation.
struct FigureSpec {
  std::string_view file_stem;
  std::string_view dataset;  // matching fixture dataset label
  SeriesMeta meta;
  double p1;
  double p2;
  double p3;
  double r2_percent;
};

/// The five figure equations as printed, in figure order.
const std::array<FigureSpec, 5>& figure_specs();

// ---------------------------------------------------------------------------
// Fit reports
// ---------------------------------------------------------------------------

/// Serializable summary of one fit. Coefficients are stored in descending
/// power order (P1 = highest power), the reverse of Polynomial.
struct FitReport {
  SeriesMeta meta;
  int degree = 2;
  Transform transform = Transform::linear;
  std::vector<double> p_coeffs;  // P1 .. P(degree+1)
  double r_squared = 0.0;        // full precision fraction
  double r2_percent = 0.0;       // rounded to 2 decimals
  double ss_res = 0.0;
  double ss_tot = 0.0;
  std::vector<double> residuals;
  Standardization standardization;
  std::optional<std::string> generator;

  Polynomial poly() const;
};

FitReport make_fit_report(const SeriesMeta& meta, const FitResult& fit);

/// One JSON object on a single line with a fixed key order. Doubles are
/// written in shortest round-trip form.
std::string serialize_fit_report(const FitReport& report);
FitReport parse_fit_report(std::string_view json_line);

/// Descending-order P coefficients <-> ascending Polynomial.
std::vector<double> to_descending(const Polynomial& poly);
Polynomial from_descending(std::span<const double> p_coeffs);

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

inline constexpr int kPlotCurveSamples = 200;

/// Tab-separated plot data: a '#' header line, then one row per observed
/// point (x, observed p, fitted p) followed by kPlotCurveSamples rows of
/// the fitted curve on [min x, max x] with observed_p written as "nan".
/// For loglog fits x and p are written in raw units.
std::string plot_tsv(const EmpiricalCdf& cdf, const FitResult& fit);

// ---------------------------------------------------------------------------
// Sample reports
// ---------------------------------------------------------------------------

struct QuantileCheck {
  double p = 0.0;          // percent level
  double model_x = 0.0;    // invert_decreasing_quadratic(poly, p)
  double sample_x = 0.0;   // empirical value with the same tail fraction
  double rel_err = 0.0;
};

/// Compares empirical tail quantiles with the model at p = 90, 80, ..., 20
/// for a sample drawn on [spec.p_low, spec.p_high].
std::vector<QuantileCheck> quantile_checks(const Polynomial& poly,
                                           const SampleSpec& spec,
                                           std::span<const double> incomes);

std::string serialize_sample_report(const Polynomial& poly,
                                    const SampleSpec& spec,
                                    const std::optional<DecileTables>& deciles,
                                    std::optional<double> gini_value,
                                    std::span<const QuantileCheck> checks);

}  // namespace incdist
