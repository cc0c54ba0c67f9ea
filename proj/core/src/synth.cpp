#include "incdist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "incdist/error.hpp"

namespace incdist {

namespace {

void check_spec(const Polynomial& poly, const SampleSpec& spec) {
  if (spec.n < 1) throw ValidationError("n", "sample size must be at least 1");
  if (!std::isfinite(spec.p_low) || !std::isfinite(spec.p_high) ||
      spec.p_low < 10.0 || spec.p_low > spec.p_high) {
    throw ValidationError("p_low", "percent band must satisfy 10 <= p_low <= p_high, got [" +
                                       detail::format_double(spec.p_low) + ", " +
                                       detail::format_double(spec.p_high) + "]");
  }
  // Both ends must be invertible; the discriminant grows with p, so the
  // whole band is then invertible too.
  invert_decreasing_quadratic(poly, spec.p_low);
  invert_decreasing_quadratic(poly, spec.p_high);
}

}  // namespace

std::vector<double> sample_incomes(const Polynomial& poly,
                                   const SampleSpec& spec) {
  check_spec(poly, spec);
  std::mt19937_64 gen(spec.seed);
  const double width = spec.p_high - spec.p_low;
  std::vector<double> out;
  out.reserve(spec.n);
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    out.push_back(invert_decreasing_quadratic(poly, spec.p_low + width * u));
  }
  return out;
}

DecileTables compute_deciles(std::span<const double> incomes,
                             const SeriesMeta& meta) {
  const std::size_t n = incomes.size();
  if (n < static_cast<std::size_t>(kDecileCount)) {
    throw ValidationError("incomes", "need at least 10 incomes, got " +
                                         std::to_string(n));
  }
  std::vector<double> sorted(incomes.begin(), incomes.end());
  std::sort(sorted.begin(), sorted.end());

  DecileTables out;
  out.mean_series.meta = meta;
  out.mean_series.meta.statistic = Statistic::mean_income;
  out.upper_series.meta = meta;
  out.upper_series.meta.statistic = Statistic::upper_limit;

  for (std::size_t k = 0; k < static_cast<std::size_t>(kDecileCount); ++k) {
    const std::size_t lo = k * n / kDecileCount;
    const std::size_t hi = (k + 1) * n / kDecileCount;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += sorted[i];
    out.mean_series.values.push_back(sum / static_cast<double>(hi - lo));
    out.upper_series.values.push_back(sorted[hi - 1]);
  }
  out.mean_series = validate_series(out.mean_series);
  out.upper_series = validate_series(out.upper_series);
  return out;
}

double gini(std::span<const double> incomes) {
  if (incomes.empty()) throw DomainError("gini of an empty sample");
  std::vector<double> sorted(incomes.begin(), incomes.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) {
    throw DomainError("gini needs nonnegative incomes");
  }
  const double n = static_cast<double>(sorted.size());
  // sum_ij |x_i - x_j| = 2 sum_i (2i - n - 1) x_(i), i 1-based. The weights
  // sum to zero, so shifting by the minimum leaves the value unchanged and
  // makes equal incomes contribute exactly zero.
  const double lowest = sorted.front();
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * (sorted[i] - lowest);
  }
  if (!(total > 0.0)) throw DomainError("gini needs a positive mean");
  // 2 * weighted / (2 n^2 mu) with mu = total / n
  return weighted / (n * total);
}

RoundtripReport roundtrip_check(const Polynomial& poly, double tolerance) {
  SeriesMeta meta;
  meta.country = "roundtrip";
  const DecileSeries series = reconstruct_series_from_fit(poly, meta);
  const FitResult fit = fit_polynomial(build_cdf(series), FitConfig{});

  RoundtripReport report;
  report.refit = fit.poly;
  report.refit_r_squared = fit.r_squared;
  for (int k = 0; k <= poly.degree(); ++k) {
    const double ref = poly[k];
    const double err = ref == 0.0 ? std::abs(fit.poly[k])
                                  : std::abs(fit.poly[k] - ref) / std::abs(ref);
    report.max_coeff_rel_err = std::max(report.max_coeff_rel_err, err);
  }
  report.pass = report.max_coeff_rel_err <= tolerance;
  return report;
}

}  // namespace incdist
