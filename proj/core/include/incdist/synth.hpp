#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "incdist/fit.hpp"
#include "incdist/ingest.hpp"

namespace incdist {

/// Inverse-transform sampling parameters. Percent levels are drawn
/// uniformly on [p_low, p_high]; with p_low == p_high every draw is p_low.
///
/// The default band [10, 100] is the range covered by decile data.
/// p_high may exceed 100 as long as the polynomial is invertible there.
struct SampleSpec {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double p_low = 10.0;
  double p_high = 100.0;
};

/// Identification of the uniform generator, written into sample reports.
/// Uniform levels are u = (next() >> 11) * 2^-53 on the raw 64-bit output
/// of std::mt19937_64, whose output sequence is fixed by the C++ standard.
inline constexpr std::string_view kGeneratorId =
    "std::mt19937_64(seed); u = (next() >> 11) * 2^-53; p = p_low + (p_high "
    "- p_low) * u";

/// Draws spec.n incomes by inverting `poly` at uniformly distributed
/// percent levels. Identical (poly, spec) yields bit-identical output.
std::vector<double> sample_incomes(const Polynomial& poly,
                                   const SampleSpec& spec);

struct DecileTables {
  DecileSeries mean_series;
  DecileSeries upper_series;
};

/// Sorts `incomes` and splits them into ten consecutive blocks; block k
/// holds sorted indices floor(k n / 10) .. floor((k+1) n / 10) - 1.
/// Reports each block's mean and maximum. Both results are validated, so
/// ties that break strict monotonicity raise ValidationError.
DecileTables compute_deciles(std::span<const double> incomes,
                             const SeriesMeta& meta);

/// Population Gini coefficient sum_ij |x_i - x_j| / (2 n^2 mu), computed
/// in O(n log n) from sorted values. Requires nonempty, nonnegative input
/// with positive mean.
double gini(std::span<const double> incomes);

struct RoundtripReport {
  Polynomial refit{std::vector<double>{0.0, 0.0}};
  double max_coeff_rel_err = 0.0;
  double refit_r_squared = 0.0;
  bool pass = false;
};

/// Reconstructs the decile series implied by `poly`, refits a quadratic,
/// and compares coefficients. pass <=> max_coeff_rel_err <= tolerance.
RoundtripReport roundtrip_check(const Polynomial& poly, double tolerance);

}  // namespace incdist
