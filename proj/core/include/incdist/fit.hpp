#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "incdist/ingest.hpp"

namespace incdist {

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 5;

/// One point of the complementary distribution: `p` percent of the
/// population has income >= `x`.
struct CdfPoint {
  double x = 0.0;
  double p = 0.0;

  bool operator==(const CdfPoint&) const = default;
};

/// Ten points with p = 100, 90, ..., 10 and strictly increasing x.
struct EmpiricalCdf {
  std::vector<CdfPoint> points;

  std::vector<double> xs() const;
  std::vector<double> ps() const;
};

/// Real polynomial with coefficients in ascending power order
/// (coeffs()[0] is the constant term). Degree is coeffs().size() - 1 and
/// must lie in [kMinDegree, kMaxDegree]; all coefficients are finite.
class Polynomial {
 public:
  explicit Polynomial(std::vector<double> ascending);

  /// a*x^2 + b*x + c, i.e. the appendix triple (P1, P2, P3).
  static Polynomial quadratic(double a, double b, double c);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](int power) const { return coeffs_.at(power); }

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<double> coeffs_;
};

/// Affine map x -> (x - x_mean) / x_scale used to condition the solve.
struct Standardization {
  double x_mean = 0.0;
  double x_scale = 1.0;

  double apply(double x) const noexcept { return (x - x_mean) / x_scale; }
  bool operator==(const Standardization&) const = default;
};

enum class Transform { linear, loglog };

std::string_view to_string(Transform t) noexcept;
Transform parse_transform(std::string_view token);  // throws ValidationError

struct FitConfig {
  int degree = 2;
  Transform transform = Transform::linear;
};

/// Outcome of a least-squares polynomial fit.
///
/// `poly` acts on raw abscissae (ln x for loglog). `standardized_coeffs`
/// is the same model in the z = s.apply(x) variable, as solved. Residuals
/// are observed minus fitted, in the fitted space (percent, or ln percent
/// for loglog).
struct FitResult {
  Polynomial poly{std::vector<double>{0.0, 0.0}};
  std::vector<double> standardized_coeffs;
  std::vector<double> residuals;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  double r_squared = 0.0;
  Standardization standardization;
  Transform transform = Transform::linear;
};

/// Pairs decile values with the percent grid 100, 90, ..., 10.
EmpiricalCdf build_cdf(const DecileSeries& series);

struct StandardizedAbscissae {
  std::vector<double> z;
  Standardization s;
};

/// Centres on the arithmetic mean and scales by the population standard
/// deviation. Throws DomainError when all values are equal.
StandardizedAbscissae standardize(std::span<const double> xs);

/// Rewrites a polynomial in z = (x - x_mean)/x_scale as a polynomial in x
/// by binomial expansion. Works for any number of coefficients.
std::vector<double> back_transform_coefficients(
    std::span<const double> coeffs_z, const Standardization& s);

/// Horner evaluation.
double evaluate_polynomial(const Polynomial& poly, double x) noexcept;
double evaluate_polynomial(std::span<const double> ascending, double x) noexcept;

/// Coefficient of determination 1 - SSres/SStot, SStot taken about the
/// mean of `observed`.
///
/// Constant observations (SStot = 0) score 1 if SSres <= 1e-12 * n and
/// raise DomainError otherwise. Requires equal lengths >= 2.
double r_squared(std::span<const double> observed,
                 std::span<const double> fitted);

/// Least-squares polynomial through arbitrary (x, y) points.
///
/// The normal equations are assembled on standardized abscissae, solved by
/// Gaussian elimination with partial pivoting plus one step of iterative
/// refinement, and the solution is back-transformed to raw x. Requires
/// kMinDegree <= degree <= kMaxDegree and degree + 1 <= xs.size().
FitResult fit_least_squares(std::span<const double> xs,
                            std::span<const double> ys, int degree);

/// Fits p as a polynomial in x (linear) or ln p as a polynomial in ln x
/// (loglog), as selected by `config`.
FitResult fit_polynomial(const EmpiricalCdf& cdf, const FitConfig& config);

/// fit_polynomial with Transform::loglog. Throws DomainError if any x or p
/// is not positive.
FitResult fit_loglog(const EmpiricalCdf& cdf, int degree);

/// Solves poly(x) = p on the decreasing branch (left of the vertex) of an
/// upward-opening quadratic. The result may be negative.
///
/// Throws DomainError when the discriminant is negative, i.e. p lies below
/// the parabola's minimum. A leading coefficient with |a| <= 1e-300 is
/// treated as linear.
double invert_decreasing_quadratic(const Polynomial& poly, double p);

/// Builds the decile series whose complementary CDF lies exactly on `poly`:
/// values[i] = invert_decreasing_quadratic(poly, 100 - 10 i).
DecileSeries reconstruct_series_from_fit(const Polynomial& poly,
                                         const SeriesMeta& meta);

/// Percent level assigned to decile index i (0-based): 100 - 10 i.
constexpr double decile_percent(int i) noexcept { return 100.0 - 10.0 * i; }

}  // namespace incdist
