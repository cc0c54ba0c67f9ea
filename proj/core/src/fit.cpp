#include "incdist/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "incdist/error.hpp"

namespace incdist {

namespace {

constexpr int kMaxTerms = kMaxDegree + 1;
using Matrix = std::array<std::array<double, kMaxTerms>, kMaxTerms>;
using Vector = std::array<double, kMaxTerms>;

void check_degree(int degree) {
  if (degree < kMinDegree || degree > kMaxDegree) {
    throw ValidationError("degree", "degree must be between " +
                                        std::to_string(kMinDegree) + " and " +
                                        std::to_string(kMaxDegree) + ", got " +
                                        std::to_string(degree));
  }
}

// Solves A x = b for the leading m x m block by Gaussian elimination with
// partial pivoting. A and b are consumed.
Vector solve_pivoted(Matrix a, Vector b, int m) {
  double max_abs = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) max_abs = std::max(max_abs, std::abs(a[i][j]));
  const double tiny =
      max_abs * m * std::numeric_limits<double>::epsilon() * 16.0;

  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > tiny)) {
      throw DomainError("normal equations are singular at the requested degree");
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vector x{};
  for (int r = m - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < m; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

// Accumulates V^T V and V^T y for the Vandermonde matrix of zs.
void assemble_normal(std::span<const double> zs, std::span<const double> ys,
                     int m, Matrix& gram, Vector& rhs) {
  gram = {};
  rhs = {};
  std::array<double, 2 * kMaxTerms - 1> moments{};
  for (std::size_t i = 0; i < zs.size(); ++i) {
    double zp = 1.0;
    for (int k = 0; k < 2 * m - 1; ++k) {
      moments[k] += zp;
      if (k < m) rhs[k] += zp * ys[i];
      zp *= zs[i];
    }
  }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) gram[j][k] = moments[j + k];
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<double> EmpiricalCdf::xs() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back(pt.x);
  return out;
}

std::vector<double> EmpiricalCdf::ps() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back(pt.p);
  return out;
}

Polynomial::Polynomial(std::vector<double> ascending)
    : coeffs_(std::move(ascending)) {
  check_degree(static_cast<int>(coeffs_.size()) - 1);
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw ValidationError("coeffs", "polynomial coefficients must be finite");
    }
  }
}

Polynomial Polynomial::quadratic(double a, double b, double c) {
  return Polynomial({c, b, a});
}

std::string_view to_string(Transform t) noexcept {
  return t == Transform::loglog ? "loglog" : "linear";
}

Transform parse_transform(std::string_view token) {
  if (token == "linear") return Transform::linear;
  if (token == "loglog") return Transform::loglog;
  throw ValidationError("transform", "unknown transform '" +
                                         std::string(token) +
                                         "' (expected linear or loglog)");
}

EmpiricalCdf build_cdf(const DecileSeries& series) {
  const DecileSeries valid = validate_series(series);
  EmpiricalCdf cdf;
  cdf.points.reserve(kDecileCount);
  for (int i = 0; i < kDecileCount; ++i) {
    cdf.points.push_back({valid.values[i], decile_percent(i)});
  }
  return cdf;
}

StandardizedAbscissae standardize(std::span<const double> xs) {
  if (xs.size() < 2) {
    throw DomainError("standardize needs at least two abscissae");
  }
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double scale = std::sqrt(ss / n);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("abscissae are all equal (zero scale)");
  }
  StandardizedAbscissae out{{}, {mean, scale}};
  out.z.reserve(xs.size());
  for (double x : xs) out.z.push_back(out.s.apply(x));
  return out;
}

std::vector<double> back_transform_coefficients(
    std::span<const double> coeffs_z, const Standardization& s) {
  // z = u x + v with u = 1/scale, v = -mean/scale.
  const double u = 1.0 / s.x_scale;
  const double v = -s.x_mean / s.x_scale;
  const int m = static_cast<int>(coeffs_z.size());
  std::vector<double> out(coeffs_z.size(), 0.0);
  for (int k = 0; k < m; ++k) {
    const double uk = std::pow(u, k);
    double acc = 0.0;
    double vp = 1.0;  // v^(j-k)
    for (int j = k; j < m; ++j) {
      acc += coeffs_z[j] * binomial(j, k) * vp;
      vp *= v;
    }
    out[k] = acc * uk;
  }
  return out;
}

double evaluate_polynomial(std::span<const double> ascending, double x) noexcept {
  double acc = 0.0;
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

double evaluate_polynomial(const Polynomial& poly, double x) noexcept {
  return evaluate_polynomial(poly.coeffs(), x);
}

double r_squared(std::span<const double> observed,
                 std::span<const double> fitted) {
  if (observed.size() != fitted.size() || observed.size() < 2) {
    throw DomainError("r_squared needs two equal-length sequences of length >= 2");
  }
  const double n = static_cast<double>(observed.size());
  const double mean =
      std::accumulate(observed.begin(), observed.end(), 0.0) / n;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double r = observed[i] - fitted[i];
    const double d = observed[i] - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (ss_tot == 0.0) {
    if (ss_res <= 1e-12 * n) return 1.0;
    throw DomainError("R^2 undefined: observed data are constant but the fit "
                      "is not exact");
  }
  return 1.0 - ss_res / ss_tot;
}

FitResult fit_least_squares(std::span<const double> xs,
                            std::span<const double> ys, int degree) {
  check_degree(degree);
  if (xs.size() != ys.size()) {
    throw ValidationError("points", "abscissae and ordinates differ in length");
  }
  const int m = degree + 1;
  if (xs.size() < static_cast<std::size_t>(m)) {
    throw ValidationError("degree", "degree " + std::to_string(degree) +
                                        " needs at least " + std::to_string(m) +
                                        " points, got " +
                                        std::to_string(xs.size()));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw ValidationError("points", "fit points must be finite");
    }
  }

  auto [zs, s] = standardize(xs);

  Matrix gram;
  Vector rhs;
  assemble_normal(zs, ys, m, gram, rhs);
  Vector coef = solve_pivoted(gram, rhs, m);

  // One refinement step against the true residual recovers most of the
  // accuracy lost to squaring the condition number.
  std::vector<double> resid(zs.size());
  auto update_residuals = [&] {
    for (std::size_t i = 0; i < zs.size(); ++i) {
      resid[i] = ys[i] - evaluate_polynomial(std::span<const double>(coef.data(), m), zs[i]);
    }
  };
  update_residuals();
  {
    Matrix unused;
    Vector correction_rhs;
    assemble_normal(zs, resid, m, unused, correction_rhs);
    const Vector delta = solve_pivoted(gram, correction_rhs, m);
    for (int k = 0; k < m; ++k) coef[k] += delta[k];
  }
  update_residuals();

  FitResult out;
  out.standardized_coeffs.assign(coef.begin(), coef.begin() + m);
  out.poly = Polynomial(back_transform_coefficients(out.standardized_coeffs, s));
  out.standardization = s;
  out.residuals = resid;

  const double n = static_cast<double>(ys.size());
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out.ss_res += resid[i] * resid[i];
    out.ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  std::vector<double> fitted(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) fitted[i] = ys[i] - resid[i];
  out.r_squared = r_squared(ys, fitted);
  return out;
}

FitResult fit_polynomial(const EmpiricalCdf& cdf, const FitConfig& config) {
  check_degree(config.degree);
  std::vector<double> xs = cdf.xs();
  std::vector<double> ps = cdf.ps();
  if (config.transform == Transform::loglog) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] > 0.0) || !(ps[i] > 0.0)) {
        throw DomainError("log-log fit needs positive x and p; point " +
                          std::to_string(i + 1) + " has x = " +
                          detail::format_double(xs[i]) + ", p = " +
                          detail::format_double(ps[i]));
      }
      xs[i] = std::log(xs[i]);
      ps[i] = std::log(ps[i]);
    }
  }
  FitResult out = fit_least_squares(xs, ps, config.degree);
  out.transform = config.transform;
  return out;
}

FitResult fit_loglog(const EmpiricalCdf& cdf, int degree) {
  return fit_polynomial(cdf, FitConfig{degree, Transform::loglog});
}

double invert_decreasing_quadratic(const Polynomial& poly, double p) {
  if (poly.degree() != 2) {
    throw DomainError("inversion needs a quadratic, got degree " +
                      std::to_string(poly.degree()));
  }
  const double a = poly[2];
  const double b = poly[1];
  const double c = poly[0] - p;

  if (std::abs(a) <= 1e-300) {
    if (b == 0.0) throw DomainError("degenerate polynomial: a = b = 0");
    return -c / b;
  }
  if (a < 0.0) {
    throw DomainError("inversion needs a positive leading coefficient");
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || !std::isfinite(disc)) {
    throw DomainError("no real solution at p = " + detail::format_double(p) +
                      " (below the parabola minimum " +
                      detail::format_double(poly[0] - b * b / (4.0 * a)) + ")");
  }
  // Roots q/a and c/q with q = -(b + sign(b) sqrt(disc)) / 2; the smaller
  // one lies on the decreasing branch. This form avoids cancellation.
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  if (q == 0.0) return 0.0;  // b = 0 and disc = 0: vertex at the origin
  const double r1 = q / a;
  const double r2 = c / q;
  return std::min(r1, r2);
}

DecileSeries reconstruct_series_from_fit(const Polynomial& poly,
                                         const SeriesMeta& meta) {
  DecileSeries out;
  out.meta = meta;
  out.values.reserve(kDecileCount);
  for (int i = 0; i < kDecileCount; ++i) {
    const double p = decile_percent(i);
    try {
      out.values.push_back(invert_decreasing_quadratic(poly, p));
    } catch (const DomainError& e) {
      throw DomainError("cannot reconstruct decile at p = " +
                        detail::format_double(p) + ": " + e.what());
    }
  }
  return validate_series(out);
}

}  // namespace incdist
