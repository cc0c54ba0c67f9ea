#include "incdist/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "incdist/error.hpp"

namespace incdist {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kFixtureFields = 7;

std::string row_label(const PaperFixtureRow& row) {
  return row.dataset + " " + std::to_string(row.year);
}

void check_fixture_row(const PaperFixtureRow& row) {
  auto reject = [&](const std::string& field, const std::string& what) {
    throw ParseError(row.line, field, row_label(row) + ": " + what);
  };
  if (!(row.p1 > 0.0)) reject("p1", "p1 must be positive (upward-opening fit)");
  if (!(row.p2 < 0.0)) reject("p2", "p2 must be negative (decreasing fit)");
  if (!(row.p3 > 0.0)) reject("p3", "p3 must be positive");
  if (!(row.r2_percent > 90.0 && row.r2_percent <= 100.0)) {
    reject("r2_percent", "r2_percent must lie in (90, 100]");
  }
}

std::string p_key(std::size_t i) { return "P" + std::to_string(i + 1); }

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::vector<PaperFixtureRow> parse_fixture_csv(std::string_view text) {
  std::vector<PaperFixtureRow> rows;
  bool seen_header = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;

    if (!seen_header) {
      if (line != kFixtureCsvHeader) {
        throw ParseError(line_no, "", "header mismatch; expected '" +
                                          std::string(kFixtureCsvHeader) + "'");
      }
      seen_header = true;
      continue;
    }

    const auto fields = detail::split_fields(line, ',');
    if (fields.size() != static_cast<std::size_t>(kFixtureFields)) {
      throw ParseError(line_no, "", "expected " + std::to_string(kFixtureFields) +
                                        " fields, got " +
                                        std::to_string(fields.size()));
    }
    PaperFixtureRow row;
    row.line = line_no;
    row.dataset = std::string(fields[0]);
    if (!detail::parse_int(fields[1], row.year)) {
      throw ParseError(line_no, "year", "not an integer");
    }
    row.currency = std::string(fields[2]);
    const std::pair<double*, const char*> nums[] = {
        {&row.p1, "p1"}, {&row.p2, "p2"}, {&row.p3, "p3"}, {&row.r2_percent, "r2_percent"}};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!detail::parse_double(fields[3 + i], *nums[i].first) ||
          !std::isfinite(*nums[i].first)) {
        throw ParseError(line_no, nums[i].second,
                         "not a number: '" + std::string(fields[3 + i]) + "'");
      }
    }
    check_fixture_row(row);
    rows.push_back(std::move(row));
  }
  if (!seen_header) {
    throw ParseError(line_no == 0 ? 1 : line_no, "", "missing header");
  }
  return rows;
}

const std::array<FigureSpec, 5>& figure_specs() {
  static const std::array<FigureSpec, 5> specs = {{
      {"fig1_france_2002_upper_limit", "appendix2_france_upper_limit",
       {"France", 2002, "EUR2009", Statistic::upper_limit, IncomeKind::disposable},
       1.196e-7, -0.008721, 167.5, 99.72},
      {"fig2_finland_1988_upper_limit", "appendix4_finland_upper_limit",
       {"Finland", 1988, "EUR2009", Statistic::upper_limit, IncomeKind::disposable},
       1.596e-7, -0.01135, 190.8, 99.43},
      {"fig3_romania_2004_mean_income", "appendix5_romania_mean_income",
       {"Romania", 2004, "ROL", Statistic::mean_income, IncomeKind::disposable},
       4.693e-13, -1.886e-5, 191.9, 97.5},
      {"fig4_italy_2000_mean_income", "appendix6_italy_mean_income",
       {"Italy", 2000, "EUR", Statistic::mean_income, IncomeKind::disposable},
       3.213e-8, -0.00388, 124.4, 99.58},
      {"fig5_france_2010_mean_wealth", "appendix10_france_mean_wealth",
       {"France", 2010, "EUR", Statistic::mean_income, IncomeKind::wealth},
       1.294e-10, -0.000223, 87.6, 96.15},
  }};
  return specs;
}

std::vector<double> to_descending(const Polynomial& poly) {
  const auto c = poly.coeffs();
  return {c.rbegin(), c.rend()};
}

Polynomial from_descending(std::span<const double> p_coeffs) {
  return Polynomial(std::vector<double>(p_coeffs.rbegin(), p_coeffs.rend()));
}

Polynomial FitReport::poly() const { return from_descending(p_coeffs); }

FitReport make_fit_report(const SeriesMeta& meta, const FitResult& fit) {
  FitReport r;
  r.meta = meta;
  r.degree = fit.poly.degree();
  r.transform = fit.transform;
  r.p_coeffs = to_descending(fit.poly);
  r.r_squared = fit.r_squared;
  r.r2_percent = round2(fit.r_squared * 100.0);
  r.ss_res = fit.ss_res;
  r.ss_tot = fit.ss_tot;
  r.residuals = fit.residuals;
  r.standardization = fit.standardization;
  return r;
}

std::string serialize_fit_report(const FitReport& report) {
  ojson j;
  j["country"] = report.meta.country;
  j["year"] = report.meta.year;
  j["currency"] = report.meta.currency;
  j["statistic"] = to_string(report.meta.statistic);
  j["income_kind"] = to_string(report.meta.income_kind);
  j["degree"] = report.degree;
  j["transform"] = to_string(report.transform);
  ojson coeffs = ojson::object();
  for (std::size_t i = 0; i < report.p_coeffs.size(); ++i) {
    coeffs[p_key(i)] = report.p_coeffs[i];
  }
  j["coefficients"] = coeffs;
  j["r2_percent"] = report.r2_percent;
  j["r_squared"] = report.r_squared;
  j["ss_res"] = report.ss_res;
  j["ss_tot"] = report.ss_tot;
  j["residuals"] = report.residuals;
  j["standardization"] = {{"x_mean", report.standardization.x_mean},
                          {"x_scale", report.standardization.x_scale}};
  if (report.generator) j["generator"] = *report.generator;
  return j.dump();
}

FitReport parse_fit_report(std::string_view json_line) {
  FitReport r;
  try {
    const ojson j = ojson::parse(json_line);
    r.meta.country = j.at("country").get<std::string>();
    r.meta.year = j.at("year").get<int>();
    r.meta.currency = j.at("currency").get<std::string>();
    r.meta.statistic = parse_statistic(j.at("statistic").get<std::string>());
    r.meta.income_kind = parse_income_kind(j.at("income_kind").get<std::string>());
    r.degree = j.at("degree").get<int>();
    r.transform = parse_transform(j.at("transform").get<std::string>());
    const auto& coeffs = j.at("coefficients");
    for (int i = 0; i <= r.degree; ++i) {
      r.p_coeffs.push_back(coeffs.at(p_key(i)).get<double>());
    }
    r.r2_percent = j.at("r2_percent").get<double>();
    r.r_squared = j.at("r_squared").get<double>();
    r.ss_res = j.at("ss_res").get<double>();
    r.ss_tot = j.at("ss_tot").get<double>();
    r.residuals = j.at("residuals").get<std::vector<double>>();
    r.standardization.x_mean = j.at("standardization").at("x_mean").get<double>();
    r.standardization.x_scale = j.at("standardization").at("x_scale").get<double>();
    if (j.contains("generator")) r.generator = j.at("generator").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("report", std::string("malformed fit report: ") + e.what());
  }
  return r;
}

std::string plot_tsv(const EmpiricalCdf& cdf, const FitResult& fit) {
  const bool loglog = fit.transform == Transform::loglog;
  auto model = [&](double x) {
    return loglog ? std::exp(evaluate_polynomial(fit.poly, std::log(x)))
                  : evaluate_polynomial(fit.poly, x);
  };

  std::ostringstream os;
  os << "# x\tobserved_p\tfitted_p\n";
  for (const auto& pt : cdf.points) {
    os << detail::format_double(pt.x) << '\t' << detail::format_double(pt.p)
       << '\t' << detail::format_double(model(pt.x)) << '\n';
  }
  const auto xs = cdf.xs();
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  for (int j = 0; j < kPlotCurveSamples; ++j) {
    const double x = j == kPlotCurveSamples - 1
                         ? hi
                         : lo + (hi - lo) * j / (kPlotCurveSamples - 1);
    os << detail::format_double(x) << "\tnan\t" << detail::format_double(model(x))
       << '\n';
  }
  return os.str();
}

std::vector<QuantileCheck> quantile_checks(const Polynomial& poly,
                                           const SampleSpec& spec,
                                           std::span<const double> incomes) {
  std::vector<QuantileCheck> out;
  if (incomes.empty() || !(spec.p_high > spec.p_low)) return out;
  std::vector<double> sorted(incomes.begin(), incomes.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  for (int p = 90; p >= 20; p -= 10) {
    const double level = p;
    if (level < spec.p_low || level > spec.p_high) continue;
    // P(x >= invert(p)) = (p - p_low) / (p_high - p_low)
    const double frac = (level - spec.p_low) / (spec.p_high - spec.p_low);
    const auto k = static_cast<std::size_t>(std::llround(frac * n));
    if (k == 0) continue;
    QuantileCheck qc;
    qc.p = level;
    qc.model_x = invert_decreasing_quadratic(poly, level);
    qc.sample_x = sorted[sorted.size() - k];
    qc.rel_err = std::abs(qc.sample_x - qc.model_x) / std::abs(qc.model_x);
    out.push_back(qc);
  }
  return out;
}

std::string serialize_sample_report(const Polynomial& poly,
                                    const SampleSpec& spec,
                                    const std::optional<DecileTables>& deciles,
                                    std::optional<double> gini_value,
                                    std::span<const QuantileCheck> checks) {
  ojson j;
  j["generator"] = std::string(kGeneratorId);
  j["seed"] = spec.seed;
  j["n"] = spec.n;
  j["p_low"] = spec.p_low;
  j["p_high"] = spec.p_high;
  ojson coeffs = ojson::object();
  const auto desc = to_descending(poly);
  for (std::size_t i = 0; i < desc.size(); ++i) coeffs[p_key(i)] = desc[i];
  j["coefficients"] = coeffs;
  if (deciles) {
    j["mean_deciles"] = deciles->mean_series.values;
    j["upper_deciles"] = deciles->upper_series.values;
  } else {
    j["mean_deciles"] = nullptr;
    j["upper_deciles"] = nullptr;
  }
  j["gini"] = gini_value ? ojson(*gini_value) : ojson(nullptr);
  ojson qcs = ojson::array();
  for (const auto& qc : checks) {
    qcs.push_back({{"p", qc.p},
                   {"model_x", qc.model_x},
                   {"sample_x", qc.sample_x},
                   {"rel_err", qc.rel_err}});
  }
  j["quantile_checks"] = qcs;
  return j.dump(2) + "\n";
}

}  // namespace incdist
