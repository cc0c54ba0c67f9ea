#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace incdist {

inline constexpr int kDecileCount = 10;

enum class Statistic { mean_income, upper_limit };
enum class IncomeKind { disposable, gross, pensioner, wealth };

std::string_view to_string(Statistic s) noexcept;
std::string_view to_string(IncomeKind k) noexcept;
Statistic parse_statistic(std::string_view token);    // throws ValidationError
IncomeKind parse_income_kind(std::string_view token);  // throws ValidationError

/// Everything about a country-year row except the decile values.
struct SeriesMeta {
  std::string country;
  int year = 0;
  std::string currency;
  Statistic statistic = Statistic::upper_limit;
  IncomeKind income_kind = IncomeKind::disposable;

  bool operator==(const SeriesMeta&) const = default;
};

/// One country-year of decile statistics, lowest decile first.
///
/// Valid series hold exactly ten finite, strictly increasing values.
/// Negative values are accepted for every income kind.
struct DecileSeries {
  SeriesMeta meta;
  std::vector<double> values;

  bool operator==(const DecileSeries&) const = default;
};

/// Consumer price index keyed by year. `base_year` must be a key.
struct CpiSeries {
  int base_year = 0;
  std::map<int, double> index;
};

/// Header line of the decile CSV format, without line terminator.
inline constexpr std::string_view kDecileCsvHeader =
    "country,year,currency,statistic,income_kind,d1,d2,d3,d4,d5,d6,d7,d8,d9,"
    "d10";

inline constexpr std::string_view kCpiCsvHeader = "year,index";

/// Returns `series` unchanged if it satisfies the DecileSeries invariants,
/// otherwise throws ValidationError naming the offending field (d1..d10).
DecileSeries validate_series(const DecileSeries& series);

/// Parses a whole decile CSV file. Numbers use '.' as decimal separator
/// regardless of the process locale. Blank lines are skipped. Errors are
/// ParseError with the 1-based line number and the field name.
std::vector<DecileSeries> parse_decile_csv(std::string_view text);

/// Inverse of parse_decile_csv. Values are written in shortest round-trip
/// form so that parse(write(s)) == s bitwise.
std::string write_decile_csv(std::span<const DecileSeries> series);

/// Parses `year,index` rows. Every index must be positive and finite, and
/// `base_year` must appear in the file.
CpiSeries parse_cpi_csv(std::string_view text, int base_year);

/// Converts nominal values to base-year prices:
/// value * index[base_year] / index[series.year]. The currency label gains
/// a `_real<base_year>` suffix. Throws ValidationError if a year is missing.
DecileSeries deflate_to_real(const DecileSeries& series, const CpiSeries& cpi);

namespace detail {
// Locale-independent; the whole field must be consumed.
bool parse_double(std::string_view field, double& out) noexcept;
bool parse_int(std::string_view field, int& out) noexcept;
std::string format_double(double v);
std::vector<std::string_view> split_fields(std::string_view line, char sep);
}  // namespace detail

}  // namespace incdist
