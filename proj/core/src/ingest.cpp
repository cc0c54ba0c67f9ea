#include "incdist/ingest.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

#include "incdist/error.hpp"

namespace incdist {

namespace {

constexpr int kMetaFields = 5;
constexpr int kDecileFields = kMetaFields + kDecileCount;

std::string decile_field(std::size_t i) { return "d" + std::to_string(i + 1); }

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace

namespace detail {

bool parse_double(std::string_view field, double& out) noexcept {
  if (field.empty()) return false;
  // from_chars rejects a leading '+', but spreadsheets emit it.
  if (field.front() == '+') field.remove_prefix(1);
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view field, int& out) noexcept {
  if (field.empty()) return false;
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

std::string_view to_string(Statistic s) noexcept {
  switch (s) {
    case Statistic::mean_income: return "mean_income";
    case Statistic::upper_limit: return "upper_limit";
  }
  return "?";
}

std::string_view to_string(IncomeKind k) noexcept {
  switch (k) {
    case IncomeKind::disposable: return "disposable";
    case IncomeKind::gross: return "gross";
    case IncomeKind::pensioner: return "pensioner";
    case IncomeKind::wealth: return "wealth";
  }
  return "?";
}

Statistic parse_statistic(std::string_view token) {
  if (token == "mean_income") return Statistic::mean_income;
  if (token == "upper_limit") return Statistic::upper_limit;
  throw ValidationError("statistic", "unknown statistic '" +
                                         std::string(token) +
                                         "' (expected mean_income or upper_limit)");
}

IncomeKind parse_income_kind(std::string_view token) {
  if (token == "disposable") return IncomeKind::disposable;
  if (token == "gross") return IncomeKind::gross;
  if (token == "pensioner") return IncomeKind::pensioner;
  if (token == "wealth") return IncomeKind::wealth;
  throw ValidationError(
      "income_kind",
      "unknown income kind '" + std::string(token) +
          "' (expected disposable, gross, pensioner or wealth)");
}

DecileSeries validate_series(const DecileSeries& series) {
  const auto& v = series.values;
  if (v.size() != static_cast<std::size_t>(kDecileCount)) {
    throw ValidationError("values", "expected " + std::to_string(kDecileCount) +
                                        " decile values, got " +
                                        std::to_string(v.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw ValidationError(decile_field(i),
                            decile_field(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i + 1])) {
      throw ValidationError(
          decile_field(i + 1),
          "values must be strictly increasing: " + decile_field(i) + " = " +
              detail::format_double(v[i]) + " >= " + decile_field(i + 1) +
              " = " + detail::format_double(v[i + 1]));
    }
  }
  return series;
}

std::vector<DecileSeries> parse_decile_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kDecileCsvHeader) {
    throw ParseError(1, "", "header mismatch; expected '" +
                                std::string(kDecileCsvHeader) + "'");
  }

  std::vector<DecileSeries> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const std::string_view line = lines[li];
    if (is_blank(line)) continue;

    const auto fields = detail::split_fields(line, ',');
    if (fields.size() != static_cast<std::size_t>(kDecileFields)) {
      throw ParseError(line_no, "",
                       "expected " + std::to_string(kDecileFields) +
                           " fields, got " + std::to_string(fields.size()));
    }

    DecileSeries s;
    s.meta.country = std::string(fields[0]);
    if (!detail::parse_int(fields[1], s.meta.year)) {
      throw ParseError(line_no, "year",
                       "not an integer: '" + std::string(fields[1]) + "'");
    }
    s.meta.currency = std::string(fields[2]);
    try {
      s.meta.statistic = parse_statistic(fields[3]);
      s.meta.income_kind = parse_income_kind(fields[4]);
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.field(), e.what());
    }

    s.values.resize(kDecileCount);
    for (int i = 0; i < kDecileCount; ++i) {
      const auto f = fields[kMetaFields + i];
      if (!detail::parse_double(f, s.values[i])) {
        throw ParseError(line_no, decile_field(i),
                         "not a number: '" + std::string(f) + "'");
      }
    }

    try {
      out.push_back(validate_series(s));
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.field(), e.what());
    }
  }
  return out;
}

std::string write_decile_csv(std::span<const DecileSeries> series) {
  std::ostringstream os;
  os << kDecileCsvHeader << '\n';
  for (const auto& s : series) {
    os << s.meta.country << ',' << s.meta.year << ',' << s.meta.currency << ','
       << to_string(s.meta.statistic) << ',' << to_string(s.meta.income_kind);
    for (double v : s.values) os << ',' << detail::format_double(v);
    os << '\n';
  }
  return os.str();
}

CpiSeries parse_cpi_csv(std::string_view text, int base_year) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kCpiCsvHeader) {
    throw ParseError(1, "", "header mismatch; expected '" +
                                std::string(kCpiCsvHeader) + "'");
  }
  CpiSeries cpi;
  cpi.base_year = base_year;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    if (is_blank(lines[li])) continue;
    const auto fields = detail::split_fields(lines[li], ',');
    if (fields.size() != 2) {
      throw ParseError(line_no, "", "expected 2 fields, got " +
                                        std::to_string(fields.size()));
    }
    int year = 0;
    double index = 0.0;
    if (!detail::parse_int(fields[0], year)) {
      throw ParseError(line_no, "year", "not an integer");
    }
    if (!detail::parse_double(fields[1], index) || !std::isfinite(index) ||
        index <= 0.0) {
      throw ParseError(line_no, "index", "CPI index must be a positive number");
    }
    if (!cpi.index.emplace(year, index).second) {
      throw ParseError(line_no, "year",
                       "duplicate year " + std::to_string(year));
    }
  }
  if (!cpi.index.contains(base_year)) {
    throw ValidationError("base_year", "CPI series has no entry for base year " +
                                           std::to_string(base_year));
  }
  return cpi;
}

DecileSeries deflate_to_real(const DecileSeries& series, const CpiSeries& cpi) {
  auto lookup = [&](int year) {
    auto it = cpi.index.find(year);
    if (it == cpi.index.end()) {
      throw ValidationError("year", "CPI series has no entry for year " +
                                        std::to_string(year));
    }
    return it->second;
  };
  const double ratio = lookup(cpi.base_year) / lookup(series.meta.year);

  DecileSeries out = series;
  for (double& v : out.values) v *= ratio;
  out.meta.currency += "_real" + std::to_string(cpi.base_year);
  return out;
}

}  // namespace incdist
