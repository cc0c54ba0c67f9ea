#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "incdist/error.hpp"
#include "incdist/ingest.hpp"

namespace incdist {
namespace {

const std::string kHeader = std::string(kDecileCsvHeader) + "\n";

DecileSeries one_to_ten() {
  DecileSeries s;
  s.meta = {"France", 2002, "EUR", Statistic::upper_limit, IncomeKind::disposable};
  for (int i = 1; i <= 10; ++i) s.values.push_back(i);
  return s;
}

TEST(ParseDecileCsv, SingleRow) {
  const auto rows =
      parse_decile_csv(kHeader + "France,2002,EUR,upper_limit,disposable,1,2,3,4,5,6,7,8,9,10\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], one_to_ten());
}

TEST(ParseDecileCsv, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_decile_csv(kHeader).empty());
  EXPECT_TRUE(parse_decile_csv(std::string(kDecileCsvHeader)).empty());
}

TEST(ParseDecileCsv, CrLfAndBlankLines) {
  const auto rows = parse_decile_csv(
      std::string(kDecileCsvHeader) +
      "\r\n\r\nItaly,1989,ITL,mean_income,disposable,1e6,2e6,3e6,4e6,5e6,6e6,7e6,8e6,9e6,1e7\r\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].meta.statistic, Statistic::mean_income);
  EXPECT_DOUBLE_EQ(rows[0].values[9], 1e7);
}

TEST(ParseDecileCsv, HeaderMismatch) {
  try {
    parse_decile_csv("country,year,currency\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("header"), std::string::npos);
  }
}

TEST(ParseDecileCsv, WrongFieldCount) {
  try {
    parse_decile_csv(kHeader + "France,2002,EUR,upper_limit,disposable,1,2,3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("fields"), std::string::npos);
  }
}

TEST(ParseDecileCsv, EqualAdjacentDecilesNameLineAndField) {
  try {
    parse_decile_csv(kHeader +
                     "France,2002,EUR,upper_limit,disposable,1,2,3,4,5,6,7,8,9,10\n"
                     "France,2003,EUR,upper_limit,disposable,1,2,3,4,5,5,7,8,9,10\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "d6");
    EXPECT_NE(std::string(e.what()).find("strictly increasing"), std::string::npos);
  }
}

TEST(ParseDecileCsv, RejectsCommaDecimalsAndGarbage) {
  EXPECT_THROW(parse_decile_csv(kHeader +
                                "France,2002,EUR,upper_limit,disposable,1,2,3,4,5,6,7,8,9,1 0\n"),
               ParseError);
  EXPECT_THROW(parse_decile_csv(kHeader +
                                "France,2002,EUR,upper_limit,disposable,1,2,3,4,5,6,7,8,9,10x\n"),
               ParseError);
  EXPECT_THROW(parse_decile_csv(kHeader +
                                "France,20O2,EUR,upper_limit,disposable,1,2,3,4,5,6,7,8,9,10\n"),
               ParseError);
}

TEST(ParseDecileCsv, UnknownEnumToken) {
  try {
    parse_decile_csv(kHeader + "France,2002,EUR,median,disposable,1,2,3,4,5,6,7,8,9,10\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "statistic");
  }
  EXPECT_THROW(
      parse_decile_csv(kHeader + "France,2002,EUR,upper_limit,net,1,2,3,4,5,6,7,8,9,10\n"),
      ParseError);
}

TEST(ParseDecileCsv, NegativeWealthAccepted) {
  const auto rows = parse_decile_csv(
      kHeader + "France,2010,EUR,mean_income,wealth,-2000,-5,3,4,5,6,7,8,9,10\n");
  EXPECT_EQ(rows[0].values[0], -2000.0);
}

TEST(ValidateSeries, AcceptsIncreasing) {
  EXPECT_EQ(validate_series(one_to_ten()), one_to_ten());
}

TEST(ValidateSeries, RejectsDecreasing) {
  auto s = one_to_ten();
  std::reverse(s.values.begin(), s.values.end());
  EXPECT_THROW(validate_series(s), ValidationError);
}

TEST(ValidateSeries, RejectsNonFinite) {
  auto s = one_to_ten();
  s.values[4] = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_series(s);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "d5");
    EXPECT_NE(std::string(e.what()).find("finite"), std::string::npos);
  }
  s.values[4] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_series(s), ValidationError);
}

TEST(ValidateSeries, RejectsWrongCount) {
  auto s = one_to_ten();
  s.values.pop_back();
  EXPECT_THROW(validate_series(s), ValidationError);
}

TEST(DeflateToReal, IdentityRatio) {
  CpiSeries cpi{2009, {{2002, 87.5}, {2009, 87.5}}};
  const auto s = one_to_ten();
  const auto r = deflate_to_real(s, cpi);
  EXPECT_EQ(r.values, s.values);
  EXPECT_EQ(r.meta.currency, "EUR_real2009");
  EXPECT_EQ(r.meta.country, s.meta.country);
}

TEST(DeflateToReal, DoublesWhenIndexHalved) {
  DecileSeries s = one_to_ten();
  for (auto& v : s.values) v *= 100;
  CpiSeries cpi{2009, {{2002, 50.0}, {2009, 100.0}}};
  const auto r = deflate_to_real(s, cpi);
  for (int i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(r.values[i], 200.0 * (i + 1));
}

TEST(DeflateToReal, MissingYear) {
  CpiSeries cpi{2009, {{2009, 100.0}}};
  EXPECT_THROW(deflate_to_real(one_to_ten(), cpi), ValidationError);
}

TEST(ParseCpiCsv, ParsesAndChecksBaseYear) {
  const auto cpi = parse_cpi_csv("year,index\n2002,87.5\n2009,100\n", 2009);
  EXPECT_EQ(cpi.index.size(), 2u);
  EXPECT_DOUBLE_EQ(cpi.index.at(2002), 87.5);
  EXPECT_THROW(parse_cpi_csv("year,index\n2002,87.5\n", 2009), ValidationError);
  EXPECT_THROW(parse_cpi_csv("year,index\n2002,-1\n2009,100\n", 2009), ParseError);
  EXPECT_THROW(parse_cpi_csv("year,cpi\n", 2009), ParseError);
}

// Random valid series survive write -> parse bitwise, and deflation keeps
// them strictly increasing.
TEST(DecileCsvProperty, WriteParseRoundTripAndDeflateMonotone) {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> step(1e-3, 1e4);
  std::uniform_real_distribution<double> start(-1e5, 1e5);
  std::uniform_real_distribution<double> idx(1.0, 500.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DecileSeries> batch;
    const int rows = trial % 5;
    for (int r = 0; r < rows; ++r) {
      DecileSeries s;
      s.meta = {"C" + std::to_string(r), 1980 + r, "XXX",
                r % 2 ? Statistic::mean_income : Statistic::upper_limit,
                static_cast<IncomeKind>(r % 4)};
      double v = start(rng);
      for (int i = 0; i < 10; ++i) {
        s.values.push_back(v);
        v += step(rng);
      }
      batch.push_back(s);
    }
    EXPECT_EQ(parse_decile_csv(write_decile_csv(batch)), batch);

    for (const auto& s : batch) {
      CpiSeries cpi{2009, {{s.meta.year, idx(rng)}, {2009, idx(rng)}}};
      EXPECT_NO_THROW(validate_series(deflate_to_real(s, cpi)));
    }
  }
}

}  // namespace
}  // namespace incdist
