#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "incdist/report.hpp"
#include "scratch_dir.hpp"

namespace incdist::cli {
namespace {

using incdist::testing::read_text;
using incdist::testing::ScratchDir;
using incdist::testing::write_text;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

const SeriesMeta kFrance{"France", 2002, "EUR2009", Statistic::upper_limit,
                         IncomeKind::disposable};

std::string france_csv() {
  const auto q = Polynomial::quadratic(1.196e-7, -0.008721, 167.5);
  return write_decile_csv(std::vector<DecileSeries>{reconstruct_series_from_fit(q, kFrance)});
}

TEST(CliFit, FranceReconstructionRecoversCoefficients) {
  ScratchDir dir("fit");
  write_text(dir / "in.csv", france_csv());
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                         (dir / "out.jsonl").string(), "--plot",
                         (dir / "plot.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("R2=100.00%"), std::string::npos) << r.out;

  const auto reports = lines_of(read_text(dir / "out.jsonl"));
  ASSERT_EQ(reports.size(), 1u);
  const auto rep = parse_fit_report(reports[0]);
  EXPECT_EQ(rep.meta, kFrance);
  EXPECT_NEAR(rep.p_coeffs[0] / 1.196e-7, 1.0, 1e-6);
  EXPECT_NEAR(rep.p_coeffs[1] / -0.008721, 1.0, 1e-6);
  EXPECT_NEAR(rep.p_coeffs[2] / 167.5, 1.0, 1e-6);
  EXPECT_EQ(rep.r2_percent, 100.0);

  const auto plot = lines_of(read_text(dir / "plot.tsv"));
  EXPECT_EQ(plot.size(), 211u);
  EXPECT_FALSE(std::filesystem::exists(dir / "out.jsonl.tmp"));
}

TEST(CliFit, MultipleSeriesGetOnePlotEach) {
  ScratchDir dir("fit_multi");
  const auto q = Polynomial::quadratic(1.196e-7, -0.008721, 167.5);
  SeriesMeta other = kFrance;
  other.year = 2003;
  write_text(dir / "in.csv", write_decile_csv(std::vector<DecileSeries>{reconstruct_series_from_fit(q, kFrance),
                                               reconstruct_series_from_fit(q, other)}));
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                         (dir / "out.jsonl").string(), "--plot",
                         (dir / "plot.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(read_text(dir / "out.jsonl")).size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "plot_France_2002_upper_limit.tsv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot_France_2003_upper_limit.tsv"));
}

TEST(CliFit, EmptyInputHasNoSeries) {
  ScratchDir dir("fit_empty");
  write_text(dir / "in.csv", std::string(kDecileCsvHeader) + "\n");
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                         (dir / "out.jsonl").string()});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("no series"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "out.jsonl"));
}

TEST(CliFit, DegreeSixCitesCap) {
  ScratchDir dir("fit_deg");
  write_text(dir / "in.csv", france_csv());
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-d", "6", "-o",
                         (dir / "out.jsonl").string()});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("degree cap is 5"), std::string::npos) << r.err;
}

TEST(CliFit, ParseErrorsAreLineNumbered) {
  ScratchDir dir("fit_parse");
  const std::string header(kDecileCsvHeader);
  const std::string good = lines_of(france_csv())[1];
  const struct {
    std::string text;
    std::string needle;
  } cases[] = {
      {"country,year\n" + good + "\n", "line 1"},
      {header + "\n" + good + "\nFrance,2003,EUR,upper_limit,disposable,1,2,3\n",
       "line 3"},
      {header + "\n\nFrance,2003,EUR,upper_limit,disposable,1,2,3,4,5,5,7,8,9,10\n",
       "line 3, field d6"},
  };
  for (const auto& c : cases) {
    write_text(dir / "in.csv", c.text);
    const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                           (dir / "out.jsonl").string()});
    EXPECT_EQ(r.code, kFailure);
    EXPECT_NE(r.err.find(c.needle), std::string::npos) << r.err;
    EXPECT_FALSE(std::filesystem::exists(dir / "out.jsonl"));
  }
}

TEST(CliFit, FailedSeriesRemovesPartialOutputs) {
  ScratchDir dir("fit_partial");
  // The wealth row has negative deciles, which a loglog fit cannot take.
  const auto wealth = Polynomial::quadratic(1.294e-10, -0.000223, 87.6);
  const auto q = Polynomial::quadratic(1.196e-7, -0.008721, 167.5);
  SeriesMeta wm{"France", 2010, "EUR", Statistic::mean_income, IncomeKind::wealth};
  write_text(dir / "in.csv", write_decile_csv(std::vector<DecileSeries>{reconstruct_series_from_fit(q, kFrance),
                                               reconstruct_series_from_fit(wealth, wm)}));
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-t", "loglog", "-o",
                         (dir / "out.jsonl").string(), "--plot",
                         (dir / "plot.tsv").string()});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("France_2010_mean_income"), std::string::npos) << r.err;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(e.path().filename(), "in.csv");
  }
}

TEST(CliFit, CpiDeflation) {
  ScratchDir dir("fit_cpi");
  write_text(dir / "in.csv", france_csv());
  write_text(dir / "cpi.csv", "year,index\n2002,50\n2009,100\n");
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                         (dir / "out.jsonl").string(), "--cpi",
                         (dir / "cpi.csv").string(), "--cpi-base-year", "2009"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = parse_fit_report(lines_of(read_text(dir / "out.jsonl"))[0]);
  EXPECT_EQ(rep.meta.currency, "EUR2009_real2009");
  // x doubles, so P1 quarters and P2 halves.
  EXPECT_NEAR(rep.p_coeffs[0] / (1.196e-7 / 4), 1.0, 1e-6);
  EXPECT_NEAR(rep.p_coeffs[1] / (-0.008721 / 2), 1.0, 1e-6);

  const auto missing = invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                               (dir / "out2.jsonl").string(), "--cpi",
                               (dir / "cpi.csv").string()});
  EXPECT_EQ(missing.code, kUsage);
}

TEST(CliFit, LogLogTransform) {
  ScratchDir dir("fit_loglog");
  DecileSeries s;
  s.meta = kFrance;
  for (int i = 0; i < 10; ++i) {
    // p = 1e8 / x^2 on the decile grid
    s.values.push_back(1e4 / std::sqrt(100.0 - 10.0 * i));
  }
  write_text(dir / "in.csv", write_decile_csv(std::vector<DecileSeries>{s}));
  const auto r = invoke({"fit", "-i", (dir / "in.csv").string(), "-d", "1", "-t",
                         "loglog", "-o", (dir / "out.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = parse_fit_report(lines_of(read_text(dir / "out.jsonl"))[0]);
  EXPECT_EQ(rep.transform, Transform::loglog);
  EXPECT_NEAR(rep.p_coeffs[0], -2.0, 1e-10);
}

TEST(CliRoundtrip, ShippedTableReportsEveryRow) {
  const auto r = invoke({"roundtrip"});
  const auto out = lines_of(r.out);
  ASSERT_EQ(out.size(), 112u);
  // The six pensioner rows whose parabola minimum lies above 10 cannot be
  // inverted at p = 10.
  EXPECT_EQ(out.back(), "104/110 rows passed at tolerance 1.0e-06");
  EXPECT_EQ(r.code, kFailure);
  int pensioner_failures = 0;
  for (const auto& line : out) {
    if (line.find("FAIL") == std::string::npos) continue;
    EXPECT_EQ(line.rfind("appendix9_france_pensioner_upper_limit", 0), 0u) << line;
    ++pensioner_failures;
  }
  EXPECT_EQ(pensioner_failures, 6);
}

TEST(CliRoundtrip, InvertibleRowsPassAndToleranceZeroFails) {
  ScratchDir dir("rt");
  std::string text = std::string(kFixtureCsvHeader) + "\n";
  for (const auto& fig : figure_specs()) {
    std::ostringstream row;
    row.precision(17);
    row << fig.dataset << "," << fig.meta.year << "," << fig.meta.currency << ","
        << fig.p1 << "," << fig.p2 << "," << fig.p3 << "," << fig.r2_percent << "\n";
    text += row.str();
  }
  write_text(dir / "fx.csv", text);
  const auto ok = invoke({"roundtrip", "-f", (dir / "fx.csv").string()});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("5/5 rows passed"), std::string::npos);

  const auto zero =
      invoke({"roundtrip", "-f", (dir / "fx.csv").string(), "--tolerance", "0"});
  EXPECT_NE(zero.code, 0);
  EXPECT_NE(zero.out.find("FAIL"), std::string::npos);
}

TEST(CliRoundtrip, SignFlipNamesRow) {
  ScratchDir dir("rt_flip");
  write_text(dir / "fx.csv", std::string(kFixtureCsvHeader) +
                                 "\nappendix4_finland_upper_limit,1988,EUR2009,"
                                 "1.596e-7,0.01135,190.8,99.43\n");
  const auto r = invoke({"roundtrip", "-f", (dir / "fx.csv").string()});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("appendix4_finland_upper_limit 1988"), std::string::npos);
}

TEST(CliRoundtrip, FitOutputFeedsRoundtrip) {
  ScratchDir dir("fit_rt");
  write_text(dir / "in.csv", france_csv());
  ASSERT_EQ(invoke({"fit", "-i", (dir / "in.csv").string(), "-o",
                    (dir / "out.jsonl").string()})
                .code,
            0);
  const auto rep = parse_fit_report(lines_of(read_text(dir / "out.jsonl"))[0]);
  std::ostringstream fx;
  fx.precision(17);
  fx << kFixtureCsvHeader << "\nrefit," << rep.meta.year << "," << rep.meta.currency
     << "," << rep.p_coeffs[0] << "," << rep.p_coeffs[1] << "," << rep.p_coeffs[2]
     << "," << rep.r2_percent << "\n";
  write_text(dir / "fx.csv", fx.str());
  const auto r = invoke({"roundtrip", "-f", (dir / "fx.csv").string(), "--tolerance",
                         "1e-6"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(CliSample, ZeroIsUsageError) {
  ScratchDir dir("smp0");
  const auto r = invoke({"sample", "--p1", "1.196e-7", "--p2", "-0.008721", "--p3",
                         "167.5", "--n", "0", "-o", (dir / "s.txt").string()});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(std::filesystem::exists(dir / "s.txt"));
}

TEST(CliSample, SameSeedIsByteIdentical) {
  ScratchDir dir("smp");
  auto args = [&](const std::string& name) {
    return std::vector<std::string>{"sample", "--p1", "1.196e-7", "--p2", "-0.008721",
                                    "--p3", "167.5", "--n", "5000", "--seed", "42",
                                    "-o", (dir / name).string()};
  };
  ASSERT_EQ(invoke(args("a.txt")).code, 0);
  ASSERT_EQ(invoke(args("b.txt")).code, 0);
  EXPECT_EQ(read_text(dir / "a.txt"), read_text(dir / "b.txt"));
  EXPECT_EQ(read_text(dir / "a.txt.report.json"), read_text(dir / "b.txt.report.json"));
  EXPECT_EQ(lines_of(read_text(dir / "a.txt")).size(), 5000u);

  const auto report = nlohmann::json::parse(read_text(dir / "a.txt.report.json"));
  EXPECT_EQ(report.at("generator").get<std::string>(), std::string(kGeneratorId));
  EXPECT_EQ(report.at("seed").get<int>(), 42);
  EXPECT_EQ(report.at("mean_deciles").size(), 10u);
  EXPECT_EQ(report.at("upper_deciles").size(), 10u);
  EXPECT_GT(report.at("gini").get<double>(), 0.0);
}

TEST(CliSample, MillionDrawsMatchModelQuantiles) {
  ScratchDir dir("smp_big");
  const auto r = invoke({"sample", "--p1", "1.196e-7", "--p2", "-0.008721", "--p3",
                         "167.5", "--n", "1000000", "--seed", "20020",
                         "-o", (dir / "s.txt").string(), "--report",
                         (dir / "r.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(read_text(dir / "r.json"));
  const auto& checks = report.at("quantile_checks");
  ASSERT_EQ(checks.size(), 8u);
  for (const auto& c : checks) {
    EXPECT_LT(c.at("rel_err").get<double>(), 0.005) << c.dump();
  }
}

TEST(CliSample, NonInvertibleBandFails) {
  ScratchDir dir("smp_bad");
  const auto r = invoke({"sample", "--p1", "1e-7", "--p2", "-0.01", "--p3", "200",
                         "--n", "10", "-o", (dir / "s.txt").string()});
  // Parabola minimum is p3 - 250: below 10 here, above 10 with p3 = 260.1.
  EXPECT_EQ(r.code, 0) << r.err;
  const auto bad = invoke({"sample", "--p1", "1e-7", "--p2", "-0.01", "--p3", "260.1",
                           "--n", "10", "-o", (dir / "t.txt").string()});
  EXPECT_EQ(bad.code, kFailure);
  EXPECT_FALSE(std::filesystem::exists(dir / "t.txt"));
}

TEST(CliFigures, FiveFilesWithPrintedConstants) {
  ScratchDir dir("figs");
  const auto r = invoke({"figures", "-o", (dir / "figs").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& fig : figure_specs()) {
    const auto path = dir.path() / "figs" / (std::string(fig.file_stem) + ".tsv");
    const auto lines = lines_of(read_text(path));
    int comments = 0, data = 0;
    for (const auto& l : lines) (l.rfind('#', 0) == 0 ? comments : data)++;
    EXPECT_EQ(comments, 4) << path;
    EXPECT_EQ(data, 210) << path;

    const auto& refit_line = lines[2];
    ASSERT_EQ(refit_line.rfind("# refit:", 0), 0u);
    double p1 = 0, p2 = 0, p3 = 0;
    ASSERT_EQ(std::sscanf(refit_line.c_str(), "# refit: P1=%lf P2=%lf P3=%lf", &p1, &p2,
                          &p3),
              3)
        << refit_line;
    EXPECT_NEAR(p1 / fig.p1, 1.0, 1e-6) << fig.file_stem;
    EXPECT_NEAR(p2 / fig.p2, 1.0, 1e-6) << fig.file_stem;
    EXPECT_NEAR(p3 / fig.p3, 1.0, 1e-6) << fig.file_stem;
  }
}

TEST(CliUsage, HelpAndUnknownCommands) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"fit", "--help"}).code, 0);
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
  EXPECT_EQ(invoke({"fit", "-i", "x.csv"}).code, kUsage);
  EXPECT_EQ(invoke({"fit", "-i", "x.csv", "-o", "y", "-t", "cubic"}).code, kUsage);
  const auto missing = invoke({"fit", "-i", "/nonexistent/in.csv", "-o", "/tmp/y"});
  EXPECT_EQ(missing.code, kFailure);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);
}

}  // namespace
}  // namespace incdist::cli
