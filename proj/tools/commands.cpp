#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "incdist/error.hpp"
#include "incdist/report.hpp"
#include "incdist/synth.hpp"

namespace incdist::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Collects whole-file outputs and writes them all or none.
class OutputBatch {
 public:
  void add(fs::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  void commit() {
    std::vector<fs::path> done;
    std::vector<fs::path> temps;
    try {
      for (const auto& [path, content] : files_) {
        fs::path tmp = path;
        tmp += ".tmp";
        temps.push_back(tmp);
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        os.close();
        if (!os) throw Error("cannot write '" + path.string() + "'");
      }
      for (std::size_t i = 0; i < files_.size(); ++i) {
        fs::rename(temps[i], files_[i].first);
        done.push_back(files_[i].first);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : temps) fs::remove(p, ec);
      for (const auto& p : done) fs::remove(p, ec);
      throw;
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string series_label(const SeriesMeta& meta) {
  return meta.country + "_" + std::to_string(meta.year) + "_" +
         std::string(to_string(meta.statistic));
}

std::string sci(double v, int digits = 4) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

fs::path plot_path_for(const fs::path& base, const SeriesMeta& meta,
                       std::size_t count) {
  if (count <= 1) return base;
  fs::path out = base.parent_path() /
                 (base.stem().string() + "_" + series_label(meta) +
                  base.extension().string());
  return out;
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  if (args.degree < kMinDegree || args.degree > kMaxDegree) {
    err << "error: degree " << args.degree << " is outside the supported range "
        << kMinDegree << ".." << kMaxDegree << " (degree cap is " << kMaxDegree
        << " for ten decile points)\n";
    return kUsage;
  }
  if (args.cpi.has_value() != args.cpi_base_year.has_value()) {
    err << "error: --cpi and --cpi-base-year must be given together\n";
    return kUsage;
  }
  try {
    std::vector<DecileSeries> series = parse_decile_csv(read_file(args.input));
    if (series.empty()) {
      err << "error: " << args.input.string() << ": no series\n";
      return kFailure;
    }
    if (args.cpi) {
      const CpiSeries cpi = parse_cpi_csv(read_file(*args.cpi), *args.cpi_base_year);
      for (auto& s : series) s = deflate_to_real(s, cpi);
    }

    OutputBatch batch;
    std::string report_text;
    for (const auto& s : series) {
      const EmpiricalCdf cdf = build_cdf(s);
      FitResult fit;
      try {
        fit = fit_polynomial(cdf, FitConfig{args.degree, args.transform});
      } catch (const Error& e) {
        throw Error(series_label(s.meta) + ": " + e.what());
      }
      const FitReport report = make_fit_report(s.meta, fit);
      report_text += serialize_fit_report(report);
      report_text += '\n';
      if (args.plot) {
        batch.add(plot_path_for(*args.plot, s.meta, series.size()), plot_tsv(cdf, fit));
      }

      out << series_label(s.meta) << ":";
      for (std::size_t i = 0; i < report.p_coeffs.size(); ++i) {
        out << " P" << i + 1 << "=" << sci(report.p_coeffs[i]);
      }
      out << " R2=" << std::fixed << std::setprecision(2) << report.r2_percent
          << "%\n";
      out.unsetf(std::ios::floatfield);
    }
    batch.add(args.output, std::move(report_text));
    batch.commit();
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_roundtrip(const RoundtripArgs& args, std::ostream& out, std::ostream& err) {
  if (!(args.tolerance >= 0.0)) {
    err << "error: tolerance must be nonnegative\n";
    return kUsage;
  }
  std::vector<PaperFixtureRow> rows;
  try {
    rows = args.fixtures ? parse_fixture_csv(read_file(*args.fixtures))
                         : parse_fixture_csv(embedded_fixture_csv());
  } catch (const Error& e) {
    err << "error: "
        << (args.fixtures ? args.fixtures->string() : std::string("<embedded>"))
        << ": " << e.what() << '\n';
    return kFailure;
  }

  out << std::left << std::setw(40) << "dataset" << std::setw(6) << "year"
      << std::setw(20) << "max_coeff_rel_err" << std::setw(24) << "refit_R2"
      << "result\n";
  std::size_t passed = 0;
  for (const auto& row : rows) {
    out << std::left << std::setw(40) << row.dataset << std::setw(6) << row.year;
    try {
      const RoundtripReport rep = roundtrip_check(row.poly(), args.tolerance);
      std::ostringstream r2;
      r2 << std::setprecision(17) << rep.refit_r_squared;
      out << std::setw(20) << sci(rep.max_coeff_rel_err, 3) << std::setw(24)
          << r2.str() << (rep.pass ? "pass" : "FAIL") << '\n';
      if (rep.pass) ++passed;
    } catch (const Error& e) {
      out << "FAIL (" << e.what() << ")\n";
    }
  }
  out << passed << "/" << rows.size() << " rows passed at tolerance "
      << sci(args.tolerance, 1) << '\n';
  return passed == rows.size() ? kOk : kFailure;
}

int cmd_sample(const SampleArgs& args, std::ostream& out, std::ostream& err) {
  if (args.n < 1) {
    err << "error: --n must be at least 1\n";
    return kUsage;
  }
  try {
    const Polynomial poly = Polynomial::quadratic(args.p1, args.p2, args.p3);
    const SampleSpec spec{args.n, args.seed, args.p_low, args.p_high};
    const std::vector<double> incomes = sample_incomes(poly, spec);

    std::optional<DecileTables> deciles;
    if (incomes.size() >= static_cast<std::size_t>(kDecileCount)) {
      SeriesMeta meta;
      meta.country = "synthetic";
      deciles = compute_deciles(incomes, meta);
    }
    std::optional<double> g;
    if (std::all_of(incomes.begin(), incomes.end(), [](double x) { return x >= 0.0; })) {
      g = gini(incomes);
    }
    const auto checks = quantile_checks(poly, spec, incomes);

    std::string samples;
    samples.reserve(incomes.size() * 20);
    for (double x : incomes) {
      samples += detail::format_double(x);
      samples += '\n';
    }
    fs::path report_path = args.report.value_or(fs::path(args.output.string() + ".report.json"));

    OutputBatch batch;
    batch.add(args.output, std::move(samples));
    batch.add(report_path,
              serialize_sample_report(poly, spec, deciles, g, checks));
    batch.commit();

    out << "wrote " << incomes.size() << " incomes to " << args.output.string()
        << "\ngenerator: " << kGeneratorId << "\n";
    if (g) out << "gini: " << std::setprecision(6) << *g << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_figures(const FiguresArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::error_code ec;
    fs::create_directories(args.output_dir, ec);
    if (ec) throw Error("cannot create '" + args.output_dir.string() + "': " + ec.message());

    OutputBatch batch;
    for (const auto& fig : figure_specs()) {
      const Polynomial poly = Polynomial::quadratic(fig.p1, fig.p2, fig.p3);
      const DecileSeries series = reconstruct_series_from_fit(poly, fig.meta);
      const EmpiricalCdf cdf = build_cdf(series);
      const FitResult fit = fit_polynomial(cdf, FitConfig{});

      std::ostringstream head;
      head << std::setprecision(17);
      head << "# " << series_label(fig.meta) << " (" << fig.meta.currency
           << ", " << to_string(fig.meta.income_kind) << ")\n";
      head << "# printed: P1=" << fig.p1 << " P2=" << fig.p2 << " P3=" << fig.p3
           << " R2%=" << fig.r2_percent << '\n';
      const auto desc = to_descending(fit.poly);
      head << "# refit:   P1=" << desc[0] << " P2=" << desc[1] << " P3=" << desc[2]
           << '\n';

      const fs::path path = args.output_dir / (std::string(fig.file_stem) + ".tsv");
      batch.add(path, head.str() + plot_tsv(cdf, fit));
      out << "wrote " << path.string() << '\n';
    }
    batch.commit();
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polynomial complementary-CDF fitting for decile income data"};
  app.require_subcommand(1);

  FitArgs fit;
  std::string fit_transform = "linear";
  std::string fit_plot;
  std::string fit_cpi;
  int fit_base_year = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit every series of a decile CSV file");
  fit_cmd->add_option("--input,-i", fit.input, "Decile CSV file")->required();
  fit_cmd->add_option("--degree,-d", fit.degree, "Polynomial degree (1-5)")
      ->capture_default_str();
  fit_cmd->add_option("--transform,-t", fit_transform, "linear or loglog")
      ->check(CLI::IsMember({"linear", "loglog"}))
      ->capture_default_str();
  fit_cmd->add_option("--output,-o", fit.output, "Report file (JSON lines)")->required();
  fit_cmd->add_option("--plot", fit_plot, "Plot TSV path (one file per series)");
  auto* cpi_opt = fit_cmd->add_option("--cpi", fit_cpi, "CPI CSV (year,index) for deflation");
  fit_cmd->add_option("--cpi-base-year", fit_base_year, "Base year for --cpi")
      ->needs(cpi_opt);

  RoundtripArgs rt;
  std::string rt_fixtures;
  auto* rt_cmd = app.add_subcommand(
      "roundtrip", "Verify published coefficient tables by invert-and-refit");
  rt_cmd->add_option("--fixtures,-f", rt_fixtures,
                     "Fixture CSV (defaults to the built-in table)");
  rt_cmd->add_option("--tolerance", rt.tolerance, "Relative coefficient tolerance")
      ->capture_default_str();

  SampleArgs smp;
  std::string smp_report;
  auto* smp_cmd = app.add_subcommand(
      "sample", "Draw a synthetic population from P1 x^2 + P2 x + P3");
  smp_cmd->add_option("--p1", smp.p1, "x^2 coefficient")->required();
  smp_cmd->add_option("--p2", smp.p2, "x coefficient")->required();
  smp_cmd->add_option("--p3", smp.p3, "constant term")->required();
  smp_cmd->add_option("--n", smp.n, "Number of incomes")->required();
  smp_cmd->add_option("--seed", smp.seed, "Generator seed")->capture_default_str();
  smp_cmd->add_option("--p-low", smp.p_low, "Lowest percent level")->capture_default_str();
  smp_cmd->add_option("--p-high", smp.p_high, "Highest percent level")->capture_default_str();
  smp_cmd->add_option("--output,-o", smp.output, "Incomes file, one per line")->required();
  smp_cmd->add_option("--report", smp_report, "Report path (default <output>.report.json)");

  FiguresArgs figs;
  auto* fig_cmd = app.add_subcommand("figures", "Emit the five published figure datasets");
  fig_cmd->add_option("--output-dir,-o", figs.output_dir, "Directory for TSV files")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (fit_cmd->parsed()) {
    fit.transform = parse_transform(fit_transform);
    if (!fit_plot.empty()) fit.plot = fit_plot;
    if (!fit_cpi.empty()) fit.cpi = fit_cpi;
    if (fit_cmd->count("--cpi-base-year")) fit.cpi_base_year = fit_base_year;
    return cmd_fit(fit, out, err);
  }
  if (rt_cmd->parsed()) {
    if (!rt_fixtures.empty()) rt.fixtures = rt_fixtures;
    return cmd_roundtrip(rt, out, err);
  }
  if (smp_cmd->parsed()) {
    if (!smp_report.empty()) smp.report = smp_report;
    return cmd_sample(smp, out, err);
  }
  return cmd_figures(figs, out, err);
}

}  // namespace incdist::cli
