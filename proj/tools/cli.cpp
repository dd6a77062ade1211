#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>

#include "oocl/bigmat.hpp"
#include "oocl/cv.hpp"
#include "oocl/error.hpp"
#include "oocl/oracle.hpp"
#include "oocl/screen.hpp"
#include "oocl/solver.hpp"

namespace oocl::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> read_response(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open response file " + path.string());
  std::vector<double> y;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || !std::isfinite(v))
      throw ParseError(row, 1, "'" + std::string(b, e) + "' in " + path.string());
    y.push_back(v);
  }
  if (y.empty()) throw FormatError("response file " + path.string() + " is empty");
  return y;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Flags shared by fit, cv, validate and bench.
struct FitFlags {
  std::string family = "gaussian";
  double alpha = 1.0;
  std::size_t n_lambda = 100;
  double lambda_min_ratio = 0.1;
  std::string spacing = "linear";
  std::string screen;
  double tol = 1e-7;
  std::size_t max_iter = 10000;
  int ncores = 1;

  void add_to(CLI::App* app, bool with_screen = true) {
    app->add_option("--family", family, "gaussian or binomial")
        ->check(CLI::IsMember({"gaussian", "binomial"}));
    app->add_option("--alpha", alpha, "elastic-net mix in (0, 1]");
    app->add_option("--nlambda", n_lambda, "number of lambda values");
    app->add_option("--lambda-min-ratio", lambda_min_ratio, "smallest lambda / lambda_max");
    app->add_option("--lambda-spacing", spacing, "linear or log")
        ->check(CLI::IsMember({"linear", "log"}));
    if (with_screen)
      app->add_option("--screen", screen, "none, ssr, bedpp or hybrid")
          ->check(CLI::IsMember({"none", "ssr", "bedpp", "hybrid"}));
    app->add_option("--tol", tol, "coordinate descent tolerance");
    app->add_option("--max-iter", max_iter, "sweeps allowed per lambda");
    app->add_option("--ncores", ncores, "worker threads")->check(CLI::PositiveNumber);
  }

  FitConfig config() const {
    FitConfig cfg;
    cfg.family = parse_family(family);
    cfg.alpha = alpha;
    cfg.n_lambda = n_lambda;
    cfg.lambda_min_ratio = lambda_min_ratio;
    cfg.spacing = parse_spacing(spacing);
    if (!screen.empty()) cfg.screen = parse_policy(screen);
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.workers = ncores;
    cfg.validate();
    return cfg;
  }
};

struct Loaded {
  FileMatrix x;
  std::vector<double> y;
};

Loaded load(const std::string& desc, const std::string& response) {
  Loaded d{FileMatrix::attach(desc), read_response(response)};
  if (d.y.size() != d.x.n_rows())
    throw RangeError("response has " + std::to_string(d.y.size()) + " values but " + desc +
                     " has " + std::to_string(d.x.n_rows()) + " rows");
  return d;
}

void print_coefs(std::ostream& out, const PathFit& fit, std::size_t k) {
  const Coefficients c = coefficients(fit, k);
  out << "col_index,col_name,coef\n";
  out << "-1,(Intercept)," << g17(c.intercept) << "\n";
  for (const auto& [j, b] : c.nonzero) out << j << "," << fit.col_name(j) << "," << g17(b) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Out-of-core lasso and elastic-net paths on file-backed matrices"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // setup
  auto* setup = app.add_subcommand("setup", "Convert a numeric CSV into a file-backed matrix");
  std::string csv_path, out_prefix;
  std::size_t block_mb = 64;
  setup->add_option("csv", csv_path, "numeric CSV (optional header row)")->required();
  setup->add_option("--out", out_prefix, "output prefix for .bin/.desc")->required();
  setup->add_option("--block-mb", block_mb, "transpose buffer size in MiB")
      ->check(CLI::PositiveNumber);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a regularization path");
  std::string desc, response;
  FitFlags fit_flags;
  bool diagnostics = false;
  fit_cmd->add_option("desc", desc, "matrix descriptor")->required();
  fit_cmd->add_option("y", response, "response file, one value per line")->required();
  fit_flags.add_to(fit_cmd);
  fit_cmd->add_flag("--diagnostics", diagnostics, "also write <out>.rejection.csv");
  fit_cmd->add_option("--out", out_prefix, "output prefix")->required();

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate a regularization path");
  FitFlags cv_flags;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  bool parallel_folds = false;
  cv_cmd->add_option("desc", desc, "matrix descriptor")->required();
  cv_cmd->add_option("y", response, "response file, one value per line")->required();
  cv_flags.add_to(cv_cmd);
  cv_cmd->add_option("--folds", folds, "number of folds");
  cv_cmd->add_option("--seed", seed, "fold assignment seed");
  cv_cmd->add_flag("--parallel-folds", parallel_folds, "run folds concurrently on --ncores");
  cv_cmd->add_option("--out", out_prefix, "output prefix")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict from a saved fit or cv result");
  std::string fit_prefix, x_desc, type = "link";
  std::optional<double> lambda;
  bool exact = false;
  predict_cmd->add_option("fit", fit_prefix, "prefix used with fit --out or cv --out")
      ->required();
  predict_cmd->add_option("--x", x_desc, "matrix descriptor for link/response/class");
  predict_cmd->add_option("--lambda", lambda, "lambda (default: lambda_min of a cv result)");
  predict_cmd->add_flag("--exact", exact, "require lambda to be a grid point");
  predict_cmd
      ->add_option("--type", type, "link, response, class, nvars, vars or coefficients")
      ->check(CLI::IsMember({"link", "response", "class", "nvars", "vars", "coefficients"}));
  predict_cmd->add_option("--out", out_prefix, "write to this file instead of stdout");

  // coef
  auto* coef_cmd = app.add_subcommand("coef", "Print the intercept and nonzero coefficients");
  coef_cmd->add_option("fit", fit_prefix, "prefix used with fit --out or cv --out")->required();
  coef_cmd->add_option("--lambda", lambda, "lambda (default: lambda_min of a cv result)");
  coef_cmd->add_flag("--exact", exact, "require lambda to be a grid point");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Compare the solver against the reference");
  FitFlags val_flags;
  std::size_t n = 50, p = 200, seeds = 20;
  std::optional<double> threshold;
  validate_cmd->add_option("--n", n, "rows")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--p", p, "columns")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--seeds", seeds, "number of instances")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--seed", seed, "first seed");
  validate_cmd->add_option("--threshold", threshold,
                           "max |RD| allowed (default 1e-6 gaussian, 1e-5 binomial)");
  val_flags.add_to(validate_cmd);
  validate_cmd->add_option("--out", out_prefix, "write <out>.rd.csv");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Screening benchmarks on synthetic data");
  FitFlags bench_flags;
  std::string bench_case = "appendix2";
  bool rejection = false;
  std::size_t repeats = 5;
  std::string data_prefix;
  std::size_t bench_n = 1000, bench_p = 20000;
  bench_cmd->add_option("--case", bench_case, "appendix1 (lambda down to 0.1) or appendix2 (0.5)")
      ->check(CLI::IsMember({"appendix1", "appendix2"}));
  bench_cmd->add_flag("--rejection", rejection,
                      "emit per-lambda rejection percentages instead of timings");
  bench_cmd->add_option("--n", bench_n, "rows")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p", bench_p, "columns")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeats", repeats, "timed runs per policy")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed, "data seed");
  bench_cmd->add_option("--data", data_prefix, "write the synthetic matrix here and fit from it");
  bench_flags.add_to(bench_cmd, false);
  bench_cmd->add_option("--out", out_prefix, "write CSV here instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*setup) {
      SetupOptions opts;
      opts.block_bytes = block_mb << 20;
      if (!fs::exists(csv_path)) throw IoError("no such file: " + csv_path);
      const Descriptor d = setup_matrix(csv_path, out_prefix, opts);
      out << out_prefix << ".desc\n"
          << "n_rows=" << d.n_rows << " n_cols=" << d.n_cols << "\n";
      return kOk;
    }

    if (*fit_cmd) {
      const Loaded d = load(desc, response);
      FitConfig cfg = fit_flags.config();
      cfg.diagnostics = diagnostics;
      const PathFit f = fit(MatrixView(d.x), d.y, cfg);
      write_path_fit(f, out_prefix);
      out << "fitted " << f.n_lambda() << " lambda values (" << to_string(f.family) << ", "
          << to_string(f.policy) << " screening) in " << f.seconds << " s\n"
          << out_prefix << ".coef.csv\n"
          << out_prefix << ".fit.json\n";
      if (diagnostics) {
        const auto rows = rejection_stats(f);
        write_text(out_prefix + ".rejection.csv", rejection_csv(rows));
        out << out_prefix << ".rejection.csv\n";
      }
      return kOk;
    }

    if (*cv_cmd) {
      const Loaded d = load(desc, response);
      const FitConfig cfg = cv_flags.config();
      CvConfig cvc;
      cvc.folds = folds;
      cvc.seed = seed;
      cvc.parallel_folds = parallel_folds;
      const CvFit cv = cv_fit(d.x, d.y, cfg, cvc);
      write_cv_fit(cv, out_prefix);
      out << cv_summary(cv);
      return kOk;
    }

    if (*predict_cmd || *coef_cmd) {
      const bool is_cv = fs::exists(fit_prefix + ".cv.json");
      PathFit f;
      double lam = 0.0;
      if (is_cv) {
        CvFit cv = read_cv_fit(fit_prefix);
        lam = lambda.value_or(cv.lambda_min);
        f = std::move(cv.full_fit);
      } else {
        f = read_path_fit(fit_prefix);
        if (!lambda) throw RangeError("--lambda is required for a plain fit");
        lam = *lambda;
      }
      const std::size_t k = lambda_index(f, lam, exact);

      if (*coef_cmd) {
        print_coefs(out, f, k);
        return kOk;
      }
      std::ostringstream text;
      const PredictKind kind = parse_predict_kind(type);
      switch (kind) {
        case PredictKind::nvars:
          text << nvars(f, k) << "\n";
          break;
        case PredictKind::vars:
          text << "col_index,col_name\n";
          for (std::size_t j : vars(f, k)) text << j << "," << f.col_name(j) << "\n";
          break;
        case PredictKind::coefficients:
          print_coefs(text, f, k);
          break;
        default: {
          if (x_desc.empty()) throw RangeError("--x is required for type " + type);
          const FileMatrix x = FileMatrix::attach(x_desc);
          for (double v : predict(f, MatrixView(x), k, kind)) {
            if (kind == PredictKind::cls)
              text << static_cast<int>(v) << "\n";
            else
              text << g17(v) << "\n";
          }
        }
      }
      if (out_prefix.empty())
        out << text.str();
      else
        write_text(out_prefix, text.str());
      return kOk;
    }

    if (*validate_cmd) {
      FitConfig cfg = val_flags.config();
      const double limit =
          threshold.value_or(cfg.family == Family::gaussian ? 1e-6 : 1e-5);
      std::vector<double> all;
      std::string per_seed = "seed,max_abs_rd\n";
      std::string rd_rows = "seed,lambda_index,lambda,rd\n";
      for (std::size_t s = 0; s < seeds; ++s) {
        SynthSpec spec;
        spec.n = n;
        spec.p = p;
        spec.n_true = std::min<std::size_t>(20, p);
        spec.family = cfg.family;
        spec.seed = seed + s;
        const SynthData data = gen_synth_memory(spec);
        const MatrixView v(data.x);
        const PathFit f = fit(v, data.y, cfg);
        FitConfig ref_cfg = cfg;
        ref_cfg.lambda = f.lambda;
        const PathFit r = reference_fit(v, data.y, ref_cfg);
        const RdReport rep = rd(f, r, v, data.y);
        all.insert(all.end(), rep.rd.begin(), rep.rd.end());
        char buf[96];
        std::snprintf(buf, sizeof buf, "%llu,%.3e\n", static_cast<unsigned long long>(spec.seed),
                      rep.max_abs);
        per_seed += buf;
        for (std::size_t k = 0; k < rep.rd.size(); ++k) {
          std::snprintf(buf, sizeof buf, "%llu,%zu,%.10g,%.6e\n",
                        static_cast<unsigned long long>(spec.seed), k, f.lambda[k], rep.rd[k]);
          rd_rows += buf;
        }
      }
      const Summary6 sum = summarize(all);
      double max_abs = 0.0;
      for (double x : all)
        if (!std::isnan(x)) max_abs = std::max(max_abs, std::abs(x));
      out << "RD(lambda) over " << seeds << " " << to_string(cfg.family)
          << " instances (n=" << n << ", p=" << p << ", " << to_string(cfg.effective_policy())
          << " vs reference)\n"
          << summary6_text(sum) << per_seed;
      char buf[96];
      std::snprintf(buf, sizeof buf, "max |RD| = %.3e (threshold %.1e): %s\n", max_abs, limit,
                    max_abs <= limit ? "PASS" : "FAIL");
      out << buf;
      if (!out_prefix.empty()) write_text(out_prefix + ".rd.csv", rd_rows);
      return max_abs <= limit ? kOk : kValidationFailed;
    }

    if (*bench_cmd) {
      FitConfig cfg = bench_flags.config();
      if (cfg.family != Family::gaussian)
        throw RangeError("bench runs the gaussian lasso (screening comparison)");
      SynthSpec spec;
      spec.n = bench_n;
      spec.p = bench_p;
      spec.n_true = std::min<std::size_t>(20, bench_p);
      spec.seed = seed;
      const SynthData data =
          data_prefix.empty() ? gen_synth_memory(spec) : gen_synth(spec, data_prefix);
      const MatrixView v(data.x);
      std::string text;
      if (rejection) {
        cfg.screen = ScreenPolicy::hybrid;
        cfg.diagnostics = true;
        text = rejection_csv(rejection_stats(fit(v, data.y, cfg)));
      } else {
        cfg.lambda_min_ratio = bench_case == "appendix1" ? 0.1 : 0.5;
        const ScreenPolicy policies[] = {ScreenPolicy::ssr, ScreenPolicy::hybrid};
        const auto rows = screen_bench(v, data.y, cfg, policies, repeats);
        text = bench_csv(rows);
        if (!out_prefix.empty()) {
          FitConfig grid_cfg = cfg;
          const PathFit grid = fit(v, data.y, grid_cfg);
          write_text(out_prefix + ".scans.csv", bench_scan_csv(grid, rows));
        }
      }
      if (out_prefix.empty())
        out << text;
      else
        write_text(out_prefix + ".csv", text), out << out_prefix << ".csv\n";
      return kOk;
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace oocl::cli
