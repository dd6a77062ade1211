#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oocl/error.hpp"
#include "oocl/solver.hpp"

namespace oocl {

using json = nlohmann::ordered_json;

PredictKind parse_predict_kind(std::string_view s) {
  if (s == "link") return PredictKind::link;
  if (s == "response") return PredictKind::response;
  if (s == "class") return PredictKind::cls;
  if (s == "nvars") return PredictKind::nvars;
  if (s == "vars") return PredictKind::vars;
  if (s == "coefficients") return PredictKind::coefficients;
  throw RangeError("unknown prediction type '" + std::string(s) + "'");
}

std::size_t lambda_index(const PathFit& fit, double lam, bool exact) {
  if (fit.lambda.empty()) throw RangeError("fit has no lambda values");
  const double hi = fit.lambda.front();
  const double lo = fit.lambda.back();
  constexpr double kRel = 1e-9;
  if (!(lam <= hi * (1 + kRel) && lam >= lo * (1 - kRel))) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda %.6g outside the fitted range [%.6g, %.6g]", lam, lo,
                  hi);
    throw RangeError(buf);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < fit.lambda.size(); ++k)
    if (std::abs(fit.lambda[k] - lam) < std::abs(fit.lambda[best] - lam)) best = k;
  if (exact && std::abs(fit.lambda[best] - lam) > kRel * std::abs(lam)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "lambda %.6g is not a grid point", lam);
    throw RangeError(buf);
  }
  return best;
}

std::vector<double> predict(const PathFit& fit, const MatrixView& v, std::size_t k,
                            PredictKind kind) {
  if (k >= fit.n_lambda()) throw RangeError("lambda index out of range");
  if (v.n_cols() != fit.p)
    throw RangeError("matrix has " + std::to_string(v.n_cols()) + " columns, fit expects " +
                     std::to_string(fit.p));
  if (kind != PredictKind::link && kind != PredictKind::response && kind != PredictKind::cls)
    throw RangeError("predict returns per-row values only for link, response or class");
  if (kind == PredictKind::cls && fit.family != Family::binomial)
    throw RangeError("class prediction needs a binomial fit");

  const std::size_t n = v.n_rows();
  std::vector<double> out(n, fit.intercept[k]);
  const auto idx = fit.coefs.indices(k);
  const auto val = fit.coefs.values(k);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double b = val[t];
    v.with_column(idx[t], [&](const double* x, std::span<const std::size_t> rows) {
      for (std::size_t i = 0; i < n; ++i) out[i] += b * (rows.empty() ? x[i] : x[rows[i]]);
    });
  }
  if (fit.family == Family::binomial && kind != PredictKind::link) {
    for (double& e : out) {
      const double p = 1.0 / (1.0 + std::exp(-e));
      e = kind == PredictKind::cls ? (p >= 0.5 ? 1.0 : 0.0) : p;
    }
  }
  return out;
}

std::size_t nvars(const PathFit& fit, std::size_t k) {
  if (k >= fit.n_lambda()) throw RangeError("lambda index out of range");
  return fit.coefs.nnz(k);
}

std::vector<std::size_t> vars(const PathFit& fit, std::size_t k) {
  if (k >= fit.n_lambda()) throw RangeError("lambda index out of range");
  const auto idx = fit.coefs.indices(k);
  return {idx.begin(), idx.end()};
}

Coefficients coefficients(const PathFit& fit, std::size_t k) {
  if (k >= fit.n_lambda()) throw RangeError("lambda index out of range");
  Coefficients c;
  c.intercept = fit.intercept[k];
  const auto idx = fit.coefs.indices(k);
  const auto val = fit.coefs.values(k);
  for (std::size_t t = 0; t < idx.size(); ++t) c.nonzero.emplace_back(idx[t], val[t]);
  return c;
}

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json fit_metadata(const PathFit& fit) {
  json j;
  j["family"] = std::string(to_string(fit.family));
  j["alpha"] = fit.alpha;
  j["screen"] = std::string(to_string(fit.policy));
  j["n"] = fit.n;
  j["p"] = fit.p;
  j["lambda_max"] = fit.lambda_max;
  j["star"] = fit.star;
  j["tol"] = fit.tol;
  j["kkt_tol"] = fit.kkt_tol;
  j["seconds"] = fit.seconds;
  j["lambda"] = fit.lambda;
  j["intercept"] = fit.intercept;
  j["n_iter"] = fit.n_iter;
  j["n_kkt_rounds"] = fit.n_kkt_rounds;
  j["cols_scanned"] = fit.cols_scanned;
  j["cols_refreshed"] = fit.cols_refreshed;
  j["safe_size"] = fit.safe_size;
  j["strong_size"] = fit.strong_size;
  j["mask_digest"] = fit.mask_digest;
  json diag = json::array();
  for (const auto& d : fit.diagnostics)
    diag.push_back({{"p", d.p},
                    {"bedpp_discarded", d.bedpp_discarded},
                    {"ssr_discarded", d.ssr_discarded},
                    {"hybrid_discarded", d.hybrid_discarded}});
  j["diagnostics"] = diag;
  j["center"] = fit.center;
  j["scale"] = fit.scale;
  j["col_names"] = fit.col_names;
  return j;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T parse_num(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line, 0, "bad number '" + std::string(s) + "' in " + path.string());
  return v;
}

}  // namespace

std::string coef_csv(const PathFit& fit) {
  std::string out = "lambda,col_index,col_name,coef\n";
  for (std::size_t k = 0; k < fit.n_lambda(); ++k) {
    const std::string lam = g17(fit.lambda[k]);
    out += lam + ",-1,(Intercept)," + g17(fit.intercept[k]) + "\n";
    const auto idx = fit.coefs.indices(k);
    const auto val = fit.coefs.values(k);
    for (std::size_t t = 0; t < idx.size(); ++t)
      out += lam + "," + std::to_string(idx[t]) + "," + fit.col_name(idx[t]) + "," +
             g17(val[t]) + "\n";
  }
  return out;
}

void write_path_fit(const PathFit& fit, const std::filesystem::path& prefix) {
  const auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw IoError("write failed for " + path.string());
  };
  write(prefix.string() + ".coef.csv", coef_csv(fit));
  write(prefix.string() + ".fit.json", fit_metadata(fit).dump(1) + "\n");
}

PathFit read_path_fit(const std::filesystem::path& prefix) {
  const std::filesystem::path meta_path = prefix.string() + ".fit.json";
  const std::filesystem::path coef_path = prefix.string() + ".coef.csv";
  PathFit fit;
  try {
    const json j = json::parse(slurp(meta_path));
    fit.family = parse_family(j.at("family").get<std::string>());
    fit.alpha = j.at("alpha").get<double>();
    fit.policy = parse_policy(j.at("screen").get<std::string>());
    fit.n = j.at("n").get<std::size_t>();
    fit.p = j.at("p").get<std::size_t>();
    fit.lambda_max = j.at("lambda_max").get<double>();
    fit.star = j.at("star").get<std::size_t>();
    fit.tol = j.at("tol").get<double>();
    fit.kkt_tol = j.at("kkt_tol").get<double>();
    fit.seconds = j.at("seconds").get<double>();
    fit.lambda = j.at("lambda").get<std::vector<double>>();
    fit.intercept = j.at("intercept").get<std::vector<double>>();
    fit.n_iter = j.at("n_iter").get<std::vector<std::size_t>>();
    fit.n_kkt_rounds = j.at("n_kkt_rounds").get<std::vector<std::size_t>>();
    fit.cols_scanned = j.at("cols_scanned").get<std::vector<std::size_t>>();
    fit.cols_refreshed = j.at("cols_refreshed").get<std::vector<std::size_t>>();
    fit.safe_size = j.at("safe_size").get<std::vector<std::size_t>>();
    fit.strong_size = j.at("strong_size").get<std::vector<std::size_t>>();
    fit.mask_digest = j.at("mask_digest").get<std::vector<std::uint64_t>>();
    for (const auto& d : j.at("diagnostics"))
      fit.diagnostics.push_back({d.at("p").get<std::size_t>(),
                                 d.at("bedpp_discarded").get<std::size_t>(),
                                 d.at("ssr_discarded").get<std::size_t>(),
                                 d.at("hybrid_discarded").get<std::size_t>()});
    fit.center = j.at("center").get<std::vector<double>>();
    fit.scale = j.at("scale").get<std::vector<double>>();
    fit.col_names = j.at("col_names").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError("corrupt fit metadata " + meta_path.string() + ": " + e.what());
  }
  if (fit.intercept.size() != fit.lambda.size())
    throw FormatError("fit metadata: intercept and lambda lengths differ");

  // Coefficients: one block per lambda, each opened by its intercept row.
  const std::string text = slurp(coef_path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, double>> block;
  std::size_t blocks = 0;
  auto flush = [&] {
    if (blocks > 0) fit.coefs.push_back(block);
    block.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "lambda,col_index,col_name,coef")
        throw FormatError("unexpected header in " + coef_path.string());
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.rfind(',');
    if (c1 == std::string::npos || c2 == std::string::npos || c3 <= c2)
      throw FormatError("malformed row " + std::to_string(line_no) + " in " +
                        coef_path.string());
    const std::string_view sv(line);
    const auto col = sv.substr(c1 + 1, c2 - c1 - 1);
    const double coef = parse_num<double>(sv.substr(c3 + 1), coef_path, line_no);
    if (col == "-1") {
      flush();
      ++blocks;
      continue;
    }
    if (blocks == 0) throw FormatError("coefficient row before any intercept row");
    block.emplace_back(parse_num<std::size_t>(col, coef_path, line_no), coef);
  }
  flush();
  if (fit.coefs.n_lambda() != fit.lambda.size())
    throw FormatError("coefficient file has " + std::to_string(fit.coefs.n_lambda()) +
                      " lambda blocks, metadata has " + std::to_string(fit.lambda.size()));
  return fit;
}

}  // namespace oocl
