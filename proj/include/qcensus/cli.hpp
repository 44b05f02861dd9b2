#pragma once

#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymptotics.hpp"
#include "cache.hpp"
#include "delta.hpp"

namespace qcensus::cli {

constexpr const char* kConfigSchema = "qcensus.config/1";

struct RunConfig {
  std::string subcommand;
  std::string form_path;
  std::string x_grid;  // "a:b:step", "geom:a:b:count" or "x1,x2,..."
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  i64 prime_cutoff = 1000;
  int kmax = 12;
  std::string cache_dir;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  // subcommand parameters
  std::string strategy = "auto";
  std::string arch_method = "auto";
  i64 p = 0;
  std::string xi;
  double s = 0;
  bool swapped = false;
  bool residue = false;
  double X = 100;
  int samples = 100;
  std::uintmax_t max_bytes = 0;
  i64 xi_radius = 0;
  bool json_diagnostics = false;

  bool operator==(const RunConfig&) const = default;
};

inline nlohmann::json to_json(const RunConfig& c)
{
  return {{"schema", kConfigSchema},  {"subcommand", c.subcommand}, {"form_path", c.form_path},
          {"X_grid", c.x_grid},       {"rel_tol", c.rel_tol},       {"abs_tol", c.abs_tol},
          {"prime_cutoff", c.prime_cutoff}, {"kmax", c.kmax},       {"cache_dir", c.cache_dir},
          {"workers", c.workers},     {"seed", c.seed},             {"out_dir", c.out_dir},
          {"strategy", c.strategy},   {"arch_method", c.arch_method}, {"p", c.p},
          {"xi", c.xi},               {"s", c.s},                   {"swapped", c.swapped},
          {"residue", c.residue},     {"X", c.X},                   {"samples", c.samples},
          {"max_bytes", c.max_bytes}, {"xi_radius", c.xi_radius},   {"json", c.json_diagnostics}};
}

inline RunConfig config_from_json(const nlohmann::json& j)
{
  if (j.value("schema", std::string(kConfigSchema)) != kConfigSchema) throw ArgumentError("config: unknown schema");
  RunConfig c;
  try {
    c.subcommand = j.value("subcommand", c.subcommand);
    c.form_path = j.value("form_path", c.form_path);
    c.x_grid = j.value("X_grid", c.x_grid);
    c.rel_tol = j.value("rel_tol", c.rel_tol);
    c.abs_tol = j.value("abs_tol", c.abs_tol);
    c.prime_cutoff = j.value("prime_cutoff", c.prime_cutoff);
    c.kmax = j.value("kmax", c.kmax);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    c.workers = j.value("workers", c.workers);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.strategy = j.value("strategy", c.strategy);
    c.arch_method = j.value("arch_method", c.arch_method);
    c.p = j.value("p", c.p);
    c.xi = j.value("xi", c.xi);
    c.s = j.value("s", c.s);
    c.swapped = j.value("swapped", c.swapped);
    c.residue = j.value("residue", c.residue);
    c.X = j.value("X", c.X);
    c.samples = j.value("samples", c.samples);
    c.max_bytes = j.value("max_bytes", c.max_bytes);
    c.xi_radius = j.value("xi_radius", c.xi_radius);
    c.json_diagnostics = j.value("json", c.json_diagnostics);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

inline std::vector<double> parse_grid(const std::string& spec)
{
  auto fail = [&]() -> std::vector<double> { throw ArgumentError("invalid X grid '" + spec + "'"); };
  std::vector<std::string> parts;
  std::vector<double> out;
  try {
    if (spec.find(',') != std::string::npos || spec.find(':') == std::string::npos) {
      std::stringstream ss(spec);
      for (std::string t; std::getline(ss, t, ',');) out.push_back(std::stod(t));
    } else {
      std::stringstream ss(spec);
      for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
      if (parts.size() == 4 && parts[0] == "geom") {
        double a = std::stod(parts[1]), b = std::stod(parts[2]);
        int k = std::stoi(parts[3]);
        if (k < 1 || a <= 0 || b < a) return fail();
        for (int i = 0; i < k; ++i) out.push_back(k == 1 ? a : a * std::pow(b / a, static_cast<double>(i) / (k - 1)));
      } else if (parts.size() == 3) {
        double a = std::stod(parts[0]), b = std::stod(parts[1]), st = std::stod(parts[2]);
        if (st <= 0 || b < a) return fail();
        for (long i = 0; a + i * st <= b * (1 + 1e-12); ++i) out.push_back(a + i * st);
      } else {
        return fail();
      }
    }
  } catch (const std::logic_error&) {
    return fail();
  }
  if (out.empty()) return fail();
  for (double x : out)
    if (!(x > 0)) return fail();
  return out;
}

inline IntVec parse_vector(const std::string& s, int n)
{
  if (s.empty()) return IntVec(n, 0);
  IntVec v;
  try {
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) v.push_back(std::stoll(t));
  } catch (const std::logic_error&) {
    throw ArgumentError("invalid integer vector '" + s + "'");
  }
  if (static_cast<int>(v.size()) != n) throw ArgumentError("dimension mismatch: vector length differs from n");
  return v;
}

inline void validate(const RunConfig& c)
{
  if (!(c.rel_tol > 0 && c.abs_tol > 0)) throw ArgumentError("config: tolerances must be positive");
  if (c.prime_cutoff < 2) throw ArgumentError("config: prime_cutoff must be at least 2");
  if (c.kmax < 1) throw ArgumentError("config: kmax must be positive");
  if (c.workers < 1) throw ArgumentError("config: workers must be positive");
  if (c.samples < 1) throw ArgumentError("config: samples must be positive");
  if (!(c.X > 0)) throw ArgumentError("config: X must be positive");
  if (!c.x_grid.empty()) parse_grid(c.x_grid);
}

struct Loaded {
  QuadForm form;
  ArchSpec spec;
};

inline Loaded load_form(const RunConfig& c)
{
  if (c.form_path.empty()) throw ArgumentError("missing --form");
  auto text = read_file(c.form_path);
  if (!text) throw ArgumentError("cannot read form file " + c.form_path);
  auto j = nlohmann::json::parse(*text, nullptr, false);
  if (j.is_discarded()) throw ArgumentError("form file is not valid JSON: " + c.form_path);
  Loaded l{form_from_json(j), {}};
  l.spec = ArchSpec::identity(l.form.n());
  if (j.contains("A")) {
    auto A = j["A"].get<std::vector<std::vector<double>>>();
    if (static_cast<int>(A.size()) != l.form.n()) throw ArgumentError("ArchSpec: A must be n x n");
    for (int i = 0; i < l.form.n(); ++i) {
      if (static_cast<int>(A[i].size()) != l.form.n()) throw ArgumentError("ArchSpec: A must be n x n");
      for (int k = 0; k < l.form.n(); ++k) l.spec.A(i, k) = A[i][k];
    }
  }
  l.spec.rel_tol = c.rel_tol;
  l.spec.abs_tol = c.abs_tol;
  l.spec.validate(l.form.n());
  return l;
}

inline Cache open_cache(const RunConfig& c)
{
  const char* env = std::getenv("QCENSUS_CACHE_DIR");
  if (env && *env) return Cache(env);
  return Cache(c.cache_dir);
}

inline std::string spec_key(const ArchSpec& s)
{
  std::string k;
  for (int i = 0; i < s.A.rows(); ++i)
    for (int j = 0; j < s.A.cols(); ++j) k += fmt17(s.A(i, j)) + ",";
  return k;
}

inline CountMethod parse_method(const std::string& s)
{
  if (s == "auto") return CountMethod::automatic;
  if (s == "enumerate") return CountMethod::enumerate;
  if (s == "block_convolution") return CountMethod::block_convolution;
  throw ArgumentError("unknown counting strategy '" + s + "'");
}

// Smoothed counts through the result cache.
inline Counter cached_counter(const QuadForm& f, const ArchSpec& spec, const Cache& cache, CountMethod m)
{
  return [&f, &spec, &cache, m](double X) {
    const std::string key = "count|" + f.canonical() + "|" + spec_key(spec) + "|" + fmt17(X) + "|" + method_name(m);
    if (auto hit = cache.get("counts", key)) {
      SmoothedCount sc;
      sc.X = X;
      sc.value = (*hit)["value"].get<double>();
      sc.truncation_error = (*hit)["truncation_error"].get<double>();
      sc.radius = (*hit)["radius"].get<i64>();
      sc.method = (*hit)["method"].get<std::string>() == "enumerate" ? CountMethod::enumerate : CountMethod::block_convolution;
      return sc;
    }
    auto sc = smoothed_count(f, spec, X, m);
    cache.put("counts", key,
              {{"value", sc.value}, {"truncation_error", sc.truncation_error}, {"radius", sc.radius}, {"method", method_name(sc.method)}});
    return sc;
  };
}

inline nlohmann::json arch_json(const ArchValue& v)
{
  return {{"re", v.value.real()}, {"im", v.value.imag()}, {"error", v.est_error}, {"method", method_name(v.method)},
          {"fit_degree", v.fit_degree}, {"fit_residual", v.fit_residual}};
}

inline std::optional<ArchMethod> parse_arch_method(const std::string& s)
{
  if (s == "auto") return std::nullopt;
  if (s == "direct") return ArchMethod::direct_strip;
  if (s == "mellin") return ArchMethod::mellin;
  if (s == "extrapolate") return ArchMethod::extrapolated;
  throw ArgumentError("unknown arch method '" + s + "'");
}

inline PredictionReport run_predict(const RunConfig& c, const Loaded& l, const Cache& cache)
{
  PredictOptions po;
  po.kmax = c.kmax;
  po.secondary.workers = c.workers;
  po.secondary.kmax = c.kmax;
  po.secondary.radius = c.xi_radius;
  auto counter = cached_counter(l.form, l.spec, cache, parse_method(c.strategy));
  return verify(l.form, l.spec, parse_grid(c.x_grid), po, counter);
}

inline void write_output(const RunConfig& c, const std::string& name, const std::string& data)
{
  atomic_write(fs::path(c.out_dir) / name, data);
}

inline int run_impl(const RunConfig& c, std::ostream& out)
{
  validate(c);
  const Cache cache = open_cache(c);
  const std::string& sub = c.subcommand;

  if (sub == "cache-gc") {
    if (!cache.enabled()) throw ArgumentError("cache-gc needs --cache-dir or QCENSUS_CACHE_DIR");
    auto s = cache.gc(c.max_bytes);
    out << nlohmann::json{{"schema", "qcensus.gc/1"},
                          {"entries_before", s.entries_before},
                          {"bytes_before", s.bytes_before},
                          {"evicted", s.evicted},
                          {"bytes_after", s.bytes_after}}
               .dump(2)
        << "\n";
    return 0;
  }

  if (sub == "delta-check") {
    auto e = make_delta(c.X);
    std::mt19937_64 rng(c.seed);
    const long long hi = std::max<long long>(1, static_cast<long long>(c.X));
    std::uniform_int_distribution<long long> dist(-hi, hi);
    bool all = true;
    out << "m,value,expected,status\n";
    auto row = [&](long long m) {
      double v = delta_eval(e, m);
      double want = m == 0 ? 1.0 : 0.0;
      bool ok = std::abs(v - want) <= 1e-6;
      all = all && ok;
      out << m << ',' << fmt17(v) << ',' << want << ',' << (ok ? "pass" : "fail") << '\n';
    };
    row(0);
    for (int i = 0; i < c.samples; ++i) {
      long long m = 0;
      while (m == 0) m = dist(rng);
      row(m);
    }
    double cc = calibrate_c(e);
    bool cok = std::abs(cc - 1) <= 1e-6;
    out << "calibrated_c," << fmt17(cc) << ",1," << (cok ? "pass" : "fail") << '\n';
    out << "overall,,," << (all && cok ? "pass" : "fail") << '\n';
    return 0;
  }

  auto l = load_form(c);
  const QuadForm& f = l.form;

  if (sub == "count") {
    auto counter = cached_counter(f, l.spec, cache, parse_method(c.strategy));
    out << "X,N,truncation_error\n";
    for (double X : parse_grid(c.x_grid)) {
      auto sc = counter(X);
      out << fmt17(X) << ',' << fmt17(sc.value) << ',' << fmt17(sc.truncation_error) << '\n';
    }
    return 0;
  }

  if (sub == "local-factor") {
    if (c.p < 2) throw ArgumentError("local-factor needs --p");
    auto ctx = make_context(f, c.p, c.kmax);
    IntVec xi = parse_vector(c.xi, f.n());
    auto lf = euler_factor(f, ctx, xi);
    nlohmann::json ser = nlohmann::json::array();
    for (const auto& a : lf.series(std::min(c.kmax, 8))) ser.push_back(a.str());
    nlohmann::json j{{"schema", "qcensus.local_factor/1"},
                     {"p", c.p},
                     {"good", ctx.good},
                     {"xi", xi},
                     {"provenance", lf.provenance == Provenance::closed_form ? "closed_form" : "reconstructed"},
                     {"rational_function", lf.rf.str()},
                     {"series", ser},
                     {"precision", "exact"}};
    if (lf.provenance == Provenance::reconstructed) {
      j["stabilization_depth"] = lf.stabilization_depth;
      j["tail_ratio"] = lf.tail_ratio.str();
    }
    if (ctx.good) {
      nlohmann::json w = nlohmann::json::array();
      for (int v = 0; v <= 2; ++v) w.push_back(weil_index(f, ctx, v).real());
      j["weil_index"] = w;
    }
    out << j.dump(2) << "\n";
    return 0;
  }

  if (sub == "singular-series") {
    SingularSeriesOptions so;
    so.kmax = c.kmax;
    auto s = singular_series(f, so);
    auto prod = singular_series_product(f, c.prime_cutoff, c.kmax);
    nlohmann::json bad = nlohmann::json::array();
    for (const auto& [p, v] : s.bad_factors) bad.push_back({{"p", p}, {"value", v.str()}});
    out << nlohmann::json{{"schema", "qcensus.singular_series/1"},
                          {"value", s.value},
                          {"error", s.error},
                          {"regularized", s.regularized},
                          {"bad_factors", bad},
                          {"product", {{"cutoff", c.prime_cutoff}, {"value", prod.value}, {"error", prod.error}}}}
               .dump(2)
        << "\n";
    return 0;
  }

  if (sub == "arch-integral") {
    IntVec xi = parse_vector(c.xi, f.n());
    auto m = parse_arch_method(c.arch_method);
    nlohmann::json j{{"schema", "qcensus.arch/1"}, {"s", c.s}, {"xi", xi}};
    if (c.residue) {
      // residue of the difference at s = -1, xi = 0
      if (m && *m == ArchMethod::extrapolated) {
        j["residue"] = arch_json(extrapolate_residue(l.spec, f));
      } else {
        auto L = arch_laurent(l.spec, f);
        j["residue"] = {{"re", L.d_m1}, {"im", 0.0}, {"error", 2 * L.mu0_err}, {"method", "mellin"}};
      }
    } else {
      if (m && *m == ArchMethod::extrapolated) throw ArgumentError("--arch-method extrapolate applies to --residue only");
      j["swapped"] = c.swapped;
      j["value"] = arch_json(arch_integral(l.spec, f, c.s, xi, c.swapped, m));
    }
    out << j.dump(2) << "\n";
    return 0;
  }

  if (sub == "predict" || sub == "verify") {
    auto r = run_predict(c, l, cache);
    auto j = to_json(r);
    if (sub == "predict") {
      write_output(c, "report.json", j.dump(2) + "\n");
      write_output(c, "report.csv", report_csv(r));
      out << (fs::path(c.out_dir) / "report.json").string() << "\n";
    } else {
      nlohmann::json s{{"schema", "qcensus.verify/1"},
                       {"c1", j["c1"]},
                       {"c_log", j["c_log"]},
                       {"c2", j["c2"]},
                       {"fitted_slope", j["fitted_slope"]},
                       {"target_slope", j["target_slope"]},
                       {"inconclusive", j["inconclusive"]},
                       {"fitted_log_coeff", j["fitted_log_coeff"]},
                       {"fitted_c2", j["fitted_c2"]}};
      out << s.dump(2) << "\n";
    }
    return 0;
  }

  if (sub == "plot-data") {
    auto r = run_predict(c, l, cache);
    out << "log_X,log_abs_residual\n";
    for (const auto& g : r.grid)
      if (g.residual != 0) out << fmt17(std::log(g.X)) << ',' << fmt17(std::log(std::abs(g.residual))) << '\n';
    return 0;
  }

  throw ArgumentError("unknown subcommand '" + sub + "'");
}

inline int exit_code(ErrorKind k)
{
  return k == ErrorKind::argument || k == ErrorKind::domain ? 2 : 3;
}

inline void error_record(std::ostream& err, const std::string& kind, const std::string& msg, int code)
{
  err << nlohmann::json{{"schema", "qcensus.error/1"}, {"kind", kind}, {"message", msg}, {"exit_code", code}}.dump() << "\n";
}

// Runs a configuration; errors become a JSON record on err and a nonzero status.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err)
{
  try {
    int code = run_impl(c, out);
    if (c.json_diagnostics)
      err << nlohmann::json{{"schema", "qcensus.diagnostic/1"}, {"subcommand", c.subcommand}, {"status", "ok"}}.dump() << "\n";
    return code;
  } catch (const Error& e) {
    int code = exit_code(e.kind());
    error_record(err, kind_name(e.kind()), e.what(), code);
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    error_record(err, "io", e.what(), 3);
    return 3;
  } catch (const nlohmann::json::exception& e) {
    error_record(err, "argument", e.what(), 2);
    return 2;
  } catch (const std::exception& e) {
    error_record(err, "internal", e.what(), 3);
    return 3;
  }
}

inline int main_entry(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
  // a config file seeds the values; flags on the command line override it
  RunConfig c;
  c.workers = default_workers();
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    auto text = read_file(config_path);
    try {
      if (!text) throw ArgumentError("cannot read config " + config_path);
      c = config_from_json(nlohmann::json::parse(*text));
    } catch (const std::exception& e) {
      error_record(err, "argument", e.what(), 2);
      return 2;
    }
  }

  CLI::App app{"Smoothed zero counts of integral quadratic forms and their asymptotics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.add_option("--config", config_path, "RunConfig JSON; command-line flags override it");
  app.add_option("--cache-dir", c.cache_dir, "result cache directory (QCENSUS_CACHE_DIR overrides)");
  app.add_option("--workers", c.workers, "worker threads");
  app.add_option("--rel-tol", c.rel_tol, "relative quadrature tolerance");
  app.add_option("--abs-tol", c.abs_tol, "absolute quadrature tolerance");
  app.add_option("--kmax", c.kmax, "depth of exact local counts");
  app.add_flag("--json", c.json_diagnostics, "machine-readable diagnostics");

  auto form_opt = [&](CLI::App* s) { s->add_option("--form", c.form_path, "form JSON {\"n\", \"J\"[, \"A\"]}"); };
  auto grid_opt = [&](CLI::App* s) { s->add_option("--X-grid", c.x_grid, "a:b:step, geom:a:b:count or a list"); };

  auto* count = app.add_subcommand("count", "smoothed counts N(X) over a grid");
  form_opt(count);
  grid_opt(count);
  count->add_option("--strategy", c.strategy, "auto, enumerate or block_convolution");

  auto* lf = app.add_subcommand("local-factor", "local Euler factor at a prime");
  form_opt(lf);
  lf->add_option("--p", c.p, "prime");
  lf->add_option("--xi", c.xi, "comma-separated integer vector");

  auto* ss = app.add_subcommand("singular-series", "singular series and its truncated product");
  form_opt(ss);
  ss->add_option("--prime-cutoff", c.prime_cutoff, "largest prime in the direct product");

  auto* ai = app.add_subcommand("arch-integral", "archimedean integral");
  form_opt(ai);
  ai->add_option("--s", c.s, "real part of s");
  ai->add_option("--xi", c.xi, "comma-separated integer vector");
  ai->add_flag("--swapped", c.swapped, "use the swapped test function");
  ai->add_flag("--residue", c.residue, "residue of the difference at s = -1");
  ai->add_option("--arch-method", c.arch_method, "direct, mellin, extrapolate or auto");

  auto* dc = app.add_subcommand("delta-check", "delta-symbol expansion sanity table");
  dc->add_option("--X", c.X, "scale");
  dc->add_option("--samples", c.samples, "random nonzero m to test");
  dc->add_option("--seed", c.seed, "random seed");

  for (const char* name : {"predict", "verify", "plot-data"}) {
    auto* s = app.add_subcommand(name, std::string(name) == "predict"  ? "write report.json and report.csv"
                                       : std::string(name) == "verify" ? "prediction against counts, summary on stdout"
                                                                       : "(log X, log|residual|) pairs");
    form_opt(s);
    grid_opt(s);
    s->add_option("--strategy", c.strategy, "counting strategy");
    s->add_option("--xi-radius", c.xi_radius, "dual-zero radius (0 = adaptive)");
    if (std::string(name) == "predict") s->add_option("--out-dir", c.out_dir, "output directory");
  }

  auto* gc = app.add_subcommand("cache-gc", "evict least recently used cache entries");
  gc->add_option("--max-bytes", c.max_bytes, "size bound")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_record(err, "argument", e.what(), 2);
    return 2;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  return run(c, out, err);
}

} // namespace qcensus::cli
