#pragma once

// Command-line front end: run configuration, dispatch, JSON report bundles and plot data.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "acceptance.hpp"
#include "columns.hpp"

namespace wh::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
  std::string command = "verify";
  std::string identity = "ibp_helmholtz";
  std::string symbol = "fraclap";
  double a = 0.5;
  double m = 1.0;
  double phase = 0.3;
  int dim = 1;
  int j = 0;
  std::vector<double> xi_prime{1.0};
  std::string data = "manufactured";
  std::string data_file;
  std::string f = "one";
  int degree = 60;
  std::size_t grid_n = 4096;
  double grid_x = 4.0;
  double tol_scale = 1.0;
  int threads = 0;
  unsigned seed = 0;
  std::string suite = "acceptance";
  std::vector<int> criteria;
  bool refine = false;
  std::string out;

  bool operator==(const RunConfig&) const = default;

  static RunConfig defaults(const std::string& command) {
    RunConfig c;
    c.command = command;
    if (command == "factorize") c.symbol = "helmholtz_slice", c.a = 0.5, c.m = 2.0;
    if (command == "verify") c.symbol = "helmholtz";
    return c;
  }
};

/// Visits every field with its JSON key; shared by the JSON reader and writer.
template <class C, class F>
void for_each_field(C& c, F&& f) {
  f("command", c.command), f("identity", c.identity), f("symbol", c.symbol), f("a", c.a), f("m", c.m);
  f("phase", c.phase), f("dim", c.dim), f("j", c.j), f("xi_prime", c.xi_prime), f("data", c.data);
  f("data_file", c.data_file), f("f", c.f), f("degree", c.degree), f("grid_n", c.grid_n), f("grid_x", c.grid_x);
  f("tol_scale", c.tol_scale), f("threads", c.threads), f("seed", c.seed), f("suite", c.suite);
  f("criteria", c.criteria), f("refine", c.refine), f("out", c.out);
}

template <class J>
void to_json(J& j, const RunConfig& c) {
  j = J::object();
  for_each_field(c, [&](const char* key, const auto& v) { j[key] = v; });
}

/// Missing keys keep their defaults; unknown keys are rejected.
template <class J>
void from_json(const J& j, RunConfig& c) {
  std::set<std::string> known;
  for_each_field(c, [&](const char* key, auto& v) {
    known.insert(key);
    if (j.contains(key)) j.at(key).get_to(v);
  });
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw Error("config", k + ": unknown field");
}

namespace detail {

inline const std::set<std::string> kCommands{"factorize", "verify", "solve", "pohozaev", "suite"};
inline const std::set<std::string> kFactorSymbols{"helmholtz_slice", "fraclap", "helmholtz", "anisotropic",
                                                  "anisotropic_x",   "variable", "phase"};
inline const std::set<std::string> kKernelSymbols{"fraclap", "helmholtz", "helmholtz_p3", "variable", "phase"};
inline const std::set<std::string> kHalflineIdentities{"green",       "ibp_halfline", "ibp_helmholtz",
                                                       "ibp_fraclap", "ibp_general",  "minus_factor"};
inline const std::set<std::string> kIntervalIdentities{"pairing", "ibp_domain", "radial", "pohozaev"};

inline std::string joined(const std::set<std::string>& s) {
  std::string r;
  for (const auto& k : s) r += (r.empty() ? "" : ", ") + k;
  return r;
}

inline void field(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw Error("config", path + ": " + what);
}

inline void one_of(const std::string& value, const std::set<std::string>& allowed, const std::string& path) {
  field(allowed.contains(value), path, "'" + value + "' is not one of " + joined(allowed));
}

}  // namespace detail

/// Throws Error("config", "<field>: <reason>") for the first invalid field.
inline void validate(const RunConfig& c) {
  using detail::field;
  using detail::one_of;
  one_of(c.command, detail::kCommands, "command");
  field(c.tol_scale > 0 && std::isfinite(c.tol_scale), "tol_scale", "must be positive");
  field(c.threads >= 0, "threads", "must be non-negative");
  if (c.command == "suite") {
    one_of(c.suite, {"acceptance"}, "suite");
    for (std::size_t k = 0; k < c.criteria.size(); ++k)
      field(c.criteria[k] >= 1 && c.criteria[k] <= 14, "criteria[" + std::to_string(k) + "]", "must lie in 1..14");
    return;
  }
  field(c.a > 0 && c.a < 1, "a", "must lie in (0, 1)");
  field(c.m > 0 && std::isfinite(c.m), "m", "must be positive");
  field(std::abs(c.phase) < pi / 2, "phase", "must lie in (-pi/2, pi/2)");
  field(c.grid_n >= 64 && is_power_of_two(c.grid_n), "grid_n", "must be a power of two >= 64");
  field(c.grid_x > 0 && std::isfinite(c.grid_x), "grid_x", "must be positive");
  if (c.command == "factorize") {
    one_of(c.symbol, detail::kFactorSymbols, "symbol");
    field(c.dim == 1 || c.dim == 2, "dim", "must be 1 or 2");
    field(c.symbol != "helmholtz_slice" || c.dim == 1, "dim", "helmholtz_slice is a one-dimensional slice");
    field(!c.symbol.starts_with("anisotropic") || c.dim == 2, "dim", c.symbol + " needs dim = 2");
    field(c.dim == 1 || !c.xi_prime.empty(), "xi_prime", "needs at least one slice");
    for (std::size_t k = 0; k < c.xi_prime.size(); ++k)
      field(std::isfinite(c.xi_prime[k]) && c.xi_prime[k] != 0, "xi_prime[" + std::to_string(k) + "]", "must be nonzero");
    return;
  }
  one_of(c.symbol, detail::kKernelSymbols, "symbol");
  field(c.degree >= 1 && c.degree <= 120, "degree", "must lie in 1..120");
  if (c.command == "verify") {
    std::set<std::string> all = detail::kHalflineIdentities;
    all.insert(detail::kIntervalIdentities.begin(), detail::kIntervalIdentities.end());
    one_of(c.identity, all, "identity");
    field(c.j == 0, "j", "operators act on one variable, so j must be 0");
    one_of(c.data, {"manufactured", "solved", "file"}, "data");
    bool half = detail::kHalflineIdentities.contains(c.identity);
    field(!half || c.data != "solved", "data", "solved data exists only for the interval identities");
    field(half || c.data != "file", "data", "file data is read as half-line w, so it needs a half-line identity");
    field(c.data != "file" || !c.data_file.empty(), "data_file", "required when data = file");
    field(!c.refine || c.identity != "green", "refine", "green has no grid-dependent terms");
  }
  if (c.command == "solve") {
    one_of(c.f, {"one", "gamma", "linear", "cos", "file"}, "f");
    field(c.f != "file" || !c.data_file.empty(), "data_file", "required when f = file");
  }
  if (c.command == "pohozaev") one_of(c.f, {"one", "gamma"}, "f");
}

/// A downstream failure inside one check, tagged with that check's id.
class CheckError : public Error {
 public:
  CheckError(const std::string& check, const std::exception& e) : Error("check " + check, e.what()) {}
};

/// Everything one run produced. `report` is deterministic in the config; `metadata` holds timestamps and timings.
struct Bundle {
  json report;
  json metadata;
  std::map<std::string, std::vector<ColumnRow>> series;
  std::vector<IdentityReport> identities;

  bool pass() const { return report.value("pass", false); }
  json with_metadata() const {
    json r = report;
    r["metadata"] = metadata;
    return r;
  }
};

namespace detail {

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json check(const std::string& id, bool pass, double value, double tol, json detail = json::object()) {
  json c{{"id", id}, {"pass", pass}, {"value", value}, {"tol", tol}};
  if (!detail.empty()) c["detail"] = std::move(detail);
  return c;
}

inline json terms_json(const std::vector<IdentityTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({{"name", t.name}, {"value", complex_json(t.value)}});
  return out;
}

/// Identity tolerances before tol_scale; see README for the ladder.
inline double identity_tol(const std::string& id) {
  if (id == "green") return 1e-10;
  if (id == "ibp_halfline") return 1e-4;
  return 5e-3;
}

/// An identity check passes when abs_residual <= tol * max(1, |lhs|, |rhs|).
inline json identity_check(const IdentityReport& r, double tol) {
  double scale = std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
  json d{{"lhs", complex_json(r.lhs)},
         {"rhs", complex_json(r.rhs)},
         {"abs_residual", r.abs_residual},
         {"rel_residual", r.rel_residual},
         {"lhs_terms", terms_json(r.lhs_terms)},
         {"rhs_terms", terms_json(r.rhs_terms)}};
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  d["diagnostics"] = diag;
  return check(r.id, r.abs_residual <= tol * scale, r.abs_residual, tol * scale, d);
}

inline KernelOperator kernel(const RunConfig& c) {
  if (c.symbol == "fraclap") return KernelOperator::fractional_laplacian(c.a);
  if (c.symbol == "helmholtz") return KernelOperator::helmholtz(c.a, c.m);
  if (c.symbol == "helmholtz_p3") return KernelOperator::helmholtz_p3(c.a, c.m);
  if (c.symbol == "variable") return KernelOperator::variable_coefficient(c.a);
  return KernelOperator::phase_rotated(c.a, c.phase);
}

inline Symbol factor_symbol(const RunConfig& c) {
  if (c.symbol == "fraclap") return catalog::fractional_laplacian(c.dim, c.a);
  if (c.symbol == "helmholtz") return catalog::helmholtz(c.dim, c.a, c.m, 3);
  if (c.symbol == "anisotropic") return catalog::anisotropic(c.dim, c.a);
  if (c.symbol == "anisotropic_x") return catalog::anisotropic_x(c.dim, c.a);
  if (c.symbol == "variable") return catalog::variable_coefficient(c.dim, c.a);
  return catalog::phase_rotated(c.dim, c.a, c.phase);
}

inline std::vector<ColumnRow> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "data_file: cannot open '" + path + "'");
  return read_columns(in);
}

/// Runs body, wrapping any failure with the check id.
template <class F>
auto guarded(const std::string& id, F&& body) {
  try {
    return body();
  } catch (const CheckError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckError(id, e);
  }
}

inline json factorization_json(const FactorizationResult& r) {
  return {{"xi_prime", r.xi_prime},         {"s0", complex_json(r.s0)},
          {"mult_residual", r.mult_residual}, {"plus_leak", r.plus_leak},
          {"minus_leak", r.minus_leak},       {"edge_plus", r.edge_plus},
          {"edge_minus", r.edge_minus},       {"psi_plus_l1", r.psi_plus_l1},
          {"f_sup", r.f_sup},                 {"majorant", r.majorant},
          {"series_tail", r.series_tail}};
}

inline void run_factorize(const RunConfig& c, Bundle& b) {
  auto results = guarded("factorize", [&] {
    if (c.symbol == "helmholtz_slice") {
      FreqGrid g{c.grid_n, std::sqrt(c.m)};
      auto q = FreqSlice::sample(g, [&](double t) { return cplx(std::pow((c.m * c.m + t * t) / (1 + t * t), c.a)); },
                                 DecayClass::zero);
      return std::vector{factorize_slice(q, pi)};
    }
    std::vector<std::vector<double>> slices;
    for (double xp : c.xi_prime) slices.push_back({xp});
    return factorize_principal(factor_symbol(c), std::vector<double>(c.dim, 0.0), slices, pi, c.grid_n);
  });
  json list = json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    std::string tag = "slice_" + std::to_string(k);
    b.report["checks"].push_back(check(tag + ".mult_residual", r.mult_residual <= 1e-7 * c.tol_scale, r.mult_residual,
                                       1e-7 * c.tol_scale));
    double leak = std::max(r.plus_leak, r.minus_leak);
    b.report["checks"].push_back(check(tag + ".leak", leak <= 1e-6 * c.tol_scale, leak, 1e-6 * c.tol_scale));
    list.push_back(factorization_json(r));
  }
  b.report["factorizations"] = list;
  b.series["q_plus"] = columns_of(results.front().q_plus);
  b.series["q_minus"] = columns_of(results.front().q_minus);
}

struct HalflineData {
  Profile w, wp;
};

inline HalflineData halfline_data(const RunConfig& c) {
  if (c.data == "file") {
    auto p = profile_from_columns(read_file(c.data_file));
    return {p, p};
  }
  if (c.seed == 0) return {Profile::poly_exp({1.0, 0.5}, 1.2), Profile::poly_exp({1.0, -0.3}, 0.9)};
  std::mt19937 rng(c.seed);
  std::uniform_real_distribution<double> C(-1, 1), B(0.6, 2.0);
  auto draw = [&] { return Profile::poly_exp({cplx(C(rng), C(rng)), cplx(C(rng), C(rng)), C(rng)}, B(rng)); };
  auto w = draw();
  return {w, draw()};
}

inline IdentityReport halfline_identity(const RunConfig& c, const HalflineData& d, const IdentityOptions& opt) {
  if (c.identity == "green") return verify_green_classical(d.w, d.wp, opt);
  if (c.identity == "ibp_halfline") return verify_ibp_halfline(d.w, d.wp, c.a, opt);
  if (c.identity == "ibp_helmholtz") return verify_ibp_helmholtz(d.w, d.wp, c.a, c.m, opt);
  if (c.identity == "ibp_fraclap") return verify_ibp_fraclap(d.w, d.wp, c.a, opt);
  if (c.identity == "ibp_general") return verify_ibp_general(kernel(c), d.w, d.wp, opt);
  return verify_minus_factor(d.w, d.wp, c.a, sine_coefficient(), opt);
}

struct IntervalData {
  WeightedFunction u, up;
};

inline IntervalData interval_data(const RunConfig& c, const IdentityOptions& opt) {
  std::vector<cplx> cu{1.0, 0.3, 0.1}, cp{0.5, -0.2, cplx(0, 0.2)};
  if (c.seed != 0) {
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> C(-1, 1);
    for (auto* v : {&cu, &cp})
      for (auto& z : *v) z = cplx(C(rng), v == &cu ? 0.0 : C(rng));
    cu[0] += 1.5;
  }
  auto up = WeightedFunction::jacobi(c.a, cp);
  if (c.data == "solved") {
    DirichletOptions so;
    so.degree = c.degree, so.grid = opt.grid, so.threads = c.threads;
    return {solve_interval(kernel(c), [](double) { return 1.0; }, so).profile, up};
  }
  return {WeightedFunction::jacobi(c.a, cu), up};
}

inline IdentityOptions identity_options(const RunConfig& c, std::size_t n) {
  IdentityOptions o;
  o.grid = {n, c.grid_x};
  o.threads = c.threads;
  return o;
}

/// Reports for one interval identity; radial and pohozaev carry a homogeneous variant checked only for (-Delta)^a.
inline std::vector<IdentityReport> interval_identity(const RunConfig& c, const IntervalData& d, const IdentityOptions& opt) {
  auto P = kernel(c);
  if (c.identity == "pairing") return {verify_pairing(P, d.u, d.up, opt)};
  if (c.identity == "ibp_domain") return {verify_ibp_domain(P, d.u, d.up, opt)};
  if (c.identity == "radial") {
    auto r = verify_radial(P, d.u, d.up, opt);
    if (c.symbol == "fraclap") return {r.general, r.homogeneous};
    return {r.general};
  }
  auto r = verify_pohozaev(P, Nonlinearity::constant(1.0), d.u, opt);
  if (c.symbol == "fraclap") return {r.general, r.homogeneous};
  return {r.general};
}

inline void add_identity(const RunConfig& c, Bundle& b, const IdentityReport& r) {
  b.report["checks"].push_back(identity_check(r, identity_tol(r.id) * c.tol_scale));
  b.identities.push_back(r);
}

inline void run_verify(const RunConfig& c, Bundle& b) {
  const std::vector<std::size_t> ladder{512, 1024, 2048, 4096, 8192};
  std::vector<ColumnRow> curve;
  if (detail::kHalflineIdentities.contains(c.identity)) {
    auto d = guarded(c.identity, [&] { return halfline_data(c); });
    auto r = guarded(c.identity, [&] { return halfline_identity(c, d, identity_options(c, c.grid_n)); });
    add_identity(c, b, r);
    if (c.refine) {
      // the integrals do not depend on the trace grid, so the operator identities only redo the boundary term
      std::optional<std::pair<KernelOperator, double>> retrace;
      if (c.identity == "ibp_helmholtz") retrace.emplace(KernelOperator::helmholtz(c.a, c.m), c.m);
      if (c.identity == "ibp_fraclap") retrace.emplace(KernelOperator::fractional_laplacian(c.a), 1.0);
      if (c.identity == "ibp_general") retrace.emplace(kernel(c), 1.0);
      for (auto n : ladder) {
        auto o = identity_options(c, n);
        auto rn = guarded(c.identity, [&] {
          return retrace ? retrace_halfline(r, retrace->first, retrace->second, d.w, d.wp, o) : halfline_identity(c, d, o);
        });
        curve.push_back({double(n), rn.rel_residual});
      }
    }
  } else {
    auto d = guarded(c.identity, [&] { return interval_data(c, identity_options(c, c.grid_n)); });
    for (const auto& r : guarded(c.identity, [&] { return interval_identity(c, d, identity_options(c, c.grid_n)); }))
      add_identity(c, b, r);
    if (c.refine)
      for (auto n : ladder) {
        auto rn = guarded(c.identity, [&] { return interval_identity(c, d, identity_options(c, n)); });
        curve.push_back({double(n), rn.front().rel_residual});
      }
  }
  if (c.refine) b.series["convergence"] = curve;
}

/// Right-hand sides of the interval problem by name.
inline std::function<cplx(double)> rhs(const RunConfig& c) {
  if (c.f == "one") return [](double) { return cplx(1.0); };
  if (c.f == "gamma") return [g = std::tgamma(2 * c.a + 1)](double) { return cplx(g); };
  if (c.f == "linear") return [](double x) { return cplx(1.0 + x); };
  if (c.f == "cos") return [](double x) { return cplx(std::cos(2 * x)); };
  SampledFunction s(read_file(c.data_file));
  require(s.lo <= -1 && s.hi >= 1, "columns", "f samples must cover [-1, 1]");
  return s;
}

inline DirichletOptions solver_options(const RunConfig& c) {
  DirichletOptions o;
  o.degree = c.degree;
  o.grid = {c.grid_n, c.grid_x};
  o.threads = c.threads;
  o.residual_tol = 1e-6 * c.tol_scale;
  return o;
}

/// Solves and records the residual check; a solve above tolerance is a failed check rather than an error.
inline std::optional<DirichletSolution> solve_checked(const RunConfig& c, Bundle& b) {
  auto o = solver_options(c);
  auto f = rhs(c);
  try {
    auto s = solve_interval(kernel(c), f, o);
    b.report["checks"].push_back(check("solve.residual", true, s.residual, o.residual_tol));
    return s;
  } catch (const Error& e) {
    if (e.code() != "residual") throw CheckError("solve", e);
    b.report["checks"].push_back(check("solve.residual", false, INFINITY, o.residual_tol, {{"error", e.what()}}));
    return std::nullopt;
  }
}

inline void run_solve(const RunConfig& c, Bundle& b) {
  auto s = solve_checked(c, b);
  if (!s) return;
  json traces = json::array();
  for (auto [boundary, interior] : {std::pair{-1.0, 1}, std::pair{1.0, -1}}) {
    auto t = guarded("solve.trace", [&] { return weighted_trace(s->u, c.a, boundary, interior); });
    cplx exact = s->profile.exact_trace(boundary);
    double err = std::abs(t.value - exact), tol = 1e-3 * c.tol_scale;
    traces.push_back({{"boundary", boundary},
                      {"value", complex_json(t.value)},
                      {"from_coefficients", complex_json(exact)},
                      {"extrapolation_error", t.extrapolation_error},
                      {"exponent", t.exponent}});
    b.report["checks"].push_back(check(boundary < 0 ? "trace.left" : "trace.right", err <= tol, err, tol));
  }
  json coeffs = json::array();
  for (auto z : s->coeffs) coeffs.push_back(complex_json(z));
  b.report["solution"] = {{"residual", s->residual}, {"coefficients", coeffs}, {"traces", traces}};
  std::vector<ColumnRow> rows;
  for (const auto& r : columns_of(s->u))
    if (std::abs(r.t) <= 1) rows.push_back(r);
  b.series["solution"] = rows;
}

inline void run_pohozaev(const RunConfig& c, Bundle& b) {
  auto s = solve_checked(c, b);
  if (!s) return;
  double value = rhs(c)(0.0).real();
  auto opt = identity_options(c, c.grid_n);
  auto r = guarded("pohozaev", [&] { return verify_pohozaev(kernel(c), Nonlinearity::constant(value), s->profile, opt); });
  add_identity(c, b, r.general);
  if (c.symbol == "fraclap") add_identity(c, b, r.homogeneous);
  double tol = 1e-5 * c.tol_scale;
  b.report["checks"].push_back(check("pohozaev.equation_residual", r.equation_residual <= tol, r.equation_residual, tol));
  std::vector<ColumnRow> rows;
  for (const auto& row : columns_of(s->u))
    if (std::abs(row.t) <= 1) rows.push_back(row);
  b.series["solution"] = rows;
}

inline void run_suite(const RunConfig& c, Bundle& b) {
  json timings = json::object();
  for (const auto& r : acceptance::run_all(c.criteria)) {
    std::string id = "criterion_" + std::to_string(r.number);
    b.report["checks"].push_back(
        {{"id", id}, {"pass", r.pass}, {"detail", {{"title", r.title}, {"measured", r.measured}}}});
    timings[id] = r.seconds;
  }
  b.metadata["seconds"] = timings;
}

inline std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Validates, dispatches and assembles the bundle; pass iff every check passed.
inline Bundle run(const RunConfig& c) {
  validate(c);
  Bundle b;
  b.report = {{"schema_version", kSchemaVersion}, {"command", c.command}, {"config", c}, {"checks", json::array()}};
  b.metadata = {{"version", kVersion}, {"timestamp", detail::utc_now()}};
  if (c.command == "factorize") detail::run_factorize(c, b);
  if (c.command == "verify") detail::run_verify(c, b);
  if (c.command == "solve") detail::run_solve(c, b);
  if (c.command == "pohozaev") detail::run_pohozaev(c, b);
  if (c.command == "suite") detail::run_suite(c, b);
  bool pass = !b.report["checks"].empty();
  for (const auto& k : b.report["checks"]) pass = pass && k["pass"].get<bool>();
  b.report["pass"] = pass;
  return b;
}

/// Writes content to path through a temporary file in the same directory and a rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("io", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Writes the series `key` of the bundle as columnar text `<dir>/<key>.dat`.
inline std::filesystem::path emit_plotdata(const Bundle& b, const std::string& key, const std::filesystem::path& dir) {
  require(!b.series.empty(), "plotdata", "bundle has no series");
  auto it = b.series.find(key);
  if (it == b.series.end()) {
    std::string keys;
    for (const auto& [k, _] : b.series) keys += (keys.empty() ? "" : ", ") + k;
    throw Error("plotdata", "unknown series '" + key + "'; available: " + keys);
  }
  std::ostringstream s;
  write_columns(s, it->second);
  auto path = dir / (key + ".dat");
  atomic_write(path, s.str());
  return path;
}

/// INI text that parses back to the same RunConfig: globals first, then the command's section.
inline std::string to_ini(const RunConfig& c) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
  std::ostringstream s;
  s << "command = " << c.command << "\ntol-scale = " << num(c.tol_scale) << "\nthreads = " << c.threads << "\n";
  if (!c.out.empty()) s << "out = " << quoted(c.out) << "\n";
  s << "\n[" << c.command << "]\n";
  auto put = [&](const std::string& k, const std::string& v) { s << k << " = " << v << "\n"; };
  if (c.command == "suite") {
    put("suite", c.suite);
    if (!c.criteria.empty()) {
      std::string list;
      for (int k : c.criteria) list += (list.empty() ? "" : " ") + std::to_string(k);
      put("criteria", list);
    }
    return s.str();
  }
  put("symbol", c.symbol);
  put("a", num(c.a));
  put("m", num(c.m));
  put("phase", num(c.phase));
  put("grid-n", std::to_string(c.grid_n));
  if (c.command == "factorize") {
    put("dim", std::to_string(c.dim));
    std::string list;
    for (double v : c.xi_prime) list += (list.empty() ? "" : " ") + num(v);
    put("xi-prime", list);
    return s.str();
  }
  put("grid-x", num(c.grid_x));
  if (c.command == "verify") {
    put("identity", c.identity);
    put("j", std::to_string(c.j));
    put("data", c.data);
    put("refine", c.refine ? "true" : "false");
    put("seed", std::to_string(c.seed));
  } else {
    put("f", c.f);
  }
  put("degree", std::to_string(c.degree));
  if (!c.data_file.empty()) put("data-file", quoted(c.data_file));
  return s.str();
}

/// The flag and config-file grammar; each subcommand binds its own RunConfig so config sections stay separate.
class CommandLine {
 public:
  CLI::App app{"Wiener-Hopf factorization and boundary identity checks for fractional-type operators", "wh_cli"};

  CommandLine() {
    app.set_config("--config", "", "INI file: globals at top, one [subcommand] section each; flags win");
    app.set_version_flag("--version", kVersion);
    app.add_option("--out", global_.out, "Directory for report.json, config.ini, terms.csv and plot data");
    app.add_option("--tol-scale", global_.tol_scale, "Multiply every identity and factorization tolerance");
    app.add_option("--threads", global_.threads, "Worker threads, 0 for hardware concurrency");
    app.add_option("--command", command_, "Subcommand to run when none is named (config files)")->group("");
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand
    for (const auto& name : detail::kCommands) configs_[name] = RunConfig::defaults(name);

    auto* f = add("factorize", "Factor a principal symbol slice by slice and report residuals");
    kernel_options(f, configs_["factorize"]);
    f->add_option("--dim", configs_["factorize"].dim, "Space dimension of the catalog symbol");
    f->add_option("--xi-prime", configs_["factorize"].xi_prime, "Tangential frequencies xi' for dim 2");

    auto* v = add("verify", "Check one integration-by-parts or boundary identity");
    auto& vc = configs_["verify"];
    kernel_options(v, vc);
    grid_options(v, vc);
    v->add_option("--identity", vc.identity, "green, ibp_halfline, ibp_helmholtz, ibp_fraclap, ibp_general, "
                                             "minus_factor, pairing, ibp_domain, radial, pohozaev");
    v->add_option("--j", vc.j, "Direction of the derivative in the commutator");
    v->add_option("--data", vc.data, "manufactured, solved or file");
    v->add_option("--data-file", vc.data_file, "Columnar (x, Re w, Im w) half-line data from x = 0");
    v->add_option("--degree", vc.degree, "Basis degree for solved data");
    v->add_option("--seed", vc.seed, "Nonzero draws random manufactured data");
    v->add_flag("--refine", vc.refine, "Add the residual against N convergence series");

    for (const char* name : {"solve", "pohozaev"}) {
      auto* s = add(name, std::string(name) == "solve" ? "Solve r+ P u = f on (-1, 1) in the weighted Jacobi basis"
                                                        : "Solve with constant f and check the Pohozaev balance");
      auto& sc = configs_[name];
      kernel_options(s, sc);
      grid_options(s, sc);
      s->add_option("-f,--f", sc.f, "one, gamma (Gamma(2a+1)), linear, cos or file");
      s->add_option("--degree", sc.degree, "Highest basis degree");
      if (std::string(name) == "solve") s->add_option("--data-file", sc.data_file, "Columnar samples of f covering [-1, 1]");
    }

    auto* u = add("suite", "Run the acceptance criteria");
    u->add_option("--suite", configs_["suite"].suite, "Suite name (acceptance)");
    u->add_option("--criteria", configs_["suite"].criteria, "Subset of criterion numbers");
  }

  /// The configuration selected by the parsed arguments; call after app.parse.
  RunConfig config() const {
    std::string name = command_;
    for (const auto& [k, sub] : subs_)
      if (sub->parsed()) name = k;
    if (!configs_.contains(name)) throw Error("config", "command: '" + name + "' is not one of " + detail::joined(detail::kCommands));
    RunConfig c = configs_.at(name);
    c.command = name;
    c.out = global_.out, c.tol_scale = global_.tol_scale, c.threads = global_.threads;
    return c;
  }

  /// Parses an argument list without the program name.
  RunConfig parse(std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    return config();
  }

 private:
  RunConfig global_ = RunConfig::defaults("verify");
  std::string command_ = "verify";
  std::map<std::string, RunConfig> configs_;
  std::map<std::string, CLI::App*> subs_;

  CLI::App* add(const std::string& name, const std::string& help) { return subs_[name] = app.add_subcommand(name, help); }
  static void kernel_options(CLI::App* s, RunConfig& c) {
    s->add_option("--symbol", c.symbol, "Operator or catalog symbol key");
    s->add_option("--a", c.a, "Half order a in (0, 1)");
    s->add_option("--m", c.m, "Mass of the Helmholtz symbols (sigma for helmholtz_slice)");
    s->add_option("--phase", c.phase, "Rotation angle of the phase symbol");
    s->add_option("--grid-n", c.grid_n, "Samples N, a power of two");
  }
  static void grid_options(CLI::App* s, RunConfig& c) {
    s->add_option("--grid-x", c.grid_x, "Half-width X of the trace sampling grid");
  }
};

/// Writes report.json, config.ini, terms.csv and every series into c.out.
inline void write_outputs(const Bundle& b, const RunConfig& c) {
  if (c.out.empty()) return;
  std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  atomic_write(dir / "report.json", b.with_metadata().dump(2) + "\n");
  atomic_write(dir / "config.ini", to_ini(c));
  for (const auto& [key, _] : b.series) emit_plotdata(b, key, dir);
  if (!b.identities.empty()) {
    std::ostringstream s;
    s.precision(17);
    s << "identity,side,term,re,im\n";
    for (const auto& r : b.identities)
      for (auto [side, terms] : {std::pair{"lhs", &r.lhs_terms}, std::pair{"rhs", &r.rhs_terms}})
        for (const auto& t : *terms) s << r.id << ',' << side << ",\"" << t.name << "\"," << t.value.real() << ',' << t.value.imag() << '\n';
    atomic_write(dir / "terms.csv", s.str());
  }
}

}  // namespace wh::cli
