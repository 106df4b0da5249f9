#pragma once

// Command-line front end. run_cli() is the whole program minus process
// plumbing, so the test suites can drive it in-process.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sosperturb/errors.hpp"
#include "sosperturb/io.hpp"
#include "sosperturb/parse.hpp"
#include "sosperturb/polynomial.hpp"
#include "sosperturb/preorder.hpp"
#include "sosperturb/probe.hpp"
#include "sosperturb/sos.hpp"

namespace sosperturb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitError = 2;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Replaces the tokens `r` and `<k>r` by the numbers r and k*r, so a file
/// holding "x1^2r" describes the family x1^(2r).
inline Polynomial instantiate_family(const std::string& text, std::size_t n_vars, int r) {
  static const std::regex token(R"(\b(\d*)r\b)");
  std::string out;
  auto it = std::sregex_iterator(text.begin(), text.end(), token);
  std::size_t last = 0;
  for (; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out += text.substr(last, static_cast<std::size_t>(m.position()) - last);
    const long k = m[1].length() ? std::stol(m[1].str()) : 1;
    out += std::to_string(k * r);
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out += text.substr(last);
  return parse(out, n_vars);
}

/// theta-big | theta-small | custom:<file>
inline Perturbation perturbation_from(const std::string& spec) {
  if (spec == "theta-big") return Perturbation::theta_big();
  if (spec == "theta-small") return Perturbation::theta_small();
  if (spec.rfind("custom:", 0) == 0) {
    std::string text = read_file(spec.substr(7));
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    if (text.empty()) throw InvalidArgument("custom perturbation file is empty");
    return Perturbation::from(
        [text](std::size_t n, int r) { return instantiate_family(text, n, r); }, text);
  }
  throw InvalidArgument("unknown perturbation '" + spec +
                        "' (expected theta-big, theta-small or custom:<file>)");
}

inline int log_verbosity() {
  const char* v = std::getenv("SOSPERTURB_LOG");
  if (v == nullptr || *v == '\0') return 0;
  const std::string s(v);
  if (s == "info") return 1;
  if (s == "debug") return 2;
  if (s == "trace") return 3;
  try {
    return std::max(0, std::stoi(s));
  } catch (const std::exception&) {
    return 0;
  }
}

inline bool is_polynomial_json(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& t : v) {
    if (!t.is_object() || t.size() != 2 || !t.contains("exponents") || !t.contains("coeff")) {
      return false;
    }
  }
  return true;
}

inline std::string render_scalar(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

/// Human rendering: one "key: value" line per field, nested objects indented,
/// polynomials written in the input grammar.
inline void render_human(const Json& j, std::ostream& out, const std::string& indent = "") {
  for (const auto& [key, v] : j.items()) {
    if (is_polynomial_json(v) && !v.empty()) {
      const auto n = v.front().at("exponents").size();
      out << indent << key << ": " << to_string(polynomial_from_json(v, n)) << '\n';
    } else if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const Json& e) {
                 return is_polynomial_json(e) && !e.empty();
               })) {
      out << indent << key << ":\n";
      for (const auto& e : v) {
        const auto n = e.front().at("exponents").size();
        out << indent << "  " << to_string(polynomial_from_json(e, n)) << '\n';
      }
    } else if (v.is_object()) {
      out << indent << key << ":\n";
      render_human(v, out, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      out << indent << key << ":\n";
      for (const auto& e : v) {
        out << indent << "  -\n";
        render_human(e, out, indent + "    ");
      }
    } else {
      out << indent << key << ": " << render_scalar(v) << '\n';
    }
  }
}

inline void render_probe_table(const Json& j, std::ostream& out) {
  out << "sample  grid_min       outcome         r\n";
  for (const auto& row : j.at("rows")) {
    std::ostringstream line;
    line << std::left << std::setw(8) << row.at("index").get<int>() << std::setw(15)
         << std::setprecision(6) << row.at("grid_min").get<double>() << std::setw(16)
         << row.at("outcome").get<std::string>()
         << (row.at("r").is_null() ? "-" : row.at("r").dump());
    out << line.str() << '\n';
  }
  for (const auto& [key, v] : j.items()) {
    if (key != "rows") out << key << ": " << render_scalar(v) << '\n';
  }
}

struct Options {
  std::size_t nvars = 0;
  std::string poly_positional;
  std::string poly_inline;
  std::string poly_file;
  std::optional<double> eps;
  std::optional<int> r;
  int r_max = 12;
  std::string perturbation;
  double box_scale = 1.0;
  std::string system_file;
  std::string certificate_file;
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  std::uint64_t seed = 0;
  int degree = 2;
  double coef_bound = 1.0;
  int samples = 20;
  bool json = false;
  std::string output;
};

class Command {
 public:
  Command(std::ostream& out, std::ostream& err, const Options& o) : out_(out), err_(err), o_(o) {}

  int run(const std::string& name) {
    Json report;
    int code = kExitOk;
    if (name == "check-sos") {
      code = check_sos(report);
    } else if (name == "epsilon-star") {
      code = epsilon_star_cmd(report);
    } else if (name == "minimal-r") {
      code = minimal_r_cmd(report, false);
    } else if (name == "approximate") {
      code = minimal_r_cmd(report, true);
    } else if (name == "preorder-membership") {
      code = preorder_cmd(report);
    } else if (name == "degree-probe") {
      code = probe_cmd(report);
    } else if (name == "verify") {
      code = verify_cmd(report);
    } else {
      throw InvalidArgument("unknown command " + name);
    }
    emit(name, report);
    return code;
  }

 private:
  SolverSettings settings() const {
    SolverSettings s;
    s.gap_tolerance = o_.gap_tol;
    s.feas_tolerance = o_.feas_tol;
    s.verbosity = log_verbosity();
    return s;
  }

  Polynomial polynomial() const {
    const int sources = !o_.poly_positional.empty() + !o_.poly_inline.empty() +
                        !o_.poly_file.empty();
    if (sources != 1) {
      throw InvalidArgument("give exactly one polynomial: positional, -f/--poly or --poly-file");
    }
    if (o_.nvars == 0) throw InvalidArgument("-n/--nvars is required");
    if (!o_.poly_file.empty()) return parse(read_file(o_.poly_file), o_.nvars);
    return parse(o_.poly_positional.empty() ? o_.poly_inline : o_.poly_positional, o_.nvars);
  }

  double eps() const {
    if (!o_.eps) throw InvalidArgument("--eps is required");
    if (!(*o_.eps > 0.0)) throw InvalidArgument("--eps must be positive");
    return *o_.eps;
  }

  Perturbation perturbation(const std::string& fallback) const {
    return perturbation_from(o_.perturbation.empty() ? fallback : o_.perturbation);
  }

  static Json base(const std::string& command, const Polynomial& f) {
    return {{"command", command}, {"nvars", f.n_vars()}, {"polynomial", polynomial_json(f)}};
  }

  int check_sos(Json& report) {
    const Polynomial f = polynomial();
    const SosCheck c = is_sos(f, settings());
    report = base("check-sos", f);
    report["is_sos"] = c.is_sos;
    report["status"] = to_string(c.status);
    if (c.is_sos) {
      report["certificate"] = certificate_json(*c.certificate, f.degree() / 2, 0.0,
                                               Polynomial(f.n_vars()), 0.0, 0.0, 0.0);
    }
    return c.is_sos ? kExitOk : kExitNegative;
  }

  int epsilon_star_cmd(Json& report) {
    const Polynomial f = polynomial();
    if (!o_.r) throw InvalidArgument("-r is required");
    const Perturbation fam = perturbation("theta-big");
    const Polynomial p = fam.at(f.n_vars(), *o_.r);
    const ApproximationResult res = epsilon_star(f, *o_.r, p, settings());
    report = base("epsilon-star", f);
    report["r"] = *o_.r;
    report["perturbation"] = polynomial_json(p);
    report["status"] = to_string(res.status);
    report["eps_star"] = number_or_null(res.eps_star);
    report["min_eps"] = number_or_null(res.min_eps);
    report["gram_optimum"] = number_or_null(res.gram_optimum);
    report["gap"] = number_or_null(res.gap);
    if (!res.certificate) {
      report["note"] = "no eps makes f + eps p a sum of squares at this r";
      return kExitNegative;
    }
    report["certificate"] = certificate_json(res);
    report["dual_moments"] = moments_json(res.dual_moments);
    return kExitOk;
  }

  int minimal_r_cmd(Json& report, bool box) {
    const Polynomial f = polynomial();
    const double e = eps();
    report = base(box ? "approximate" : "minimal-r", f);
    report["eps"] = e;
    report["r_max"] = o_.r_max;
    if (box) {
      report["box_scale"] = o_.box_scale;
    } else {
      report["family"] = o_.perturbation.empty() ? "theta-big" : o_.perturbation;
    }
    try {
      const ApproximationResult res =
          box ? approximate_on_box(f, e, o_.box_scale, o_.r_max, settings())
              : minimal_r(f, e, perturbation("theta-big"), o_.r_max, settings());
      report["found"] = true;
      report["r"] = res.r;
      report["trajectory"] = trajectory_json(res.trajectory);
      report["certificate"] = certificate_json(res);
      return kExitOk;
    } catch (const NotFoundWithinRMax& ex) {
      report["found"] = false;
      report["trajectory"] = trajectory_json(ex.trajectory());
      report["note"] = ex.what();
      return kExitNegative;
    }
  }

  int preorder_cmd(Json& report) {
    const Polynomial f = polynomial();
    const double e = eps();
    if (o_.system_file.empty()) throw InvalidArgument("--system is required");
    const SemialgebraicSystem s = parse_system(read_file(o_.system_file));
    if (s.n_vars() != f.n_vars()) {
      throw DimensionMismatch("system nvars differs from -n");
    }
    const std::string kind = o_.perturbation.empty() ? "theta-small" : o_.perturbation;
    Perturbation::Kind k;
    if (kind == "theta-small") {
      k = Perturbation::Kind::ThetaSmall;
    } else if (kind == "theta-big") {
      k = Perturbation::Kind::ThetaBig;
    } else {
      throw InvalidArgument("preorder-membership takes theta-big or theta-small");
    }
    report = base("preorder-membership", f);
    report["eps"] = e;
    report["r_max"] = o_.r_max;
    report["family"] = kind;
    Json gens = Json::array();
    for (const auto& g : s.generators) gens.push_back(polynomial_json(g));
    report["generators"] = gens;
    report["moment_problem"] = s.assert_moment_problem ? "asserted" : "unknown";
    if (!s.note.empty()) report["note"] = s.note;
    try {
      const PreorderCertificate c = membership(f, e, k, s, o_.r_max, settings());
      report["found"] = true;
      report["r"] = c.r;
      report["certificate"] = preorder_certificate_json(c);
      if (!c.warning.empty()) err_ << "warning: " << c.warning << '\n';
      return kExitOk;
    } catch (const NotFoundWithinRMax& ex) {
      report["found"] = false;
      report["trajectory"] = trajectory_json(ex.trajectory());
      report["message"] = ex.what();
      return kExitNegative;
    }
  }

  int probe_cmd(Json& report) {
    if (o_.nvars == 0) throw InvalidArgument("-n/--nvars is required");
    ProbeConfig cfg;
    cfg.n_vars = o_.nvars;
    cfg.degree = o_.degree;
    cfg.coef_bound = o_.coef_bound;
    cfg.eps = eps();
    cfg.samples = o_.samples;
    cfg.seed = o_.seed;
    cfg.r_max = o_.r_max;
    const ProbeReport rep = degree_probe(cfg, settings());
    Json rows = Json::array();
    for (const auto& row : rep.rows) {
      rows.push_back({{"index", row.index},
                      {"grid_min", row.grid_min},
                      {"outcome", row.outcome},
                      {"r", row.r ? Json(*row.r) : Json(nullptr)}});
    }
    report = {{"command", "degree-probe"}, {"nvars", cfg.n_vars},   {"degree", cfg.degree},
              {"coef_bound", cfg.coef_bound}, {"eps", cfg.eps},      {"samples", cfg.samples},
              {"seed", cfg.seed},             {"r_max", cfg.r_max},  {"rows", rows},
              {"accepted", rep.accepted},     {"rejected", rep.rejected},
              {"r_max_failures", rep.r_max_failures}, {"max_r", rep.max_r}};
    return kExitOk;
  }

  int verify_cmd(Json& report) {
    if (o_.certificate_file.empty()) throw InvalidArgument("--certificate is required");
    Json doc;
    try {
      doc = Json::parse(read_file(o_.certificate_file));
    } catch (const nlohmann::json::exception& ex) {
      throw InvalidArgument(std::string("certificate is not valid JSON: ") + ex.what());
    }
    const Json& cert = doc.contains("certificate") ? doc.at("certificate") : doc;
    const Polynomial f = polynomial();
    if (cert.at("nvars").get<std::size_t>() != f.n_vars()) {
      throw DimensionMismatch("certificate nvars differs from -n");
    }
    const int r = cert.at("r").get<int>();
    const double e = o_.eps ? *o_.eps : cert.at("eps").get<double>();
    const Polynomial p = o_.perturbation.empty()
                             ? polynomial_from_json(cert.at("perturbation"), f.n_vars())
                             : perturbation_from(o_.perturbation).at(f.n_vars(), r);
    const Polynomial target = f + p * e;
    const VerifyReport rep = verify_certificate_json(cert, target);
    const bool ok = rep.residual() <= kResidualTolerance && rep.min_gram_eigenvalue >= -1e-8;
    report = base("verify", f);
    report["r"] = r;
    report["eps"] = e;
    report["perturbation"] = polynomial_json(p);
    report["gram_residual"] = rep.gram_residual;
    report["squares_residual"] = rep.squares_residual;
    report["residual"] = rep.residual();
    report["min_gram_eigenvalue"] = rep.min_gram_eigenvalue;
    report["valid"] = ok;
    return ok ? kExitOk : kExitNegative;
  }

  void emit(const std::string& name, const Json& report) {
    std::ostringstream text;
    if (o_.json) {
      text << report.dump(2) << '\n';
    } else if (name == "degree-probe") {
      render_probe_table(report, text);
    } else {
      render_human(report, text);
    }
    if (o_.output.empty()) {
      out_ << text.str();
      return;
    }
    std::ofstream f(o_.output, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + o_.output);
    f << text.str();
  }

  std::ostream& out_;
  std::ostream& err_;
  const Options& o_;
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Perturbed sum-of-squares certificates for polynomial nonnegativity",
               "sosperturb"};
  app.require_subcommand(1);
  Options o;

  auto poly_options = [&o](CLI::App* c) {
    c->add_option("-n,--nvars", o.nvars, "number of variables x1..xn")->check(CLI::PositiveNumber);
    c->add_option("polynomial", o.poly_positional, "polynomial text");
    c->add_option("-f,--poly", o.poly_inline, "polynomial text");
    c->add_option("--poly-file", o.poly_file, "file holding the polynomial");
  };
  auto solver_options = [&o](CLI::App* c) {
    c->add_option("--gap-tol", o.gap_tol, "relative duality gap tolerance")
        ->check(CLI::PositiveNumber);
    c->add_option("--feas-tol", o.feas_tol, "relative feasibility tolerance")
        ->check(CLI::PositiveNumber);
    c->add_flag("--json", o.json, "emit JSON");
    c->add_option("-o", o.output, "write the report to this path");
  };

  auto* check = app.add_subcommand("check-sos", "decide whether f is a sum of squares");
  poly_options(check);
  solver_options(check);

  auto* est = app.add_subcommand("epsilon-star", "eps_r* and the minimal perturbation at r");
  poly_options(est);
  solver_options(est);
  est->add_option("-r", o.r, "relaxation degree")->check(CLI::NonNegativeNumber);
  est->add_option("--perturbation", o.perturbation, "theta-big | theta-small | custom:<file>");

  auto* minr = app.add_subcommand("minimal-r", "smallest r with f + eps p_r a sum of squares");
  poly_options(minr);
  solver_options(minr);
  minr->add_option("--eps", o.eps, "perturbation weight");
  minr->add_option("--r-max", o.r_max, "largest r tried");
  minr->add_option("--perturbation", o.perturbation, "theta-big | theta-small | custom:<file>");

  auto* approx = app.add_subcommand("approximate", "certify f on the box [-l, l]^n");
  poly_options(approx);
  solver_options(approx);
  approx->add_option("--eps", o.eps, "perturbation weight");
  approx->add_option("--r-max", o.r_max, "largest r tried");
  approx->add_option("--box-scale", o.box_scale, "half side l of the box")
      ->check(CLI::PositiveNumber);

  auto* pre = app.add_subcommand("preorder-membership", "certificate in the truncated preordering");
  poly_options(pre);
  solver_options(pre);
  pre->add_option("--eps", o.eps, "perturbation weight");
  pre->add_option("--r-max", o.r_max, "largest r tried");
  pre->add_option("--perturbation", o.perturbation, "theta-small (default) | theta-big");
  pre->add_option("--system", o.system_file, "system description file");

  auto* probe = app.add_subcommand("degree-probe", "minimal r over random nonnegative samples");
  solver_options(probe);
  probe->add_option("-n,--nvars", o.nvars, "number of variables")->check(CLI::PositiveNumber);
  probe->add_option("-d,--degree", o.degree, "degree of the samples")
      ->check(CLI::NonNegativeNumber);
  probe->add_option("-N,--coef-bound", o.coef_bound, "coefficients uniform in [-N, N]");
  probe->add_option("--eps", o.eps, "perturbation weight");
  probe->add_option("--samples", o.samples, "number of draws");
  probe->add_option("--seed", o.seed, "SplitMix64 seed");
  probe->add_option("--r-max", o.r_max, "largest r tried per sample");

  auto* verify = app.add_subcommand("verify", "recheck a stored certificate without the solver");
  poly_options(verify);
  verify->add_option("--certificate", o.certificate_file, "certificate or report JSON");
  verify->add_option("--eps", o.eps, "perturbation weight (default: the certificate's)");
  verify->add_option("--perturbation", o.perturbation,
                     "perturbation family (default: the certificate's polynomial)");
  verify->add_flag("--json", o.json, "emit JSON");
  verify->add_option("-o", o.output, "write the report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    return Command(out, err, o).run(app.get_subcommands().front()->get_name());
  } catch (const NotFoundWithinRMax& e) {
    err << "error: " << e.what() << '\n';
    return kExitNegative;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed certificate: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace sosperturb::cli
