#include "kktcert/cli.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "kktcert/jsonio.hpp"
#include "kktcert/solver.hpp"
#include "kktcert/version.hpp"

namespace kktcert {

namespace {

struct CommonOptions {
  std::string input_path;
  std::uint64_t seed = 42;
  int samples = 1000;
  bool json = false;
  std::string at_text;
  Tolerances tol;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_at) {
  cmd->add_option("input", o.input_path, "problem file")->required();
  cmd->add_option("--seed", o.seed, "RNG seed recorded in certificates");
  cmd->add_option("--samples", o.samples, "sampling budget per constraint");
  cmd->add_flag("--json", o.json, "emit one JSON document on stdout");
  if (with_at)
    cmd->add_option("--at", o.at_text, "point as comma-separated reals")
        ->required();
  cmd->add_option("--eps-active", o.tol.eps_active, "activation threshold");
  cmd->add_option("--eps-grad", o.tol.eps_grad, "nondegeneracy gradient floor");
  cmd->add_option("--eps-kkt", o.tol.eps_kkt, "KKT residual bound");
  cmd->add_option("--eps-feas", o.tol.eps_feas, "feasibility slack");
}

Vec parse_point(const std::string& text, int n) {
  Vec x;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos
                                           ? std::string::npos
                                           : comma - pos);
    // trim
    std::size_t b = tok.find_first_not_of(" \t");
    std::size_t e = tok.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw std::invalid_argument("malformed point '" + text + "'");
    tok = tok.substr(b, e - b + 1);
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw std::invalid_argument("malformed coordinate '" + tok + "'");
    x.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                " coordinates, problem dimension is " +
                                std::to_string(n));
  return x;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt(const Vec& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += fmt(x[i]);
  }
  return s + ")";
}

Json document(const char* command, const CommonOptions& o) {
  return Json{{"command", command},
              {"toolkit_version", kVersion},
              {"rng", SplitMix64::kName},
              {"seed", o.seed},
              {"input", o.input_path},
              {"tolerances", o.tol}};
}

void emit(const Json& doc, std::ostream& out) {
  out << dump_json(doc) << "\n";
}

int cmd_solve(const CommonOptions& o, const BarrierSchedule& schedule,
              bool trace, std::ostream& out, std::ostream& err) {
  Problem p = load_problem_file(o.input_path);
  SlaterSearchResult slater = slater_search(p, o.seed, o.tol);
  if (!slater.found()) {
    if (o.json) {
      Json doc = document("solve", o);
      doc["converged"] = false;
      doc["error"] = "no strictly feasible point found";
      doc["slater_failure"] = slater.failure;
      emit(doc, out);
    } else {
      out << "solve: no strictly feasible point found (best max_j g_j = "
          << fmt(slater.failure.best_phi) << ")\n";
    }
    return 1;
  }

  SolveResult r = barrier_solve(p, *slater.certificate, schedule, o.tol);
  if (trace)
    for (const BarrierStage& s : r.stages) err << dump_json(Json(s)) << "\n";

  if (o.json) {
    Json doc = document("solve", o);
    doc["schedule"] = Json{{"mu0", schedule.mu0},
                           {"factor", schedule.factor},
                           {"stages", schedule.stages}};
    doc["converged"] = r.converged;
    doc["x"] = r.x;
    doc["fstar"] = r.fstar;
    doc["kkt"] = r.kkt;
    doc["stages_run"] = static_cast<int>(r.stages.size());
    emit(doc, out);
  } else {
    out << "solve: " << (r.converged ? "converged" : "did not converge")
        << "\n  x      = " << fmt(r.x) << "\n  f(x)   = " << fmt(r.fstar)
        << "\n  lambda = " << fmt(r.kkt.lambda)
        << "\n  stationarity = " << fmt(r.kkt.stationarity_residual)
        << ", complementarity = " << fmt(r.kkt.complementarity_residual)
        << "\n  stages = " << r.stages.size() << "\n";
  }
  return r.converged ? 0 : 1;
}

int cmd_certify(const CommonOptions& o, int nondeg_samples, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  Vec x = parse_point(o.at_text, p.n);
  CertifyConfig config;
  config.seed = o.seed;
  config.falsify_pairs = o.samples;
  config.nondegeneracy_samples = nondeg_samples;
  GlobalOptimalityCertificate cert = certify_global(p, x, config, o.tol);

  if (o.json) {
    Json doc = document("certify", o);
    doc["at"] = x;
    doc["certificate"] = cert;
    emit(doc, out);
  } else {
    out << "certify " << fmt(x) << ": " << to_string(cert.status) << "\n";
    if (cert.slater)
      out << "  slater: x0 = " << fmt(cert.slater->x0)
          << ", margin = " << fmt(cert.slater->margin) << "\n";
    if (cert.slater_failure)
      out << "  slater search failed, best max_j g_j = "
          << fmt(cert.slater_failure->best_phi) << "\n";
    if (cert.nondegeneracy) {
      int tested = 0, failed = 0;
      for (const auto& c : cert.nondegeneracy->per_constraint) {
        tested += c.samples_tested;
        failed += static_cast<int>(c.failures.size());
      }
      out << "  nondegeneracy: " << (failed == 0 ? "passed" : "FAILED")
          << " (" << tested << " boundary samples, " << failed
          << " failures)\n";
    }
    out << "  convexity: " << cert.convexity_violations.size()
        << " confirmed violation(s), " << cert.unconfirmed_violations.size()
        << " unconfirmed\n";
    if (cert.kkt)
      out << "  lambda = " << fmt(cert.kkt->lambda)
          << ", stationarity = " << fmt(cert.kkt->stationarity_residual)
          << ", complementarity = " << fmt(cert.kkt->complementarity_residual)
          << "\n";
    if (cert.fritz_john)
      out << "  fritz-john: lambda0 = " << fmt(cert.fritz_john->lambda0)
          << ", residual = " << fmt(cert.fritz_john->residual) << "\n";
  }
  return cert.status == CertificationStatus::kCertifiedModuloSampling ? 0 : 1;
}

int cmd_check_slater(const CommonOptions& o, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  SlaterSearchResult r = slater_search(p, o.seed, o.tol);
  if (o.json) {
    Json doc = document("check-slater", o);
    doc["found"] = r.found();
    doc["certificate"] = r.found() ? Json(*r.certificate) : Json(nullptr);
    doc["failure"] = r.found() ? Json(nullptr) : Json(r.failure);
    emit(doc, out);
  } else if (r.found()) {
    out << "slater: found x0 = " << fmt(r.certificate->x0)
        << " with margin " << fmt(r.certificate->margin) << "\n";
  } else {
    out << "slater: no strictly feasible point found (best max_j g_j = "
        << fmt(r.failure.best_phi) << " at " << fmt(r.failure.best_x) << ")\n";
  }
  return r.found() ? 0 : 1;
}

int cmd_check_nondegeneracy(const CommonOptions& o, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  SlaterSearchResult slater = slater_search(p, o.seed, o.tol);
  NondegeneracyReport report = nondegeneracy_check(
      p, slater.certificate, o.samples, SplitMix64(o.seed).split(101).seed(),
      o.tol);
  if (o.json) {
    Json doc = document("check-nondegeneracy", o);
    doc["slater_found"] = slater.found();
    doc["report"] = report;
    emit(doc, out);
  } else {
    out << "nondegeneracy: " << (report.passed() ? "passed" : "FAILED") << "\n";
    for (const auto& c : report.per_constraint) {
      out << "  g" << c.j << ": " << c.samples_tested << " samples";
      if (c.min_gradient_norm)
        out << ", min ||grad|| = " << fmt(*c.min_gradient_norm);
      for (const auto& f : c.failures)
        out << "\n    failure at " << fmt(f.point)
            << " with ||grad|| = " << fmt(f.gradient_norm);
      out << "\n";
    }
  }
  return report.passed() ? 0 : 1;
}

int cmd_falsify(const CommonOptions& o, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  SlaterSearchResult slater = slater_search(p, o.seed, o.tol);
  if (!slater.found())
    throw std::invalid_argument(
        "falsify-convexity requires a strictly feasible point; none found");
  FalsifyResult r = convexity_falsify(p, *slater.certificate, o.samples,
                                      SplitMix64(o.seed).split(102).seed(),
                                      o.tol);
  if (o.json) {
    Json doc = document("falsify-convexity", o);
    doc["pairs_per_constraint"] = o.samples;
    doc["confirmed"] = r.confirmed;
    doc["unconfirmed"] = r.unconfirmed;
    emit(doc, out);
  } else if (r.confirmed.empty()) {
    out << "convexity: no confirmed violations ("
        << r.unconfirmed.size() << " unconfirmed candidates)\n";
  } else {
    out << "convexity: " << r.confirmed.size() << " confirmed violation(s)\n";
    for (const auto& v : r.confirmed)
      out << "  g" << v.j << ": x = " << fmt(v.x) << ", y = " << fmt(v.y)
          << ", <grad,y-x> = " << fmt(v.inner_product) << ", witness t = "
          << fmt(v.witness_t) << " at " << fmt(v.witness_point)
          << " with g = " << fmt(v.witness_gval) << "\n";
  }
  return r.confirmed.empty() ? 0 : 1;
}

int cmd_recover(const CommonOptions& o, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  Vec x = parse_point(o.at_text, p.n);
  KktPoint kkt = recover_multipliers(p, x, o.tol);
  if (o.json) {
    Json doc = document("recover-multipliers", o);
    doc["kkt"] = kkt;
    emit(doc, out);
  } else {
    out << "multipliers at " << fmt(x) << ":\n  lambda = " << fmt(kkt.lambda)
        << "\n  stationarity = " << fmt(kkt.stationarity_residual)
        << "\n  complementarity = " << fmt(kkt.complementarity_residual)
        << "\n";
  }
  return kkt.stationarity_residual <= o.tol.eps_kkt &&
                 kkt.complementarity_residual <= o.tol.eps_kkt
             ? 0
             : 1;
}

int cmd_fritz_john(const CommonOptions& o, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  Vec x = parse_point(o.at_text, p.n);
  FritzJohnCertificate fj = fritz_john_probe(p, x, o.tol);
  bool degenerate = is_degenerate(fj, o.tol);
  if (o.json) {
    Json doc = document("fritz-john", o);
    doc["certificate"] = fj;
    doc["degenerate"] = degenerate;
    emit(doc, out);
  } else {
    out << "fritz-john at " << fmt(x) << ": lambda0 = " << fmt(fj.lambda0)
        << ", lambda = " << fmt(fj.lambda)
        << ", residual = " << fmt(fj.residual) << "\n  "
        << (degenerate ? "DEGENERATE (Fritz-John point with lambda0 ~ 0)"
                       : "not degenerate")
        << "\n";
  }
  return degenerate ? 1 : 0;
}

int cmd_oracle(const CommonOptions& o, int grid, int rounds,
               std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  OracleResult r = brute_force_oracle(p, grid, rounds);
  if (o.json) {
    Json doc = document("oracle", o);
    doc["grid_points_per_axis"] = grid;
    doc["result"] = r;
    emit(doc, out);
  } else {
    out << "oracle: value = " << fmt(r.value) << " at " << fmt(r.x)
        << " (resolution " << fmt(r.grid_resolution) << ")\n";
  }
  return 0;
}

int cmd_probe_lagrangian(const CommonOptions& o, double fstar_override,
                         bool have_fstar, std::ostream& out) {
  Problem p = load_problem_file(o.input_path);
  Vec x = parse_point(o.at_text, p.n);
  KktPoint kkt = recover_multipliers(p, x, o.tol);
  double fstar = have_fstar ? fstar_override : evaluate(p.objective, x);
  LagrangianProbeResult r =
      lagrangian_probe(p, kkt, fstar, o.samples, o.seed, o.tol);
  if (o.json) {
    Json doc = document("probe-lagrangian", o);
    doc["at"] = x;
    doc["fstar"] = fstar;
    doc["result"] = r;
    emit(doc, out);
  } else {
    out << "lagrangian probe at " << fmt(x) << " (fstar = " << fmt(fstar)
        << "):\n  lambda = " << fmt(kkt.lambda)
        << "\n  min Hessian eigenvalue = "
        << fmt(r.min_hessian_eigenvalue_seen)
        << "\n  convex evidence = " << (r.convex_evidence ? "yes" : "no")
        << "\n  nonnegativity violations = " << r.nonneg_violations.size()
        << " (of " << r.samples_used << " samples)\n";
  }
  return r.convex_evidence && r.nonneg_violations.empty() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"KKT certification toolkit for convex feasible sets with "
               "possibly nonconvex defining functions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions solve_o, certify_o, slater_o, nondeg_o, falsify_o, recover_o,
      fj_o, oracle_o, probe_o;

  BarrierSchedule schedule;
  bool trace = false;
  CLI::App* solve = app.add_subcommand("solve", "log-barrier solve to a KKT point");
  add_common(solve, solve_o, false);
  solve->add_option("--mu0", schedule.mu0, "initial barrier weight");
  solve->add_option("--factor", schedule.factor, "barrier shrink factor");
  solve->add_option("--stages", schedule.stages, "barrier stages");
  solve->add_flag("--trace", trace, "emit per-stage JSON lines on stderr");

  int nondeg_samples = 200;
  CLI::App* certify = app.add_subcommand(
      "certify", "certify a point as a global minimizer (modulo sampling)");
  add_common(certify, certify_o, true);
  certify->add_option("--nondeg-samples", nondeg_samples,
                      "boundary samples per constraint");

  CLI::App* slater = app.add_subcommand("check-slater",
                                        "search for a strictly feasible point");
  add_common(slater, slater_o, false);

  CLI::App* nondeg = app.add_subcommand(
      "check-nondegeneracy", "sample boundary points for vanishing gradients");
  add_common(nondeg, nondeg_o, false);
  nondeg_o.samples = 200;

  CLI::App* falsify = app.add_subcommand(
      "falsify-convexity", "search for supporting-hyperplane violations");
  add_common(falsify, falsify_o, false);

  CLI::App* recover = app.add_subcommand(
      "recover-multipliers", "nonnegative least-squares multipliers at a point");
  add_common(recover, recover_o, true);

  CLI::App* fj = app.add_subcommand("fritz-john",
                                    "Fritz-John simplex probe at a point");
  add_common(fj, fj_o, true);

  int grid = 201, rounds = 6;
  CLI::App* oracle = app.add_subcommand("oracle",
                                        "brute-force feasible-grid minimizer");
  add_common(oracle, oracle_o, false);
  oracle->add_option("--grid", grid, "grid points per axis");
  oracle->add_option("--rounds", rounds, "refinement rounds");

  double fstar_override = 0.0;
  CLI::App* probe = app.add_subcommand(
      "probe-lagrangian", "sample the Lagrangian for convexity/nonnegativity");
  add_common(probe, probe_o, true);
  CLI::Option* fstar_opt =
      probe->add_option("--fstar", fstar_override,
                        "optimal value (default: objective at --at)");

  std::vector<std::string> argv_owned;
  argv_owned.push_back("kktcert");
  for (const std::string& a : args) argv_owned.push_back(a);
  std::vector<const char*> argv;
  for (const std::string& a : argv_owned) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_o, schedule, trace, out, err);
    if (certify->parsed()) return cmd_certify(certify_o, nondeg_samples, out);
    if (slater->parsed()) return cmd_check_slater(slater_o, out);
    if (nondeg->parsed()) return cmd_check_nondegeneracy(nondeg_o, out);
    if (falsify->parsed()) return cmd_falsify(falsify_o, out);
    if (recover->parsed()) return cmd_recover(recover_o, out);
    if (fj->parsed()) return cmd_fritz_john(fj_o, out);
    if (oracle->parsed()) return cmd_oracle(oracle_o, grid, rounds, out);
    if (probe->parsed())
      return cmd_probe_lagrangian(probe_o, fstar_override,
                                  fstar_opt->count() > 0, out);
  } catch (const ProblemFormatError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    // Points that never reached the math (wrong arity, unparseable reals)
    // are usage errors; violated math preconditions are failed runs.
    std::string what = e.what();
    err << "error: " << what << "\n";
    bool usage = what.rfind("malformed", 0) == 0 ||
                 what.find("coordinates") != std::string::npos;
    return usage ? 2 : 1;
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    err << "error: " << what << "\n";
    return what.rfind("cannot open", 0) == 0 ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace kktcert
