#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "poisson4d/casimir.hpp"
#include "poisson4d/darboux.hpp"
#include "poisson4d/dynamics.hpp"
#include "poisson4d/gallery.hpp"
#include "poisson4d/halton.hpp"
#include "poisson4d/normal_form.hpp"
#include "poisson4d/reduce3d.hpp"
#include "poisson4d/structure_io.hpp"

namespace p4d::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Pfaffian and bracket obstruction are compared against 1e-12 |J|_F^2.
constexpr double kPfaffianRel = 1e-12;
constexpr double kOrthogonalityRel = 1e-12;
constexpr double kCasimirRate = 1e-10;
constexpr double kIndependenceRatio = 1e-6;

struct RunConfig {
  std::string command;
  std::string input;
  int samples = 200;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  bool serial = false;
  bool normalize = false;
  std::vector<double> x0;
  double t_end = 1.0;
  double dt = 1e-3;
  bool mu_from_pipeline = false;
  std::string hamiltonian;
  std::string trajectory;
  std::optional<double> leaf;
  bool list = false;

  double tolerance() const { return tol.value_or(1e-8); }
};

ojson point_json(const Point4& x) { return ojson::array({x[0], x[1], x[2], x[3]}); }

ojson sigma_json(const SigmaSet& s) {
  static constexpr const char* kKeys[6] = {"s12", "s13", "s14", "s23", "s24", "s34"};
  ojson j;
  for (std::size_t p = 0; p < 6; ++p) j[kKeys[p]] = s.values[p];
  return j;
}

void flatten(const ojson& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string render(const ojson& report, const std::string& format) {
  if (format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report, "", rows);
    std::string s = "key,value\n";
    for (const auto& [k, v] : rows) s += csv_quote(k) + "," + csv_quote(v) + "\n";
    return s;
  }
  return report.dump(2) + "\n";
}

void emit(const std::string& text, const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw FormatError(c.out, "cannot write output file");
  f << text;
}

double leaf_constant(const RunConfig& c, const StructureDefinition& d, const FamilyStructure& f) {
  if (c.leaf) return *c.leaf;
  if (d.leaf) return *d.leaf;
  return f.domain.axis(4).mid();
}

// check ---------------------------------------------------------------------

ojson check_report(const StructureDefinition& d, const FamilyStructure& f, const RunConfig& c, bool& pass) {
  ojson r;
  r["command"] = "check";
  r["name"] = d.name;
  r["samples"] = c.samples;
  r["seed"] = c.seed;
  r["tolerance"] = c.tolerance();
  if (d.leaf_limit) {
    double leaf = leaf_constant(c, d, f);
    ThreeDStructure s = leaf_reduce(f, leaf);
    double res = max_jacobi3_residual(s, c.samples, c.seed);
    r["route"] = "leaf";
    r["leaf"] = leaf;
    r["jacobi3"] = {{"max_residual", res}, {"derivatives", "analytic"}};
    pass = res <= c.tolerance();
    r["passed"] = pass;
    return r;
  }
  r["route"] = "family";
  pass = true;
  CompatibilityResult comp = check_sigma_compatibility(f.sigma);
  r["compatibility"] = {{"ok", comp.ok},
                        {"residual_13_24", comp.residual_13_24},
                        {"residual_14_23", comp.residual_14_23},
                        {"sigma", comp.sigma}};
  pass = pass && comp.ok && f.sigma.any_nonzero();

  HypothesisReport hyp = check_hypotheses(f, c.samples, c.seed);
  ojson h;
  h["min_abs_eta"] = hyp.min_abs_eta;
  h["min_abs_psi"] = hyp.min_abs_psi;
  h["min_abs_phi_difference"] = hyp.min_abs_phi_diff;
  h["flags"] = hyp.flags;
  h["passed"] = hyp.passed();
  r["hypotheses"] = h;
  pass = pass && hyp.passed();

  std::vector<Point4> pts = halton_points(f.domain, static_cast<std::size_t>(c.samples), c.seed);
  try {
    double res = max_jacobi_residual(family_field(f), pts);
    r["jacobi"] = {{"max_residual", res}, {"derivatives", "analytic"}, {"passed", res <= c.tolerance()}};
    pass = pass && res <= c.tolerance();

    struct Row {
      int rank;
      double pf, bracket;
    };
    std::vector<Row> rows = map_points<Row>(pts, [&f](const Point4& x) {
      Mat4 j = evaluate_matrix(f, x);
      RankInfo info = rank_and_determinant(j);
      double scale = std::max(1e-300, frobenius_norm(j) * frobenius_norm(j));
      return Row{info.rank, std::fabs(info.pfaffian) / scale, bracket_obstruction(j) / scale};
    });
    int min_rank = 4, max_rank = 0;
    double pf = 0.0, br = 0.0;
    for (const Row& row : rows) {
      min_rank = std::min(min_rank, row.rank);
      max_rank = std::max(max_rank, row.rank);
      pf = std::max(pf, row.pf);
      br = std::max(br, row.bracket);
    }
    bool ok = min_rank == 2 && max_rank == 2 && pf <= kPfaffianRel && br <= kPfaffianRel;
    r["rank"] = {{"min_rank", min_rank},
                 {"max_rank", max_rank},
                 {"max_relative_pfaffian", pf},
                 {"max_relative_bracket_obstruction", br},
                 {"passed", ok}};
    pass = pass && ok;
  } catch (const EvalError& e) {
    r["evaluation_error"] = e.what();
    pass = false;
  }
  if (comp.ok && f.sigma.any_nonzero()) r["case"] = classify(f.sigma).str();
  r["passed"] = pass;
  return r;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
  StructureDefinition d = load_definition(c.input);
  FamilyStructure f = d.build();
  bool pass = false;
  ojson r = check_report(d, f, c, pass);
  emit(render(r, c.format), c, out);
  return pass ? kPass : kFail;
}

// classify ------------------------------------------------------------------

int cmd_classify(const RunConfig& c, std::ostream& out) {
  StructureDefinition d = load_definition(c.input);
  FamilyStructure f = d.build();
  CaseLabel label = classify(f.sigma);
  ojson r;
  r["command"] = "classify";
  r["name"] = d.name;
  r["case"] = label.str();
  ojson nz = ojson::array();
  for (int p = 0; p < 6; ++p) {
    auto [i, j] = pair_at(p);
    if (!f.sigma.is_zero(i, j)) nz.push_back(std::to_string(i) + std::to_string(j));
  }
  r["nonzero_pairs"] = nz;
  if (c.normalize) {
    if (label.family != CaseFamily::I) {
      r["normalization"] = {{"applied", false}, {"note", "sign normalization applies when all couplings are nonzero"}};
    } else {
      SignFlips flips = sigma_positive_flips(f.sigma);
      FamilyStructure n = sigma_positive_normalize(f);
      SigmaFactors fac = factor_sigma(n.sigma);
      ojson nj;
      nj["applied"] = true;
      nj["branch"] = flips.branch;
      nj["flip_phi"] = flips.flip_phi;
      nj["flip_psi"] = flips.flip_psi;
      nj["sigma"] = sigma_json(n.sigma);
      nj["factors"] = fac.values;
      ojson psi = ojson::array(), phi = ojson::array();
      for (std::size_t i = 0; i < 4; ++i) {
        psi.push_back(n.psi[i].expr().str());
        phi.push_back(n.phi[i].expr().str());
      }
      nj["psi"] = psi;
      nj["phi"] = phi;
      r["normalization"] = nj;
    }
  }
  emit(render(r, c.format), c, out);
  return kPass;
}

// casimirs ------------------------------------------------------------------

int cmd_casimirs(const RunConfig& c, std::ostream& out) {
  StructureDefinition d = load_definition(c.input);
  FamilyStructure f = d.build();
  if (d.leaf_limit) {
    ojson r;
    r["command"] = "casimirs";
    r["name"] = d.name;
    r["note"] = "limit structures are handled by reduce3d";
    r["passed"] = false;
    emit(render(r, c.format), c, out);
    return kFail;
  }
  CasimirPair p = casimirs_for(f);
  CasimirReport rep = verify_casimir(f, p, c.samples, c.seed);
  ojson r;
  r["command"] = "casimirs";
  r["name"] = d.name;
  r["case"] = p.label().str();
  r["formula"] = p.formula_id();
  for (int k = 1; k <= 2; ++k) {
    std::string key = "C" + std::to_string(k);
    r[key] = {{"expression", p.describe(k)}, {"symbolic", p.expression(k).has_value()}};
  }
  bool pass = rep.max_residual <= c.tolerance() && rep.independent(kIndependenceRatio);
  r["verification"] = {{"samples", rep.samples},
                       {"max_residual", rep.max_residual},
                       {"max_residual_C1", rep.max_residual_each[0]},
                       {"max_residual_C2", rep.max_residual_each[1]},
                       {"min_second_singular_value", rep.min_second_singular},
                       {"min_singular_ratio", rep.min_singular_ratio},
                       {"tolerance", c.tolerance()},
                       {"independent", rep.independent(kIndependenceRatio)}};
  r["passed"] = pass;
  emit(render(r, c.format), c, out);
  return pass ? kPass : kFail;
}

// darboux -------------------------------------------------------------------

int cmd_darboux(const RunConfig& c, std::ostream& out) {
  StructureDefinition d = load_definition(c.input);
  FamilyStructure f = d.build();
  bool checked = false;
  ojson chk = check_report(d, f, c, checked);
  if (!checked || d.leaf_limit) {
    ojson r;
    r["command"] = "darboux";
    r["name"] = d.name;
    r["check"] = chk;
    r["note"] = d.leaf_limit ? "limit structures have no 4D Darboux pipeline" : "structure failed check";
    r["passed"] = false;
    emit(render(r, c.format), c, out);
    return kFail;
  }
  DarbouxPipeline p = build_pipeline(f, c.samples);
  PipelineReport rep = verify_pipeline(p, c.samples, c.seed);
  ojson r;
  r["command"] = "darboux";
  r["name"] = d.name;
  r["case"] = p.label.str();
  r["retained_pair"] = p.retained;
  r["stage1"] = p.stage1.description;
  r["stage2"] = p.stage2.description;
  if (p.closed_form_expression) r["eta_pp"] = p.closed_form_expression->str();
  bool pass = rep.max_deviation <= c.tolerance() && rep.eta_pp_sign_constant && rep.min_abs_eta_pp > 0.0 &&
              rep.max_closed_form_gap <= c.tolerance();
  r["verification"] = {{"samples", rep.samples},
                       {"max_deviation", rep.max_deviation},
                       {"max_frozen_rows", rep.max_frozen_rows},
                       {"max_closed_form_gap", rep.max_closed_form_gap},
                       {"min_abs_eta_pp", rep.min_abs_eta_pp},
                       {"max_abs_eta_pp", rep.max_abs_eta_pp},
                       {"eta_pp_sign_constant", rep.eta_pp_sign_constant},
                       {"min_abs_det_stage1", rep.min_abs_det_stage1},
                       {"min_abs_det_stage2", rep.min_abs_det_stage2},
                       {"tolerance", c.tolerance()}};
  r["passed"] = pass;
  emit(render(r, c.format), c, out);
  return pass ? kPass : kFail;
}

// integrate -----------------------------------------------------------------

std::string trajectory_csv(const Trajectory& t) {
  std::string s = "t,x1,x2,x3,x4,H,C1,C2\n";
  for (std::size_t i = 0; i < t.t.size(); ++i) {
    s += format_number(t.t[i]);
    for (double v : t.x[i]) s += "," + format_number(v);
    s += "," + format_number(t.h[i]);
    s += "," + (t.c1.empty() ? std::string() : format_number(t.c1[i]));
    s += "," + (t.c2.empty() ? std::string() : format_number(t.c2[i]));
    s += "\n";
  }
  return s;
}

int cmd_integrate(const RunConfig& c, std::ostream& out) {
  StructureDefinition d = load_definition(c.input);
  FamilyStructure f = d.build();
  std::string htext = !c.hamiltonian.empty() ? c.hamiltonian : d.hamiltonian;
  if (htext.empty()) throw FormatError("hamiltonian", "no Hamiltonian in the file or on the command line");
  Expr h;
  try {
    h = parse(htext);
  } catch (const ParseError& e) {
    throw FormatError("hamiltonian", e.what());
  }
  Point4 x0{};
  PoissonSystem sys;
  if (d.leaf_limit) {
    if (c.x0.size() != 3 && c.x0.size() != 4) throw FormatError("--x0", "expected 3 or 4 comma-separated values");
    double leaf = leaf_constant(c, d, f);
    sys = PoissonSystem::from_three_d(leaf_reduce(f, leaf), h);
    x0 = {c.x0[0], c.x0[1], c.x0[2], leaf};
  } else {
    if (c.x0.size() != 4) throw FormatError("--x0", "expected 4 comma-separated values");
    sys = PoissonSystem::from_family(f, h);
    x0 = {c.x0[0], c.x0[1], c.x0[2], c.x0[3]};
  }
  Trajectory t;
  if (c.mu_from_pipeline) {
    if (d.leaf_limit) throw FormatError("--mu-from-pipeline", "limit structures have no Darboux pipeline");
    auto p = std::make_shared<const DarbouxPipeline>(build_pipeline(f, c.samples));
    t = integrate_reparametrized(
        sys, [p](const Point4& x) { return 1.0 / p->eta_pp(x); }, x0, c.t_end, c.dt);
  } else {
    t = integrate(sys, x0, c.t_end, c.dt);
  }
  bool orth_ok = t.max_orthogonality <= kOrthogonalityRel;
  bool rate_ok = t.max_casimir_rate <= kCasimirRate;
  ojson r;
  r["command"] = "integrate";
  r["name"] = d.name;
  r["hamiltonian"] = h.str();
  r["x0"] = point_json(x0);
  r["dt"] = c.dt;
  r["t_end_requested"] = c.t_end;
  r["t_end_reached"] = t.t_end();
  r["steps"] = t.steps();
  r["truncated"] = t.truncated;
  r["stop_reason"] = t.stop_reason;
  r["reparametrized"] = c.mu_from_pipeline;
  r["drift"] = {{"H", t.drift_h}, {"C1", t.drift_c1}, {"C2", t.drift_c2}};
  r["max_orthogonality"] = t.max_orthogonality;
  r["max_casimir_rate"] = t.max_casimir_rate;
  r["x_final"] = point_json(t.x.back());
  r["passed"] = orth_ok && rate_ok;
  if (!c.trajectory.empty()) {
    std::ofstream tf(c.trajectory, std::ios::binary);
    if (!tf) throw FormatError(c.trajectory, "cannot write trajectory file");
    tf << trajectory_csv(t);
  }
  emit(c.format == "csv" ? trajectory_csv(t) : render(r, c.format), c, out);
  return orth_ok && rate_ok ? kPass : kFail;
}

// reduce3d ------------------------------------------------------------------

int cmd_reduce3d(const RunConfig& c, std::ostream& out) {
  StructureDefinition d = load_definition(c.input);
  FamilyStructure f = d.build();
  double leaf = leaf_constant(c, d, f);
  ThreeDStructure s = leaf_reduce(f, leaf);
  ExprMatrix3 m = s.matrix();
  double res = max_jacobi3_residual(s, c.samples, c.seed);
  ojson r;
  r["command"] = "reduce3d";
  r["name"] = d.name;
  r["leaf"] = leaf;
  r["eta"] = s.eta.str();
  r["phi_tilde"] = {s.phi[0].expr().str(), s.phi[1].expr().str(), s.phi[2].expr().str()};
  r["matrix"] = {{"J12", m.j12.str()}, {"J13", m.j13.str()}, {"J23", m.j23.str()}};
  r["jacobi3"] = {{"samples", c.samples}, {"max_residual", res}, {"tolerance", c.tolerance()}};
  bool pass = res <= c.tolerance();
  r["passed"] = pass;
  emit(render(r, c.format), c, out);
  return pass ? kPass : kFail;
}

// gallery -------------------------------------------------------------------

int cmd_gallery(const RunConfig& c, std::ostream& out) {
  if (!c.out.empty() && !c.list) {
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    for (const StructureDefinition& d : gallery()) {
      std::string path = c.out + "/" + d.name + ".json";
      std::ofstream f(path, std::ios::binary);
      if (!f) throw FormatError(path, "cannot write gallery file");
      f << definition_to_json(d).dump(2) << "\n";
    }
    out << "wrote " << gallery().size() << " definitions to " << c.out << "\n";
    return kPass;
  }
  ojson r = ojson::array();
  for (const StructureDefinition& d : gallery()) {
    r.push_back({{"name", d.name}, {"description", d.description}, {"limit", d.leaf_limit}});
  }
  if (c.format == "csv") {
    std::string s = "name,description,limit\n";
    for (const StructureDefinition& d : gallery())
      s += csv_quote(d.name) + "," + csv_quote(d.description) + "," + (d.leaf_limit ? "true" : "false") + "\n";
    emit(s, c, out);
  } else {
    emit(r.dump(2) + "\n", c, out);
  }
  return kPass;
}

void add_common(CLI::App* sub, RunConfig& c, bool input) {
  if (input) sub->add_option("input", c.input, "structure definition file (.json or .toml)")->required();
  sub->add_option("--samples", c.samples, "number of Halton sample points")->check(CLI::PositiveNumber);
  sub->add_option("--tol", c.tol, "pass/fail tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "offset into the Halton sequence");
  sub->add_option("--out", c.out, "write the report to this path");
  sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--serial", c.serial, "run sample sweeps on one thread");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Four-dimensional Poisson family: validation, Casimirs, Darboux reduction and dynamics"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  CLI::App* check = app.add_subcommand("check", "validate a structure: couplings, hypotheses, Jacobi, rank");
  add_common(check, c, true);
  check->add_option("--leaf", c.leaf, "leaf constant for limit structures");

  CLI::App* cls = app.add_subcommand("classify", "case label of the coupling pattern");
  add_common(cls, c, true);
  cls->add_flag("--normalize", c.normalize, "report the sign normalization and coupling factors");

  CLI::App* cas = app.add_subcommand("casimirs", "construct and verify the Casimir pair");
  add_common(cas, c, true);

  CLI::App* dar = app.add_subcommand("darboux", "build and verify the Darboux pipeline");
  add_common(dar, c, true);

  CLI::App* integ = app.add_subcommand("integrate", "RK4 trajectory with first-integral monitoring");
  add_common(integ, c, true);
  integ->add_option("--x0", c.x0, "initial point a,b,c,d")->delimiter(',')->required();
  integ->add_option("--t-end", c.t_end, "final time")->check(CLI::PositiveNumber);
  integ->add_option("--dt", c.dt, "step size")->check(CLI::PositiveNumber);
  integ->add_flag("--mu-from-pipeline", c.mu_from_pipeline, "integrate dx/dtau = J grad H / eta''");
  integ->add_option("--hamiltonian", c.hamiltonian, "override the file's Hamiltonian");
  integ->add_option("--trajectory", c.trajectory, "also write the trajectory CSV here");
  integ->add_option("--leaf", c.leaf, "leaf constant for limit structures");

  CLI::App* red = app.add_subcommand("reduce3d", "reduce a limit structure to the leaf x4 = c");
  add_common(red, c, true);
  red->add_option("--leaf", c.leaf, "leaf constant c");

  CLI::App* gal = app.add_subcommand("gallery", "list or write the bundled definitions");
  add_common(gal, c, false);
  gal->add_flag("--list", c.list, "list entries");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kPass : kUsage;
  }
  struct ExecScope {
    Exec saved = default_exec();
    ~ExecScope() { set_default_exec(saved); }
  } scope;
  if (c.serial) set_default_exec(Exec::serial);

  try {
    if (check->parsed()) return cmd_check(c, out);
    if (cls->parsed()) return cmd_classify(c, out);
    if (cas->parsed()) return cmd_casimirs(c, out);
    if (dar->parsed()) return cmd_darboux(c, out);
    if (integ->parsed()) return cmd_integrate(c, out);
    if (red->parsed()) return cmd_reduce3d(c, out);
    if (gal->parsed()) return cmd_gallery(c, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}

}  // namespace p4d::cli
