#include "twistsym/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "twistsym/compat.hpp"
#include "twistsym/numcheck.hpp"
#include "twistsym/reduce.hpp"
#include "twistsym/symmetry.hpp"
#include "twistsym/variational.hpp"

namespace twistsym::cli {

using nlohmann::ordered_json;

namespace {

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A problem file resolved against its declaration block.
struct Problem {
  ordered_json doc;
  std::optional<JetContext> ctx;
  std::vector<SolvedEquation> equations;

  const JetContext& context() const { return *ctx; }
  bool has(const char* key) const { return doc.contains(key) && !doc[key].is_null(); }

  Expr expr(const ordered_json& j) const {
    if (j.is_number_integer()) return Expr(j.get<std::int64_t>());
    if (!j.is_string()) throw BadInput("expected an expression string, got " + j.dump());
    return ctx->parse(j.get<std::string>());
  }
  Expr expr(const std::string& s) const { return ctx->parse(s); }
  Expr get(const char* key) const {
    if (!has(key)) throw BadInput(std::string("problem file has no '") + key + "' entry");
    return expr(doc[key]);
  }

  std::vector<Expr> list(const ordered_json& j) const {
    std::vector<Expr> out;
    if (!j.is_array()) {
      out.push_back(expr(j));
      return out;
    }
    for (const auto& e : j) out.push_back(expr(e));
    return out;
  }

  SolvedSystem system() const {
    if (equations.empty()) throw BadInput("problem file has no equations");
    return SolvedSystem(*ctx, equations);
  }

  PointVectorField field() const {
    if (!has("field")) throw BadInput("problem file has no 'field' entry");
    const auto& f = doc["field"];
    std::vector<Expr> xi = f.contains("xi") ? list(f["xi"]) : std::vector<Expr>(static_cast<std::size_t>(ctx->p()), Expr(0));
    std::vector<Expr> phi = list(f.at("phi"));
    bool generalized = f.value("generalized", false);
    if (generalized) {
      if (static_cast<int>(xi.size()) != ctx->p() || static_cast<int>(phi.size()) != ctx->q())
        throw BadInput("field has the wrong number of components");
      return PointVectorField{xi, phi, true};
    }
    return make_field(*ctx, xi, phi);
  }

  ExprMatrix matrix(const ordered_json& j) const {
    if (!j.is_array()) return ExprMatrix::scalar(1, expr(j));
    int rows = static_cast<int>(j.size());
    if (rows == 0 || !j[0].is_array()) throw BadInput("matrix must be a list of rows");
    int cols = static_cast<int>(j[0].size());
    std::vector<Expr> data;
    for (const auto& row : j) {
      if (!row.is_array() || static_cast<int>(row.size()) != cols) throw BadInput("ragged matrix");
      for (const auto& e : row) data.push_back(expr(e));
    }
    return ExprMatrix(rows, cols, data);
  }

  /// μ as one entry per independent variable: a string (scalar, times the
  /// identity) or a matrix.
  MuForm mu() const {
    if (!has("mu")) throw BadInput("problem file has no 'mu' entry");
    const auto& m = doc["mu"];
    if (!m.is_array() || static_cast<int>(m.size()) != ctx->p())
      throw BadInput("'mu' needs one entry per independent variable");
    MuForm out;
    for (const auto& e : m) {
      ExprMatrix L = e.is_array() ? matrix(e) : ExprMatrix::scalar(ctx->q(), expr(e));
      if (L.rows() != ctx->q() || L.cols() != ctx->q()) throw BadInput("μ matrices must be q×q");
      out.Lambda.push_back(L);
    }
    return out;
  }
};

std::vector<std::string> strings(const ordered_json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& e : j[key]) out.push_back(e.get<std::string>());
  return out;
}

Problem load(const std::string& path, int min_order) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot read " + path);
  Problem p;
  try {
    p.doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw BadInput(path + ": " + e.what());
  }
  if (!p.doc.is_object()) throw BadInput(path + ": top level must be an object");
  Declarations d;
  d.independent = strings(p.doc, "independent");
  d.dependent = strings(p.doc, "dependent");
  d.parameters = strings(p.doc, "parameters");
  if (p.doc.contains("functions"))
    for (const auto& f : p.doc["functions"]) d.functions.push_back({f.at("name").get<std::string>(), f.value("arity", 1)});
  if (d.independent.empty() || d.dependent.empty()) throw BadInput("declare 'independent' and 'dependent' variables");
  int order = std::max(p.doc.value("order", 6), min_order);
  p.ctx.emplace(d, order);
  if (p.doc.contains("equations"))
    for (const auto& e : p.doc["equations"]) {
      std::string lhs, rhs;
      if (e.is_string()) {
        auto s = e.get<std::string>();
        auto eq = s.find('=');
        if (eq == std::string::npos) throw BadInput("equation '" + s + "' has no '='");
        lhs = s.substr(0, eq);
        rhs = s.substr(eq + 1);
      } else {
        lhs = e.at("lhs").get<std::string>();
        rhs = e.at("rhs").get<std::string>();
      }
      Expr lead = p.ctx->parse(lhs);
      if (!lead.is_symbol() || lead.symbol().role != SymbolRole::Jet || lead.symbol().multi.order() == 0)
        throw BadInput("equation left-hand side must be a derivative jet: " + lhs);
      p.equations.push_back({lead.symbol().index, lead.symbol().multi, p.ctx->parse(rhs)});
    }
  return p;
}

int exit_for(Outcome o) {
  switch (o) {
    case Outcome::Yes:
      return Positive;
    case Outcome::No:
      return Negative;
    case Outcome::Undecided:
      return Undecided;
  }
  return Undecided;
}

/// Negative outcomes take precedence over undecided ones.
int combine(int a, int b) {
  if (a == Negative || b == Negative) return Negative;
  if (a == Undecided || b == Undecided) return Undecided;
  return Positive;
}

struct Report {
  ordered_json doc;
  std::ostringstream text;
  int code = Positive;

  explicit Report(const std::string& command) {
    doc["command"] = command;
    doc["inputs"] = ordered_json::object();
  }

  void verdict(const std::string& v) { doc["verdict"] = v; }

  void add(const Verdict& v, const std::string& group = "") {
    for (std::size_t k = 0; k < v.labels.size(); ++k) {
      ordered_json e;
      e["label"] = group.empty() ? v.labels[k] : group + ":" + v.labels[k];
      e["verdict"] = v.tests[k] == ZeroTest::Yes ? "yes" : v.tests[k] == ZeroTest::No ? "no" : "undecided";
      doc["verdicts"].push_back(e);
      doc["residuals"].push_back(v.residuals[k].str());
      text << "  " << e["label"].get<std::string>() << ": " << v.residuals[k].str() << "  ["
           << e["verdict"].get<std::string>() << "]\n";
    }
    code = combine(code, exit_for(v.outcome));
  }
};

void echo_common(Report& r, const Problem& p) {
  auto& in = r.doc["inputs"];
  for (const auto& eq : p.equations)
    in["equations"].push_back(p.context().jet(eq.dep, eq.lead).str() + " = " + eq.rhs.str());
}

void echo_field(Report& r, const PointVectorField& X) {
  auto& f = r.doc["inputs"]["field"];
  f["xi"] = ordered_json::array();
  f["phi"] = ordered_json::array();
  for (const auto& e : X.xi) f["xi"].push_back(e.str());
  for (const auto& e : X.phi) f["phi"].push_back(e.str());
}

ordered_json matrix_json(const ExprMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

void echo_mu(Report& r, const MuForm& mu) {
  for (const auto& L : mu.Lambda) r.doc["inputs"]["mu"].push_back(matrix_json(L));
}

const char* symmetry_name(Twist::Kind k) {
  switch (k) {
    case Twist::Kind::None:
      return "symmetry";
    case Twist::Kind::Lambda:
      return "lambda-symmetry";
    case Twist::Kind::Mu:
      return "mu-symmetry";
  }
  return "symmetry";
}

// ---- subcommands -----------------------------------------------------------

struct Options {
  std::string file;
  bool json = false;
  int order = 2;
  std::string lambda;
  std::string mu_file;
  std::string twist;
  int search_degree = -1;
  std::string eta, zeta;
  int tower = 0;
  std::string B, P, R;
  bool on_solutions = false;
  double h = 0.01, T = 1.0, tol = 1e-6;
  std::string csv;
};

Report cmd_prolong(const Options& o) {
  Problem p = load(o.file, o.order + 1);
  Report r("prolong");
  const auto& ctx = p.context();
  auto X = p.field();
  echo_field(r, X);
  r.doc["inputs"]["order"] = o.order;
  std::string lam = !o.lambda.empty() ? o.lambda : (p.has("lambda") ? p.doc["lambda"].dump() : "");
  ProlongedField Y;
  if (!o.mu_file.empty()) {
    Problem m = load(o.mu_file, 1);
    m.ctx = p.ctx;
    MuForm mu = m.mu();
    echo_mu(r, mu);
    Y = mu_prolong(ctx, X, mu, o.order);
  } else if (!o.lambda.empty() || p.has("lambda")) {
    Expr l = !o.lambda.empty() ? p.expr(o.lambda) : p.get("lambda");
    r.doc["inputs"]["lambda"] = l.str();
    Y = lambda_prolong(ctx, X, l, o.order, true);
  } else if (p.has("mu")) {
    MuForm mu = p.mu();
    echo_mu(r, mu);
    Y = mu_prolong(ctx, X, mu, o.order);
  } else {
    Y = standard_prolong(ctx, X, o.order);
  }
  r.doc["table"] = ordered_json::object();
  for (int k = 1; k <= o.order; ++k)
    for (const auto& J : MultiIndex::of_order(ctx.p(), k))
      for (int a = 0; a < ctx.q(); ++a) {
        std::string name = ctx.jet(a, J).str();
        std::string value = Y.coefficient(a, J).str();
        r.doc["table"][name] = value;
        r.text << "  " << name << ": " << value << "\n";
      }
  r.verdict("prolonged");
  return r;
}

Report cmd_check(const Options& o) {
  Problem p = load(o.file, 1);
  Report r("check");
  echo_common(r, p);
  auto sys = p.system();
  p.ctx = sys.context().with_order(std::max(p.context().order(), sys.order() + 1));
  sys = p.system();
  auto X = p.field();
  echo_field(r, X);
  std::string kind = o.twist;
  if (kind.empty()) kind = p.has("mu") ? "mu" : p.has("lambda") ? "lambda" : "none";
  if (p.has("mu") && p.has("lambda") && o.twist.empty())
    throw BadInput("give exactly one of 'lambda' or 'mu'");
  Twist tw;
  if (kind == "lambda") {
    if (o.search_degree >= 0 && !p.has("lambda")) {
      auto found = search_lambda(sys, X, o.search_degree);
      r.doc["inputs"]["search_degree"] = o.search_degree;
      if (!found) {
        r.verdict("not found");
        r.code = Undecided;
        r.text << "  no lambda found in the search space\n";
        return r;
      }
      r.doc["found_lambda"] = found->str();
      tw = Twist::with_lambda(*found);
    } else {
      tw = Twist::with_lambda(p.get("lambda"));
    }
    r.doc["inputs"]["lambda"] = tw.lambda.str();
  } else if (kind == "mu") {
    tw = Twist::with_mu(p.mu());
    echo_mu(r, tw.mu);
  } else if (kind != "none") {
    throw BadInput("unknown twist '" + kind + "'");
  }
  r.doc["inputs"]["twist"] = kind;
  Verdict v = check_symmetry(sys, X, tw);
  r.add(v);
  r.verdict(v.outcome == Outcome::Yes ? symmetry_name(tw.kind)
            : v.outcome == Outcome::No ? "not symmetry"
                                       : "undecided");
  return r;
}

Report cmd_invariants(const Options& o) {
  Problem p = load(o.file, o.tower + 3);
  Report r("invariants");
  const auto& ctx = p.context();
  auto X = p.field();
  echo_field(r, X);
  Expr eta = !o.eta.empty() ? p.expr(o.eta) : p.get("eta");
  Expr zeta = !o.zeta.empty() ? p.expr(o.zeta) : p.get("zeta");
  r.doc["inputs"]["eta"] = eta.str();
  r.doc["inputs"]["zeta"] = zeta.str();
  int k = std::max({jet_order(zeta), jet_order(eta), 1}) + o.tower;
  ProlongedField Y;
  if (p.has("lambda")) {
    Expr l = p.get("lambda");
    r.doc["inputs"]["lambda"] = l.str();
    Y = lambda_prolong(ctx, X, l, k, true);
  } else {
    Y = standard_prolong(ctx, X, k);
  }
  r.add(verify_invariant(Y, eta), "eta");
  r.add(verify_invariant(Y, zeta), "zeta");
  r.doc["tower"] = ordered_json::array();
  Expr current = zeta;
  for (int n = 0; n < o.tower; ++n) {
    auto s = ibd_next(Y, eta, current);
    r.doc["tower"].push_back(s.rho.str());
    r.text << "  rho" << n + 2 << " = " << s.rho.str() << "\n";
    r.add(s.verdict, "rho" + std::to_string(n + 2));
    current = s.rho;
  }
  r.verdict(r.code == Positive ? "invariant" : r.code == Negative ? "not invariant" : "undecided");
  return r;
}

Report cmd_reduce(const Options& o) {
  Problem p = load(o.file, 1);
  Report r("reduce");
  echo_common(r, p);
  auto sys = p.system();
  auto X = p.field();
  echo_field(r, X);
  Expr lam = p.has("lambda") ? p.get("lambda") : Expr(0);
  Expr eta = !o.eta.empty() ? p.expr(o.eta) : p.get("eta");
  Expr zeta = !o.zeta.empty() ? p.expr(o.zeta) : p.get("zeta");
  r.doc["inputs"]["lambda"] = lam.str();
  r.doc["inputs"]["eta"] = eta.str();
  r.doc["inputs"]["zeta"] = zeta.str();
  auto red = reduce_order(sys, X, lam, eta, zeta, p.doc.value("reduced_independent", "y"),
                          p.doc.value("reduced_dependent", "w"));
  r.doc["tower"] = ordered_json::array();
  for (const auto& t : red.tower) r.doc["tower"].push_back(t.str());
  if (!red.ok) {
    r.verdict("elimination failed");
    r.doc["failure"] = red.failure;
    r.text << "  " << red.failure << "\n";
    r.code = Negative;
    return r;
  }
  const auto& eq = red.reduced->equations()[0];
  std::string text = red.context->jet(0, eq.lead).str() + " = " + eq.rhs.str();
  r.doc["reduced"] = text;
  r.text << "  " << text << "\n";
  r.verdict("reduced");
  return r;
}

Report cmd_noether(const Options& o) {
  Problem p = load(o.file, 3);
  Report r("noether");
  const auto& ctx = p.context();
  Expr L = p.get("L");
  auto X = p.field();
  echo_field(r, X);
  r.doc["inputs"]["L"] = L.str();
  auto pick = [&](const std::string& flag, const char* key) -> std::optional<Expr> {
    if (!flag.empty()) return p.expr(flag);
    if (p.has(key)) return p.get(key);
    return std::nullopt;
  };
  if (ctx.p() > 1) {
    MuForm mu = p.has("mu") ? p.mu() : MuForm::zero(ctx);
    echo_mu(r, mu);
    std::vector<Expr> R(static_cast<std::size_t>(ctx.p()), Expr(0));
    if (p.has("R")) R = p.list(p.doc["R"]);
    auto rep = mu_conservation_residual(L, X, mu, R, ctx);
    r.doc["density"] = ordered_json::array();
    for (const auto& d : rep.density) r.doc["density"].push_back(d.str());
    r.add(rep.verdict);
    r.verdict(rep.conserved() ? "conserved" : r.code == Negative ? "not conserved" : "undecided");
    return r;
  }
  Expr lam = p.has("lambda") ? p.get("lambda") : Expr(0);
  r.doc["inputs"]["lambda"] = lam.str();
  r.doc["euler_lagrange"] = ordered_json::array();
  for (const auto& e : euler_lagrange(L, ctx)) r.doc["euler_lagrange"].push_back(e.str());

  auto B = pick(o.B, "B");
  if (!B) B = find_gauge_term(L, X, lam, ctx);
  if (B) {
    r.doc["B"] = B->str();
    r.add(check_variational_lambda(L, X, lam, *B, ctx), "B");
  } else {
    r.doc["B"] = nullptr;
    r.text << "  B: not found\n";
    r.code = combine(r.code, Undecided);
  }
  auto P = pick(o.P, "P");
  if (!P) P = find_factorization(L, X, lam, ctx);
  if (P) {
    r.doc["P"] = P->str();
    r.add(check_characteristic_factorization(L, X, lam, *P, ctx), "P");
  } else {
    r.doc["P"] = nullptr;
    r.text << "  P: not found\n";
    r.code = combine(r.code, Undecided);
  }
  auto R = pick(o.R, "R");
  if (!R && B) R = B;
  if (R && jet_order(L) <= 1) {
    auto rep = lambda_conservation_residual(L, X, lam, *R, ctx);
    r.doc["R"] = R->str();
    r.doc["density"] = rep.density[0].str();
    r.add(rep.verdict, "R");
  }
  r.verdict(r.code == Positive ? "conserved" : r.code == Negative ? "not conserved" : "undecided");
  return r;
}

Report cmd_mc(const Options& o) {
  Problem p = load(o.file, 3);
  Report r("mc-check");
  MuForm mu = p.mu();
  echo_mu(r, mu);
  std::optional<SolvedSystem> sys;
  if (o.on_solutions) {
    echo_common(r, p);
    sys = p.system();
  }
  auto rep = maurer_cartan_check(mu, p.context(), sys ? &*sys : nullptr);
  r.doc["pairs"] = ordered_json::array();
  for (const auto& pr : rep.pairs) {
    ordered_json e;
    e["i"] = pr.i + 1;
    e["k"] = pr.k + 1;
    e["residual"] = matrix_json(pr.residual);
    if (pr.restricted) e["restricted"] = matrix_json(*pr.restricted);
    r.doc["pairs"].push_back(e);
    r.doc["residuals"].push_back(pr.residual.str());
    r.text << "  (" << pr.i + 1 << "," << pr.k + 1 << "): " << pr.residual.str();
    if (pr.restricted) r.text << "  on solutions: " << pr.restricted->str();
    r.text << "\n";
  }
  if (rep.pairs.empty()) r.doc["residuals"] = ordered_json::array();
  r.verdict(to_string(rep.verdict));
  switch (rep.verdict) {
    case Compatibility::Everywhere:
    case Compatibility::OnSolutions:
      r.code = Positive;
      break;
    case Compatibility::Incompatible:
      r.code = Negative;
      break;
    case Compatibility::Undecided:
      r.code = Undecided;
      break;
  }
  return r;
}

Report cmd_verify_num(const Options& o) {
  Problem p = load(o.file, 2);
  Report r("verify-num");
  echo_common(r, p);
  auto sys = p.system();
  if (!p.has("init")) throw BadInput("problem file has no 'init' entry");
  std::vector<double> init = p.doc["init"].get<std::vector<double>>();
  double x0 = p.doc.value("x0", 0.0);
  r.doc["inputs"]["h"] = o.h;
  r.doc["inputs"]["T"] = o.T;
  r.doc["inputs"]["tol"] = o.tol;
  auto traj = rk4_integrate(sys, init, o.h, o.T, x0);
  if (traj.truncated) {
    r.doc["truncated"] = traj.diagnostic;
    r.text << "  trajectory truncated: " << traj.diagnostic << "\n";
  }
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) throw BadInput("cannot write " + o.csv);
    write_csv(f, p.context(), traj);
  }
  r.doc["checks"] = ordered_json::array();
  bool all = !traj.truncated;
  if (!p.has("verify")) throw BadInput("problem file has no 'verify' list");
  for (const auto& c : p.doc["verify"]) {
    Expr e = p.expr(c.at("expr"));
    std::string mode = c.value("mode", "zero");
    NumericReport nr;
    if (mode == "constant")
      nr = verify_along(e, p.context(), traj, AlongMode::Constant, o.tol);
    else if (mode == "zero")
      nr = verify_along(e, p.context(), traj, AlongMode::Zero, o.tol);
    else if (mode == "derivative")
      nr = finite_difference_check(e, p.context(), traj, o.tol);
    else
      throw BadInput("unknown mode '" + mode + "'");
    ordered_json j;
    j["expr"] = e.str();
    j["mode"] = mode;
    j["max_deviation"] = nr.max_deviation;
    j["tol"] = nr.tol;
    j["pass"] = nr.pass;
    r.doc["checks"].push_back(j);
    r.text << "  " << mode << " " << e.str() << ": deviation " << nr.max_deviation << (nr.pass ? " (pass)" : " (FAIL)")
           << "\n";
    all = all && nr.pass;
  }
  r.code = all ? Positive : Negative;
  r.verdict(all ? "pass" : "fail");
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted prolongations and symmetries of differential equations", "twistsym"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Emit a JSON report");

  auto file_opt = [&](CLI::App* c) { c->add_option("problem", o.file, "Problem file (JSON)")->required(); };
  auto* prolong = app.add_subcommand("prolong", "Prolongation table of a field");
  file_opt(prolong);
  prolong->add_option("--order", o.order, "Prolongation order")->check(CLI::PositiveNumber);
  auto* lam_opt = prolong->add_option("--lambda", o.lambda, "Scalar twist");
  prolong->add_option("--mu", o.mu_file, "Problem file holding 'mu'")->excludes(lam_opt);

  auto* check = app.add_subcommand("check", "Symmetry condition on the solution manifold");
  file_opt(check);
  check->add_option("--twist", o.twist, "none, lambda or mu")->check(CLI::IsMember({"none", "lambda", "mu"}));
  check->add_option("--search-lambda", o.search_degree, "Search a polynomial lambda of this degree when none is given");

  auto* inv = app.add_subcommand("invariants", "Invariance and invariants by differentiation");
  file_opt(inv);
  inv->add_option("--eta", o.eta, "Order-0 invariant");
  inv->add_option("--zeta", o.zeta, "Order-1 invariant");
  inv->add_option("--tower", o.tower, "Number of tower steps")->check(CLI::NonNegativeNumber);

  auto* red = app.add_subcommand("reduce", "Order reduction by a lambda-symmetry");
  file_opt(red);
  red->add_option("--eta", o.eta, "Order-0 invariant");
  red->add_option("--zeta", o.zeta, "Order-1 invariant");

  auto* noether = app.add_subcommand("noether", "Variational twisted symmetry and conservation law");
  file_opt(noether);
  noether->add_option("--B", o.B, "Gauge term");
  noether->add_option("--P", o.P, "Factorization potential");
  noether->add_option("--R", o.R, "Conservation correction");

  auto* mc = app.add_subcommand("mc-check", "Maurer-Cartan compatibility of mu");
  file_opt(mc);
  mc->add_flag("--on-solutions", o.on_solutions, "Also restrict to the equations");

  auto* num = app.add_subcommand("verify-num", "Numeric checks along RK4 trajectories");
  file_opt(num);
  num->add_option("--h", o.h, "Step")->check(CLI::PositiveNumber);
  num->add_option("--T", o.T, "Horizon")->check(CLI::PositiveNumber);
  num->add_option("--tol", o.tol, "Tolerance")->check(CLI::PositiveNumber);
  num->add_option("--csv", o.csv, "Write the trajectory as CSV");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Positive;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return InputError;
  }

  auto start = std::chrono::steady_clock::now();
  std::optional<Report> report;
  try {
    if (*prolong) report = cmd_prolong(o);
    else if (*check) report = cmd_check(o);
    else if (*inv) report = cmd_invariants(o);
    else if (*red) report = cmd_reduce(o);
    else if (*noether) report = cmd_noether(o);
    else if (*mc) report = cmd_mc(o);
    else report = cmd_verify_num(o);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return InputError;
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  Report& r = *report;
  if (!r.doc.contains("verdicts")) r.doc["verdicts"] = ordered_json::array();
  if (!r.doc.contains("residuals")) r.doc["residuals"] = ordered_json::array();
  r.doc["exit_code"] = r.code;
  r.doc["timing"] = {{"ms", ms}};
  if (o.json) {
    out << r.doc.dump(2) << "\n";
  } else {
    out << r.doc["command"].get<std::string>() << ": " << r.doc.value("verdict", "") << "\n" << r.text.str();
  }
  return r.code;
}

}  // namespace twistsym::cli
