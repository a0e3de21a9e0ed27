#include "bondforge/families.hpp"
#include "bondforge/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace bondforge;

namespace {

struct Args {
  std::string file;
  std::uint64_t seed = 1;
  std::string backend = "exact";
  double tol = 1e-8;
  std::string dot;
  std::string json;
  std::string family;
  std::vector<std::string> params;
};

ReportOptions options(const Args& a) {
  ReportOptions o;
  o.seed = a.seed;
  o.exact = a.backend == "exact";
  o.tol = a.tol;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("--json", "cannot write '" + path + "'");
  out << text;
}

int finish(Json report, const std::vector<Finding>& findings, const Args& a) {
  report["findings"] = findings_json(findings);
  report["consistent"] = all_ok(findings);
  write_text(a.json, report.dump(2) + "\n");
  return all_ok(findings) ? 0 : 1;
}

int cmd_solve(const Args& a) {
  Linkage l = read_linkage(a.file);
  auto opt = options(a);
  Json r = report_header("solve", l, opt);
  r["solve"] = solve_section(l, opt);
  return finish(r, {}, a);
}

int cmd_bonds(const Args& a) {
  Linkage l = read_linkage(a.file);
  auto opt = options(a);
  Json r = report_header("bonds", l, opt);
  auto ca = analyze_curve(l, opt);
  r["components"] = components_json(ca.curve);
  r["bonds"] = bonds_section(l, ca.bonds);
  return finish(r, check_pseudo_metric(l, ca.bonds), a);
}

int cmd_diagram(const Args& a) {
  Linkage l = read_linkage(a.file);
  auto opt = options(a);
  Json r = report_header("diagram", l, opt);
  auto ca = analyze_curve(l, opt);
  auto degrees = degree_table(ca.curve, ca.bonds);
  auto d = build_diagram(l, ca.bonds);
  r["bonds"] = bonds_section(l, ca.bonds);
  r["degrees"] = degrees_section(degrees);
  r["diagram"] = diagram_section(d);
  if (!a.dot.empty()) {
    if (a.dot == "-") {
      std::cout << emit_dot(d);
    } else {
      std::ofstream out(a.dot);
      if (!out) throw InputError("--dot", "cannot write '" + a.dot + "'");
      out << emit_dot(d);
    }
    r["dot"] = a.dot;
  }
  Args b = a;
  if (a.dot == "-" && b.json.empty()) b.json = "/dev/null";
  return finish(r, diagram_findings(d, degrees), b);
}

int cmd_check(const Args& a) {
  Linkage l = read_linkage(a.file);
  auto opt = options(a);
  Json r = report_header("check", l, opt);
  std::optional<CurveAnalysis> ca;
  try {
    ca = analyze_curve(l, opt);
  } catch (const AnalysisError& e) {
    r["mobile"] = false;
    r["mobility_note"] = e.what();
  }
  if (ca) {
    r["mobile"] = true;
    r["bonds"] = bonds_section(l, ca->bonds);
  }
  std::vector<Finding> findings;
  r["checks"] = check_section(l, ca ? &*ca : nullptr, opt, findings);
  return finish(r, findings, a);
}

Rational param(const std::vector<std::string>& p, std::size_t k, const std::string& name) {
  if (k >= p.size()) throw InputError(name, "missing family parameter");
  try {
    return parse_rational(p[k]);
  } catch (const std::invalid_argument& e) {
    throw InputError(name, e.what());
  }
}

int cmd_family(const Args& a) {
  const auto& p = a.params;
  Linkage l = [&]() {
    if (a.family == "bennett") {
      if (p.size() != 3) throw InputError("params", "bennett needs w1 w2 d1");
      return make_bennett(param(p, 0, "w1"), param(p, 1, "w2"), param(p, 2, "d1"));
    }
    if (a.family == "goldberg") {
      if (p.size() != 4 && p.size() != 5) throw InputError("params", "goldberg needs w1 w2 w2' d1 [theta]");
      Rational w1 = param(p, 0, "w1"), d1 = param(p, 3, "d1");
      Rational theta = p.size() == 5 ? param(p, 4, "theta") : Rational(1, 2);
      return make_goldberg({w1, param(p, 1, "w2"), d1}, {w1, param(p, 2, "w2'"), d1}, theta);
    }
    if (a.family == "dup-axes") {
      if (!p.empty()) throw InputError("params", "dup-axes takes no parameters; the axes come from --seed");
      std::mt19937_64 rng(a.seed);
      std::vector<DQ<Rational>> hs;
      while (hs.size() < 3) {
        auto h = random_line(rng);
        bool dup = false;
        for (const auto& g : hs) dup = dup || same_line(g, h);
        if (!dup) hs.push_back(h);
      }
      return make_duplicated_axes_6r(hs[0], hs[1], hs[2]);
    }
    throw InputError("family", "unknown family '" + a.family + "' (expected bennett, goldberg or dup-axes)");
  }();
  write_text(a.json, linkage_to_json(l).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bonds, coupling spaces and bond diagrams of closed linkages"};
  app.require_subcommand(1);
  Args a;
  auto common = [&](CLI::App* c, bool file) {
    if (file) c->add_option("file", a.file, "Linkage description (JSON)")->required();
    c->add_option("--seed", a.seed, "Random seed (default 1)");
    c->add_option("--backend", a.backend, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    c->add_option("--tol", a.tol, "Tolerance of the float backend");
    c->add_option("--json", a.json, "Write the JSON report to this path instead of stdout");
  };
  auto* solve = app.add_subcommand("solve", "Solve the closure equations or trace the configuration curve");
  common(solve, true);
  auto* bonds = app.add_subcommand("bonds", "Bonds of a mobile linkage");
  common(bonds, true);
  auto* diagram = app.add_subcommand("diagram", "Coupler degrees and the bond diagram");
  common(diagram, true);
  diagram->add_option("--dot", a.dot, "Write the diagram in DOT format to this path ('-' for stdout)");
  auto* check = app.add_subcommand("check", "Coupling spaces, Bennett, PRRRR and quad-polynomial checks");
  common(check, true);
  auto* family = app.add_subcommand("family", "Write a linkage file of a known family");
  common(family, false);
  family->add_option("name", a.family, "bennett, goldberg or dup-axes")->required();
  family->add_option("params", a.params, "bennett: w1 w2 d1; goldberg: w1 w2 w2' d1 [theta]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*solve) return cmd_solve(a);
    if (*bonds) return cmd_bonds(a);
    if (*diagram) return cmd_diagram(a);
    if (*check) return cmd_check(a);
    if (*family) return cmd_family(a);
  } catch (const InputError& e) {
    Json err{{"error", {{"kind", "input"}, {"field", e.field()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const AnalysisError& e) {
    Json err{{"error", {{"kind", "analysis"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
