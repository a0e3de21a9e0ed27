#pragma once

#include "bondforge/diagram.hpp"
#include "bondforge/linkage_io.hpp"
#include "bondforge/quadpoly.hpp"

#include <sstream>

namespace bondforge {

inline constexpr const char* kVersion = "0.1.0";

struct ReportOptions {
  std::uint64_t seed = 1;
  /// Exact backend: rational parametrizations, exact bonds and exact ranks. Float: numeric endgames and SVD ranks.
  bool exact = true;
  double tol = 1e-8;
  int threads = 0;
};

inline Json complex_json(const Complex& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline Json param_json(const ProjectiveParam<Complex>& t) {
  if (t.is_infinite(1e-12)) return "inf";
  return complex_json(t.value());
}

inline std::string gauss_string(const GaussRational& z) {
  std::ostringstream os;
  os << z;
  return os.str();
}

inline Json exact_param_json(const ProjectiveParam<GaussRational>& t) {
  if (t.v.is_zero()) return "inf";
  return gauss_string(t.u / t.v);
}

inline Json findings_json(const std::vector<Finding>& fs) {
  Json a = Json::array();
  for (const auto& f : fs) a.push_back({{"check", f.check}, {"ok", f.ok}, {"detail", f.detail}});
  return a;
}

inline bool all_ok(const std::vector<Finding>& fs) {
  return std::all_of(fs.begin(), fs.end(), [](const Finding& f) { return f.ok; });
}

/// Fields shared by every report.
inline Json report_header(const std::string& command, const Linkage& l, const ReportOptions& opt) {
  Json r;
  r["tool"] = {{"name", "bondforge"}, {"version", kVersion}};
  r["command"] = command;
  r["seed"] = opt.seed;
  r["backend"] = opt.exact ? "exact" : "float";
  r["tolerance"] = opt.tol;
  r["linkage"] = linkage_to_json(l);
  auto sys = closure_system(l);
  r["closure"] = {{"variables", sys.num_vars()}, {"equations", sys.equations.size()}, {"excluded", sys.excluded.size()}};
  return r;
}

/// Configuration curve and bonds for the chosen backend.
struct CurveAnalysis {
  ConfigurationCurve curve;
  BondSet bonds;
};

inline CurveAnalysis analyze_curve(const Linkage& l, const ReportOptions& opt) {
  CurveAnalysis a{configuration_curve(l, opt.seed, opt.threads), {}};
  if (!opt.exact)
    for (auto& rp : a.curve.parametrizations) rp.reset();
  a.bonds = find_bonds(a.curve);
  return a;
}

inline Json components_json(const ConfigurationCurve& cc) {
  Json a = Json::array();
  for (int c = 0; c < cc.size(); ++c) {
    const auto& comp = cc.component(c);
    Json o{{"degrees", comp.degrees}, {"certified", comp.certified}};
    Json consts = Json::array();
    for (const auto& k : comp.constants) consts.push_back(k ? param_json(*k) : Json(nullptr));
    o["constants"] = consts;
    if (const auto& rp = cc.parametrizations[c]) {
      Json p{{"parameter_joint", rp->parameter + 1}};
      Json num = Json::array(), den = Json::array();
      for (int k = 0; k < rp->size(); ++k) {
        Json nk = Json::array(), dk = Json::array();
        for (const auto& x : rp->num[k].coeffs()) nk.push_back(gauss_string(x));
        for (const auto& x : rp->den[k].coeffs()) dk.push_back(gauss_string(x));
        num.push_back(nk);
        den.push_back(dk);
      }
      p["numerators"] = num;
      p["denominators"] = den;
      o["parametrization"] = p;
    }
    a.push_back(o);
  }
  return a;
}

/// Isolated solutions of a generic loop, or traced branches of a mobile one.
inline Json solve_section(const Linkage& l, const ReportOptions& opt) {
  auto sys = closure_system(l);
  Json r;
  try {
    numeric::SolveOptions so;
    so.seed = opt.seed;
    so.threads = opt.threads;
    auto res = numeric::solve_square(sys, so);
    r["mobile"] = false;
    r["paths"] = res.paths;
    r["excluded"] = res.excluded;
    r["failed"] = res.failed;
    r["count"] = res.solutions.size();
    Json sols = Json::array();
    for (const auto& s : res.solutions) {
      Json v = Json::array();
      for (const auto& t : s.values) v.push_back(param_json(t));
      sols.push_back({{"values", v}, {"residual", s.residual}, {"at_infinity", std::any_of(s.values.begin(), s.values.end(), [](const auto& t) {
                        return t.is_infinite(1e-8);
                      })}});
    }
    r["solutions"] = sols;
    return r;
  } catch (const numeric::PositiveDimensionalError&) {
  }
  auto cc = configuration_curve(l, opt.seed, opt.threads);
  r["mobile"] = true;
  r["components"] = components_json(cc);
  Json branches = Json::array();
  for (int c = 0; c < cc.size(); ++c) {
    Json b{{"component", c + 1}};
    const auto& comp = cc.component(c);
    bool moving = std::any_of(comp.degrees.begin(), comp.degrees.end(), [](int d) { return d > 0; });
    if (!moving || comp.witness.empty()) {
      branches.push_back(b);
      continue;
    }
    TraceOptions to;
    to.seed = opt.seed;
    try {
      auto br = trace_curve(sys, numeric::to_solution(*cc.numeric, comp.witness[0]), to);
      Json samples = Json::array();
      double worst = 0;
      for (const auto& s : br.samples) {
        Json v = Json::array();
        for (const auto& t : s.values) v.push_back(param_json(t));
        samples.push_back(v);
        worst = std::max(worst, s.residual);
      }
      b["samples"] = samples;
      b["max_residual"] = worst;
      b["detours"] = br.detours.size();
      b["underflow"] = br.underflow;
    } catch (const AnalysisError& e) {
      b["error"] = e.what();
    }
    branches.push_back(b);
  }
  r["branches"] = branches;
  return r;
}

inline Json bonds_section(const Linkage& l, const BondSet& bs) {
  Json a = Json::array();
  for (std::size_t k = 0; k < bs.bonds.size(); ++k) {
    const Bond& b = bs.bonds[k];
    Json coords = Json::array();
    for (const auto& t : b.coordinates) coords.push_back(param_json(t));
    Json o{{"id", k + 1}, {"component", b.component + 1}, {"coordinates", coords}};
    if (b.exact) {
      Json ex = Json::array();
      for (const auto& t : *b.exact) ex.push_back(exact_param_json(t));
      o["exact"] = ex;
    }
    Json att = Json::array(), part = Json::array();
    for (int j : b.attached) att.push_back(j + 1);
    for (const auto& cls : b.partition) {
      Json c = Json::array();
      for (int x : cls) c.push_back(x + 1);
      part.push_back(c);
    }
    o["attached"] = att;
    o["multiplicity"] = b.multiplicity;
    o["partition"] = part;
    o["conjugate"] = b.conjugate >= 0 ? Json(b.conjugate + 1) : Json(nullptr);
    o["pair"] = b.pair + 1;
    o["certified"] = b.certified;
    Json dist = Json::array();
    for (const auto& row : local_distance_table(l, b)) {
      Json r = Json::array();
      for (int x : row) r.push_back(x / 2.0);
      dist.push_back(r);
    }
    o["local_distances"] = dist;
    a.push_back(o);
  }
  auto con = bond_connections(bs);
  Json pairs = Json::object();
  for (const auto& [key, v] : con.pairs)
    pairs[std::to_string(key.first + 1) + "-" + std::to_string(key.second + 1)] = {{"pairs", v}, {"bonds", con.bond_count(key.first, key.second)}};
  Json frozen = Json::array();
  for (int k : frozen_joints(l, bs)) frozen.push_back(k + 1);
  return {{"complete", bs.complete}, {"issues", bs.issues}, {"count", bs.bonds.size()}, {"bonds", a},
          {"connections", pairs}, {"frozen_joints", frozen}};
}

inline int chain_dimension(const Linkage& l, const std::vector<int>& chain, const ReportOptions& opt) {
  return opt.exact ? coupling_space(l, chain).dimension : coupling_dimension_float(l, chain, opt.tol);
}

/// Coupling dimensions of consecutive pairs and triples of a single loop.
struct LoopDimensions {
  std::vector<int> pairs, triples;
};

inline LoopDimensions loop_dimensions(const Linkage& l, const ReportOptions& opt) {
  LoopDimensions d;
  int n = l.size();
  for (int i = 0; i < n; ++i) {
    d.pairs.push_back(chain_dimension(l, {i, (i + 1) % n}, opt));
    d.triples.push_back(chain_dimension(l, {i, (i + 1) % n, (i + 2) % n}, opt));
  }
  return d;
}

inline Json dimensions_json(const LoopDimensions& d) {
  int n = static_cast<int>(d.pairs.size());
  Json p = Json::array(), t = Json::array();
  for (int i = 0; i < n; ++i) {
    p.push_back({{"joints", {i + 1, (i + 1) % n + 1}}, {"dimension", d.pairs[i]}});
    t.push_back({{"joints", {i + 1, (i + 1) % n + 1, (i + 2) % n + 1}}, {"dimension", d.triples[i]}});
  }
  return {{"pairs", p}, {"triples", t}};
}

inline std::vector<ConnectionBound> connection_bound(const Linkage& l, const ReportOptions& opt) {
  if (opt.exact) return connection_bound(l);
  auto inv = dh_invariants(l);
  std::vector<ConnectionBound> out;
  for (int i = 0; i < 3; ++i) {
    ConnectionBound cb;
    cb.joints = {i, i + 3};
    cb.plus = gcd_degree_float(quad_polynomial(inv, i, 1).complex_poly(), quad_polynomial(inv, i + 3, 1).complex_poly(), opt.tol);
    cb.minus = gcd_degree_float(quad_polynomial(inv, i, -1).complex_poly(), quad_polynomial(inv, i + 3, -1).complex_poly(), opt.tol);
    out.push_back(cb);
  }
  return out;
}

inline Json quad_section(const Linkage& l, const ReportOptions& opt) {
  Json polys = Json::array();
  auto inv = dh_invariants(l);
  for (int i = 0; i < 6; ++i)
    for (int s : {1, -1}) {
      auto q = quad_polynomial(inv, i, s);
      polys.push_back({{"joint", i + 1}, {"sign", s > 0 ? "+" : "-"},
                       {"coefficients", {gauss_string(q.coeffs[0]), gauss_string(q.coeffs[1]), gauss_string(q.coeffs[2])}}});
    }
  Json bounds = Json::array();
  for (const auto& cb : connection_bound(l, opt))
    bounds.push_back({{"joints", {cb.joints.first + 1, cb.joints.second + 1}}, {"plus", cb.plus}, {"minus", cb.minus}, {"bound", cb.bound()}});
  return {{"polynomials", polys}, {"bounds", bounds}};
}

inline Json degrees_section(const std::vector<CouplerDegree>& ds) {
  Json o = Json::object();
  for (const auto& d : ds) {
    Json e{{"algebraic", d.twice_algebraic / 2.0}, {"lower_bound", d.lower_bound}};
    e["hyperplane_count"] = d.hyperplane_count ? Json(*d.hyperplane_count) : Json(nullptr);
    e["curve"] = d.curve_degree ? Json(*d.curve_degree) : Json(nullptr);
    Json m = Json::array();
    for (const auto& x : d.mapping_degrees) m.push_back(x ? Json(*x) : Json(nullptr));
    e["mapping_degrees"] = m;
    o[std::to_string(d.i + 1) + "-" + std::to_string(d.j + 1)] = e;
  }
  return o;
}

inline Json diagram_section(const BondDiagram& d) {
  Json lines = Json::array();
  for (const auto& line : d.lines) {
    Json att = Json::array(), sides = Json::array(), bonds = Json::array();
    for (int j : line.attached) att.push_back(j + 1);
    for (int b : line.bonds) bonds.push_back(b + 1);
    for (const auto& s : line.sides) {
      Json c = Json::array();
      for (int x : s) c.push_back(x + 1);
      sides.push_back(c);
    }
    lines.push_back({{"pair", line.pair + 1}, {"bonds", bonds}, {"joints", att}, {"sides", sides}});
  }
  Json anomalous = Json::array();
  for (int b : d.anomalous) anomalous.push_back(b + 1);
  Json crossings = Json::object();
  for (int i = 0; i < d.num_links; ++i)
    for (int j = i + 1; j < d.num_links; ++j) crossings[std::to_string(i + 1) + "-" + std::to_string(j + 1)] = crossing_count(d, i, j);
  return {{"lines", lines}, {"anomalous", anomalous}, {"crossings", crossings}};
}

/// Crossing counts of a diagram without anomalous bonds equal the algebraic degrees.
inline std::vector<Finding> diagram_findings(const BondDiagram& d, const std::vector<CouplerDegree>& ds) {
  std::vector<Finding> out;
  if (!d.anomalous.empty()) return out;
  for (const auto& c : ds) {
    int x = crossing_count(d, c.i, c.j);
    out.push_back({"crossings", 2 * x == c.twice_algebraic,
                   "links " + std::to_string(c.i + 1) + "," + std::to_string(c.j + 1) + ": " + std::to_string(x) + " lines, degree " +
                       std::to_string(c.twice_algebraic / 2.0)});
  }
  return out;
}

/// Structural checks of a single revolute or PRRRR loop; bonds are optional (immobile input).
inline Json check_section(const Linkage& l, const CurveAnalysis* ca, const ReportOptions& opt, std::vector<Finding>& findings) {
  Json r;
  if (!l.is_single_loop()) throw InputError("loops", "checks need a single closed loop");
  int n = l.size();
  auto dims = loop_dimensions(l, opt);
  r["coupling"] = dimensions_json(dims);
  for (int i = 0; i < n; ++i) {
    if (l.joints[i].revolute() || l.joints[(i + 1) % n].revolute())
      findings.push_back({"parity", dims.pairs[i] % 2 == 0, "chain " + std::to_string(i + 1) + "," + std::to_string((i + 1) % n + 1)});
    if (l.joints[i].revolute() || l.joints[(i + 2) % n].revolute())
      findings.push_back({"parity", dims.triples[i] % 2 == 0, "chain starting at " + std::to_string(i + 1)});
  }
  if (l.all_revolute()) {
    std::optional<DHInvariants> inv;
    try {
      inv = dh_invariants(l);
    } catch (const InputError& e) {
      r["bennett"] = {{"applicable", false}, {"reason", e.what()}};
    }
    if (inv) {
      Json b = Json::array();
      for (int i = 0; i < n; ++i) {
        bool cond = chain_bennett_condition(*inv, i);
        b.push_back({{"joints", {i + 1, (i + 1) % n + 1, (i + 2) % n + 1}}, {"condition", cond}});
        if (dims.triples[i] >= 6)
          findings.push_back({"bennett", cond == (dims.triples[i] == 6),
                              "chain starting at " + std::to_string(i + 1) + ": dimension " + std::to_string(dims.triples[i])});
      }
      r["bennett"] = b;
    }
  }
  if (ca) {
    for (std::size_t k = 0; k < ca->bonds.bonds.size(); ++k)
      for (int i = 0; i < n; ++i) {
        std::vector<int> chain{i, (i + 1) % n, (i + 2) % n};
        auto bc = check_bond_condition(l, chain, ca->bonds, static_cast<int>(k));
        if (bc.zero && bc.end_norms_zero)
          findings.push_back({"bond-condition", dims.triples[i] < 8,
                              "bond " + std::to_string(k + 1) + " on chain starting at " + std::to_string(i + 1)});
      }
  }
  if (n == 5 && !l.joints[0].revolute()) {
    bool rest = true;
    for (int k = 1; k < 5; ++k) rest = rest && l.joints[k].revolute();
    if (rest) {
      std::optional<std::vector<int>> frozen;
      if (ca && ca->bonds.complete) frozen = frozen_joints(l, ca->bonds);
      auto p = prrrr_conditions(l, frozen);
      auto opt_json = [](const std::optional<bool>& x) { return x ? Json(*x) : Json(nullptr); };
      r["prrrr"] = {{"p_frozen", opt_json(p.p_frozen)},
                    {"two_axes_coincide", p.two_axes_coincide},
                    {"three_axes_parallel", p.three_axes_parallel},
                    {"three_parallel_and_fourth_frozen", opt_json(p.three_parallel_and_fourth_frozen)},
                    {"pairs_parallel", p.pairs_parallel},
                    {"some_condition", opt_json(p.some_condition)}};
      if (ca && p.some_condition) findings.push_back({"prrrr", *p.some_condition, "mobile PRRRR loop"});
    }
  }
  bool metric_checked = false;
  if (n == 6 && l.all_revolute()) {
    try {
      auto bounds = connection_bound(l, opt);
      r["quad"] = quad_section(l, opt);
      if (ca) {
        auto con = bond_connections(ca->bonds);
        for (const auto& cb : bounds) {
          int k = con.pair_count(cb.joints.first, cb.joints.second);
          findings.push_back({"quad-bound", k <= cb.bound(),
                              "joints " + std::to_string(cb.joints.first + 1) + "," + std::to_string(cb.joints.second + 1) + ": " +
                                  std::to_string(k) + " pairs, bound " + std::to_string(cb.bound())});
        }
      }
    } catch (const InputError& e) {
      r["quad"] = {{"applicable", false}, {"reason", e.what()}};
    }
    if (ca) {
      auto degrees = degree_table(ca->curve, ca->bonds);
      auto rep = validate_six_r(l, ca->bonds, dims.pairs, dims.triples, degrees);
      r["six_r"] = {{"exclusions", rep.exclusions}, {"notes", rep.notes}};
      if (rep.exclusions.empty()) {
        findings.insert(findings.end(), rep.findings.begin(), rep.findings.end());
        metric_checked = true;
      }
    }
  }
  if (ca && !metric_checked) {
    auto pm = check_pseudo_metric(l, ca->bonds);
    findings.insert(findings.end(), pm.begin(), pm.end());
  }
  return r;
}

}  // namespace bondforge
