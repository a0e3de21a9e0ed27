#pragma once

#include "bondforge/bonds.hpp"
#include "bondforge/coupling.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bondforge {

/// Local distance d(i, j) at a bond as a half-integer.
inline double local_distance(const Linkage& l, const Bond& b, int i, int j) {
  return twice_local_distance(l, b.place, i, j) / 2.0;
}

/// Twice the local distances between all pairs of links at a bond.
inline std::vector<std::vector<int>> local_distance_table(const Linkage& l, const Bond& b) {
  int n = l.num_links;
  std::vector<std::vector<int>> t(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) t[i][j] = twice_local_distance(l, b.place, i, j);
  return t;
}

/// Degree data of the coupler curve C_{i,j}.
struct CouplerDegree {
  int i = 0, j = 0;
  /// Twice the sum of local distances over all bonds.
  int twice_algebraic = 0;
  /// Some bond is uncertified or the bond search was incomplete.
  bool lower_bound = false;
  /// Number of curve points mapped into a generic hyperplane (rational components only).
  std::optional<int> hyperplane_count;
  /// Number of preimages of a generic point of the image, per component (rational components only).
  std::vector<std::optional<int>> mapping_degrees;
  /// Degree of the image curve: sum over components of algebraic degree / mapping degree.
  std::optional<int> curve_degree;

  bool integral() const { return twice_algebraic % 2 == 0; }
  int algebraic() const { return twice_algebraic / 2; }
};

namespace detail {

/// Chain product along a rational parametrization, with the common factor of its coordinates removed.
inline DQ<GPoly> reduced_chain_map(const Linkage& l, const RationalParametrization& rp, const std::vector<int>& chain) {
  DQ<GPoly> f = DQ<GPoly>::one();
  for (int k : chain) {
    const Joint& jt = l.joints[k];
    DQ<Rational> hg = jt.axis * jt.transfer;
    DQ<GPoly> m;
    for (int c = 0; c < 8; ++c) m[c] = GaussRational(jt.transfer[c]) * rp.num[k] - GaussRational(hg[c]) * rp.den[k];
    f = f * m;
  }
  GPoly g;
  for (int c = 0; c < 8; ++c) g = gcd(g, f[c]);
  if (g.degree() > 0)
    for (int c = 0; c < 8; ++c) f[c] = GPoly::divmod(f[c], g).first;
  return f;
}

inline int map_degree(const DQ<GPoly>& f) {
  int d = 0;
  for (int c = 0; c < 8; ++c) d = std::max(d, f[c].degree());
  return d;
}

/// Preimage count of f(θ0) for the reduced map f: degree of the gcd of all 2x2 minors in θ.
inline int preimage_count(const DQ<GPoly>& f, const GaussRational& theta0) {
  std::array<GaussRational, 8> v;
  for (int c = 0; c < 8; ++c) v[c] = f[c].eval(theta0);
  GPoly g;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b) g = gcd(g, v[b] * f[a] - v[a] * f[b]);
  return g.degree();
}

}  // namespace detail

/// Coupler-curve degree of links i, j from the bonds (sum of local distances), and, when every
/// component is rationally parametrized, directly from the parametrized coupling map.
inline CouplerDegree coupler_degree(const ConfigurationCurve& cc, const BondSet& bs, int i, int j) {
  const Linkage& l = cc.linkage;
  CouplerDegree cd;
  cd.i = i;
  cd.j = j;
  cd.lower_bound = !bs.complete;
  for (const auto& b : bs.bonds) {
    cd.twice_algebraic += twice_local_distance(l, b.place, i, j);
    if (!b.certified) cd.lower_bound = true;
  }
  if (i == j) return cd;
  auto chain = l.chain_between_links(i, j);
  int total = 0, curve = 0;
  bool all = true;
  for (int c = 0; c < cc.size(); ++c) {
    const auto& rp = cc.parametrizations[c];
    if (!rp) {
      all = false;
      cd.mapping_degrees.push_back(std::nullopt);
      continue;
    }
    auto f = detail::reduced_chain_map(l, *rp, chain);
    int d = detail::map_degree(f);
    total += d;
    if (d == 0) {
      cd.mapping_degrees.push_back(std::nullopt);
      continue;
    }
    int m = -1;
    for (const Rational& t0 : {Rational(7, 3), Rational(-5, 11), Rational(13, 2)}) {
      int p = detail::preimage_count(f, GaussRational(t0));
      if (p > 0 && (m < 0 || p < m)) m = p;
    }
    cd.mapping_degrees.push_back(m);
    if (m > 0) curve += d / m;
  }
  if (all) {
    cd.hyperplane_count = total;
    cd.curve_degree = curve;
  }
  return cd;
}

inline std::vector<CouplerDegree> degree_table(const ConfigurationCurve& cc, const BondSet& bs) {
  std::vector<CouplerDegree> out;
  for (int i = 0; i < cc.linkage.num_links; ++i)
    for (int j = i + 1; j < cc.linkage.num_links; ++j) out.push_back(coupler_degree(cc, bs, i, j));
  return out;
}

/// A separating line: one per conjugate pair of simple bonds.
struct DiagramLine {
  int pair = -1;
  std::vector<int> bonds;
  std::vector<int> attached;
  std::vector<std::vector<int>> sides;
};

struct BondDiagram {
  int num_links = 0;
  std::vector<std::pair<int, int>> joints;
  std::vector<DiagramLine> lines;
  /// Bonds whose local distances are not given by a 2-partition of the links.
  std::vector<int> anomalous;
};

/// True if d(i, j) = 1/2 across the bond's 2-partition and 0 inside it.
inline bool is_simple_bond(const Linkage& l, const Bond& b) {
  if (b.partition.size() != 2) return false;
  std::vector<int> side(l.num_links, -1);
  for (int s = 0; s < 2; ++s)
    for (int x : b.partition[s]) side[x] = s;
  auto table = local_distance_table(l, b);
  for (int i = 0; i < l.num_links; ++i)
    for (int j = 0; j < l.num_links; ++j)
      if (i != j && table[i][j] != (side[i] != side[j] ? 1 : 0)) return false;
  return true;
}

inline BondDiagram build_diagram(const Linkage& l, const BondSet& bs) {
  BondDiagram d;
  d.num_links = l.num_links;
  d.joints = l.ends;
  std::vector<bool> simple(bs.bonds.size());
  for (std::size_t k = 0; k < bs.bonds.size(); ++k) simple[k] = is_simple_bond(l, bs.bonds[k]);
  std::vector<bool> done(bs.bonds.size(), false);
  for (std::size_t k = 0; k < bs.bonds.size(); ++k) {
    if (done[k]) continue;
    const Bond& b = bs.bonds[k];
    int c = b.conjugate;
    done[k] = true;
    if (c >= 0) done[c] = true;
    bool ok = simple[k] && (c < 0 || simple[c]);
    if (!ok) {
      d.anomalous.push_back(static_cast<int>(k));
      if (c >= 0) d.anomalous.push_back(c);
      continue;
    }
    DiagramLine line;
    line.pair = b.pair;
    line.bonds = {static_cast<int>(k)};
    if (c >= 0) line.bonds.push_back(c);
    line.attached = b.attached;
    line.sides = b.partition;
    d.lines.push_back(std::move(line));
  }
  return d;
}

/// Number of lines separating links i and j.
inline int crossing_count(const BondDiagram& d, int i, int j) {
  int n = 0;
  for (const auto& line : d.lines) {
    bool in0i = std::count(line.sides[0].begin(), line.sides[0].end(), i) > 0;
    bool in0j = std::count(line.sides[0].begin(), line.sides[0].end(), j) > 0;
    if (in0i != in0j) ++n;
  }
  return n;
}

/// Graphviz text: links are circles, joints are boxes on the link edges, and each separating line is
/// a dashed edge between the two joints it crosses.
inline std::string emit_dot(const BondDiagram& d) {
  std::ostringstream o;
  o << "graph bond_diagram {\n";
  o << "  node [fontname=\"Helvetica\"];\n";
  for (int i = 0; i < d.num_links; ++i) o << "  L" << i + 1 << " [shape=circle, label=\"" << i + 1 << "\"];\n";
  for (std::size_t k = 0; k < d.joints.size(); ++k) {
    o << "  J" << k + 1 << " [shape=box, width=0.2, height=0.2, label=\"" << k + 1 << "\"];\n";
    o << "  L" << d.joints[k].first + 1 << " -- J" << k + 1 << ";\n";
    o << "  J" << k + 1 << " -- L" << d.joints[k].second + 1 << ";\n";
  }
  for (std::size_t m = 0; m < d.lines.size(); ++m) {
    const auto& line = d.lines[m];
    if (line.attached.size() != 2) continue;
    o << "  J" << line.attached[0] + 1 << " -- J" << line.attached[1] + 1 << " [style=dashed, color=red, constraint=false, label=\"b"
      << m + 1 << "\"];\n";
  }
  o << "}\n";
  return o.str();
}

/// One outcome of a consistency check.
struct Finding {
  std::string check;
  bool ok = true;
  std::string detail;
};

/// Pseudo-metric properties of the local distance at every bond: zero diagonal, symmetry, triangle
/// inequality, even triangle perimeter (in units of 1/2), conjugate invariance, and additivity along
/// chains whose bond condition is not valid.
inline std::vector<Finding> check_pseudo_metric(const Linkage& l, const BondSet& bs) {
  std::vector<Finding> out;
  int n = l.num_links;
  std::vector<std::vector<std::vector<int>>> tables;
  for (const auto& b : bs.bonds) tables.push_back(local_distance_table(l, b));
  for (std::size_t k = 0; k < bs.bonds.size(); ++k) {
    const auto& t = tables[k];
    std::string tag = "bond " + std::to_string(k + 1);
    Finding sym{"symmetry", true, tag}, tri{"triangle", true, tag}, per{"perimeter", true, tag}, add{"additivity", true, tag};
    for (int i = 0; i < n; ++i) {
      if (t[i][i] != 0) sym.ok = false;
      for (int j = 0; j < n; ++j) {
        if (t[i][j] != t[j][i]) sym.ok = false;
        for (int m = 0; m < n; ++m) {
          if (t[i][m] > t[i][j] + t[j][m]) tri.ok = false;
          if ((t[i][j] + t[j][m] + t[m][i]) % 2 != 0) per.ok = false;
        }
      }
    }
    int checked = 0;
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) {
        if (i == m) continue;
        auto chain = l.chain_between_links(i, m);
        auto bc = check_bond_condition(l, chain, bs, static_cast<int>(k));
        if (bc.zero) continue;
        for (std::size_t p = 0; p + 1 < chain.size(); ++p) {
          int j = l.ends[chain[p]].second;
          ++checked;
          if (t[i][m] != t[i][j] + t[j][m]) {
            add.ok = false;
            add.detail = tag + ": links " + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + std::to_string(m + 1);
          }
        }
      }
    if (add.ok) add.detail = tag + ": " + std::to_string(checked) + " chains";
    out.push_back(sym);
    out.push_back(tri);
    out.push_back(per);
    out.push_back(add);
    int c = bs.bonds[k].conjugate;
    if (c > static_cast<int>(k)) out.push_back({"conjugate", tables[c] == t, tag + " and " + std::to_string(c + 1)});
  }
  return out;
}

/// Consistency of a mobile 6R analysis with the known constraints on bond diagrams.
struct SixRReport {
  /// Degeneracies that put the linkage outside the scope of the checks.
  std::vector<std::string> exclusions;
  std::vector<Finding> findings;
  /// Remarks that are implied by the constraints but not checkable here.
  std::vector<std::string> notes;
  bool consistent() const {
    for (const auto& f : findings)
      if (!f.ok) return false;
    return true;
  }
};

/// `triple_dims[i]` is dim L of the chain (i, i+1, i+2); `pair_dims[i]` of the chain (i, i+1).
inline SixRReport validate_six_r(const Linkage& l, const BondSet& bs, const std::vector<int>& pair_dims,
                                 const std::vector<int>& triple_dims, const std::vector<CouplerDegree>& degrees) {
  if (l.size() != 6 || !l.is_single_loop() || !l.all_revolute()) throw InputError("joints", "validate_six_r needs a 6R loop");
  SixRReport rep;
  auto frozen = frozen_joints(l, bs);
  for (int k : frozen) rep.exclusions.push_back("joint " + std::to_string(k + 1) + " is frozen");
  for (int i = 0; i < 6; ++i) {
    if (pair_dims[i] == 2)
      rep.exclusions.push_back("axes " + std::to_string(i + 1) + " and " + std::to_string((i + 1) % 6 + 1) + " coincide");
    if (triple_dims[i] <= 4)
      rep.exclusions.push_back("axes " + std::to_string(i + 1) + ", " + std::to_string((i + 1) % 6 + 1) + ", " +
                               std::to_string((i + 2) % 6 + 1) + " are parallel or concurrent");
  }
  auto con = bond_connections(bs);
  // (1) attachment bound, counted with multiplicities.
  for (int k = 0; k < 6; ++k) {
    int count = 0;
    for (const auto& b : bs.bonds) {
      if (b.conjugate >= 0 && b.conjugate < static_cast<int>(&b - bs.bonds.data())) continue;
      for (std::size_t a = 0; a < b.attached.size(); ++a)
        if (b.attached[a] == k) count += b.multiplicity[a];
    }
    rep.findings.push_back({"attachment", count <= 4, "joint " + std::to_string(k + 1) + ": " + std::to_string(count) + " pairs"});
  }
  auto degree_of = [&](int i, int j) -> const CouplerDegree* {
    if (i > j) std::swap(i, j);
    for (const auto& d : degrees)
      if (d.i == i && d.j == j) return &d;
    return nullptr;
  };
  for (int i = 0; i < 6; ++i) {
    // (2) no connection of i and i+3 when both overlapping triples satisfy the Bennett condition.
    if (triple_dims[i] == 6 && triple_dims[(i + 1) % 6] == 6) {
      int k = con.pair_count(i, (i + 3) % 6);
      rep.findings.push_back({"short-triples", k == 0,
                              "joints " + std::to_string(i + 1) + "," + std::to_string((i + 3) % 6 + 1) + ": " + std::to_string(k) + " pairs"});
    }
    const CouplerDegree* d = degree_of((i + 2) % 6, (i + 5) % 6);
    if (!d || !d->integral()) continue;
    int deg = d->algebraic();
    std::string name = "C" + std::to_string((i + 2) % 6 + 1) + std::to_string((i + 5) % 6 + 1);
    // (3) opposite Bennett triples and degree above 4 single out one family.
    if (triple_dims[i] == 6 && triple_dims[(i + 3) % 6] == 6 && deg > 4)
      rep.notes.push_back(name + " has degree " + std::to_string(deg) + " > 4 with opposite Bennett triples: Dietmaier type expected");
    // (4) one Bennett triple and a generic opposite triple: a degree above 6 must be 8.
    if (triple_dims[i] == 6 && triple_dims[(i + 3) % 6] == 8 && deg > 6 && !d->lower_bound)
      rep.findings.push_back({"degree-gap", deg == 8, name + " has degree " + std::to_string(deg)});
  }
  auto pm = check_pseudo_metric(l, bs);
  rep.findings.insert(rep.findings.end(), pm.begin(), pm.end());
  return rep;
}

}  // namespace bondforge
