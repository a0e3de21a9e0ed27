#pragma once

#include "bondforge/linkage.hpp"

#include "json.hpp"

#include <fstream>
#include <queue>
#include <sstream>

namespace bondforge {

using Json = nlohmann::ordered_json;

namespace detail {

inline Rational json_rational(const Json& v, const std::string& field) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer() || v.is_number_float()) return parse_rational(v.dump());
  } catch (const std::invalid_argument& e) {
    throw InputError(field, e.what());
  }
  throw InputError(field, "expected a number or a \"p/q\" string");
}

inline ProjectiveParam<Rational> json_projective(const Json& v, const std::string& field) {
  if (v.is_string() && v.get<std::string>() == "inf") return ProjectiveParam<Rational>::infinity();
  return ProjectiveParam<Rational>::finite(json_rational(v, field));
}

inline std::vector<Rational> json_vector(const Json& v, std::size_t size, const std::string& field) {
  if (!v.is_array() || v.size() != size) throw InputError(field, "expected an array of " + std::to_string(size) + " numbers");
  std::vector<Rational> out;
  for (std::size_t k = 0; k < size; ++k) out.push_back(json_rational(v[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

inline DQ<Rational> json_dq(const Json& v, const std::string& field) {
  auto c = json_vector(v, 8, field);
  DQ<Rational> h;
  for (int a = 0; a < 8; ++a) h[a] = c[a];
  return h;
}

inline const Json& require(const Json& obj, const char* key, const std::string& field) {
  if (!obj.contains(key)) throw InputError(field.empty() ? std::string(key) : field + "." + key, "missing field");
  return obj.at(key);
}

inline Joint json_joint(const Json& j, const std::string& f) {
  if (!j.is_object()) throw InputError(f, "joint must be an object");
  std::string type = j.contains("type") ? j.at("type").get<std::string>() : "R";
  if (type == "R") {
    if (j.contains("dh") == j.contains("axis")) throw InputError(f, "an R joint needs exactly one of \"dh\" and \"axis\"");
    if (j.contains("axis")) return Joint::revolute_axis(json_dq(j.at("axis"), f + ".axis"));
    const Json& dh = j.at("dh");
    if (!dh.is_object()) throw InputError(f + ".dh", "expected an object");
    DHParams p;
    p.s = dh.contains("s") ? json_rational(dh.at("s"), f + ".dh.s") : Rational(0);
    p.w = json_projective(require(dh, "w", f + ".dh"), f + ".dh.w");
    p.d = dh.contains("d") ? json_rational(dh.at("d"), f + ".dh.d") : Rational(0);
    return Joint::revolute_dh(p);
  }
  if (type == "P") {
    auto d = json_vector(require(j, "direction", f), 3, f + ".direction");
    DQ<Rational> g = j.contains("transfer") ? json_dq(j.at("transfer"), f + ".transfer") : DQ<Rational>::one();
    return Joint::prismatic(Quaternion<Rational>::pure(d[0], d[1], d[2]), g);
  }
  throw InputError(f + ".type", "unknown joint type '" + type + "' (expected R or P)");
}

/// One loop per edge outside a spanning tree of the link graph.
inline std::vector<LoopPath> fundamental_loops(int num_links, const std::vector<std::pair<int, int>>& ends) {
  int n = static_cast<int>(ends.size());
  std::vector<std::vector<std::pair<int, int>>> adj(num_links);
  for (int k = 0; k < n; ++k) {
    adj[ends[k].first].push_back({k, ends[k].second});
    adj[ends[k].second].push_back({k, ends[k].first});
  }
  std::vector<int> parent_edge(num_links, -1), depth(num_links, -1);
  std::vector<bool> tree(n, false);
  for (int root = 0; root < num_links; ++root) {
    if (depth[root] >= 0) continue;
    depth[root] = 0;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      for (auto [k, b] : adj[a])
        if (depth[b] < 0) {
          depth[b] = depth[a] + 1;
          parent_edge[b] = k;
          tree[k] = true;
          q.push(b);
        }
    }
  }
  auto step_up = [&](int link, LoopPath& path, bool upward) {
    int k = parent_edge[link];
    bool from_parent = ends[k].second == link;
    int ref = from_parent ? k + 1 : -(k + 1);
    path.push_back(upward ? -ref : ref);
    return from_parent ? ends[k].first : ends[k].second;
  };
  std::vector<LoopPath> loops;
  for (int k = 0; k < n; ++k) {
    if (tree[k]) continue;
    auto [a, b] = ends[k];
    LoopPath up, down;
    up.push_back(k + 1);
    int x = b, y = a;
    while (depth[x] > depth[y]) x = step_up(x, up, true);
    while (depth[y] > depth[x]) y = step_up(y, down, false);
    while (x != y) {
      x = step_up(x, up, true);
      y = step_up(y, down, false);
    }
    up.insert(up.end(), down.rbegin(), down.rend());
    loops.push_back(up);
  }
  return loops;
}

}  // namespace detail

/// Reads a linkage description. Without "graph" the joints form a single loop in the given order.
inline Linkage linkage_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("", "linkage file must contain a JSON object");
  const Json& js = detail::require(doc, "joints", "");
  if (!js.is_array()) throw InputError("joints", "expected an array");
  std::vector<Joint> joints;
  for (std::size_t k = 0; k < js.size(); ++k) joints.push_back(detail::json_joint(js[k], "joints[" + std::to_string(k) + "]"));
  if (!doc.contains("graph")) {
    if (doc.contains("loops")) throw InputError("loops", "loops need an explicit graph");
    if (joints.size() < 2) throw InputError("joints", "a linkage needs at least two joints");
    return Linkage::cycle(std::move(joints));
  }
  const Json& g = doc.at("graph");
  if (!g.is_array() || g.size() != joints.size()) throw InputError("graph", "expected one [link, link] pair per joint");
  Linkage l;
  l.joints = std::move(joints);
  for (std::size_t k = 0; k < g.size(); ++k) {
    std::string f = "graph[" + std::to_string(k) + "]";
    if (!g[k].is_array() || g[k].size() != 2 || !g[k][0].is_number_integer() || !g[k][1].is_number_integer())
      throw InputError(f, "expected a pair of 1-based link numbers");
    int a = g[k][0].get<int>() - 1, b = g[k][1].get<int>() - 1;
    if (a < 0 || b < 0) throw InputError(f, "link numbers start at 1");
    l.ends.emplace_back(a, b);
    l.num_links = std::max({l.num_links, a + 1, b + 1});
  }
  if (doc.contains("loops")) {
    const Json& lp = doc.at("loops");
    if (!lp.is_array()) throw InputError("loops", "expected an array of loops");
    for (std::size_t i = 0; i < lp.size(); ++i) {
      std::string f = "loops[" + std::to_string(i) + "]";
      if (!lp[i].is_array()) throw InputError(f, "expected an array of signed 1-based joint numbers");
      LoopPath path;
      for (const auto& r : lp[i]) {
        if (!r.is_number_integer()) throw InputError(f, "expected signed 1-based joint numbers");
        path.push_back(r.get<int>());
      }
      l.loops.push_back(path);
    }
  } else {
    l.loops = detail::fundamental_loops(l.num_links, l.ends);
  }
  l.validate();
  return l;
}

inline Linkage parse_linkage(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("", std::string("malformed JSON: ") + e.what());
  }
  try {
    return linkage_from_json(doc);
  } catch (const Json::type_error& e) {
    throw InputError("", std::string("wrong value type: ") + e.what());
  }
}

inline Linkage read_linkage(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_linkage(ss.str());
}

inline Json rational_json(const Rational& r) { return to_string(r); }

inline Json projective_json(const ProjectiveParam<Rational>& t) {
  if (t.v == 0) return "inf";
  return to_string(t.u / t.v);
}

inline Json dq_json(const DQ<Rational>& h) {
  Json a = Json::array();
  for (int c = 0; c < 8; ++c) a.push_back(to_string(h[c]));
  return a;
}

inline Json linkage_to_json(const Linkage& l) {
  Json doc;
  Json js = Json::array();
  for (const auto& j : l.joints) {
    Json o;
    if (j.revolute()) {
      o["type"] = "R";
      if (j.dh) {
        o["dh"] = {{"s", rational_json(j.dh->s)}, {"w", projective_json(j.dh->w)}, {"d", rational_json(j.dh->d)}};
      } else {
        o["axis"] = dq_json(j.axis);
        if (j.transfer != DQ<Rational>::one()) throw InputError("joints", "axis-form joints must have identity transfer");
      }
    } else {
      o["type"] = "P";
      o["direction"] = {to_string(j.direction.x), to_string(j.direction.y), to_string(j.direction.z)};
      o["transfer"] = dq_json(j.transfer);
    }
    js.push_back(o);
  }
  doc["joints"] = js;
  if (!l.is_single_loop()) {
    Json g = Json::array();
    for (auto [a, b] : l.ends) g.push_back({a + 1, b + 1});
    doc["graph"] = g;
    doc["loops"] = l.loops;
  }
  return doc;
}

}  // namespace bondforge
