#pragma once

#include "bondforge/dualquat.hpp"
#include "bondforge/errors.hpp"

#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace bondforge {

template <class S>
S from_rational(const Rational& r) {
  if constexpr (std::is_same_v<S, Complex>) {
    return Complex(r.convert_to<double>(), 0.0);
  } else if constexpr (std::is_same_v<S, double>) {
    return r.convert_to<double>();
  } else {
    return S(r);
  }
}

template <class S>
DualQuaternion<S> from_rational(const DualQuaternion<Rational>& h) {
  DualQuaternion<S> r;
  for (int a = 0; a < 8; ++a) r[a] = from_rational<S>(h[a]);
  return r;
}

/// Denavit-Hartenberg parameters: offset s, twist w = cot(angle/2) on P^1, distance d.
struct DHParams {
  Rational s{0};
  ProjectiveParam<Rational> w = ProjectiveParam<Rational>::infinity();
  Rational d{0};

  static DHParams make(Rational s, Rational w, Rational d) {
    return {std::move(s), ProjectiveParam<Rational>::finite(std::move(w)), std::move(d)};
  }
  static DHParams make_parallel(Rational s, Rational d) {
    return {std::move(s), ProjectiveParam<Rational>::infinity(), std::move(d)};
  }
  bool w_infinite() const { return w.v == 0; }
};

/// (1 - (s/2) ε i)(w - k)(1 - (d/2) ε k); for w = inf the middle factor is 1. Not normalized.
inline DQ<Rational> dh_transfer(const DHParams& p) {
  using D = DQ<Rational>;
  D a = D::one() - (p.s / 2) * (D::eps() * D::i());
  D b = D::scalar(p.w.u) - p.w.v * D::k();
  D c = D::one() - (p.d / 2) * (D::eps() * D::k());
  return a * b * c;
}

enum class JointKind { Revolute, Prismatic };
enum class JointForm { DH, Axis, Prismatic };

struct Joint {
  JointKind kind = JointKind::Revolute;
  JointForm form = JointForm::DH;
  DQ<Rational> axis = DQ<Rational>::i();
  Quaternion<Rational> direction;
  DQ<Rational> transfer = DQ<Rational>::one();
  std::optional<DHParams> dh;

  static Joint revolute_dh(const DHParams& p) {
    Joint j;
    j.kind = JointKind::Revolute;
    j.form = JointForm::DH;
    j.axis = DQ<Rational>::i();
    j.transfer = dh_transfer(p);
    j.dh = p;
    return j;
  }
  static Joint revolute_axis(const DQ<Rational>& h) {
    Joint j;
    j.kind = JointKind::Revolute;
    j.form = JointForm::Axis;
    j.axis = h;
    j.transfer = DQ<Rational>::one();
    return j;
  }
  static Joint prismatic(const Quaternion<Rational>& dir, const DQ<Rational>& g = DQ<Rational>::one()) {
    Joint j;
    j.kind = JointKind::Prismatic;
    j.form = JointForm::Prismatic;
    j.direction = dir;
    j.axis = DQ<Rational>(Quaternion<Rational>(), dir);
    j.transfer = g;
    return j;
  }

  bool revolute() const { return kind == JointKind::Revolute; }
};

inline bool is_line(const DQ<Rational>& h) {
  return h * h == -DQ<Rational>::one();
}

/// Validates joint data; throws InputError naming `field`.
inline void validate_joint(const Joint& j, const std::string& field) {
  if (j.revolute()) {
    if (!is_line(j.axis)) throw InputError(field + ".axis", "axis must be a line (h^2 = -1)");
  } else {
    const auto& p = j.direction;
    if (p.w != 0 || p.norm() != 1) throw InputError(field + ".direction", "direction must be a rational unit vector");
  }
  auto n = norm(j.transfer);
  if (n.eps != 0) throw InputError(field + ".transfer", "transfer is not on the Study quadric");
  if (n.real == 0) throw InputError(field + ".transfer", "transfer lies on the null cone");
}

/// Signed joint reference inside a loop: +k traverses joint k forward, -k backward (1-based).
using LoopPath = std::vector<int>;

struct Linkage {
  int num_links = 0;
  std::vector<Joint> joints;
  /// Joint k joins link ends[k].first (base) to ends[k].second (moving).
  std::vector<std::pair<int, int>> ends;
  std::vector<LoopPath> loops;

  int size() const { return static_cast<int>(joints.size()); }
  const Joint& joint(int k) const { return joints.at(k); }

  /// Single closed loop: joint k (0-based) joins link k-1 to link k (mod n).
  static Linkage cycle(std::vector<Joint> js) {
    Linkage l;
    int n = static_cast<int>(js.size());
    l.num_links = n;
    l.joints = std::move(js);
    LoopPath loop;
    for (int k = 0; k < n; ++k) {
      l.ends.emplace_back((k - 1 + n) % n, k);
      loop.push_back(k + 1);
    }
    l.loops.push_back(loop);
    l.validate();
    return l;
  }

  bool is_single_loop() const {
    if (loops.size() != 1 || static_cast<int>(loops[0].size()) != size()) return false;
    for (int k = 0; k < size(); ++k)
      if (loops[0][k] != k + 1) return false;
    return true;
  }

  bool all_dh() const {
    for (const auto& j : joints)
      if (!j.dh) return false;
    return true;
  }
  bool all_revolute() const {
    for (const auto& j : joints)
      if (!j.revolute()) return false;
    return true;
  }

  void validate() const {
    int n = size();
    if (n < 2) throw InputError("joints", "a linkage needs at least two joints");
    if (static_cast<int>(ends.size()) != n) throw InputError("graph", "one edge per joint is required");
    for (int k = 0; k < n; ++k) {
      validate_joint(joints[k], "joints[" + std::to_string(k) + "]");
      auto [a, b] = ends[k];
      if (a < 0 || b < 0 || a >= num_links || b >= num_links || a == b)
        throw InputError("graph[" + std::to_string(k) + "]", "joint must join two distinct links");
    }
    if (loops.empty()) throw InputError("loops", "at least one closed loop is required");
    for (std::size_t li = 0; li < loops.size(); ++li) {
      const auto& lp = loops[li];
      std::string f = "loops[" + std::to_string(li) + "]";
      if (lp.size() < 2) throw InputError(f, "loop too short");
      int start = -1, cur = -1;
      for (std::size_t s = 0; s < lp.size(); ++s) {
        int ref = lp[s];
        int k = std::abs(ref) - 1;
        if (ref == 0 || k >= n) throw InputError(f, "joint index out of range");
        int from = ref > 0 ? ends[k].first : ends[k].second;
        int to = ref > 0 ? ends[k].second : ends[k].first;
        if (s == 0) start = from;
        else if (from != cur) throw InputError(f, "consecutive joints do not share a link");
        cur = to;
      }
      if (cur != start) throw InputError(f, "loop is not closed");
    }
  }

  /// Joints on the forward path of the single loop from link i to link j (0-based links).
  std::vector<int> chain_between_links(int i, int j) const {
    int n = size();
    std::vector<int> out;
    for (int k = (i + 1) % n; k != (j + 1) % n; k = (k + 1) % n) out.push_back(k);
    return out;
  }
};

inline Linkage linkage_from_dh(const std::vector<DHParams>& params) {
  std::vector<Joint> js;
  for (const auto& p : params) js.push_back(Joint::revolute_dh(p));
  return Linkage::cycle(std::move(js));
}

inline Linkage linkage_from_axes(const std::vector<DQ<Rational>>& axes) {
  std::vector<Joint> js;
  for (const auto& h : axes) js.push_back(Joint::revolute_axis(h));
  return Linkage::cycle(std::move(js));
}

/// Relative motion of a joint: R: (u - v h) g, P: (u - v ε p) g.
template <class S>
DQ<S> joint_motion(const Joint& j, const ProjectiveParam<S>& t) {
  DQ<S> h = from_rational<S>(j.axis);
  DQ<S> g = from_rational<S>(j.transfer);
  return (DQ<S>::scalar(t.u) - t.v * h) * g;
}

/// Product of joint motions along a loop path; backward steps use the conjugate.
template <class S>
DQ<S> loop_product(const Linkage& l, const LoopPath& loop, const std::vector<ProjectiveParam<S>>& t) {
  DQ<S> prod = DQ<S>::one();
  for (int ref : loop) {
    int k = std::abs(ref) - 1;
    DQ<S> m = joint_motion<S>(l.joints[k], t[k]);
    prod = prod * (ref > 0 ? m : m.conj());
  }
  return prod;
}

/// Product of joint motions of a chain of joints (forward).
template <class S>
DQ<S> chain_product(const Linkage& l, const std::vector<int>& chain, const std::vector<ProjectiveParam<S>>& t) {
  DQ<S> prod = DQ<S>::one();
  for (int k : chain) prod = prod * joint_motion<S>(l.joints[k], t[k]);
  return prod;
}

/// Inverse class representative conj(h) / N(h) for Study-quadric elements.
template <class S>
DQ<S> study_inverse(const DQ<S>& h) {
  auto n = norm(h);
  if (is_zero(n.real, 0.0)) throw std::domain_error("study_inverse: element on the null cone");
  return (S(1) / n.real) * h.conj();
}

/// Global axes (or prismatic directions) of a single-loop linkage at configuration `t`.
template <class S>
std::vector<DQ<S>> global_axes(const Linkage& l, const std::vector<ProjectiveParam<S>>& t) {
  std::vector<DQ<S>> out;
  DQ<S> frame = DQ<S>::one();
  for (int k = 0; k < l.size(); ++k) {
    DQ<S> h = from_rational<S>(l.joints[k].axis);
    if (l.joints[k].revolute()) {
      out.push_back(frame * h * study_inverse(frame));
    } else {
      Quaternion<S> a = frame.primal();
      Quaternion<S> p = h.dual();
      S na = a.norm();
      Quaternion<S> r = a * p * a.conj();
      out.push_back(DQ<S>(Quaternion<S>(), (S(1) / na) * r));
    }
    frame = frame * joint_motion<S>(l.joints[k], t[k]);
  }
  return out;
}

/// Axis-form copy of a single-loop linkage whose initial configuration (all inf) is `t`.
inline Linkage axis_form_at(const Linkage& l, const std::vector<ProjectiveParam<Rational>>& t) {
  if (!l.is_single_loop()) throw InputError("loops", "axis_form_at needs a single-loop linkage");
  DQ<Rational> closure = loop_product<Rational>(l, l.loops[0], t);
  if (!proportional(closure, DQ<Rational>::one())) throw InputError("configuration", "not a closed configuration");
  auto axes = global_axes<Rational>(l, t);
  std::vector<Joint> js;
  for (int k = 0; k < l.size(); ++k) {
    if (l.joints[k].revolute()) {
      js.push_back(Joint::revolute_axis(axes[k]));
    } else {
      js.push_back(Joint::prismatic(axes[k].dual()));
    }
  }
  return Linkage::cycle(std::move(js));
}

/// Reverses the orientation of joint k of a DH-defined single loop.
/// Twists w_{k-1}, w_k become -1/w, offset s_k becomes -s_k; solutions map t_k -> -t_k.
inline Linkage flip_orientation(const Linkage& l, int k) {
  if (!l.is_single_loop() || !l.all_dh() || !l.all_revolute())
    throw InputError("joints", "flip_orientation needs a revolute DH-defined single loop");
  int n = l.size();
  if (k < 0 || k >= n) throw InputError("joint", "joint index out of range");
  std::vector<DHParams> p;
  for (const auto& j : l.joints) p.push_back(*j.dh);
  auto flip_w = [](ProjectiveParam<Rational>& w) { w = {-w.v, w.u}; };
  flip_w(p[(k - 1 + n) % n].w);
  flip_w(p[k].w);
  p[k].s = -p[k].s;
  return linkage_from_dh(p);
}

/// Line data of an axis: direction and moment as 3-vectors (h = p + ε m).
template <class S>
std::pair<Vec3<S>, Vec3<S>> plucker(const DQ<S>& h) {
  return {Vec3<S>{h[1], h[2], h[3]}, Vec3<S>{h[5], h[6], h[7]}};
}

/// True if two lines coincide as undirected lines.
template <class S>
bool same_line(const DQ<S>& a, const DQ<S>& b, double tol = kDefaultTol) {
  return proportional(a, b, tol);
}

}  // namespace bondforge
