#pragma once

#include "bondforge/families.hpp"

#include <random>

namespace fixtures {

using namespace bondforge;

/// w = (1, 2, 1, 2), d = (4, 16/5, 4, 16/5); closure 3 t1 t2 + 1 = t1 + t3 = t2 + t4 = 0.
inline Linkage bennett() { return make_bennett(1, 2, 4); }

/// The Bennett fixture with joints 2 and 4 reversed: w = (-1, -1/2, -1, -1/2).
inline Linkage bennett_flipped() { return flip_orientation(flip_orientation(bennett(), 1), 3); }

inline std::vector<ProjectiveParam<Rational>> bennett_point(const Rational& t) {
  using PP = ProjectiveParam<Rational>;
  return {PP::finite(t), PP::finite(-1 / (3 * t)), PP::finite(-t), PP::finite(1 / (3 * t))};
}

inline Linkage goldberg() { return make_goldberg({1, 2, 4}, {1, 3, 4}); }

inline std::array<DQ<Rational>, 3> dup_lines() {
  return {rational_line(Rational(1, 3), Rational(2, 5), {1, 2, -1}), rational_line(Rational(-2, 7), Rational(1, 2), {0, -1, 3}),
          rational_line(Rational(3, 4), Rational(-1, 5), {2, 1, 1})};
}

/// Lines h1, h2, h3 repeated: h4 = h1, h5 = h2, h6 = h3.
inline Linkage dup_axes() {
  auto h = dup_lines();
  return make_duplicated_axes_6r(h[0], h[1], h[2]);
}

/// Axes of the Bennett fixture at t1 = 1/2 in a common frame.
inline std::vector<DQ<Rational>> bennett_axes() {
  Linkage b = bennett();
  return global_axes<Rational>(b, rational_configuration(b, 0, Rational(1, 2)));
}

/// 6R loops made of the Bennett axes and two extra random axes, which are frozen; `perm` picks the
/// positions of the extra axes: 0 -> (2, 5), 1 -> (1, 4), 2 -> (3, 6) (1-based).
inline Linkage bennett_plus_two(int perm, std::uint64_t seed = 3) {
  auto ax = bennett_axes();
  std::mt19937_64 rng(seed);
  auto x = random_line(rng), y = random_line(rng);
  switch (perm) {
    case 0:
      return linkage_from_axes({ax[0], x, ax[1], ax[2], y, ax[3]});
    case 1:
      return linkage_from_axes({x, ax[0], ax[1], y, ax[2], ax[3]});
    default:
      return linkage_from_axes({ax[0], ax[1], x, ax[2], ax[3], y});
  }
}

inline Linkage random_6r(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_dh_linkage(6, rng);
}

}  // namespace fixtures
