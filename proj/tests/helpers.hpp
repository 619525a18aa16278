#pragma once

#include <string>
#include <vector>

#include "l2twist/grouprings.hpp"
#include "l2twist/poly_parser.hpp"

namespace l2twist::test {

inline GroupRingElement el(const std::string& s, int d) { return parse_polynomial(s, d).to_element(); }

/// Matrix over Z[Z^d] from polynomial strings, row by row.
inline GroupRingMatrix mat(int d, const std::vector<std::vector<std::string>>& rows) {
  const Group g = Group::abelian(d);
  const std::size_t r = rows.size(), s = r ? rows[0].size() : 0;
  GroupRingMatrix a(g, r, s);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < s; ++j) a.set(i, j, el(rows[i][j], d));
  return a;
}

}  // namespace l2twist::test
