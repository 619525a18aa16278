#pragma once

// Polynomial strings: integer or decimal coefficients, variables x, y, z, w
// or z1 .. zd, '^' with signed integer exponents, '*' between factors.
// A coefficient may be followed directly by a variable ("3x^2"); no other
// juxtaposition is accepted.
//
// Without a fixed variable count the letters used are numbered in the order
// x < y < z < w, skipping unused ones. With vars = d: for d = 1 any single
// letter names the variable; otherwise x, y, z, w are variables 1..4.

#include <optional>
#include <string>

#include "l2twist/mahler.hpp"

namespace l2twist {

LaurentPoly parse_polynomial(const std::string& text, std::optional<int> vars = std::nullopt);

}  // namespace l2twist
