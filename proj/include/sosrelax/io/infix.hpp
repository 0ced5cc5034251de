#pragma once

#include <string>

#include "sosrelax/io/problem_file.hpp"
#include "sosrelax/poly.hpp"

namespace sosrelax::io {

// Parses expressions such as "x1^8 + x1^2 + x1*x2 - 3.5*(x2 - 1)^2".
// Grammar: numbers, variables x1..x8, + - * ^ (nonnegative integer
// exponents) and parentheses. The variable count is the largest index used,
// or `n` when that is larger. Throws ParseError with the column on bad input.
Polynomial parse_infix(const std::string& text, int n = 0);

}  // namespace sosrelax::io
