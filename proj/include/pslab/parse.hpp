#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pslab/capacity.hpp"
#include "pslab/domains.hpp"
#include "pslab/series.hpp"

namespace pslab {

/// Expands a polynomial expression such as "1 - (z1+z2)/2" or "(1-z1)^2".
/// Tokens: real or imaginary literals (2, 0.5, 3i, i), variables z1..zn, + - * /,
/// parentheses and nonnegative integer powers. Division is by nonzero constants only.
/// dimension = 0 infers n from the largest variable index (at least 1).
SparsePoly parse_poly(std::string_view text, std::size_t dimension = 0);

/// A constant expression such as "0.6+0.8i".
Complex parse_complex(std::string_view text);

/// Comma-separated list of constant expressions.
std::vector<Complex> parse_point(std::string_view text);
std::vector<double> parse_reals(std::string_view text);

/// "fix(1)xcircle(1)" or a convex combination "0.5*fix(1)xcircle(1)+0.5*circle(1)xfix(1)".
/// Weights may be omitted on every component, which gives equal weights.
MeasureSpec parse_measure(std::string_view text);

/// "polydisk:N", "ball:N", "ellipsoid:p1,...,pn", "omega-lambda:m,n,lambda".
DomainSpec parse_domain(std::string_view text);

}  // namespace pslab
