#pragma once

#include <array>
#include <vector>

namespace rbe {

/// Point on the reference triangle in barycentric coordinates.
struct TriPoint {
    std::array<double, 3> lambda;
    double weight; // sums to 1 over the rule (multiply by the triangle area)
};

struct LinePoint {
    double t;      // position in [0, 1]
    double weight; // sums to 1
};

/// Collapsed Gauss rule exact for polynomials of total degree <= `degree` (<= 8).
const std::vector<TriPoint>& triangle_rule(int degree);

/// Gauss-Legendre rule on [0, 1] exact up to `degree` (<= 9).
const std::vector<LinePoint>& line_rule(int degree);

/// Largest monomial degree m + n accepted in a form weight.
inline constexpr int kMaxMonomialDegree = 6;

} // namespace rbe
