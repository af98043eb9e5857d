#include "rbelast/quadrature.hpp"

#include "rbelast/errors.hpp"

#include <cmath>
#include <string>

namespace rbe {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], n = 1..5
struct GL {
    std::array<double, 5> x, w;
};

const GL& gauss_legendre(int n)
{
    static const std::array<GL, 5> table = {{
        {{0.0}, {2.0}},
        {{-0.57735026918962576451, 0.57735026918962576451}, {1.0, 1.0}},
        {{-0.77459666924148337704, 0.0, 0.77459666924148337704},
         {0.55555555555555555556, 0.88888888888888888889, 0.55555555555555555556}},
        {{-0.86113631159405257522, -0.33998104358485626480, 0.33998104358485626480, 0.86113631159405257522},
         {0.34785484513745385737, 0.65214515486254614263, 0.65214515486254614263, 0.34785484513745385737}},
        {{-0.90617984593866399280, -0.53846931010568309104, 0.0, 0.53846931010568309104, 0.90617984593866399280},
         {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889, 0.47862867049936646804,
          0.23692688505618908751}},
    }};
    return table[n - 1];
}

std::vector<TriPoint> collapsed_rule(int degree)
{
    if (degree == 0 || degree == 1)
        return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}};
    // Duffy collapse: the s-direction carries an extra (1 - s) factor
    const int ns = (degree + 3) / 2;
    const int nt = (degree + 2) / 2;
    const auto& gs = gauss_legendre(ns);
    const auto& gt = gauss_legendre(nt);
    std::vector<TriPoint> pts;
    for (int i = 0; i < ns; ++i) {
        const double s = 0.5 * (gs.x[i] + 1.0);
        for (int j = 0; j < nt; ++j) {
            const double t = 0.5 * (gt.x[j] + 1.0);
            const double l1 = s, l2 = (1.0 - s) * t;
            // reference area 1/2, so weights sum to 1 after multiplying by 2
            const double w = 0.25 * gs.w[i] * gt.w[j] * (1.0 - s) * 2.0;
            pts.push_back({{1.0 - l1 - l2, l1, l2}, w});
        }
    }
    return pts;
}

} // namespace

const std::vector<TriPoint>& triangle_rule(int degree)
{
    static const auto rules = [] {
        std::array<std::vector<TriPoint>, 9> r;
        for (int d = 0; d < 9; ++d)
            r[d] = collapsed_rule(d);
        return r;
    }();
    if (degree < 0 || degree > 8)
        throw QuadratureDegreeUnsupported("triangle rule of degree " + std::to_string(degree));
    return rules[degree];
}

const std::vector<LinePoint>& line_rule(int degree)
{
    static const auto rules = [] {
        std::array<std::vector<LinePoint>, 10> r;
        for (int d = 0; d < 10; ++d) {
            const auto& g = gauss_legendre(d / 2 + 1);
            for (int i = 0; i < d / 2 + 1; ++i)
                r[d].push_back({0.5 * (g.x[i] + 1.0), 0.5 * g.w[i]});
        }
        return r;
    }();
    if (degree < 0 || degree > 9)
        throw QuadratureDegreeUnsupported("line rule of degree " + std::to_string(degree));
    return rules[degree];
}

} // namespace rbe
