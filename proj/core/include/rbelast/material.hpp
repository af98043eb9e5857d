#pragma once

#include "rbelast/expr.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <optional>
#include <type_traits>

namespace rbe {

enum class MaterialMode {
    PlaneStressIsotropic,
    PlaneStrainIsotropic,
    PlaneStressOrthotropic,
    PlaneStrainOrthotropic,
    AxisymmetricIsotropic,
};

bool is_axisymmetric(MaterialMode m);

/// Material constants; T is double for plain evaluation or Expr when moduli
/// depend on the parameter vector. Isotropic modes read E1 and nu12 only.
template <class T>
struct BasicMaterialSpec {
    MaterialMode mode = MaterialMode::PlaneStressIsotropic;
    T E1 = 1.0, E2 = 1.0, E3 = 1.0;
    T nu12 = 0.3;
    std::optional<T> nu13, nu23; // default to nu12
    std::optional<T> nu21;       // derived from nu12*E2/E1 when absent
    std::optional<T> G12;        // shear modulus estimate when absent
    T theta = 0.0;
};

using MaterialSpec = BasicMaterialSpec<double>;
using MaterialExpr = BasicMaterialSpec<Expr>;

template <class T, int R, int C>
using Array2 = std::array<std::array<T, C>, R>;

/// 5x5 tensor whose entries are polynomials in the mapped coordinate x1:
/// coeff[d](i,j) multiplies x1^d. Slots 0..3 are (dw1/dx1, dw1/dx2, dw2/dx1, dw2/dx2),
/// slot 4 is w1 itself (used by the axisymmetric form only).
template <class T>
struct BasicTensor {
    std::array<Array2<T, 5, 5>, 4> coeff{};
    int degree = 0;
};

struct ElasticTensor {
    std::array<Eigen::Matrix<double, 5, 5>, 4> coeff;
    int degree = 0;

    Eigen::Matrix<double, 5, 5> at(double x1) const;
};

double estimate_shear_modulus(double E1, double E2, double nu12, double nu21);
Eigen::Matrix3d rotate_material(const Eigen::Matrix3d& E_hat, double theta);

/// 3x3 (Cartesian) or 4x4 (axisymmetric) constitutive matrix.
/// Throws AsymmetricConstitutive or NotPositiveDefinite.
Eigen::MatrixXd build_E_matrix(const MaterialSpec& spec);

ElasticTensor build_Sa(const MaterialSpec& spec);

// Generic versions; defined for T = double and T = Expr.

template <class T>
T shear_modulus(const T& E1, const T& E2, const T& nu12, const T& nu21)
{
    return T(1.0) / ((T(1.0) + nu21) / E1 + (T(1.0) + nu12) / E2);
}

template <class T>
Array2<T, 3, 3> rotate(const Array2<T, 3, 3>& Eh, const T& theta)
{
    using std::cos;
    using std::sin;
    const T c = cos(theta), s = sin(theta);
    const T cc = c * c, ss = s * s, sc = s * c;
    const Array2<T, 3, 3> Tm{{{cc, ss, T(-2.0) * sc}, {ss, cc, T(2.0) * sc}, {sc, -sc, cc - ss}}};
    Array2<T, 3, 3> tmp{}, out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            T acc = 0.0;
            for (int k = 0; k < 3; ++k)
                acc += Tm[i][k] * Eh[k][j];
            tmp[i][j] = acc;
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            T acc = 0.0;
            for (int k = 0; k < 3; ++k)
                acc += tmp[i][k] * Tm[j][k];
            out[i][j] = acc;
        }
    return out;
}

template <class T>
bool theta_is_zero(const T& theta)
{
    if constexpr (std::is_same_v<T, Expr>)
        return theta.is_zero();
    else
        return theta == 0.0;
}

/// Cartesian constitutive matrix acting on (eps11, eps22, gamma12).
template <class T>
Array2<T, 3, 3> constitutive(const BasicMaterialSpec<T>& s)
{
    const T one = 1.0;
    switch (s.mode) {
    case MaterialMode::PlaneStressIsotropic: {
        const T E = s.E1, nu = s.nu12;
        const T f = E / (one - nu * nu);
        return {{{f, f * nu, T(0.0)}, {f * nu, f, T(0.0)}, {T(0.0), T(0.0), f * (one - nu) / T(2.0)}}};
    }
    case MaterialMode::PlaneStrainIsotropic: {
        const T E = s.E1, nu = s.nu12;
        const T f = E / ((one + nu) * (one - T(2.0) * nu));
        return {{{f * (one - nu), f * nu, T(0.0)},
                 {f * nu, f * (one - nu), T(0.0)},
                 {T(0.0), T(0.0), f * (one - T(2.0) * nu) / T(2.0)}}};
    }
    case MaterialMode::PlaneStressOrthotropic: {
        const T nu21 = s.nu21 ? *s.nu21 : s.nu12 * s.E2 / s.E1;
        const T G = s.G12 ? *s.G12 : shear_modulus(s.E1, s.E2, s.nu12, nu21);
        const T d = one - s.nu12 * nu21;
        // nu21 * E1 == nu12 * E2 keeps the matrix symmetric
        Array2<T, 3, 3> Eh{{{s.E1 / d, nu21 * s.E1 / d, T(0.0)},
                            {s.nu12 * s.E2 / d, s.E2 / d, T(0.0)},
                            {T(0.0), T(0.0), G}}};
        return theta_is_zero(s.theta) ? Eh : rotate(Eh, s.theta);
    }
    case MaterialMode::PlaneStrainOrthotropic: {
        const T nu13 = s.nu13 ? *s.nu13 : s.nu12;
        const T nu23 = s.nu23 ? *s.nu23 : s.nu12;
        const T nu21 = s.nu21 ? *s.nu21 : s.nu12 * s.E2 / s.E1;
        const T nu31 = nu13 * s.E3 / s.E1;
        const T nu32 = nu23 * s.E3 / s.E2;
        const T G = s.G12 ? *s.G12 : shear_modulus(s.E1, s.E2, s.nu12, nu21);
        const T L = (one - nu13 * nu31) * (one - nu23 * nu32) - (s.nu12 + nu13 * nu32) * (nu21 + nu23 * nu31);
        Array2<T, 3, 3> Eh{{{(one - nu23 * nu32) * s.E1 / L, (nu21 + nu23 * nu31) * s.E1 / L, T(0.0)},
                            {(s.nu12 + nu13 * nu32) * s.E2 / L, (one - nu13 * nu31) * s.E2 / L, T(0.0)},
                            {T(0.0), T(0.0), G}}};
        return theta_is_zero(s.theta) ? Eh : rotate(Eh, s.theta);
    }
    case MaterialMode::AxisymmetricIsotropic: break;
    }
    return {};
}

/// Axisymmetric constitutive matrix acting on (eps_rr, eps_zz, eps_tt, gamma_rz).
template <class T>
Array2<T, 4, 4> constitutive_axisymmetric(const BasicMaterialSpec<T>& s)
{
    const T one = 1.0, zero = 0.0;
    const T E = s.E1, nu = s.nu12;
    const T f = E / ((one + nu) * (one - T(2.0) * nu));
    const T a = f * (one - nu), b = f * nu, g = f * (one - T(2.0) * nu) / T(2.0);
    return {{{a, b, b, zero}, {b, a, b, zero}, {b, b, a, zero}, {zero, zero, zero, g}}};
}

template <class T>
BasicTensor<T> elastic_tensor(const BasicMaterialSpec<T>& s)
{
    BasicTensor<T> S;
    for (auto& c : S.coeff)
        for (auto& row : c)
            row.fill(T(0.0));

    if (!is_axisymmetric(s.mode)) {
        // strain = B g with g = (w1,1  w1,2  w2,1  w2,2): eps11 = g0, eps22 = g3, gamma = g1 + g2
        const auto E = constitutive(s);
        static constexpr int slot_strain[4] = {0, 2, 2, 1}; // strain row fed by each gradient slot
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                S.coeff[0][i][j] = E[slot_strain[i]][slot_strain[j]];
        S.degree = 0;
        return S;
    }

    // axisymmetric with w1 = u_r / x1: strain = (x1 B1 + B0) (g, w1)
    const auto E = constitutive_axisymmetric(s);
    const double B0[4][5] = {{0, 0, 0, 0, 1}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}, {0, 0, 1, 0, 0}};
    const double B1[4][5] = {{1, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 1, 0, 0, 0}};
    // S = x1 (x1 B1 + B0)^T E (x1 B1 + B0) -> degrees 1..3
    auto triple = [&](const double (&P)[4][5], const double (&Q)[4][5], int i, int j) {
        T acc = 0.0;
        for (int a = 0; a < 4; ++a) {
            if (P[a][i] == 0.0)
                continue;
            for (int b = 0; b < 4; ++b)
                if (Q[b][j] != 0.0)
                    acc += T(P[a][i] * Q[b][j]) * E[a][b];
        }
        return acc;
    };
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            S.coeff[1][i][j] = triple(B0, B0, i, j);
            S.coeff[2][i][j] = triple(B1, B0, i, j) + triple(B0, B1, i, j);
            S.coeff[3][i][j] = triple(B1, B1, i, j);
        }
    S.degree = 3;
    return S;
}

} // namespace rbe
