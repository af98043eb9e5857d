#include "rbelast/material.hpp"

#include "rbelast/errors.hpp"

#include <Eigen/Cholesky>

namespace rbe {

bool is_axisymmetric(MaterialMode m)
{
    return m == MaterialMode::AxisymmetricIsotropic;
}

Eigen::Matrix<double, 5, 5> ElasticTensor::at(double x1) const
{
    Eigen::Matrix<double, 5, 5> S = Eigen::Matrix<double, 5, 5>::Zero();
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= x1)
        S += p * coeff[d];
    return S;
}

double estimate_shear_modulus(double E1, double E2, double nu12, double nu21)
{
    return shear_modulus(E1, E2, nu12, nu21);
}

Eigen::Matrix3d rotate_material(const Eigen::Matrix3d& E_hat, double theta)
{
    Array2<double, 3, 3> a{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            a[i][j] = E_hat(i, j);
    const auto r = rotate(a, theta);
    Eigen::Matrix3d out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out(i, j) = r[i][j];
    return out;
}

namespace {

void check_spec(const MaterialSpec& s)
{
    const bool iso = s.mode == MaterialMode::PlaneStressIsotropic || s.mode == MaterialMode::PlaneStrainIsotropic ||
                     s.mode == MaterialMode::AxisymmetricIsotropic;
    if (!(s.E1 > 0) || (!iso && (!(s.E2 > 0) || !(s.E3 > 0))))
        throw NotPositiveDefinite("moduli must be positive");
    if (s.G12 && !(*s.G12 > 0))
        throw NotPositiveDefinite("shear modulus must be positive");
    if (!iso && s.nu21) {
        const double lhs = s.nu12 * s.E2, rhs = *s.nu21 * s.E1;
        if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(lhs), std::abs(rhs)))
            throw AsymmetricConstitutive("nu12*E2 != nu21*E1");
    }
}

template <int N>
Eigen::MatrixXd to_eigen(const Array2<double, N, N>& a)
{
    Eigen::MatrixXd m(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            m(i, j) = a[i][j];
    return m;
}

} // namespace

Eigen::MatrixXd build_E_matrix(const MaterialSpec& spec)
{
    check_spec(spec);
    const Eigen::MatrixXd E = is_axisymmetric(spec.mode) ? to_eigen<4>(constitutive_axisymmetric(spec))
                                                         : to_eigen<3>(constitutive(spec));
    const double scale = E.cwiseAbs().maxCoeff();
    if ((E - E.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw AsymmetricConstitutive("constitutive matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (E + E.transpose()));
    if (llt.info() != Eigen::Success || !E.allFinite())
        throw NotPositiveDefinite("constitutive matrix is not positive definite");
    return E;
}

ElasticTensor build_Sa(const MaterialSpec& spec)
{
    build_E_matrix(spec); // validation only
    const auto S = elastic_tensor(spec);
    ElasticTensor out;
    out.degree = S.degree;
    for (int d = 0; d < 4; ++d)
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                out.coeff[d](i, j) = S.coeff[d][i][j];
    return out;
}

} // namespace rbe
