#include "rbelast/problems.hpp"

#include "rbelast/errors.hpp"
#include "rbelast/truth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace rbe {

namespace {

Expr P(int i)
{
    return Expr::param(i);
}

/// Map of the reference rectangle [xr0,xr1] x [yr0,yr1] onto [xm0,xm1] x [ym0,ym1].
AffineMapExpr axis_map(double xr0, double xr1, const Expr& xm0, const Expr& xm1, double yr0, double yr1,
                       const Expr& ym0, const Expr& ym1)
{
    AffineMapExpr m;
    m.R[0] = (xm1 - xm0) / Expr(xr1 - xr0);
    m.R[3] = (ym1 - ym0) / Expr(yr1 - yr0);
    m.G[0] = xm0 - m.R[0] * Expr(xr0);
    m.G[1] = ym0 - m.R[3] * Expr(yr0);
    m.det = m.R[0] * m.R[3];
    m.D = {Expr(1.0) / m.R[0], Expr(0.0), Expr(0.0), Expr(1.0) / m.R[3]};
    return m;
}

void require_positive_det(const AffineMapExpr& m, const ParamBox& box)
{
    for (const auto& mu : uniform_sample(box, 64, 7))
        if (!(m.det.eval(mu) > 0.0))
            throw OrientationFlip("subdomain map folds over inside the parameter box");
}

MaterialExpr isotropic(MaterialMode mode, const Expr& E, double nu)
{
    MaterialExpr m;
    m.mode = mode;
    m.E1 = E;
    m.nu12 = nu;
    return m;
}

bool near(double a, double b)
{
    return std::abs(a - b) < 1e-9;
}

void finish(ProblemSpec& s, bool axisymmetric)
{
    s.decomp = collapse_decomposition(expand_forms(s.mesh, s.regions, s.bcs), s.box, s.mu_ref, s.compliant,
                                      axisymmetric);
}

void check_box(const ProblemSpec& s, const ParamBox& box)
{
    if (box.dim() != s.box.dim() || box.hi.size() != box.lo.size())
        throw OutOfRangeValue("parameter box for " + s.name + " needs " + std::to_string(s.box.dim()) + " components");
    for (std::size_t i = 0; i < box.dim(); ++i) {
        if (!(box.lo[i] <= box.hi[i]))
            throw OutOfRangeValue("parameter box component " + std::to_string(i + 1) + " has lo > hi");
        if (box.lo[i] < s.limits.lo[i] || box.hi[i] > s.limits.hi[i]) {
            std::ostringstream os;
            os << "parameter box component " << i + 1 << " [" << box.lo[i] << ", " << box.hi[i]
               << "] leaves the admissible range [" << s.limits.lo[i] << ", " << s.limits.hi[i] << "]";
            throw OutOfRangeValue(os.str());
        }
    }
}

// ---------------------------------------------------------------------------

ProblemSpec multi_material(const ProblemOptions& opt)
{
    ProblemSpec s;
    s.name = "multi_material";
    s.box = {std::vector<double>(6, 0.5), std::vector<double>(6, 2.0)};
    s.limits = {std::vector<double>(6, 1e-3), std::vector<double>(6, 1e3)};
    if (opt.box) {
        check_box(s, *opt.box);
        s.box = *opt.box;
    }
    s.mu_ref = s.box.centroid();
    s.nu = opt.nu.value_or(0.3);
    s.compliant = true;
    s.output_description = "compliance: integral of u2 over the loaded top edge";

    const bool fine = opt.resolution == Resolution::Fine;
    const int nx = fine ? 51 : 15, ny = fine ? 78 : 15;
    // 3 x 3 squares, each cut into a lower and an upper half
    s.mesh = generate_structured_rect(nx, ny, [&](int i, int j) {
        const int I = i * 3 / nx, J = j * 6 / ny;
        return 2 * ((J / 2) * 3 + I) + J % 2 + 1;
    });
    static constexpr int layout[9][2] = {{0, 1}, {2, 3}, {4, 5}, {2, 3}, {1, 0}, {2, 3}, {4, 5}, {2, 3}, {0, 1}};
    for (int r = 0; r < 18; ++r) {
        MaterialExpr m;
        m.mode = MaterialMode::PlaneStressOrthotropic;
        m.E1 = P(layout[r / 2][0]);
        m.E2 = P(layout[r / 2][1]);
        m.nu12 = s.nu;
        s.regions.push_back({m, identity_map()});
    }
    s.bcs = {BoundaryCondition::dirichlet(1, true, true), BoundaryCondition::traction(3, 0.0, 1.0)};
    finish(s, false);
    return s;
}

ProblemSpec center_crack(const ProblemOptions& opt)
{
    ProblemSpec s;
    s.name = "center_crack";
    s.box = {{0.3, 0.5}, {0.7, 2.0}};
    s.limits = {{0.02, 0.05}, {0.98, 20.0}};
    if (opt.box) {
        check_box(s, *opt.box);
        s.box = *opt.box;
    }
    s.mu_ref = {0.5, 1.0};
    s.nu = opt.nu.value_or(0.3);
    s.compliant = true;
    s.crack = true;
    s.err_sign = ErrSign::Positive;
    s.output_description = "compliance of the quarter plate under unit tension";

    // quarter model: crack face on y = 0 for x < d, symmetry on x = 0 and on the ligament
    const Eigen::Vector2d tip(0.5, 0.0);
    const std::array<std::array<Eigen::Vector2d, 3>, 3> ref = {{
        {tip, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 0.0)},
        {tip, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.0, 1.0)},
        {tip, Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)},
    }};
    auto mapped = [&](const Eigen::Vector2d& v) -> PointExpr {
        if (near(v.x(), 0.5) && near(v.y(), 0.0))
            return {P(0), Expr(0.0)};
        return {Expr(v.x()), near(v.y(), 1.0) ? P(1) : Expr(0.0)};
    };

    const bool fine = opt.resolution == Resolution::Fine;
    PatchMesher pm;
    for (int r = 0; r < 3; ++r) {
        pm.add_triangle(ref[r], r + 1, fine ? 46 : 12, 2.0);
        s.regions.push_back({isotropic(MaterialMode::PlaneStrainIsotropic, 1.0, s.nu),
                             solve_affine_map(ref[r], {mapped(ref[r][0]), mapped(ref[r][1]), mapped(ref[r][2])},
                                              &s.box)});
    }
    s.mesh = pm.finish([](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const Eigen::Vector2d m = 0.5 * (a + b);
        if (near(m.y(), 0.0))
            return m.x() < 0.5 ? 1 : 2;
        if (near(m.x(), 1.0))
            return 3;
        if (near(m.y(), 1.0))
            return 4;
        return 5;
    });
    s.bcs = {BoundaryCondition::dirichlet(2, false, true), BoundaryCondition::dirichlet(5, true, false),
             BoundaryCondition::traction(4, 0.0, 1.0)};
    finish(s, false);
    return s;
}

ProblemSpec woven_composite(const ProblemOptions& opt)
{
    ProblemSpec s;
    s.name = "woven_composite";
    const double pi = std::numbers::pi;
    s.box = {{1.0 / 12, 0.5, -pi / 4}, {1.0 / 6, 2.0, pi / 4}};
    s.limits = {{0.01, 1e-3, -pi / 2}, {0.49, 1e3, pi / 2}};
    if (opt.box) {
        check_box(s, *opt.box);
        s.box = *opt.box;
    }
    const double w_ref = 1.0 / 8;
    s.mu_ref = {w_ref, 1.25, 0.0};
    s.nu = opt.nu.value_or(0.3);
    s.compliant = false;
    s.output_description = "integral of the vertical displacement over the top face of the second opening";

    // each unit cell is a 3 x 3 frame of rectangles around a square opening
    const std::array<double, 4> Xr{0.0, 0.5 - w_ref, 0.5 + w_ref, 1.0};
    const std::array<Expr, 4> Xm{Expr(0.0), Expr(0.5) - P(0), Expr(0.5) + P(0), Expr(1.0)};
    const int k = opt.resolution == Resolution::Fine ? 3 : 1;
    const std::array<int, 3> cells{6 * k, 4 * k, 6 * k};

    PatchMesher pm;
    int region = 0;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == 1 && j == 1)
                    continue;
                ++region;
                pm.add_block(c + Xr[i], c + Xr[i + 1], Xr[j], Xr[j + 1], cells[i], cells[j], region);
                MaterialExpr m;
                if (i == 1 && j == 2) {
                    m = isotropic(MaterialMode::PlaneStressIsotropic, 1.0, s.nu);
                } else {
                    m.mode = MaterialMode::PlaneStressOrthotropic;
                    m.E1 = 1.0;
                    m.E2 = P(1);
                    m.nu12 = s.nu;
                    m.theta = c == 0 ? P(2) : -P(2);
                }
                const Expr shift(static_cast<double>(c));
                auto map = axis_map(c + Xr[i], c + Xr[i + 1], shift + Xm[i], shift + Xm[i + 1], Xr[j], Xr[j + 1],
                                    Xm[j], Xm[j + 1]);
                require_positive_det(map, s.box);
                s.regions.push_back({m, map});
            }
    s.mesh = pm.finish([&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const Eigen::Vector2d m = 0.5 * (a + b);
        if (near(m.y(), 0.0))
            return 1;
        if (near(m.x(), 2.0))
            return 2;
        if (near(m.y(), 1.0))
            return 3;
        if (near(m.x(), 0.0))
            return 4;
        if (near(m.y(), 0.5 + w_ref) && m.x() > 1.0)
            return 6;
        return 5;
    });
    s.bcs = {BoundaryCondition::dirichlet(4, true, true), BoundaryCondition::dirichlet(2, false, true),
             BoundaryCondition::traction(3, 0.0, 1.0), BoundaryCondition::output(6, 0.0, 1.0)};
    finish(s, false);
    return s;
}

ProblemSpec closed_vessel(const ProblemOptions& opt)
{
    ProblemSpec s;
    s.name = "closed_vessel";
    s.box = {{0.1, 0.1}, {1.9, 10.0}};
    s.limits = {{0.01, 1e-3}, {5.0, 1e3}};
    if (opt.box) {
        check_box(s, *opt.box);
        s.box = *opt.box;
    }
    s.mu_ref = {1.0, 1.0};
    s.nu = opt.nu.value_or(0.3);
    if (s.nu >= 0.5)
        throw OutOfRangeValue("axisymmetric problems need nu < 0.5");
    s.compliant = false;
    s.output_description = "integral of the radial displacement over the outer wall";

    // radial lines 0, 1, 1+w, 2+w (reference w = 1); axial lines 0, 2, 3; cavity [0,1] x [0,2]
    const std::array<double, 4> Rr{0.0, 1.0, 2.0, 3.0};
    const std::array<Expr, 4> Rm{Expr(0.0), Expr(1.0), Expr(1.0) + P(0), Expr(2.0) + P(0)};
    const std::array<double, 3> Zr{0.0, 2.0, 3.0};
    const int n = opt.resolution == Resolution::Fine ? 20 : 6;

    PatchMesher pm;
    int region = 0;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) {
            if (i == 0 && j == 0)
                continue;
            ++region;
            pm.add_block(Rr[i], Rr[i + 1], Zr[j], Zr[j + 1], n, static_cast<int>(n * (Zr[j + 1] - Zr[j])), region);
            const Expr E = (i == 1 && j == 0) ? P(1) : Expr(1.0);
            auto map = axis_map(Rr[i], Rr[i + 1], Rm[i], Rm[i + 1], Zr[j], Zr[j + 1], Expr(Zr[j]), Expr(Zr[j + 1]));
            require_positive_det(map, s.box);
            s.regions.push_back({isotropic(MaterialMode::AxisymmetricIsotropic, E, s.nu), map});
        }
    s.mesh = pm.finish([](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const Eigen::Vector2d m = 0.5 * (a + b);
        if (near(m.y(), 0.0))
            return 1;
        if (near(m.x(), 3.0))
            return 2;
        if (near(m.y(), 3.0))
            return 3;
        if (near(m.x(), 0.0))
            return 4;
        return 5;
    });
    s.bcs = {BoundaryCondition::dirichlet(1, false, true), BoundaryCondition::traction(3, 0.0, 1.0),
             BoundaryCondition::output(2, 1.0, 0.0)};
    finish(s, true);
    return s;
}

ProblemSpec composite_cell(const ProblemOptions& opt)
{
    ProblemSpec s;
    s.name = "composite_cell_polygonal";
    s.box = {{0.8, 0.8, 0.2}, {1.2, 1.2, 5.0}};
    s.limits = {{0.2, 0.2, 1e-3}, {1.8, 1.8, 1e3}};
    if (opt.box) {
        check_box(s, *opt.box);
        s.box = *opt.box;
    }
    s.mu_ref = {1.0, 1.0, s.box.centroid()[2]};
    s.nu = opt.nu.value_or(0.3);
    s.compliant = true;
    s.output_description = "compliance of the cell under unit tension on the top edge";

    constexpr int sides = 16;
    const int k = opt.resolution == Resolution::Fine ? 13 : 3;
    std::vector<Eigen::Vector2d> p(sides), q(sides);
    std::vector<PointExpr> pm_expr(sides);
    for (int i = 0; i < sides; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / sides;
        const double c = std::cos(phi), sn = std::sin(phi);
        p[i] = {c, sn};
        q[i] = Eigen::Vector2d(c, sn) * (2.0 / std::max(std::abs(c), std::abs(sn)));
        pm_expr[i] = {P(0) * Expr(c), P(1) * Expr(sn)};
    }
    auto fixed = [](const Eigen::Vector2d& v) -> PointExpr { return {Expr(v.x()), Expr(v.y())}; };

    PatchMesher mesher;
    AffineMapExpr inner;
    inner.R = {P(0), Expr(0.0), Expr(0.0), P(1)};
    inner.det = P(0) * P(1);
    inner.D = {Expr(1.0) / P(0), Expr(0.0), Expr(0.0), Expr(1.0) / P(1)};
    s.regions.push_back({isotropic(MaterialMode::PlaneStressIsotropic, P(2), s.nu), inner});
    for (int i = 0; i < sides; ++i)
        mesher.add_triangle({Eigen::Vector2d::Zero(), p[i], p[(i + 1) % sides]}, 1, k);

    int region = 1;
    for (int i = 0; i < sides; ++i) {
        const int j = (i + 1) % sides;
        const std::array<std::array<Eigen::Vector2d, 3>, 2> tris{{{p[i], q[i], q[j]}, {p[i], q[j], p[j]}}};
        const std::array<std::array<PointExpr, 3>, 2> maps{
            {{pm_expr[i], fixed(q[i]), fixed(q[j])}, {pm_expr[i], fixed(q[j]), pm_expr[j]}}};
        for (int t = 0; t < 2; ++t) {
            ++region;
            mesher.add_triangle(tris[t], region, k);
            s.regions.push_back({isotropic(MaterialMode::PlaneStressIsotropic, 1.0, s.nu),
                                 solve_affine_map(tris[t], maps[t], &s.box)});
        }
    }
    s.mesh = mesher.finish([](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const Eigen::Vector2d m = 0.5 * (a + b);
        if (near(m.y(), -2.0))
            return 1;
        if (near(m.x(), 2.0))
            return 2;
        if (near(m.y(), 2.0))
            return 3;
        return 4;
    });
    s.bcs = {BoundaryCondition::dirichlet(1, true, true), BoundaryCondition::traction(3, 0.0, 1.0)};
    finish(s, false);
    return s;
}

} // namespace

std::vector<std::string> problem_names()
{
    return {"center_crack", "composite_cell_polygonal", "multi_material", "woven_composite", "closed_vessel"};
}

ProblemSpec build_problem(const std::string& name, const ProblemOptions& options)
{
    if (options.nu && !(*options.nu > -1.0 && *options.nu < 0.5))
        throw OutOfRangeValue("nu must lie in (-1, 0.5)");
    if (name == "multi_material")
        return multi_material(options);
    if (name == "center_crack")
        return center_crack(options);
    if (name == "woven_composite")
        return woven_composite(options);
    if (name == "closed_vessel")
        return closed_vessel(options);
    if (name == "composite_cell_polygonal")
        return composite_cell(options);
    throw UnknownProblem("'" + name + "'");
}

std::vector<std::string> validate_problem(const ProblemSpec& spec, int spd_samples)
{
    auto report = validate_mesh(spec.mesh, spec.bcs);
    if (!report.empty())
        return report;

    std::vector<AffineMapExpr> maps;
    for (const auto& r : spec.regions)
        maps.push_back(r.map);
    for (auto& line : mapping_continuity_check(maps, spec.mesh, uniform_sample(spec.box, 10, 11)))
        report.push_back("mapping continuity: " + line);

    for (const auto& mu : uniform_sample(spec.box, 200, 13))
        for (std::size_t r = 0; r < maps.size(); ++r)
            if (!(maps[r].det.eval(mu) > 0.0)) {
                report.push_back("map of region " + std::to_string(r + 1) + " is not orientation preserving");
                break;
            }
    if (!report.empty())
        return report;

    try {
        const auto ops = assemble_parameter_independent(spec.mesh, spec.decomp, spec.bcs);
        SparseSPDSolver solver(ops.Kq.front());
        for (const auto& mu : uniform_sample(spec.box, static_cast<std::size_t>(spd_samples), 17)) {
            try {
                solver.factorize(combine(ops.Kq, spec.decomp.theta.eval(mu).a), true);
            } catch (const Error& e) {
                std::ostringstream os;
                os << "K(mu) not positive definite at mu = (";
                for (std::size_t i = 0; i < mu.size(); ++i)
                    os << (i ? ", " : "") << mu[i];
                os << ")";
                report.push_back(os.str());
            }
        }
    } catch (const Error& e) {
        report.push_back(e.what());
    }
    return report;
}

} // namespace rbe
