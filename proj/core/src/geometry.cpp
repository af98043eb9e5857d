#include "rbelast/geometry.hpp"

#include "rbelast/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace rbe {

namespace {

constexpr std::uint64_t kCollapseSeed = 0x5eed'c011'a75eULL;
constexpr int kCollapseSamples = 32;
constexpr double kZeroTol = 1e-14;
constexpr double kProportionalTol = 1e-12;

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

std::vector<Param> check_points(const ParamBox& box)
{
    auto pts = uniform_sample(box, 64, 0xde7e'0001ULL);
    if (box.dim() <= 6) {
        for (std::size_t c = 0; c < (std::size_t{1} << box.dim()); ++c) {
            Param mu(box.dim());
            for (std::size_t i = 0; i < box.dim(); ++i)
                mu[i] = (c >> i) & 1 ? box.hi[i] : box.lo[i];
            pts.push_back(mu);
        }
    }
    pts.push_back(box.centroid());
    return pts;
}

// Replace expressions that are numerically constant over the box by that constant.
Expr snap_constant(const Expr& e, const std::vector<Param>& pts)
{
    if (e.is_const() || pts.empty())
        return e;
    double lo = e.eval(pts.front()), hi = lo, amax = std::abs(lo);
    for (const auto& mu : pts) {
        const double v = e.eval(mu);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        amax = std::max(amax, std::abs(v));
    }
    if (hi - lo <= 1e-14 * std::max(1.0, amax)) {
        const double v = 0.5 * (lo + hi);
        return Expr(std::abs(v) <= 1e-14 ? 0.0 : v);
    }
    return e;
}

std::uint64_t edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

std::array<long long, 2> tangent_key(const Eigen::Vector2d& t)
{
    return {std::llround(t.x() * 1e9), std::llround(t.y() * 1e9)};
}

// Polynomial (R11 x1 + G1)^d expanded into sum_k c_k x1^k.
std::vector<Expr> expand_power(const AffineMapExpr& map, int d)
{
    std::vector<Expr> c(d + 1);
    for (int k = 0; k <= d; ++k)
        c[k] = Expr(binom(d, k)) * pow(map.R[0], k) * pow(map.G[0], d - k);
    return c;
}

template <class F>
bool same_support(const F& a, const F& b);

template <>
bool same_support(const VolumeForm& a, const VolumeForm& b)
{
    return a.region == b.region && a.slot_a == b.slot_a && a.slot_b == b.slot_b && a.m == b.m && a.n == b.n;
}

template <>
bool same_support(const TraceForm& a, const TraceForm& b)
{
    return a.tag == b.tag && a.region == b.region && a.comp == b.comp && a.m == b.m && a.n == b.n &&
           (a.tangent - b.tangent).cwiseAbs().maxCoeff() < 1e-9;
}

template <class F>
std::vector<AffineTerm<F>> collapse_terms(const std::vector<AffineTerm<F>>& raw, const std::vector<Param>& samples)
{
    std::vector<AffineTerm<F>> out;
    std::vector<Eigen::VectorXd> reps;
    const auto ns = static_cast<Eigen::Index>(samples.size());
    for (const auto& term : raw) {
        if (term.forms.empty())
            continue;
        Eigen::VectorXd v(ns);
        for (Eigen::Index s = 0; s < ns; ++s)
            v[s] = term.theta.eval(samples[s]);
        if (!v.allFinite())
            throw OutOfDomain("coefficient expression is not finite over the parameter box: " + term.theta.str());
        const double vmax = v.cwiseAbs().maxCoeff();
        if (vmax < kZeroTol)
            continue;

        bool merged = false;
        for (std::size_t g = 0; g < reps.size() && !merged; ++g) {
            const Eigen::VectorXd& r = reps[g];
            const double k = v.dot(r) / r.squaredNorm();
            if ((v - k * r).cwiseAbs().maxCoeff() > kProportionalTol * vmax)
                continue;
            for (F f : term.forms) {
                f.coef *= k;
                auto& forms = out[g].forms;
                auto it = std::find_if(forms.begin(), forms.end(), [&](const F& o) { return same_support(o, f); });
                if (it == forms.end())
                    forms.push_back(f);
                else
                    it->coef += f.coef;
            }
            merged = true;
        }
        if (!merged) {
            out.push_back(term);
            reps.push_back(v);
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

AffineMap AffineMapExpr::at(std::span<const double> mu) const
{
    AffineMap m;
    m.R << R[0].eval(mu), R[1].eval(mu), R[2].eval(mu), R[3].eval(mu);
    m.G << G[0].eval(mu), G[1].eval(mu);
    m.detR = m.R.determinant();
    m.D = m.R.inverse();
    return m;
}

AffineMapExpr identity_map()
{
    return AffineMapExpr{};
}

AffineMapExpr translation_map(const Expr& gx, const Expr& gy)
{
    AffineMapExpr m;
    m.G = {gx, gy};
    return m;
}

AffineMapExpr solve_affine_map(const std::array<Eigen::Vector2d, 3>& ref, const std::array<PointExpr, 3>& mapped,
                               const ParamBox* box)
{
    Eigen::Matrix2d A;
    A.col(0) = ref[1] - ref[0];
    A.col(1) = ref[2] - ref[0];
    const double scale = std::max({A.cwiseAbs().maxCoeff(), 1e-300});
    if (std::abs(A.determinant()) <= 1e-14 * scale * scale)
        throw DegenerateTriangle("reference triangle has zero area");
    const Eigen::Matrix2d Ai = A.inverse();

    // M columns are mapped edge vectors; R = M A^{-1}
    std::array<std::array<Expr, 2>, 2> M;
    for (int r = 0; r < 2; ++r) {
        M[r][0] = mapped[1][r] - mapped[0][r];
        M[r][1] = mapped[2][r] - mapped[0][r];
    }
    const auto pts = box ? check_points(*box) : std::vector<Param>{};

    AffineMapExpr out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            out.R[2 * r + c] = snap_constant(M[r][0] * Expr(Ai(0, c)) + M[r][1] * Expr(Ai(1, c)), pts);
    for (int r = 0; r < 2; ++r)
        out.G[r] = snap_constant(mapped[0][r] - (out.R[2 * r] * Expr(ref[0].x()) + out.R[2 * r + 1] * Expr(ref[0].y())),
                                 pts);
    out.det = snap_constant(out.R[0] * out.R[3] - out.R[1] * out.R[2], pts);
    out.D = {out.R[3] / out.det, -out.R[1] / out.det, -out.R[2] / out.det, out.R[0] / out.det};

    for (const auto& mu : pts) {
        const double d = out.det.eval(mu);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "det R = " << d << " at mu = (";
            for (std::size_t i = 0; i < mu.size(); ++i)
                os << (i ? ", " : "") << mu[i];
            os << ")";
            throw OrientationFlip(os.str());
        }
    }
    return out;
}

std::vector<std::string> mapping_continuity_check(const std::vector<AffineMapExpr>& maps, const Mesh& mesh,
                                                  const std::vector<Param>& samples)
{
    std::vector<std::string> report;
    if (static_cast<int>(maps.size()) < mesh.n_regions) {
        report.push_back("expected " + std::to_string(mesh.n_regions) + " maps, got " + std::to_string(maps.size()));
        return report;
    }
    std::unordered_map<std::uint64_t, int> first;
    std::vector<std::array<int, 4>> interfaces; // node a, node b, region 1, region 2
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int e = 0; e < 3; ++e) {
            const int a = mesh.triangles[t][e], b = mesh.triangles[t][(e + 1) % 3];
            auto [it, fresh] = first.emplace(edge_key(a, b), static_cast<int>(t));
            if (!fresh && mesh.region[it->second] != mesh.region[t])
                interfaces.push_back({a, b, mesh.region[it->second], mesh.region[t]});
        }
    std::sort(interfaces.begin(), interfaces.end());

    double extent = 1.0;
    for (const auto& p : mesh.nodes)
        extent = std::max(extent, p.cwiseAbs().maxCoeff());

    for (const auto& mu : samples) {
        std::vector<AffineMap> at(maps.size());
        for (std::size_t r = 0; r < maps.size(); ++r)
            at[r] = maps[r].at(mu);
        for (const auto& f : interfaces) {
            const auto& m1 = at[f[2] - 1];
            const auto& m2 = at[f[3] - 1];
            for (int k = 0; k < 2; ++k) {
                const auto& x = mesh.nodes[f[k]];
                const double gap = (m1.apply(x) - m2.apply(x)).norm();
                if (gap > 1e-10 * extent) {
                    std::ostringstream os;
                    os << "edge (" << f[0] << "," << f[1] << ") between regions " << f[2] << " and " << f[3]
                       << ": maps disagree by " << gap << " at node " << f[k];
                    report.push_back(os.str());
                    break;
                }
            }
        }
        if (!report.empty())
            break;
    }
    return report;
}

std::vector<EffectiveEntry> effective_tensor(const BasicTensor<Expr>& S, const AffineMapExpr& map)
{
    if (S.degree > 0 && !map.axis_aligned())
        throw Error("x1-weighted tensors need axis-aligned maps");

    std::array<std::array<Expr, 5>, 5> H;
    for (auto& row : H)
        row.fill(Expr(0.0));
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                H[2 * b + i][2 * b + j] = map.D[2 * i + j];
    H[4][4] = 1.0;

    std::vector<EffectiveEntry> out;
    std::vector<std::vector<Expr>> powers(S.degree + 1);
    for (int d = 0; d <= S.degree; ++d)
        powers[d] = expand_power(map, d);

    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) {
            std::vector<Expr> by_m(S.degree + 1, Expr(0.0));
            for (int d = 0; d <= S.degree; ++d) {
                Expr e = 0.0;
                for (int k = 0; k < 5; ++k) {
                    if (H[i][k].is_zero())
                        continue;
                    for (int l = 0; l < 5; ++l)
                        if (!H[j][l].is_zero() && !S.coeff[d][k][l].is_zero())
                            e += H[i][k] * S.coeff[d][k][l] * H[j][l];
                }
                if (e.is_zero())
                    continue;
                e = e * map.det;
                for (int m = 0; m <= d; ++m)
                    by_m[m] += e * powers[d][m];
            }
            for (int m = 0; m <= S.degree; ++m)
                if (!by_m[m].is_zero())
                    out.push_back({i, j, m, by_m[m]});
        }
    return out;
}

Eigen::Matrix<double, 5, 5> effective_tensor(const Eigen::Matrix<double, 5, 5>& S, const AffineMap& map)
{
    Eigen::Matrix<double, 5, 5> H = Eigen::Matrix<double, 5, 5>::Zero();
    H.block<2, 2>(0, 0) = map.D;
    H.block<2, 2>(2, 2) = map.D;
    H(4, 4) = 1.0;
    return H * S * H.transpose() * std::abs(map.detR);
}

std::array<Expr, 2> effective_load(const std::array<Expr, 2>& Sf, const AffineMapExpr& map, const Eigen::Vector2d& t)
{
    const Expr x = map.R[0] * Expr(t.x()) + map.R[1] * Expr(t.y());
    const Expr y = map.R[2] * Expr(t.x()) + map.R[3] * Expr(t.y());
    Expr len;
    if (y.is_zero() && x.is_const())
        len = std::abs(x.const_value());
    else if (x.is_zero() && y.is_const())
        len = std::abs(y.const_value());
    else
        len = sqrt(x * x + y * y);
    return {len * Sf[0], len * Sf[1]};
}

double load_multiplier(const AffineMap& map, const Eigen::Vector2d& tangent)
{
    return (map.R * tangent).norm();
}

Eigen::Vector2d canonical_tangent(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    Eigen::Vector2d t = (b - a).normalized();
    if (t.x() < -1e-12 || (std::abs(t.x()) <= 1e-12 && t.y() < 0))
        t = -t;
    return t;
}

// ---------------------------------------------------------------------------

ThetaEvaluator::ThetaEvaluator(Tape tape, int Qa, int Qf, int Ql, ParamBox box)
    : tape_(std::move(tape)), Qa_(Qa), Qf_(Qf), Ql_(Ql), box_(std::move(box))
{
    if (tape_.size() != static_cast<std::size_t>(Qa + Qf + Ql))
        throw Error("coefficient tape size does not match Qa + Qf + Ql");
}

void ThetaEvaluator::eval(std::span<const double> mu, ThetaValues& out, std::vector<double>& scratch) const
{
    box_.require(mu);
    thread_local std::vector<double> all;
    all.resize(tape_.size());
    tape_.eval(mu, all, scratch);
    out.a = Eigen::Map<const Eigen::VectorXd>(all.data(), Qa_);
    out.f = Eigen::Map<const Eigen::VectorXd>(all.data() + Qa_, Qf_);
    out.l = Eigen::Map<const Eigen::VectorXd>(all.data() + Qa_ + Qf_, Ql_);
}

ThetaValues ThetaEvaluator::eval(std::span<const double> mu) const
{
    ThetaValues v;
    std::vector<double> scratch;
    eval(mu, v, scratch);
    return v;
}

void AffineDecomposition::compile()
{
    std::vector<Expr> all;
    for (const auto& t : a)
        all.push_back(t.theta);
    for (const auto& t : f)
        all.push_back(t.theta);
    for (const auto& t : output_terms())
        all.push_back(t.theta);
    theta = ThetaEvaluator(Tape::compile(all), Qa(), Qf(), Ql(), box);
}

RawExpansion expand_forms(const Mesh& mesh, const std::vector<RegionSetup>& regions,
                          const std::vector<BoundaryCondition>& bcs)
{
    if (static_cast<int>(regions.size()) < mesh.n_regions)
        throw BadRegionId("need a material and map for each of the " + std::to_string(mesh.n_regions) + " regions");

    RawExpansion raw;
    for (int r = 1; r <= mesh.n_regions; ++r) {
        const auto& setup = regions[r - 1];
        const auto S = elastic_tensor(setup.material);
        for (const auto& e : effective_tensor(S, setup.map)) {
            BilinearTerm t;
            t.theta = e.coef;
            t.forms.push_back(VolumeForm{r, e.i, e.j, e.m, 0, 1.0});
            raw.a.push_back(std::move(t));
        }
    }

    const auto owner = edge_owner(mesh);
    for (const auto& bc : bcs) {
        if (bc.kind == BoundaryCondition::Kind::Dirichlet)
            continue;
        // group this tag's edges by owning region and direction
        std::map<std::pair<int, std::array<long long, 2>>, Eigen::Vector2d> groups;
        bool found = false;
        for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
            if (mesh.edge_tag[e] != bc.tag)
                continue;
            if (owner[e] < 0)
                throw NonConforming("tagged edge is not a triangle edge");
            found = true;
            const auto t = canonical_tangent(mesh.nodes[mesh.edges[e][0]], mesh.nodes[mesh.edges[e][1]]);
            groups.emplace(std::make_pair(mesh.region[owner[e]], tangent_key(t)), t);
        }
        if (!found)
            throw MissingTag("boundary tag " + std::to_string(bc.tag) + " has no edges");

        auto& dest = bc.kind == BoundaryCondition::Kind::Traction ? raw.f : raw.l;
        for (const auto& [key, tangent] : groups) {
            const int region = key.first;
            const auto& setup = regions[region - 1];
            const bool axi = is_axisymmetric(setup.material.mode);
            const auto load = effective_load({Expr(bc.value.x()), Expr(bc.value.y())}, setup.map, tangent);
            for (int c = 0; c < 2; ++c) {
                if (bc.value[c] == 0.0)
                    continue;
                // axisymmetric traction carries x1^2 (radial) / x1 (axial); outputs one power less
                int degree = 0;
                if (axi)
                    degree = (bc.kind == BoundaryCondition::Kind::Traction ? 2 : 1) - c;
                if (degree > 0 && !setup.map.axis_aligned())
                    throw Error("x1-weighted loads need axis-aligned maps");
                const auto powers = expand_power(setup.map, degree);
                for (int m = 0; m <= degree; ++m) {
                    const Expr coef = load[c] * powers[m];
                    if (coef.is_zero())
                        continue;
                    LinearTerm t;
                    t.theta = coef;
                    t.forms.push_back(TraceForm{bc.tag, region, tangent, c, m, 0, 1.0});
                    dest.push_back(std::move(t));
                }
            }
        }
    }
    return raw;
}

AffineDecomposition collapse_decomposition(const RawExpansion& raw, const ParamBox& box, const Param& mu_ref,
                                           bool compliant, bool axisymmetric)
{
    const auto samples = uniform_sample(box, kCollapseSamples, kCollapseSeed);
    AffineDecomposition d;
    d.box = box;
    d.mu_ref = mu_ref;
    d.compliant = compliant;
    d.axisymmetric = axisymmetric;
    d.a = collapse_terms(raw.a, samples);
    d.f = collapse_terms(raw.f, samples);
    if (!compliant)
        d.l = collapse_terms(raw.l, samples);
    d.compile();
    return d;
}

ThetaValues eval_theta(const AffineDecomposition& decomp, std::span<const double> mu)
{
    return decomp.theta.eval(mu);
}

} // namespace rbe
