#include "rbelast/mesh.hpp"

#include "rbelast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rbe {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

std::uint64_t edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Tokenizer over the line-oriented mesh format; '#' starts a comment.
class Tokens {
public:
    explicit Tokens(std::string_view text)
    {
        std::size_t pos = 0;
        int line = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos)
                end = text.size();
            ++line;
            auto l = text.substr(pos, end - pos);
            if (auto h = l.find('#'); h != std::string_view::npos)
                l = l.substr(0, h);
            std::istringstream is{std::string(l)};
            std::string tok;
            while (is >> tok)
                toks_.push_back({tok, line});
            pos = end + 1;
        }
    }

    std::string word()
    {
        if (i_ >= toks_.size())
            throw MalformedFile("unexpected end of file");
        return toks_[i_++].first;
    }

    void expect(const std::string& w)
    {
        const int l = line();
        const auto got = word();
        if (got != w)
            throw MalformedFile("line " + std::to_string(l) + ": expected '" + w + "', got '" + got + "'");
    }

    long integer()
    {
        const int l = line();
        const auto s = word();
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty())
            throw MalformedFile("line " + std::to_string(l) + ": bad integer '" + s + "'");
        return v;
    }

    double real()
    {
        const int l = line();
        const auto s = word();
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || !std::isfinite(v))
            throw MalformedFile("line " + std::to_string(l) + ": bad number '" + s + "'");
        return v;
    }

    bool done() const { return i_ >= toks_.size(); }
    int line() const { return i_ < toks_.size() ? toks_[i_].second : -1; }

private:
    std::vector<std::pair<std::string, int>> toks_;
    std::size_t i_ = 0;
};

// Triangle edges used once; value is (a,b) in triangle orientation.
std::vector<std::array<int, 2>> boundary_of(const Mesh& m, std::vector<std::string>* nonconforming = nullptr)
{
    std::unordered_map<std::uint64_t, std::pair<int, std::array<int, 2>>> count;
    count.reserve(m.triangles.size() * 3);
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            auto& slot = count[edge_key(a, b)];
            ++slot.first;
            slot.second = {a, b};
        }
    std::vector<std::array<int, 2>> out;
    for (const auto& [key, v] : count) {
        if (v.first == 1)
            out.push_back(v.second);
        else if (v.first > 2 && nonconforming)
            nonconforming->push_back("edge (" + std::to_string(v.second[0]) + "," + std::to_string(v.second[1]) +
                                     ") shared by more than two triangles");
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Nodes lying strictly inside a boundary-like edge are hanging nodes.
std::vector<std::string> hanging_nodes(const Mesh& m, const std::vector<std::array<int, 2>>& bnd)
{
    std::vector<std::string> out;
    if (bnd.empty())
        return out;
    // bucket nodes on a coarse grid to keep this near-linear
    Eigen::Vector2d lo = m.nodes.front(), hi = m.nodes.front();
    for (const auto& p : m.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.nodes.size()))));
    const Eigen::Vector2d span = (hi - lo).cwiseMax(Eigen::Vector2d::Constant(1e-300));
    auto cell = [&](const Eigen::Vector2d& p, int d) {
        int c = static_cast<int>((p[d] - lo[d]) / span[d] * nb);
        return std::clamp(c, 0, nb - 1);
    };
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nb) * nb);
    for (int i = 0; i < static_cast<int>(m.nodes.size()); ++i)
        buckets[cell(m.nodes[i], 0) * nb + cell(m.nodes[i], 1)].push_back(i);

    const double scale = span.norm();
    for (const auto& e : bnd) {
        const auto& a = m.nodes[e[0]];
        const auto& b = m.nodes[e[1]];
        const int x0 = std::min(cell(a, 0), cell(b, 0)), x1 = std::max(cell(a, 0), cell(b, 0));
        const int y0 = std::min(cell(a, 1), cell(b, 1)), y1 = std::max(cell(a, 1), cell(b, 1));
        const double len2 = (b - a).squaredNorm();
        for (int i = x0; i <= x1; ++i)
            for (int j = y0; j <= y1; ++j)
                for (int n : buckets[i * nb + j]) {
                    if (n == e[0] || n == e[1])
                        continue;
                    const auto& p = m.nodes[n];
                    const double s = (p - a).dot(b - a) / len2;
                    if (s <= 1e-12 || s >= 1 - 1e-12)
                        continue;
                    if (std::abs(cross(a, b, p)) <= 1e-12 * scale * std::sqrt(len2))
                        out.push_back("hanging node " + std::to_string(n) + " on edge (" + std::to_string(e[0]) +
                                      "," + std::to_string(e[1]) + ")");
                }
    }
    return out;
}

} // namespace

double Mesh::signed_area(std::size_t t) const
{
    const auto& tri = triangles[t];
    return 0.5 * cross(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
}

BoundaryCondition BoundaryCondition::dirichlet(int tag, bool u1, bool u2)
{
    BoundaryCondition bc;
    bc.tag = tag;
    bc.kind = Kind::Dirichlet;
    bc.fixed = {u1, u2};
    return bc;
}

BoundaryCondition BoundaryCondition::traction(int tag, double f1, double f2)
{
    BoundaryCondition bc;
    bc.tag = tag;
    bc.kind = Kind::Traction;
    bc.value = {f1, f2};
    return bc;
}

BoundaryCondition BoundaryCondition::output(int tag, double l1, double l2)
{
    BoundaryCondition bc;
    bc.tag = tag;
    bc.kind = Kind::Output;
    bc.value = {l1, l2};
    return bc;
}

Mesh parse_mesh(std::string_view text)
{
    Tokens tk(text);
    tk.expect("mesh");
    if (const long version = tk.integer(); version != 1)
        throw MalformedFile("unsupported mesh version " + std::to_string(version));

    Mesh m;
    tk.expect("nodes");
    const long n = tk.integer();
    if (n < 3)
        throw MalformedFile("need at least 3 nodes");
    m.nodes.resize(n);
    for (auto& p : m.nodes) {
        p.x() = tk.real();
        p.y() = tk.real();
    }

    tk.expect("triangles");
    const long nt = tk.integer();
    if (nt < 1)
        throw MalformedFile("need at least one triangle");
    m.triangles.resize(nt);
    m.region.resize(nt);
    for (long t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            const long v = tk.integer();
            if (v < 0 || v >= n)
                throw MalformedFile("triangle " + std::to_string(t) + " references node " + std::to_string(v));
            m.triangles[t][k] = static_cast<int>(v);
        }
        const long r = tk.integer();
        if (r < 1)
            throw BadRegionId("triangle " + std::to_string(t) + " has region " + std::to_string(r));
        m.region[t] = static_cast<int>(r);
    }

    tk.expect("edges");
    const long ne = tk.integer();
    if (ne < 0)
        throw MalformedFile("negative edge count");
    m.edges.resize(ne);
    m.edge_tag.resize(ne);
    for (long e = 0; e < ne; ++e) {
        for (int k = 0; k < 2; ++k) {
            const long v = tk.integer();
            if (v < 0 || v >= n)
                throw MalformedFile("edge " + std::to_string(e) + " references node " + std::to_string(v));
            m.edges[e][k] = static_cast<int>(v);
        }
        m.edge_tag[e] = static_cast<int>(tk.integer());
    }
    if (!tk.done())
        throw MalformedFile("trailing content at line " + std::to_string(tk.line()));

    const int rmax = *std::max_element(m.region.begin(), m.region.end());
    std::vector<char> used(rmax + 1, 0);
    for (int r : m.region)
        used[r] = 1;
    for (int r = 1; r <= rmax; ++r)
        if (!used[r])
            throw BadRegionId("region ids are not contiguous: " + std::to_string(r) + " unused");
    m.n_regions = rmax;

    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const double a = m.signed_area(t);
        if (a == 0.0 || !std::isfinite(a))
            throw MalformedFile("triangle " + std::to_string(t) + " is degenerate");
        if (a < 0)
            std::swap(m.triangles[t][1], m.triangles[t][2]);
    }

    std::vector<std::string> bad;
    const auto bnd = boundary_of(m, &bad);
    const auto hang = hanging_nodes(m, bnd);
    bad.insert(bad.end(), hang.begin(), hang.end());
    if (!bad.empty())
        throw NonConforming(bad.front());
    return m;
}

std::string serialize_mesh(const Mesh& m)
{
    std::string out = "mesh 1\nnodes " + std::to_string(m.nodes.size()) + "\n";
    char buf[96];
    for (const auto& p : m.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
        out += buf;
    }
    out += "triangles " + std::to_string(m.triangles.size()) + "\n";
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        std::snprintf(buf, sizeof buf, "%d %d %d %d\n", tri[0], tri[1], tri[2], m.region[t]);
        out += buf;
    }
    out += "edges " + std::to_string(m.edges.size()) + "\n";
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", m.edges[e][0], m.edges[e][1], m.edge_tag[e]);
        out += buf;
    }
    return out;
}

Mesh generate_structured_rect(int nx, int ny, const std::function<int(int, int)>& region_of, double grading,
                              Corner corner)
{
    if (!(grading > 0.0) || !std::isfinite(grading))
        throw InvalidGrading("grading factor must be positive, got " + std::to_string(grading));
    if (nx < 1 || ny < 1)
        throw InvalidGrading("need nx, ny >= 1");

    // cell widths shrink by `grading` per cell toward the chosen corner
    auto coords = [&](int n, bool toward_zero) {
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i)
            w[i] = std::pow(grading, toward_zero ? n - 1 - i : i);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        std::vector<double> x(n + 1, 0.0);
        for (int i = 0; i < n; ++i)
            x[i + 1] = x[i] + w[i] / total;
        x[n] = 1.0;
        return x;
    };
    const bool left = corner == Corner::LowerLeft || corner == Corner::UpperLeft;
    const bool lower = corner == Corner::LowerLeft || corner == Corner::LowerRight;
    const auto xs = coords(nx, left);
    const auto ys = coords(ny, lower);

    Mesh m;
    m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.emplace_back(xs[i], ys[j]);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int r = region_of(i, j);
            if (r < 1)
                throw BadRegionId("region_of returned " + std::to_string(r));
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            m.region.push_back(r);
            m.region.push_back(r);
            m.n_regions = std::max(m.n_regions, r);
        }
    tag_boundary(m, [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const Eigen::Vector2d mid = 0.5 * (a + b);
        if (std::abs(a.y() - b.y()) < 1e-14)
            return mid.y() < 0.5 ? 1 : 3;
        return mid.x() > 0.5 ? 2 : 4;
    });
    return m;
}

std::vector<int> edge_owner(const Mesh& m)
{
    std::unordered_map<std::uint64_t, int> owner;
    owner.reserve(m.triangles.size() * 3);
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
        for (int e = 0; e < 3; ++e)
            owner[edge_key(m.triangles[t][e], m.triangles[t][(e + 1) % 3])] = static_cast<int>(t);
    std::vector<int> out(m.edges.size(), -1);
    for (std::size_t e = 0; e < m.edges.size(); ++e)
        if (auto it = owner.find(edge_key(m.edges[e][0], m.edges[e][1])); it != owner.end())
            out[e] = it->second;
    return out;
}

void tag_boundary(Mesh& m, const std::function<int(const Eigen::Vector2d&, const Eigen::Vector2d&)>& tag_of)
{
    m.edges.clear();
    m.edge_tag.clear();
    for (const auto& e : boundary_of(m)) {
        const int tag = tag_of(m.nodes[e[0]], m.nodes[e[1]]);
        if (tag < 0)
            continue;
        m.edges.push_back(e);
        m.edge_tag.push_back(tag);
    }
}

std::vector<std::string> validate_mesh(const Mesh& m, const std::vector<BoundaryCondition>& bcs)
{
    std::vector<std::string> report;
    const auto nn = static_cast<int>(m.nodes.size());

    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        for (int k = 0; k < 3; ++k)
            if (m.triangles[t][k] < 0 || m.triangles[t][k] >= nn)
                report.push_back("triangle " + std::to_string(t) + " references a missing node");
        if (!(m.signed_area(t) > 0.0))
            report.push_back("triangle " + std::to_string(t) + " has non-positive area");
    }
    if (!report.empty())
        return report;

    if (m.region.size() != m.triangles.size()) {
        report.push_back("region list length does not match triangle count");
    } else {
        std::set<int> ids(m.region.begin(), m.region.end());
        if (ids.empty() || *ids.begin() != 1 || *ids.rbegin() != static_cast<int>(ids.size()) ||
            static_cast<int>(ids.size()) != m.n_regions)
            report.push_back("region ids do not form the range 1.." + std::to_string(m.n_regions));
    }

    std::vector<std::string> conf;
    const auto bnd = boundary_of(m, &conf);
    auto hang = hanging_nodes(m, bnd);
    report.insert(report.end(), conf.begin(), conf.end());
    report.insert(report.end(), hang.begin(), hang.end());

    std::unordered_map<std::uint64_t, int> bset;
    for (const auto& e : bnd)
        bset[edge_key(e[0], e[1])] = 0;
    std::set<int> mesh_tags;
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        const auto key = edge_key(m.edges[e][0], m.edges[e][1]);
        auto it = bset.find(key);
        const std::string name = "boundary edge (" + std::to_string(m.edges[e][0]) + "," +
                                 std::to_string(m.edges[e][1]) + ")";
        if (it == bset.end())
            report.push_back(name + " is not on the boundary of exactly one triangle");
        else if (++it->second == 2)
            report.push_back(name + " is duplicated");
        mesh_tags.insert(m.edge_tag[e]);
    }

    std::map<int, BoundaryCondition::Kind> kinds;
    for (const auto& bc : bcs) {
        auto [it, fresh] = kinds.emplace(bc.tag, bc.kind);
        if (!fresh && it->second != bc.kind)
            report.push_back("tag " + std::to_string(bc.tag) + " is bound to more than one condition kind");
        if (!mesh_tags.count(bc.tag))
            report.push_back("tag " + std::to_string(bc.tag) + " does not appear on any boundary edge");
    }

    // connected components over shared nodes; each needs a Dirichlet edge
    std::vector<int> parent(nn);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : m.triangles) {
        parent[find(t[1])] = find(t[0]);
        parent[find(t[2])] = find(t[0]);
    }
    std::set<int> comps, pinned;
    for (const auto& t : m.triangles)
        comps.insert(find(t[0]));
    for (std::size_t e = 0; e < m.edges.size(); ++e)
        for (const auto& bc : bcs)
            if (bc.tag == m.edge_tag[e] && bc.kind == BoundaryCondition::Kind::Dirichlet &&
                (bc.fixed[0] || bc.fixed[1]))
                pinned.insert(find(m.edges[e][0]));
    for (int c : comps)
        if (!pinned.count(c))
            report.push_back("no Dirichlet constraint on the component containing node " + std::to_string(c));
    return report;
}

// ---------------------------------------------------------------------------

int PatchMesher::node(const Eigen::Vector2d& p)
{
    const std::array<long long, 2> key{std::llround(p.x() / tol_), std::llround(p.y() / tol_)};
    auto [it, fresh] = index_.emplace(key, static_cast<int>(mesh_.nodes.size()));
    if (fresh)
        mesh_.nodes.push_back(p);
    return it->second;
}

void PatchMesher::push(int a, int b, int c, int region)
{
    if (cross(mesh_.nodes[a], mesh_.nodes[b], mesh_.nodes[c]) < 0)
        std::swap(b, c);
    mesh_.triangles.push_back({a, b, c});
    mesh_.region.push_back(region);
    mesh_.n_regions = std::max(mesh_.n_regions, region);
}

void PatchMesher::add_triangle(const std::array<Eigen::Vector2d, 3>& v, int region, int k, double power)
{
    if (k < 1)
        throw InvalidGrading("lattice subdivision must be >= 1");
    if (!(power > 0.0))
        throw InvalidGrading("grading power must be positive");
    std::vector<int> id(static_cast<std::size_t>(k + 1) * (k + 1), -1);
    auto at = [&](int i, int j) -> int& { return id[i * (k + 1) + j]; };
    for (int i = 0; i <= k; ++i)
        for (int j = 0; i + j <= k; ++j) {
            const double l1 = static_cast<double>(i) / k, l2 = static_cast<double>(j) / k;
            const double t = l1 + l2;
            Eigen::Vector2d p = v[0];
            if (i + j == k)
                p = (l1 * v[1] + l2 * v[2]) / t; // keep far edge exactly shared
            else if (t > 0)
                p = v[0] + std::pow(t, power) * ((l1 * v[1] + l2 * v[2]) / t - v[0]);
            at(i, j) = node(p);
        }
    for (int i = 0; i < k; ++i)
        for (int j = 0; i + j < k; ++j) {
            push(at(i, j), at(i + 1, j), at(i, j + 1), region);
            if (i + j < k - 1)
                push(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), region);
        }
}

void PatchMesher::add_block(double x0, double x1, double y0, double y1, int nx, int ny, int region)
{
    if (nx < 1 || ny < 1)
        throw InvalidGrading("block subdivision must be >= 1");
    std::vector<int> id(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double x = i == nx ? x1 : x0 + (x1 - x0) * i / nx;
            const double y = j == ny ? y1 : y0 + (y1 - y0) * j / ny;
            id[j * (nx + 1) + i] = node({x, y});
        }
    auto at = [&](int i, int j) { return id[j * (nx + 1) + i]; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            push(at(i, j), at(i + 1, j), at(i + 1, j + 1), region);
            push(at(i, j), at(i + 1, j + 1), at(i, j + 1), region);
        }
}

Mesh PatchMesher::finish(const std::function<int(const Eigen::Vector2d&, const Eigen::Vector2d&)>& tag_of)
{
    Mesh out = std::move(mesh_);
    mesh_ = Mesh{};
    index_.clear();
    tag_boundary(out, tag_of);
    return out;
}

} // namespace rbe
