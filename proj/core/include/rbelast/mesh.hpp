#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rbe {

/// Conforming P1 triangulation with 1-based region ids and tagged boundary edges.
struct Mesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> region; // per triangle, 1..n_regions
    std::vector<std::array<int, 2>> edges;
    std::vector<int> edge_tag;
    int n_regions = 0;

    std::size_t n_nodes() const { return nodes.size(); }
    std::size_t n_triangles() const { return triangles.size(); }
    double signed_area(std::size_t t) const;
};

struct BoundaryCondition {
    enum class Kind { Dirichlet, Traction, Output };

    int tag = 0;
    Kind kind = Kind::Dirichlet;
    std::array<bool, 2> fixed{false, false}; // Dirichlet: constrained components
    Eigen::Vector2d value = Eigen::Vector2d::Zero(); // Traction f or output multipliers

    static BoundaryCondition dirichlet(int tag, bool u1, bool u2);
    static BoundaryCondition traction(int tag, double f1, double f2);
    static BoundaryCondition output(int tag, double l1, double l2);
};

Mesh parse_mesh(std::string_view text);
std::string serialize_mesh(const Mesh& mesh);

enum class Corner { LowerLeft, LowerRight, UpperRight, UpperLeft };

/// Structured mesh of the unit square: nx*ny cells, each cut into two triangles.
/// With grading g != 1 the cell widths shrink geometrically by g toward `corner`.
/// Boundary edges are tagged 1 bottom, 2 right, 3 top, 4 left.
Mesh generate_structured_rect(int nx, int ny, const std::function<int(int, int)>& region_of,
                              double grading = 1.0, Corner corner = Corner::LowerLeft);

/// Empty report means the mesh and the boundary conditions are usable.
std::vector<std::string> validate_mesh(const Mesh& mesh, const std::vector<BoundaryCondition>& bcs);

/// Triangle owning each entry of mesh.edges (-1 if the edge is not a triangle edge).
std::vector<int> edge_owner(const Mesh& mesh);

/// Recompute the boundary edge list from triangle adjacency; `tag_of` sees the
/// edge endpoints in mesh orientation (interior on the left).
void tag_boundary(Mesh& mesh, const std::function<int(const Eigen::Vector2d&, const Eigen::Vector2d&)>& tag_of);

/// Piecewise mesher used by the benchmark generators: macro triangles split into
/// k^2 lattice triangles, optionally graded toward their first vertex, and
/// axis-aligned blocks split into structured cells. Coincident nodes are merged.
class PatchMesher {
public:
    explicit PatchMesher(double merge_tol = 1e-10) : tol_(merge_tol) {}

    void add_triangle(const std::array<Eigen::Vector2d, 3>& v, int region, int k, double grading_power = 1.0);
    void add_block(double x0, double x1, double y0, double y1, int nx, int ny, int region);

    Mesh finish(const std::function<int(const Eigen::Vector2d&, const Eigen::Vector2d&)>& tag_of);

private:
    int node(const Eigen::Vector2d& p);
    void push(int a, int b, int c, int region);

    double tol_;
    Mesh mesh_;
    std::map<std::array<long long, 2>, int> index_;
};

} // namespace rbe
