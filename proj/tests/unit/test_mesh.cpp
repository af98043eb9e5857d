#include "rbelast/errors.hpp"
#include "rbelast/mesh.hpp"

#include <doctest.h>

#include <map>

using namespace rbe;

namespace {

Mesh unit_square(int nx, int ny)
{
    return generate_structured_rect(nx, ny, [](int, int) { return 1; });
}

} // namespace

TEST_CASE("structured rectangle covers the unit square with positive triangles")
{
    const Mesh m = unit_square(5, 3);
    CHECK(m.n_nodes() == 6 * 4);
    CHECK(m.n_triangles() == 2 * 5 * 3);
    double area = 0.0;
    for (std::size_t t = 0; t < m.n_triangles(); ++t) {
        CHECK(m.signed_area(t) > 0.0);
        area += m.signed_area(t);
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-14));

    std::map<int, double> length;
    for (std::size_t e = 0; e < m.edges.size(); ++e)
        length[m.edge_tag[e]] += (m.nodes[m.edges[e][1]] - m.nodes[m.edges[e][0]]).norm();
    REQUIRE(length.size() == 4);
    for (const auto& [tag, l] : length)
        CHECK(l == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("graded mesh still tiles the square")
{
    const Mesh m = generate_structured_rect(8, 8, [](int, int) { return 1; }, 0.7, Corner::UpperRight);
    double area = 0.0;
    for (std::size_t t = 0; t < m.n_triangles(); ++t)
        area += m.signed_area(t);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(generate_structured_rect(4, 4, [](int, int) { return 1; }, -1.0), InvalidGrading);
}

TEST_CASE("serialize and parse round trip")
{
    const Mesh m = generate_structured_rect(4, 3, [](int i, int) { return i < 2 ? 1 : 2; });
    const Mesh back = parse_mesh(serialize_mesh(m));
    REQUIRE(back.n_nodes() == m.n_nodes());
    REQUIRE(back.n_triangles() == m.n_triangles());
    for (std::size_t i = 0; i < m.n_nodes(); ++i)
        CHECK(back.nodes[i] == m.nodes[i]);
    CHECK(back.triangles == m.triangles);
    CHECK(back.region == m.region);
    CHECK(back.edges == m.edges);
    CHECK(back.edge_tag == m.edge_tag);
    CHECK(back.n_regions == 2);
    CHECK(serialize_mesh(back) == serialize_mesh(m));
}

TEST_CASE("parser rejects broken input")
{
    const std::string good = "mesh 1\nnodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2 1\nedges 1\n0 1 1\n";
    CHECK_NOTHROW(parse_mesh(good));
    CHECK_THROWS_AS(parse_mesh("mesh 2\n"), MalformedFile);
    CHECK_THROWS_AS(parse_mesh("nodes 3\n"), MalformedFile);
    CHECK_THROWS_AS(parse_mesh("mesh 1\nnodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 7 1\nedges 0\n"), MalformedFile);
    CHECK_THROWS_AS(parse_mesh("mesh 1\nnodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2 0\nedges 0\n"), BadRegionId);
    CHECK_THROWS_AS(parse_mesh("mesh 1\nnodes 3\n0 0\n1 0\n2 0\ntriangles 1\n0 1 2 1\nedges 0\n"), MalformedFile);
    CHECK_THROWS_AS(parse_mesh(good + "extra\n"), MalformedFile);
    // second triangle touches the first only at a node lying inside its edge
    const std::string hanging = "mesh 1\nnodes 5\n0 0\n2 0\n0 2\n1 1\n2 2\n"
                                "triangles 2\n0 1 2 1\n3 1 4 1\nedges 0\n";
    CHECK_THROWS_AS(parse_mesh(hanging), NonConforming);
}

TEST_CASE("clockwise triangles are reoriented")
{
    const Mesh m = parse_mesh("mesh 1\nnodes 3\n0 0\n0 1\n1 0\ntriangles 1\n0 1 2 1\nedges 0\n");
    CHECK(m.signed_area(0) == doctest::Approx(0.5));
}

TEST_CASE("validation reports unusable boundary conditions")
{
    const Mesh m = unit_square(3, 3);
    CHECK(validate_mesh(m, {BoundaryCondition::dirichlet(1, true, true), BoundaryCondition::traction(3, 0, 1)})
              .empty());
    CHECK_FALSE(validate_mesh(m, {BoundaryCondition::traction(3, 0, 1)}).empty());
    CHECK_FALSE(validate_mesh(m, {BoundaryCondition::dirichlet(1, true, true), BoundaryCondition::traction(9, 0, 1)})
                    .empty());
    CHECK_FALSE(validate_mesh(m, {BoundaryCondition::dirichlet(1, true, true), BoundaryCondition::traction(1, 0, 1)})
                    .empty());
}
