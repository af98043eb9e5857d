#include "fixtures.hpp"

#include "rbelast/archive.hpp"
#include "rbelast/errors.hpp"

#include <doctest.h>

#include <cstring>
#include <sstream>

using namespace rbe;
using rbe::testing::trained;

TEST_CASE("config parsing")
{
    const RunConfig c = parse_config("[problem]\nname = center_crack\nresolution = coarse\nmu_lo = 0.2, 1\n"
                                     "mu_hi = 0.4, 2\n[greedy]\nn_max = 12\nindicator = absolute\n"
                                     "[online]\ndelta_mu1 = 0.002\n");
    CHECK(c.problem == "center_crack");
    CHECK(c.options.resolution == Resolution::Coarse);
    REQUIRE(c.options.box);
    CHECK(c.options.box->lo == std::vector<double>{0.2, 1.0});
    CHECK(c.N_max == 12);
    CHECK(c.indicator == Indicator::AbsoluteOutputBound);
    CHECK(c.delta_mu1 == 0.002);
    CHECK(c.n_train == 500); // default

    CHECK_THROWS_AS(parse_config("[problem]\nname = center_crack\ncolour = red\n"), UnknownKey);
    CHECK_THROWS_AS(parse_config("[problem]\nname = center_crack\n[extra]\nx = 1\n"), UnknownKey);
    CHECK_THROWS_AS(parse_config("[problem]\nname = nowhere\n"), UnknownProblem);
    CHECK_THROWS_AS(parse_config("[problem]\nname = center_crack\n[greedy]\nn_max = 0\n"), OutOfRangeValue);
    CHECK_THROWS_AS(parse_config("[problem]\nname = center_crack\n[greedy]\ntol = abc\n"), OutOfRangeValue);
    CHECK_THROWS_AS(parse_config("[problem]\nname = center_crack\n[scm]\ntol = 1.5\n"), OutOfRangeValue);
    CHECK_THROWS_AS(parse_config("[problem]\nname = center_crack\nmu_lo = 0.2\n"), OutOfRangeValue);
    CHECK_THROWS_AS(parse_config("[problem\nname = center_crack\n"), MalformedFile);
    CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), MalformedFile);
}

TEST_CASE("config hash depends on content, not layout")
{
    const RunConfig a = parse_config("[problem]\nname = multi_material\n[greedy]\ntol = 1e-4\n");
    const RunConfig b = parse_config("; comment\n[greedy]\ntol=0.0001\n\n[problem]\n  name = multi_material  \n");
    const RunConfig c = parse_config("[problem]\nname = multi_material\n[greedy]\ntol = 2e-4\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    // reference values of FNV-1a 64
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("archive round trip is bit exact")
{
    for (const char* name : {"multi_material", "woven_composite"}) {
        CAPTURE(name);
        const RBModel& m = trained(name).model;
        std::stringstream ss;
        save_model(m, ss);
        const std::string bytes = ss.str();
        std::istringstream in(bytes);
        const RBModel back = load_model(in);

        CHECK(back.problem == m.problem);
        CHECK(back.config_hash == m.config_hash);
        CHECK(config_hash(model_config(back)) == m.config_hash);
        CHECK(back.N_max() == m.N_max());
        CHECK(back.scm.J() == m.scm.J());
        for (const Param& mu : uniform_sample(m.theta.box(), 5, 3)) {
            const auto q0 = m.query(mu, m.N_max());
            const auto q1 = back.query(mu, m.N_max());
            CHECK(std::memcmp(&q0.sN, &q1.sN, sizeof(double)) == 0);
            CHECK(std::memcmp(&q0.deltaN, &q1.deltaN, sizeof(double)) == 0);
        }
        std::stringstream again;
        save_model(back, again);
        CHECK(again.str() == bytes);
    }
}

TEST_CASE("damaged archives are rejected")
{
    const RBModel& m = trained("multi_material").model;
    std::stringstream ss;
    save_model(m, ss);
    const std::string bytes = ss.str();

    std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(load_model(truncated), ArchiveError);

    std::string flipped = bytes;
    flipped[bytes.size() - 20] ^= 0x5a;
    std::istringstream bad(flipped);
    CHECK_THROWS_AS(load_model(bad), ArchiveError);

    std::istringstream garbage("not an archive\n");
    CHECK_THROWS_AS(load_model(garbage), ArchiveError);
    CHECK_THROWS_AS(load_model(std::string("/nonexistent/model.rbm")), ArchiveError);
}
