#include <doctest.h>

#include <cmath>

#include "genlab/measures.hpp"

using namespace genlab;

TEST_SUITE("measures") {

TEST_CASE("empirical measure weights") {
    const DataPoint z1{{}, 1.0}, z2{{}, 2.0};
    const DataMeasure one = empirical_from_samples({z1});
    REQUIRE(one.size() == 1);
    CHECK(one.atoms()[0].weight == 1.0);

    const DataMeasure two = empirical_from_samples({z1, z2});
    CHECK(two.atoms()[0].weight == 0.5);
    CHECK(two.atoms()[1].z == z2);

    const DataMeasure dup = empirical_from_samples({z1, z1});
    CHECK(dup.size() == 2);
    CHECK(integrate(dup, [](const DataPoint& z) { return z.y * z.y; }) == doctest::Approx(1.0));
    CHECK_THROWS_AS(empirical_from_samples({}), std::invalid_argument);
}

TEST_CASE("resample replaces atoms in place") {
    const DataPoint z1{{}, 1.0}, z2{{}, 2.0}, z3{{}, 3.0}, b1{{}, -1.0}, b2{{}, -2.0};
    const DataMeasure nu2 = empirical_from_samples({z1, z2});
    const DataMeasure r = resample(nu2, {0}, {b1});
    CHECK(r.atoms()[0].z == b1);
    CHECK(r.atoms()[1].z == z2);
    CHECK(r.atoms()[0].weight == 0.5);

    const DataMeasure same = resample(nu2, {0, 1}, {z1, z2});
    CHECK(same.atoms()[0].z == z1);
    CHECK(same.atoms()[1].z == z2);

    const DataMeasure nu3 = empirical_from_samples({z1, z2, z3});
    const DataMeasure r12 = resample(nu3, {0, 1}, {b1, b2});
    CHECK(r12.atoms()[0].z == b1);
    CHECK(r12.atoms()[1].z == b2);
    CHECK(r12.atoms()[2].z == z3);
    for (const auto& a : r12.atoms()) CHECK(a.weight == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS(resample(nu3, {5}, {b1}));
}

TEST_CASE("signed difference has zero mass") {
    const DataMeasure d = signed_difference(DataPoint{{}, 2.0}, DataPoint{{}, 0.5});
    CHECK(d.is_signed());
    CHECK(integrate(d, [](const DataPoint&) { return 1.0; }) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(integrate(d, [](const DataPoint& z) { return z.y; }) == doctest::Approx(1.5));
}

TEST_CASE("integrate on the data space") {
    const DataMeasure nu = empirical_from_samples({DataPoint{{}, 1.0}, DataPoint{{}, 2.0}});
    CHECK(integrate(nu, [](const DataPoint&) { return 1.0; }) == doctest::Approx(1.0));
    CHECK(integrate(nu, [](const DataPoint& z) { return z.norm2(); }) == doctest::Approx(2.5));
}

TEST_CASE("data convex combination interpolates weights") {
    const DataPoint z1{{}, 1.0}, z2{{}, 2.0}, b{{}, 5.0};
    const DataMeasure nu = empirical_from_samples({z1, z2});
    const DataMeasure nu1 = resample(nu, {0}, {b});
    const DataMeasure mid = convex_combination(nu1, nu, 0.25);
    CHECK(mid.total_mass() == doctest::Approx(1.0));
    const double mean = integrate(mid, [](const DataPoint& z) { return z.y; });
    CHECK(mean == doctest::Approx(0.75 * 0.5 * 5.0 + 0.25 * 0.5 * 1.0 + 0.5 * 2.0));
}

TEST_CASE("grid construction") {
    const GridPtr g = make_grid(2, 5, 2.0);
    CHECK(g->size() == 25);
    CHECK(g->spacing == doctest::Approx(1.0));
    CHECK(g->cell_volume == doctest::Approx(1.0));
    // last coordinate varies fastest
    CHECK(g->node(1)[0] == doctest::Approx(-2.0));
    CHECK(g->node(1)[1] == doctest::Approx(-1.0));
    // odd grids contain the origin exactly
    CHECK(g->node(12)[0] == 0.0);
    CHECK(g->node(12)[1] == 0.0);
    CHECK(g->nearest_node(std::vector<double>{0.9, -1.2}) == 2 * 5 + 1 + 5);
}

TEST_CASE("grid measure validation") {
    const GridPtr g = make_grid(1, 3, 1.0);
    CHECK_THROWS(ParamMeasure::on_grid(g, {0.1, 0.1, 0.1}));
    CHECK_THROWS(ParamMeasure::on_grid(g, {-0.5, 1.5, 0.0}));
    CHECK_NOTHROW(ParamMeasure::on_grid(g, {0.5, 0.0, 0.5}));
    CHECK_NOTHROW(ParamMeasure::on_grid(g, {0.5, 0.0, -0.5}, true));
    CHECK_THROWS(ParamMeasure::on_grid(g, {0.5, 0.0, 0.5}, true));
}

TEST_CASE("moments") {
    const GridPtr g = make_grid(1, 5, 2.0);
    const ParamMeasure origin = ParamMeasure::grid_point_mass(g, std::vector<double>{0.0});
    CHECK(moment(origin, 2.0) == 0.0);
    CHECK(moment(origin, 7.0) == 0.0);

    const ParamMeasure two = ParamMeasure::particles(1, {1.0, -3.0});
    CHECK(moment(two, 2.0) == doctest::Approx(5.0));

    // Standard normal on a fine grid
    const GridPtr fine = make_grid(1, 801, 10.0);
    Vec d(fine->size());
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = std::exp(-0.5 * fine->nodes[i] * fine->nodes[i]);
        total += d[i] * fine->cell_volume;
    }
    for (double& v : d) v /= total;
    const ParamMeasure gauss = ParamMeasure::on_grid(fine, d);
    CHECK(std::fabs(moment(gauss, 2.0) - 1.0) <= 1e-4);
    CHECK(std::fabs(moment(gauss, 4.0) - 3.0) <= 1e-4);
}

TEST_CASE("parameter convex combination") {
    const GridPtr g = make_grid(1, 3, 1.0);
    const ParamMeasure a = ParamMeasure::on_grid(g, {1.0, 0.0, 0.0});
    const ParamMeasure b = ParamMeasure::on_grid(g, {0.0, 0.5, 0.5});
    CHECK(convex_combination(a, b, 0.0).density() == a.density());
    CHECK(convex_combination(a, b, 1.0).density() == b.density());
    const ParamMeasure mid = convex_combination(a, b, 0.5);
    CHECK(mid.density()[0] == doctest::Approx(0.5));
    CHECK(mid.density()[1] == doctest::Approx(0.25));
    CHECK(mid.density()[2] == doctest::Approx(0.25));
}

TEST_CASE("integrate on parameter space") {
    const GridPtr g = make_grid(1, 3, 1.0);
    const ParamMeasure a = ParamMeasure::on_grid(g, {0.25, 0.5, 0.25});
    CHECK(integrate(a, [](ThetaView) { return 1.0; }) == doctest::Approx(1.0));
    CHECK(integrate(a, [](ThetaView t) { return t[0] * t[0]; }) == doctest::Approx(0.5));
    const ParamMeasure diff = ParamMeasure::on_grid(g, {0.5, 0.0, -0.5}, true);
    CHECK(integrate(diff, [](ThetaView) { return 1.0; }) == doctest::Approx(0.0));
}

}
