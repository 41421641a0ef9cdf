#include "helpers.hpp"

#include "linbill/errors.hpp"
#include "linbill/trajectory.hpp"

#include <doctest.h>

using namespace linbill;
using testutil::vec;

TEST_SUITE("trajectory") {

TEST_CASE("mirror path obeys both reflection laws") {
    const BilliardTrajectory t(testutil::mirror(), Itinerary(*testutil::mirror(), {0}), vec({0, 1}), {vec({1, 0})}, vec({2, 1}));
    const auto r = reflection_residual(t, 1);
    CHECK(r.energy < 1e-15);
    CHECK(r.momentum < 1e-15);
    CHECK(t.length() == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(is_transverse(t));
    CHECK_THROWS_AS(reflection_residual(t, 0), InputError);
    CHECK_THROWS_AS(reflection_residual(t, 2), InputError);
}

TEST_CASE("reflection through a line in R^3 at the origin") {
    const auto arr = std::make_shared<const Arrangement>(3, std::vector<Subspace>{Subspace("z", 3, {vec({0, 0, 1})})});
    const BilliardTrajectory t(arr, Itinerary(*arr, {0}), vec({1, 0, 0}), {vec({0, 0, 0})}, vec({0, 1, 0}));
    CHECK(reflection_residual(t, 1).momentum < 1e-15);
}

TEST_CASE("sliding the vertex along the mirror breaks the momentum law") {
    const auto m = testutil::mirror();
    const BilliardTrajectory t(m, Itinerary(*m, {0}), vec({0, 1}), {vec({1.2, 0})}, vec({2, 1}));
    CHECK(reflection_residual(t, 1).momentum > 0.1);
}

TEST_CASE("construction enforces the type invariants") {
    const auto m = testutil::mirror();
    const Itinerary it(*m, {0});
    CHECK_THROWS_AS(BilliardTrajectory(m, it, vec({0, 1}), {vec({1, 0.1})}, vec({2, 1})), InputError);
    CHECK_THROWS_AS(BilliardTrajectory(m, it, vec({1, 0}), {vec({1, 0})}, vec({2, 1})), InputError);
    CHECK_THROWS_AS(BilliardTrajectory(m, it, vec({0, 1}), {}, vec({2, 1})), InputError);
    CHECK_THROWS_AS(BilliardTrajectory(m, it, vec({0, 1, 0}), {vec({1, 0})}, vec({2, 1})), InputError);
}

TEST_CASE("straight path through a codimension-2 line is not transverse") {
    const auto arr = std::make_shared<const Arrangement>(3, std::vector<Subspace>{Subspace("z", 3, {vec({0, 0, 1})})});
    const BilliardTrajectory t(arr, Itinerary(*arr, {0}), vec({-1, 0, 1}), {vec({0, 0, 1})}, vec({1, 0, 1}));
    CHECK_FALSE(is_transverse(t));
    CHECK(reflection_residual(t, 1).momentum < 1e-15);
}

TEST_CASE("genericity") {
    const auto m = testutil::mirror();
    CHECK(is_generic(*m, Itinerary(*m, {0}), vec({0, 1}), {vec({1, 0})}, vec({2, 1})));

    const auto two = testutil::lines({0.0, 1.0});
    CHECK_FALSE(is_generic(*two, Itinerary(*two, {0, 1}), vec({1, 1}), {vec({0, 0}), vec({0.5, 0.5 * std::tan(1.0)})},
                           vec({-1, 2})));

    // Outgoing ray from (1, 0) through B = (0.5, 0.5) meets the y-axis at (0, 1).
    const auto xy = testutil::lines({0.0, std::numbers::pi / 2});
    const Itinerary it(*xy, {0});
    CHECK_FALSE(is_generic(*xy, it, vec({2, 1}), {vec({1, 0})}, vec({0.5, 0.5})));
    CHECK(!segment_collisions(*xy, vec({1, 0}), vec({-0.5, 1.5})).empty());
    // Both rays head away from the y-axis.
    CHECK(is_generic(*xy, it, vec({1.5, 1}), {vec({1, 0})}, vec({3, 1})));
}

TEST_CASE("edge inside its collision subspace") {
    const auto m = testutil::mirror();
    const Itinerary it(*m, {0});
    CHECK(has_edge_in_subspace(*m, it, vec({-1, 0}), {vec({0, 0})}, vec({1, 1})));
    CHECK_FALSE(has_edge_in_subspace(*m, it, vec({0, 1}), {vec({1, 0})}, vec({2, 1})));
}

TEST_CASE("boundary lines") {
    const auto o = testutil::origin2();
    const BilliardTrajectory ex1(o, Itinerary(*o, {0}), vec({3, 0}), {vec({0, 0})}, vec({0, 4}));
    const auto b = boundary_lines(ex1);
    CHECK((b.minus.v - vec({-1, 0})).norm() < 1e-15);
    CHECK(b.minus.Q.norm() < 1e-15);
    CHECK((b.plus.v - vec({0, 1})).norm() < 1e-15);
    CHECK(b.plus.Q.norm() < 1e-15);

    const auto m = testutil::mirror();
    const BilliardTrajectory mt(m, Itinerary(*m, {0}), vec({0, 1}), {vec({1, 0})}, vec({2, 1}));
    const auto bm = boundary_lines(mt);
    const Vector v = vec({1, -1}) / std::sqrt(2.0);
    CHECK((bm.minus.v - v).norm() < 1e-15);
    CHECK((bm.minus.Q - (vec({0, 1}) - vec({0, 1}).dot(v) * v)).norm() < 1e-15);
    CHECK(std::abs(bm.minus.Q.dot(bm.minus.v)) < 1e-15);
}

TEST_CASE("oriented line is independent of the point chosen on it") {
    const auto l1 = OrientedLine::through(vec({0, 1}), vec({1, 0}));
    const auto l2 = OrientedLine::through(vec({5, 1}), vec({1, 0}));
    CHECK((l1.Q - vec({0, 1})).norm() < 1e-15);
    CHECK((l1.Q - l2.Q).norm() < 1e-15);
    CHECK_THROWS_AS(OrientedLine::through(vec({0, 1}), vec({0, 0})), InputError);
}

}
