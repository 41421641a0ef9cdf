#include "helpers.hpp"

#include "linbill/errors.hpp"
#include "linbill/origami.hpp"

#include <doctest.h>

using namespace linbill;
using testutil::vec;

TEST_SUITE("origami") {

TEST_CASE("single mirror unfolds to a straight angle") {
    const auto m = testutil::mirror();
    const auto r = minimize(m, Itinerary(*m, {0}), vec({0.3, 1.2}), vec({2.1, 0.7}));
    const auto u = unfold(*r.trajectory);
    REQUIRE(u.theta.size() == 2);
    CHECK(u.beta == 0.0);
    CHECK(u.angle_sum() == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(u.straightness_residual() < 1e-12);
    CHECK(law_of_sines_residual(*r.trajectory) < 1e-12);
}

TEST_CASE("two lines at pi/6: angle sum, straight development, law of sines") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 6});
    const auto rows = search_realizable(arr, 4, 400, 3);
    int witnessed = 0;
    for (const auto& row : rows) {
        if (row.status != Realizability::Realized || row.itinerary.size() < 2) continue;
        const BilliardTrajectory t(arr, row.itinerary, *row.witness_A, row.witness_chain, *row.witness_B);
        const auto u = unfold(t);
        CHECK(std::abs(u.angle_sum() - std::numbers::pi) < 1e-10);
        CHECK(check_cor1(u));
        CHECK(u.straightness_residual() < 1e-9);
        CHECK(law_of_sines_residual(t) < 1e-9);
        ++witnessed;
    }
    CHECK(witnessed >= 2);
}

TEST_CASE("beta test") {
    Unfolding u;
    u.beta = std::numbers::pi / 2;
    CHECK(check_cor1(u));
    u.beta = std::numbers::pi;
    CHECK_FALSE(check_cor1(u));
}

TEST_CASE("collision bound") {
    CHECK(itinerary_bound(*testutil::lines({0.0, std::numbers::pi / 3})) == 4);
    CHECK(itinerary_bound(*testutil::lines({0.0, std::numbers::pi / 2})) == 3);
    CHECK(itinerary_bound(*testutil::lines({0.0, std::numbers::pi / 4})) == 5);
}

TEST_CASE("law of sines detects a perturbed chain") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const Itinerary it(*arr, {0, 1, 0});
    const auto r = minimize(arr, it, vec({3, 1}), vec({7.4, 0.5}));
    REQUIRE(r.classification == Classification::ValidBilliard);
    CHECK(law_of_sines_residual(*r.trajectory) < 1e-9);
    auto chain = r.chain.points;
    chain[2] *= 1.05;
    const BilliardTrajectory bent(arr, it, vec({3, 1}), chain, vec({7.4, 0.5}));
    CHECK(law_of_sines_residual(bent) > 1e-3);
}

TEST_CASE("unfold rejects a vertex at the origin") {
    const auto o = testutil::origin2();
    const BilliardTrajectory t(o, Itinerary(*o, {0}), vec({3, 0}), {vec({0, 0})}, vec({0, 4}));
    CHECK_THROWS_AS(unfold(t), PreconditionError);
}

TEST_CASE("enumeration and the angle filter") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const auto its = enumerate_itineraries(*arr, 3);
    CHECK(its.size() == 6);
    CHECK_FALSE(angle_filtered(*arr, Itinerary(*arr, {0, 1, 0})));
    CHECK(angle_filtered(*arr, Itinerary(*arr, {0, 1, 0, 1})));
    const auto three = testutil::lines({0.0, 1.0, 2.0});
    CHECK(enumerate_itineraries(*three, 2).size() == 3 + 6);
}

TEST_CASE("realizability search on two lines at pi/3") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const auto rows = search_realizable(arr, 5, 2000, 7, 2);
    std::size_t longest = 0;
    for (const auto& r : rows) {
        if (r.itinerary.size() == 5) CHECK(r.status == Realizability::NotFound);
        if (r.status == Realizability::Realized) {
            longest = std::max(longest, r.itinerary.size());
            REQUIRE(r.witness_A);
            const BilliardTrajectory t(arr, r.itinerary, *r.witness_A, r.witness_chain, *r.witness_B);
            for (std::size_t i = 1; i <= t.size(); ++i) CHECK(reflection_residual(t, i).momentum < 1e-9);
        }
    }
    CHECK(longest >= 2);
    CHECK(longest <= 4);
    const auto again = search_realizable(arr, 5, 2000, 7, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].status == again[i].status);
        CHECK(rows[i].samples == again[i].samples);
    }
    CHECK_THROWS_AS(search_realizable(arr, 6, 100, 1), PreconditionError);
}

TEST_CASE("single line is realizable") {
    const auto rows = search_realizable(testutil::mirror(), 1, 50, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == Realizability::Realized);
}

}
