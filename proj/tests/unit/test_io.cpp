#include "helpers.hpp"

#include "linbill/errors.hpp"
#include "linbill/io.hpp"

#include <doctest.h>

using namespace linbill;
using testutil::vec;

TEST_SUITE("io") {

TEST_CASE("%.17g round trips doubles") {
    for (double x : {0.1, 1.0 / 3.0, 2 * std::sqrt(2.0), -1e-300, 6.02214076e23}) CHECK(std::stod(fmt(x)) == x);
    CHECK(fmt(0.5) == "0.5");
}

TEST_CASE("fixtures load") {
    const Arrangement m = load_arrangement(testutil::fixture("mirror.json"));
    CHECK(m.dim() == 2);
    CHECK(m[0].name() == "L1");
    const Arrangement z = load_arrangement(testutil::fixture("total_collision.json"));
    CHECK(z[0].rank() == 0);
    const Arrangement two = load_arrangement(testutil::fixture("two_lines_pi3.json"));
    CHECK(min_angle(two) == doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
    CHECK_THROWS_AS(load_arrangement(testutil::fixture("missing.json")), InputError);
}

TEST_CASE("arrangement JSON round trip") {
    const auto arr = testutil::lines({0.3, 1.1});
    const Arrangement back = arrangement_from_json(arrangement_to_json(*arr));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].name() == (*arr)[i].name());
        CHECK(principal_angle(back[i], (*arr)[i]) < 1e-7);
    }
    CHECK_THROWS_AS(arrangement_from_json(Json::parse(R"({"dim": 2})")), InputError);
    CHECK_THROWS_AS(arrangement_from_json(Json::parse(R"({"dim": 2, "subspaces": [{"name": "a", "basis": [[1, 0, 0]]}]})")),
                    InputError);
}

TEST_CASE("trajectory JSON round trip keeps the invariants") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const auto r = minimize(arr, Itinerary(*arr, {0, 1, 0}), vec({3, 1}), vec({7.4, 0.5}));
    REQUIRE(r.trajectory);
    const Json j = Json::parse(trajectory_to_json(*r.trajectory).dump());
    const BilliardTrajectory back = trajectory_from_json(j, arr);
    CHECK(back.length() == r.trajectory->length());
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.chain()[i] == r.trajectory->chain()[i]);
    for (std::size_t i = 1; i <= 3; ++i) CHECK(reflection_residual(back, i).momentum < 1e-9);

    Json bad = j;
    bad["length"] = 1.0;
    CHECK_THROWS_AS(trajectory_from_json(bad, arr), InputError);
    bad = j;
    bad["itinerary"] = {"L1", "L1", "L2"};
    CHECK_THROWS_AS(trajectory_from_json(bad, arr), InputError);
    bad = j;
    bad["chain"][0][1] = 0.5;
    CHECK_THROWS_AS(trajectory_from_json(bad, arr), InputError);
}

TEST_CASE("CSV schemas") {
    std::vector<double> g{0.1, 0.2};
    const std::string s = slice_csv(three_body_slice(g, g));
    CHECK(s.rfind("phi,psi,branch,arg1,arg2,arg3,momentum_residual,energy_residual\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 5);
    const auto m = testutil::mirror();
    PatchGrid grid;
    grid.A_center = vec({0, 1});
    grid.B_center = vec({2, 1});
    grid.points_per_axis = 1;
    const std::string p = patch_csv(sample_relation(m, Itinerary(*m, {0}), grid));
    CHECK(p.rfind("cell,A0,A1,B0,B1,status,vA0,vA1,vB0,vB1,Qm0,Qm1,Qp0,Qp1,S\n", 0) == 0);
    CHECK(p.find("ValidBilliard") != std::string::npos);
}

}
