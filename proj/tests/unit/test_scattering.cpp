#include "helpers.hpp"

#include "linbill/errors.hpp"
#include "linbill/scattering.hpp"

#include <doctest.h>

using namespace linbill;
using testutil::vec;

namespace {

PatchGrid grid(const Vector& A, const Vector& B, double h, int points = 5) {
    PatchGrid g;
    g.A_center = A;
    g.B_center = B;
    g.spacing = h;
    g.points_per_axis = points;
    return g;
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("reduce to an oriented line") {
    auto l = reduce(vec({0, 1}), vec({1, 0}));
    CHECK((l.v - vec({1, 0})).norm() == 0.0);
    CHECK((l.Q - vec({0, 1})).norm() < 1e-15);
    l = reduce(vec({5, 1}), vec({1, 0}));
    CHECK((l.Q - vec({0, 1})).norm() < 1e-15);
    l = reduce(vec({3, 0}), vec({-1, 0}));
    CHECK(l.Q.norm() < 1e-15);
    CHECK_THROWS_AS(reduce(vec({0, 1}), vec({2, 0})), InputError);
}

TEST_CASE("total collision patch lies in the product of zero sections") {
    const auto o = testutil::origin2();
    const auto p = sample_relation(o, Itinerary(*o, {0}), grid(vec({3, 0.5}), vec({0.4, 4}), 1e-2, 3));
    CHECK(p.valid_count() == p.size());
    for (const auto& c : p.cells) {
        REQUIRE(c);
        CHECK(c->ell_minus.Q.norm() < 1e-12);
        CHECK(c->ell_plus.Q.norm() < 1e-12);
    }
}

TEST_CASE("mirror patch is dense and classical") {
    const auto m = testutil::mirror();
    const auto p = sample_relation(m, Itinerary(*m, {0}), grid(vec({0.3, 1.2}), vec({2.1, 0.7}), 1e-2, 3));
    CHECK(p.valid_count() == p.size());
    for (const auto& c : p.cells) {
        // Reflection flips the normal component of the direction.
        CHECK(std::abs(c->vA(0) - c->vB(0)) < 1e-10);
        CHECK(std::abs(c->vA(1) + c->vB(1)) < 1e-10);
    }
}

TEST_CASE("Lagrangian residual is small and decays under stencil refinement") {
    const auto m = testutil::mirror();
    const Itinerary it(*m, {0});
    const double r1 = lagrangian_residual(sample_relation(m, it, grid(vec({0.3, 1.2}), vec({2.1, 0.7}), 2e-3)));
    const double r2 = lagrangian_residual(sample_relation(m, it, grid(vec({0.3, 1.2}), vec({2.1, 0.7}), 1e-3)));
    CHECK(r2 < 1e-6);
    const double slope = std::log(r1 / r2) / std::log(2.0);
    CHECK(slope > 1.7);
    CHECK(slope < 2.3);
}

TEST_CASE("free motion relation is the identity") {
    const auto m = testutil::mirror();
    RelationPatch p = sample_relation(m, Itinerary::free_motion(), grid(vec({0.3, 1.2}), vec({2.1, 2.7}), 1e-3, 3));
    REQUIRE(p.valid_count() == p.size());
    // Exact pullback is zero; what remains is the O(h^2) error of the central differences.
    const double r1 = lagrangian_residual(p);
    const double r2 =
        lagrangian_residual(sample_relation(m, Itinerary::free_motion(), grid(vec({0.3, 1.2}), vec({2.1, 2.7}), 5e-4, 3)));
    CHECK(r1 < 1e-7);
    CHECK(std::log(r1 / r2) / std::log(2.0) == doctest::Approx(2.0).epsilon(0.1));
    CHECK_THROWS_AS(legendrian_theta_residual(p), PreconditionError);
    CHECK(legendrian_theta_residual(p, true).residual < 1e-6);
    for (const auto& c : p.cells) {
        CHECK((c->vA - c->vB).norm() < 1e-15);
        CHECK((c->ell_minus.Q - c->ell_plus.Q).norm() < 1e-12);
    }
}

TEST_CASE("theta pairing vanishes on a two-line patch") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const auto p = sample_relation(arr, Itinerary(*arr, {0, 1, 0}), grid(vec({3, 1}), vec({7.4, 0.5}), 1e-3, 3));
    REQUIRE(p.valid_count() == p.size());
    const auto rep = legendrian_theta_residual(p);
    CHECK(rep.residual < 1e-5);
    CHECK(lagrangian_residual(p) < 1e-6);
}

TEST_CASE("angle sum of pi leaves the patch empty") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const auto p = sample_relation(arr, Itinerary(*arr, {0, 1, 0, 1}), grid(vec({3, 1}), vec({-2, 3}), 0.5, 3));
    CHECK(p.valid_count() == 0);
}

TEST_CASE("scaling the action") {
    const auto m = testutil::mirror();
    const auto r = minimize(m, Itinerary(*m, {0}), vec({0, 1}), vec({2, 1}));
    const auto s = make_sample(r, vec({0, 1}), vec({2, 1}));
    const auto s2 = scale_action(s, 2.0);
    CHECK((s2.chain.points[0] - vec({2, 0})).norm() < 1e-10);
    CHECK(s2.value == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK((s2.vA - s.vA).norm() == 0.0);
    const auto r2 = minimize(m, Itinerary(*m, {0}), s2.A, s2.B);
    CHECK((r2.chain.points[0] - s2.chain.points[0]).norm() < 1e-9);
    double prev = 1e300;
    for (double lam : {1e-1, 1e-3, 1e-6}) {
        const double n = scale_action(s, lam).chain.points[0].norm();
        CHECK(n < prev);
        prev = n;
    }
    CHECK(prev < 1e-5);
    CHECK_THROWS_AS(scale_action(s, 0.0), InputError);
}

TEST_CASE("patch bookkeeping") {
    const auto m = testutil::mirror();
    const auto p = sample_relation(m, Itinerary(*m, {0}), grid(vec({0.3, 1.2}), vec({2.1, 0.7}), 1e-2, 3), {}, 2);
    CHECK(p.size() == 81);
    for (std::size_t f = 0; f < p.size(); ++f) CHECK(p.flat(p.index(f)) == f);
    const auto [A, B] = p.anchors(std::vector<int>{0, 2, 1, 1});
    CHECK((A - vec({0.29, 1.21})).norm() < 1e-15);
    CHECK((B - vec({2.1, 0.7})).norm() < 1e-15);
    const auto serial = sample_relation(m, Itinerary(*m, {0}), grid(vec({0.3, 1.2}), vec({2.1, 0.7}), 1e-2, 3), {}, 1);
    for (std::size_t f = 0; f < p.size(); ++f) CHECK(p.cells[f]->value == serial.cells[f]->value);
}

}
