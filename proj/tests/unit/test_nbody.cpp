#include "helpers.hpp"

#include "linbill/errors.hpp"
#include "linbill/nbody.hpp"

#include <doctest.h>

using namespace linbill;
using testutil::vec;

TEST_SUITE("nbody") {

TEST_CASE("two unit masses on a line") {
    const NBodySystem sys(2, 1, {1, 1}, false);
    const Arrangement arr = build_arrangement(sys);
    REQUIRE(arr.size() == 1);
    CHECK(arr[0].name() == "D12");
    CHECK(arr[0].sigma() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(arr[0].distance(vec({1, 1})) < 1e-15);
    CHECK(arr[0].rank() == 1);
}

TEST_CASE("reduced planar three-body arrangement") {
    const NBodySystem sys(3, 2, {1.0 / 3, 1.0 / 3, 1.0 / 3}, true);
    CHECK(sys.dim() == 4);
    const Arrangement arr = build_arrangement(sys);
    REQUIRE(arr.size() == 3);
    for (const auto& L : arr.subspaces()) CHECK(L.codim() == 2);
    CHECK(arr.pairwise_transverse());
    CHECK(translation_core(arr).rank() == 0);
}

TEST_CASE("sigma converts mass-metric distance to separation") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> mass(0.2, 3.0);
    for (bool reduce : {false, true}) {
        const NBodySystem sys(4, 3, {mass(rng), mass(rng), mass(rng), mass(rng)}, reduce);
        const Arrangement arr = build_arrangement(sys);
        for (int trial = 0; trial < 20; ++trial) {
            const Vector q = testutil::random_vector(12, rng);
            const Vector x = sys.embed(q);
            std::size_t idx = 0;
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = a + 1; b < 4; ++b, ++idx) {
                    const double sep = (q.segment(3 * a, 3) - q.segment(3 * b, 3)).norm();
                    CHECK(std::abs(sep - sys.sigma(a, b) * arr[idx].distance(x)) < 1e-12 * std::max(1.0, sep));
                }
        }
    }
}

TEST_CASE("embedding round trip and centre of mass") {
    std::mt19937_64 rng(2);
    const NBodySystem full(3, 2, {1, 2, 3}, false);
    const Vector q = testutil::random_vector(6, rng);
    CHECK((full.unembed(full.embed(q)) - q).norm() < 1e-14);
    CHECK(full.embed(q).squaredNorm() == doctest::Approx(full.mass_norm_sq(q)).epsilon(1e-13));

    const NBodySystem red(3, 2, {1, 2, 3}, true);
    const Vector back = red.unembed(red.embed(q));
    CHECK(red.total_momentum(back).norm() < 1e-13);
    // Removing the centre of mass does not change relative positions.
    CHECK(((back.segment(0, 2) - back.segment(2, 2)) - (q.segment(0, 2) - q.segment(2, 2))).norm() < 1e-13);
    CHECK_THROWS_AS(NBodySystem(3, 2, {1, -1, 1}, false), InputError);
}

TEST_CASE("diagonal rotation preserves every collision subspace") {
    const NBodySystem sys(3, 2, {1, 2, 3}, true);
    const Arrangement arr = build_arrangement(sys);
    const Matrix xi = diagonal_rotation(sys, 0, 1);
    CHECK(RotationGenerator::preservation_defect(arr, xi) < 1e-13);
    CHECK_NOTHROW(RotationGenerator(arr, xi));
}

TEST_CASE("slice conserves momentum and energy") {
    std::vector<double> g;
    for (int i = 0; i < 48; ++i) g.push_back(2 * std::numbers::pi * i / 48);
    const auto s = three_body_slice(g, g);
    CHECK(s.points.size() == 48 * 48);
    CHECK(s.w_norm == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
    CHECK(s.max_momentum_residual() < 1e-12);
    CHECK(s.max_energy_residual() < 1e-12);
}

TEST_CASE("straight-through slice points are flagged and excluded") {
    // w parallel to v1 - v2 = 1 - e^{2 pi i/3} happens at phi = -pi/6.
    const std::vector<double> phis{2 * std::numbers::pi - std::numbers::pi / 6};
    const std::vector<double> psis{0.3};
    const auto s = three_body_slice(phis, psis);
    REQUIRE(s.points.size() == 1);
    CHECK((s.points[0].branch & 1) == 1);
    const auto cv = cross_validate_slice(s, 5, 1);
    CHECK(cv.samples == 0);
    CHECK(cv.excluded == 5);
}

TEST_CASE("slice cross-validation against the generic solver") {
    std::vector<double> g;
    for (int i = 0; i < 24; ++i) g.push_back(2 * std::numbers::pi * (i + 0.5) / 24);
    const auto s = three_body_slice(g, g);
    const auto cv = cross_validate_slice(s, 120, 42);
    CHECK(cv.samples + cv.excluded == 120);
    CHECK(cv.samples >= 100);
    CHECK(cv.max_reflection_residual < 1e-10);
    CHECK(cv.max_chain_deviation < 1e-7);
    CHECK(cv.max_J_deviation < 1e-9);
}

}
