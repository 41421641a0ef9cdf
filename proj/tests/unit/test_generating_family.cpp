#include "helpers.hpp"

#include "linbill/errors.hpp"
#include "linbill/generating_family.hpp"

#include <doctest.h>

using namespace linbill;
using testutil::vec;

namespace {

Vector flat_gradient(const Arrangement& arr, const Itinerary& it, const Vector& A, const Chain& c, const Vector& B) {
    const auto blocks = gradient(arr, it, A, c, B);
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.size();
    Vector g(n);
    n = 0;
    for (const auto& b : blocks) {
        g.segment(n, b.size()) = b;
        n += b.size();
    }
    return g;
}

struct RandomInstance {
    std::shared_ptr<const Arrangement> arr;
    Itinerary it = Itinerary::free_motion();
    Vector A, B;
    Chain chain;
};

RandomInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t rank, std::size_t count, std::size_t k) {
    RandomInstance r;
    r.arr = testutil::random_arrangement(n, rank, count, rng);
    std::uniform_int_distribution<std::size_t> pick(0, count - 1);
    std::vector<std::size_t> labels;
    while (labels.size() < k) {
        const std::size_t l = pick(rng);
        if (labels.empty() || labels.back() != l) labels.push_back(l);
    }
    r.it = Itinerary(*r.arr, labels);
    r.A = testutil::random_vector(n, rng, 2.0);
    r.B = testutil::random_vector(n, rng, 2.0);
    std::vector<Vector> coords;
    for (std::size_t i = 0; i < labels.size(); ++i) coords.push_back(testutil::random_vector(rank, rng));
    r.chain = Chain::from_coords(*r.arr, r.it, coords);
    return r;
}

}  // namespace

TEST_SUITE("generating_family") {

TEST_CASE("action values") {
    CHECK(action(vec({3, 0}), {vec({0, 0})}, vec({0, 4})) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(action(vec({0, 1}), {vec({1, 0})}, vec({2, 1})) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(action(vec({1, 0, 0}), {vec({0, 0, 0})}, vec({0, 1, 0})) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("mirror gradient at the minimizer and at the origin") {
    const auto m = testutil::mirror();
    const Itinerary it(*m, {0});
    const Vector A = vec({0, 1}), B = vec({2, 1});
    const Matrix& basis = (*m)[0].basis();
    auto ambient = [&](const Vector& q) {
        return Vector(basis * gradient(*m, it, A, Chain::from_points(*m, it, {q}), B)[0]);
    };
    CHECK(ambient(vec({1, 0})).norm() < 1e-15);
    // Hand value: d/dx [sqrt(x^2 + 1) + sqrt((2 - x)^2 + 1)] at x = 0 is -2/sqrt(5).
    const Vector g0 = ambient(vec({0, 0}));
    CHECK(g0(0) == doctest::Approx(-2.0 / std::sqrt(5.0)).epsilon(1e-15));
    CHECK(std::abs(g0(1)) < 1e-15);
}

TEST_CASE("gradient and Hessian against central finite differences") {
    std::mt19937_64 rng(2024);
    struct Shape {
        std::size_t n, rank, count, k;
    };
    const Shape shapes[] = {{2, 1, 3, 3}, {3, 1, 3, 4}, {3, 2, 2, 2}, {4, 2, 3, 4}, {5, 3, 3, 3}, {6, 4, 2, 4}, {6, 1, 4, 4}};
    int cases = 0;
    for (const auto& s : shapes) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto inst = random_instance(rng, s.n, s.rank, s.count, s.k);
            const Vector x = inst.chain.flat();
            auto S = [&](const Vector& y) {
                return action(inst.A, Chain::from_flat(*inst.arr, inst.it, y).points, inst.B);
            };
            auto G = [&](const Vector& y) {
                return flat_gradient(*inst.arr, inst.it, inst.A, Chain::from_flat(*inst.arr, inst.it, y), inst.B);
            };
            const double h = 1e-5;
            Vector gfd(x.size());
            Matrix Hfd(x.size(), x.size());
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                Vector e = Vector::Zero(x.size());
                e(j) = h;
                gfd(j) = (S(x + e) - S(x - e)) / (2 * h);
                Hfd.col(j) = (G(x + e) - G(x - e)) / (2 * h);
            }
            const Vector g = G(x);
            const Matrix H = hessian(*inst.arr, inst.it, inst.A, inst.chain, inst.B).hessian;
            CHECK((g - gfd).norm() / std::max(g.norm(), 1e-3) < 1e-7);
            CHECK((H - Hfd).norm() / H.norm() < 1e-6);
            CHECK((H - H.transpose()).norm() < 1e-12 * H.norm());
            ++cases;
        }
    }
    CHECK(cases >= 100);
}

TEST_CASE("mirror Hessian matches the one-variable second derivative") {
    const auto m = testutil::mirror();
    const Itinerary it(*m, {0});
    const auto h = hessian(*m, it, vec({0, 1}), Chain::from_points(*m, it, {vec({1, 0})}), vec({2, 1}));
    // f(x) = sqrt(x^2 + 1) + sqrt((2 - x)^2 + 1); f''(1) = 2 / 2^{3/2}.
    CHECK(h.hessian(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(h.betas[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(h.norm_forms[0](0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(h.a_consistency() < 1e-15);
    CHECK(std::abs(h.a_in[0].norm() - 1.0 / std::sqrt(2.0)) < 1e-15);
    const auto P = preconditioned_P(h);
    CHECK(P.P.rows() == 1);
    CHECK(P.P(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("minimizer: mirror, total collision, and the chord through the origin") {
    const auto m = testutil::mirror();
    auto r = minimize(m, Itinerary(*m, {0}), vec({0, 1}), vec({2, 1}));
    CHECK(r.classification == Classification::ValidBilliard);
    CHECK((r.chain.points[0] - vec({1, 0})).norm() < 1e-10);
    CHECK(r.value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));
    REQUIRE(r.hessian_min_eig);
    CHECK(*r.hessian_min_eig > 0.0);

    const auto o = testutil::origin2();
    r = minimize(o, Itinerary(*o, {0}), vec({3, 0}), vec({0, 4}));
    CHECK(r.classification == Classification::ValidBilliard);
    CHECK(r.value == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(r.chain.points[0].norm() == 0.0);

    CHECK_THROWS_AS(minimize(m, Itinerary(*m, {0}), vec({0.5, 0}), vec({2, 1})), PreconditionError);
}

TEST_CASE("collapsing chain between two nearly parallel lines is a ghost") {
    const double th = 0.1;
    const auto arr = std::make_shared<const Arrangement>(
        3, std::vector<Subspace>{Subspace("L1", 3, {vec({1, 0, 0})}), Subspace("L2", 3, {vec({std::cos(th), std::sin(th), 0})})});
    const Itinerary it(*arr, {0, 1});
    const Vector A = vec({0.1, 0.2, 1}), B = vec({-0.1, -0.2, -1});
    const auto r = minimize(arr, it, A, B);
    CHECK(r.classification == Classification::Ghost);
    CHECK(r.value == doctest::Approx((A - B).norm()).epsilon(1e-9));
    // Dense grid over the chain space (one coordinate per line).
    double best = 1e300, bs = 0, bt = 0;
    for (int i = -200; i <= 200; ++i)
        for (int j = -200; j <= 200; ++j) {
            const double s = i * 0.005, t = j * 0.005;
            const double v = action(A, {s * vec({1, 0, 0}), t * vec({std::cos(th), std::sin(th), 0})}, B);
            if (v < best) best = v, bs = s, bt = t;
        }
    CHECK(std::abs(bs) < 1e-12);
    CHECK(std::abs(bt) < 1e-12);
    CHECK(r.value <= best + 1e-12);
    CHECK(r.chain.points[0].norm() < 1e-6);
    CHECK(r.chain.points[1].norm() < 1e-6);
}

TEST_CASE("envelope gradients") {
    const auto m = testutil::mirror();
    const Itinerary it(*m, {0});
    auto r = minimize(m, it, vec({0, 1}), vec({2, 1}));
    auto e = envelope_gradients(r, vec({0, 1}), vec({2, 1}));
    CHECK((e.vA - vec({1, -1}) / std::sqrt(2.0)).norm() < 1e-10);
    CHECK((e.vB - vec({1, 1}) / std::sqrt(2.0)).norm() < 1e-10);

    const auto o = testutil::origin2();
    r = minimize(o, Itinerary(*o, {0}), vec({3, 0}), vec({0, 4}));
    e = envelope_gradients(r, vec({3, 0}), vec({0, 4}));
    CHECK((e.vA - vec({-1, 0})).norm() < 1e-15);
    CHECK((e.vB - vec({0, 1})).norm() < 1e-15);
}

TEST_CASE("finite differences of the optimal value reproduce -vA and vB") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const Itinerary it(*arr, {0, 1, 0});
    const Vector A = vec({3, 1}), B = vec({7.4, 0.5});
    const auto r = minimize(arr, it, A, B);
    REQUIRE(r.classification == Classification::ValidBilliard);
    const auto e = envelope_gradients(r, A, B);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < 2; ++j) {
        Vector d = Vector::Zero(2);
        d(j) = h;
        const double gA = (minimize(arr, it, A + d, B).value - minimize(arr, it, A - d, B).value) / (2 * h);
        const double gB = (minimize(arr, it, A, B + d).value - minimize(arr, it, A, B - d).value) / (2 * h);
        CHECK(std::abs(gA + e.vA(j)) < 1e-6);
        CHECK(std::abs(gB - e.vB(j)) < 1e-6);
    }
}

TEST_CASE("Hessian structure on random valid solutions") {
    std::mt19937_64 rng(99);
    int valid = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = random_instance(rng, 4, 2, 3, 2 + trial % 2);
        MinimizeResult r;
        try {
            r = minimize(inst.arr, inst.it, inst.A, inst.B);
        } catch (const std::exception&) {
            continue;
        }
        if (r.classification != Classification::ValidBilliard) continue;
        ++valid;
        const auto h = hessian(*inst.arr, inst.it, inst.A, r.chain, inst.B);
        CHECK(h.min_eigenvalue() > 0.0);
        CHECK(h.a_consistency() < 1e-7);
        for (double c : h.coupling_norms()) CHECK(c <= 1.0 + 1e-12);
        for (const auto& a : h.a_in) CHECK(a.norm() < 1.0);
        const auto P = preconditioned_P(h);
        CHECK(P.spectral_radius_A < 1.0);
        for (std::size_t i = 0; i < P.a.size(); ++i) CHECK(std::abs(P.a[i] + P.b[i] - 1.0) <= 1e-14);
    }
    CHECK(valid >= 10);
}

TEST_CASE("multistart agrees with the reference minimizer") {
    const auto arr = testutil::lines({0.0, std::numbers::pi / 3});
    const auto rep = multistart(arr, Itinerary(*arr, {0, 1, 0}), vec({3, 1}), vec({7.4, 0.5}), 30, 5);
    CHECK(rep.max_deviation < 1e-7);
    for (const auto& run : rep.runs) CHECK(run.classification == Classification::ValidBilliard);
}

TEST_CASE("chain coordinate round trips") {
    std::mt19937_64 rng(1);
    const auto inst = random_instance(rng, 5, 2, 3, 3);
    const Chain back = Chain::from_flat(*inst.arr, inst.it, inst.chain.flat());
    for (std::size_t i = 0; i < 3; ++i) CHECK((back.points[i] - inst.chain.points[i]).norm() < 1e-14);
    const Chain pts = Chain::from_points(*inst.arr, inst.it, inst.chain.points);
    for (std::size_t i = 0; i < 3; ++i) CHECK((pts.coords[i] - inst.chain.coords[i]).norm() < 1e-14);
    CHECK_THROWS_AS(Chain::from_coords(*inst.arr, inst.it, {}), InputError);
}

TEST_CASE("coincident consecutive vertices are a non-smooth point") {
    const auto arr = testutil::lines({0.0, 1.0});
    const Itinerary it(*arr, {0, 1});
    const Chain c = Chain::from_points(*arr, it, {vec({0, 0}), vec({0, 0})});
    CHECK_THROWS_AS(gradient(*arr, it, vec({1, 2}), c, vec({2, 1})), NonSmoothPoint);
}

}
