#include "linbill/origami.hpp"

#include "linbill/errors.hpp"
#include "linbill/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace linbill {

namespace {

double angle_between(const Vector& a, const Vector& b, int& clamped) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw PreconditionError("angle of a zero vector");
    const double c = a.dot(b) / (na * nb);
    if (std::abs(c) > 1.0 + 1e-12) ++clamped;
    const double cc = std::clamp(c, -1.0, 1.0);
    // acos loses accuracy near +-1; use atan2 of the wedge norm instead.
    const double s = std::sqrt(std::max(0.0, a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2))) / (na * nb);
    return std::abs(cc) > 0.9 ? std::atan2(s, cc) : std::acos(cc);
}

Eigen::Vector2d polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle)}; }

}  // namespace

double Unfolding::angle_sum() const {
    double s = 0.0;
    for (double t : theta) s += t;
    return s;
}

double Unfolding::straightness_residual() const {
    const Eigen::Vector2d a = developed.front();
    const Eigen::Vector2d b = developed.back();
    const Eigen::Vector2d d = b - a;
    const double len = d.norm();
    double worst = 0.0;
    for (const auto& p : developed) {
        const Eigen::Vector2d r = p - a;
        worst = std::max(worst, std::abs(d.x() * r.y() - d.y() * r.x()) / len);
    }
    return worst / len;
}

Unfolding unfold(const BilliardTrajectory& traj) {
    const std::size_t k = traj.size();
    if (k == 0) throw PreconditionError("unfold: trajectory has no collisions");
    for (std::size_t i = 1; i <= k; ++i)
        if (!(traj.vertex(i).norm() > 0.0)) throw PreconditionError("unfold: collision at the origin");
    Unfolding u;
    const Vector& q1 = traj.vertex(1);
    const Vector& qk = traj.vertex(k);
    u.theta.push_back(angle_between(q1, -traj.edge_direction(0), u.clamped));
    for (std::size_t i = 1; i < k; ++i) {
        const double t = angle_between(traj.vertex(i), traj.vertex(i + 1), u.clamped);
        u.theta.push_back(t);
        u.beta += t;
    }
    u.theta.push_back(angle_between(qk, traj.edge_direction(k), u.clamped));

    // Lay the sectors out counter-clockwise starting with ray 0q_1 on the positive x-axis.
    u.developed.push_back(polar(traj.A().norm(), -angle_between(q1, traj.A(), u.clamped)));
    double phi = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
        if (i > 1) phi += u.theta[i - 1];
        u.developed.push_back(polar(traj.vertex(i).norm(), phi));
    }
    u.developed.push_back(polar(traj.B().norm(), phi + angle_between(qk, traj.B(), u.clamped)));
    return u;
}

bool check_cor1(const Unfolding& u) { return u.beta < std::numbers::pi; }

int itinerary_bound(const Arrangement& arr) {
    return 1 + static_cast<int>(std::floor(std::numbers::pi / min_angle(arr) + 1e-9));
}

double law_of_sines_residual(const BilliardTrajectory& traj) {
    const auto u = unfold(traj);
    const double t0 = u.theta.front();
    const double tk = u.theta.back();
    const double eps = 1e-12;
    if (t0 < eps || tk < eps || std::numbers::pi - t0 < eps || std::numbers::pi - tk < eps)
        throw PreconditionError("law_of_sines_residual: degenerate end angle");
    const double a = traj.vertex(1).norm();
    const double b = traj.vertex(traj.size()).norm();
    return std::abs(a * std::sin(t0) - b * std::sin(tk)) / std::max(a, b);
}

bool angle_filtered(const Arrangement& arr, const Itinerary& it) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < it.size(); ++i) {
        try {
            sum += principal_angle(arr[it[i]], arr[it[i + 1]]);
        } catch (const PreconditionError&) {
            return false;  // zero subspace: no angle information
        }
    }
    return sum >= std::numbers::pi - 1e-12;
}

std::vector<Itinerary> enumerate_itineraries(const Arrangement& arr, int max_len) {
    std::vector<Itinerary> out;
    std::vector<std::vector<std::size_t>> layer{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& seq : layer) {
            for (std::size_t l = 0; l < arr.size(); ++l) {
                if (!seq.empty() && seq.back() == l) continue;
                auto s = seq;
                s.push_back(l);
                out.emplace_back(arr, s);
                next.push_back(std::move(s));
            }
        }
        layer = std::move(next);
    }
    return out;
}

std::vector<RealizabilityRow> search_realizable(std::shared_ptr<const Arrangement> arr, int max_len, int sample_budget,
                                                std::uint64_t seed, unsigned jobs) {
    if (!arr) throw InputError("search_realizable: null arrangement");
    if (max_len < 1) throw InputError("search_realizable: max_len must be positive");
    std::optional<int> bound;
    try {
        bound = itinerary_bound(*arr);
    } catch (const PreconditionError&) {
        // Some subspaces meet: there is no angle bound on the depth.
    }
    if (bound && max_len > *bound + 1)
        throw PreconditionError("search_realizable: max_len exceeds the collision bound plus one");
    const auto its = enumerate_itineraries(*arr, max_len);
    std::vector<RealizabilityRow> rows(its.size());
    const int per = its.empty() ? 0 : sample_budget / static_cast<int>(its.size());
    const auto n = static_cast<Eigen::Index>(arr->dim());

    parallel_for(its.size(), jobs, [&](std::size_t j) {
        RealizabilityRow& row = rows[j];
        row.itinerary = its[j];
        if (angle_filtered(*arr, its[j])) {
            row.filtered = true;
            return;
        }
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (j + 1)));
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> unif;
        auto direction = [&](int stratum, int strata) {
            Vector d(n);
            if (n == 2) {
                const double a = 2.0 * std::numbers::pi * (stratum + unif(rng)) / strata;
                d << std::cos(a), std::sin(a);
                return d;
            }
            for (Eigen::Index c = 0; c < n; ++c) d(c) = gauss(rng);
            return Vector(d.normalized());
        };
        for (int s = 0; s < per; ++s) {
            ++row.samples;
            const double ra = (s % 2 == 0) ? 1.0 : 10.0;
            const double rb = ((s / 2) % 2 == 0) ? 1.0 : 10.0;
            const Vector A = ra * direction(s, std::max(per, 1));
            const Vector B = rb * direction(static_cast<int>(unif(rng) * per), std::max(per, 1));
            try {
                const auto r = minimize(arr, its[j], A, B);
                if (r.classification == Classification::ValidBilliard) {
                    row.status = Realizability::Realized;
                    row.witness_A = A;
                    row.witness_B = B;
                    row.witness_chain = r.chain.points;
                    return;
                }
            } catch (const std::exception&) {
                // Anchor on the locus or solver failure: just another unsuccessful sample.
            }
        }
    });
    return rows;
}

}  // namespace linbill
