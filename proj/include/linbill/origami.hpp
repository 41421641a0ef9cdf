#pragma once
/**
 * @file origami.hpp
 * @brief Unfolding trajectories around the origin into a plane.
 *
 * The rays 0q_i cut the cone over a trajectory into sectors with angles
 * theta_i = angle(q_i, q_{i+1}). Laid out edge to edge in a plane the path becomes
 * a straight segment, which forces theta_0 + beta + theta_k = pi and bounds the
 * number of collisions by 1 + floor(pi / theta_min).
 */

#include "linbill/generating_family.hpp"

#include <cstdint>
#include <optional>

namespace linbill {

struct Unfolding {
    /// theta_0, theta_1, ..., theta_k; theta_0 = angle(q_1, -v_A), theta_k = angle(q_k, v_B).
    std::vector<double> theta;
    double beta = 0.0;  ///< theta_1 + ... + theta_{k-1}
    /// Planar development A', q_1', ..., q_k', B'.
    std::vector<Eigen::Vector2d> developed;
    int clamped = 0;  ///< arccos arguments clamped by more than 1e-12

    double angle_sum() const;
    /// Largest distance of a developed point from the line A'B', over |A' - B'|.
    double straightness_residual() const;
};

/// Requires every vertex to be nonzero (PreconditionError otherwise).
Unfolding unfold(const BilliardTrajectory& traj);

/// Nonexistence test: true iff beta < pi.
bool check_cor1(const Unfolding& u);

/// 1 + floor(pi / min_angle(arr)).
int itinerary_bound(const Arrangement& arr);

/// | |q_1| sin theta_0 - |q_k| sin theta_k | / max(|q_1|, |q_k|).
double law_of_sines_residual(const BilliardTrajectory& traj);

/// True iff the sum of principal angles between consecutive subspaces is >= pi,
/// in which case every realization would have beta >= pi.
bool angle_filtered(const Arrangement& arr, const Itinerary& it);

enum class Realizability { Realized, NotFound };

struct RealizabilityRow {
    Itinerary itinerary = Itinerary::free_motion();
    Realizability status = Realizability::NotFound;
    bool filtered = false;  ///< skipped by the angle-sum filter
    int samples = 0;
    std::optional<Vector> witness_A;
    std::optional<Vector> witness_B;
    std::vector<Vector> witness_chain;
};

/// Enumerates repeat-free label sequences of length 1..max_len and samples anchors
/// on spheres of radius 1 and 10 until a ValidBilliard appears. The budget is
/// split evenly across the enumerated itineraries. NotFound is inconclusive.
std::vector<RealizabilityRow> search_realizable(std::shared_ptr<const Arrangement> arr, int max_len, int sample_budget,
                                                std::uint64_t seed, unsigned jobs = 1);

/// All repeat-free sequences over arr.size() labels with length in [1, max_len].
std::vector<Itinerary> enumerate_itineraries(const Arrangement& arr, int max_len);

}  // namespace linbill
