#pragma once
/**
 * @file scattering.hpp
 * @brief Finite samples of the scattering relation and numerical checks of its
 * Lagrangian and Legendrian structure.
 *
 * A patch is a full lattice in E x E centred at (A0, B0): every one of the 2n
 * coordinates takes `points_per_axis` equally spaced values. Tangent vectors
 * at interior nodes come from central differences along the lattice axes.
 */

#include "linbill/generating_family.hpp"

#include <optional>

namespace linbill {

struct RelationSample {
    Vector A;
    Vector B;
    Vector vA;
    Vector vB;
    OrientedLine ell_minus;
    OrientedLine ell_plus;
    Chain chain;
    double value = 0.0;
};

struct PatchGrid {
    Vector A_center;
    Vector B_center;
    double spacing = 1e-3;
    int points_per_axis = 5;
};

struct RelationPatch {
    Itinerary itinerary = Itinerary::free_motion();
    PatchGrid grid;
    /// Lexicographic over (A_1..A_n, B_1..B_n), first coordinate slowest.
    std::vector<std::optional<RelationSample>> cells;
    std::vector<Classification> status;
    std::vector<std::string> failures;  ///< solver error message per cell, empty if none

    std::size_t dim() const { return static_cast<std::size_t>(grid.A_center.size()); }
    std::size_t axes() const { return 2 * dim(); }
    std::size_t size() const { return cells.size(); }
    std::vector<int> index(std::size_t flat) const;
    std::size_t flat(const std::vector<int>& idx) const;
    /// (A, B) at a lattice node.
    std::pair<Vector, Vector> anchors(const std::vector<int>& idx) const;
    std::size_t valid_count() const;
};

/// (v, Q) with v = vA and Q = A - <A, vA> vA. Throws InputError if |vA| != 1.
OrientedLine reduce(const Vector& A, const Vector& vA);

/// Sample from a solved ValidBilliard result (free motion: straight segment).
RelationSample make_sample(const MinimizeResult& r, const Vector& A, const Vector& B);

/// Solves every lattice node; cells that are not ValidBilliard stay empty.
RelationPatch sample_relation(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const PatchGrid& grid,
                              const SolverOptions& opts = {}, unsigned jobs = 1);

/// max |Omega(X, Y)| over interior nodes and lattice-axis tangent pairs, where
/// Omega = omega_B - omega_A and omega((dq, dv), (dq', dv')) = <dq, dv'> - <dq', dv>.
double lagrangian_residual(const RelationPatch& patch);

struct LegendrianReport {
    double residual = 0.0;  ///< max |Q_- . dv_- - Q_+ . dv_+|
    /// Rank of d(v_-, v_+) at the centre node; full rank 2(n-1) means the patch
    /// is transverse to the fibre there. Reported, not assumed.
    int direction_rank = 0;
};

/// Theta = Q_- . dv_- - Q_+ . dv_+ on the lattice-axis tangents of the reduced patch.
/// Requires itinerary length > 1 unless `allow_short` is set.
LegendrianReport legendrian_theta_residual(const RelationPatch& patch, bool allow_short = false);

/// Dilation (A, chain, B) -> lam (A, chain, B): directions unchanged, Q scaled.
RelationSample scale_action(const RelationSample& s, double lam);

}  // namespace linbill
