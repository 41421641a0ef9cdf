#pragma once
/**
 * @file symmetry.hpp
 * @brief Conserved quantities: linear momentum along the translation core
 * L_tr = intersection of all L, and angular momentum J = <x ^ v, xi> for rotation
 * generators xi that preserve every subspace.
 */

#include "linbill/trajectory.hpp"

namespace linbill {

/// A skew-symmetric map xi: E -> E with xi(L) contained in L for every L.
class RotationGenerator {
public:
    /// Validates skew-symmetry and subspace preservation; throws PreconditionError.
    RotationGenerator(const Arrangement& arr, Matrix xi);

    const Matrix& xi() const { return xi_; }
    /// sqrt(1/2) times the Frobenius norm: 1 for a unit rotation in one plane.
    double norm() const;

    /// Largest |(I - P_L) xi B_L| over subspaces; zero for a valid generator.
    static double preservation_defect(const Arrangement& arr, const Matrix& xi);

private:
    Matrix xi_;
};

/// e_i e_j^T - e_j e_i^T, so that J(e_i, e_j) = 1.
Matrix plane_rotation(std::size_t dim, std::size_t i, std::size_t j);

/// Intersection of all subspaces, as a Subspace (possibly {0}; named "L_tr").
Subspace translation_core(const Arrangement& arr);

Vector linear_momentum(const Arrangement& arr, const Vector& v);
Vector linear_momentum(const Subspace& core, const Vector& v);

/// <xi(v), x>.
double angular_momentum(const RotationGenerator& gen, const Vector& x, const Vector& v);

struct ConservationRow {
    std::size_t edge;           ///< 0..k
    Vector linear;              ///< pi_tr of the edge direction
    std::vector<double> J;      ///< per generator; constant along a free edge since xi is skew
};

struct ConservationReport {
    std::vector<ConservationRow> edges;
    double max_linear_deviation = 0.0;   ///< max over collisions |pi_tr(v+) - pi_tr(v-)|
    double max_angular_deviation = 0.0;  ///< max over collisions and generators |J(q, v+) - J(q, v-)|
    /// max over collisions and generators of |J jump| / (|q| |xi|), the scale-free form.
    double max_angular_relative = 0.0;
};

ConservationReport conservation_report(const BilliardTrajectory& traj, const std::vector<RotationGenerator>& gens);

}  // namespace linbill
