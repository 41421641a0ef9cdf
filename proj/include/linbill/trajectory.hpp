#pragma once

#include "linbill/arrangement.hpp"

#include <memory>
#include <vector>

namespace linbill {

/// Oriented line in normal form: unit direction v and foot point Q with <Q, v> = 0.
struct OrientedLine {
    Vector v;
    Vector Q;

    /// Line through `point` with direction `dir` (normalized; must be nonzero).
    static OrientedLine through(const Vector& point, const Vector& dir);
};

/// A polygonal path A -> q_1 -> ... -> q_k -> B whose vertices are labelled by an itinerary.
/// Time parameterization is quotiented away: only the anchors and vertices are stored.
class BilliardTrajectory {
public:
    /// Throws InputError on length/dimension mismatch, coincident consecutive vertices,
    /// or a vertex off its subspace (beyond 1e-9 max(1, |q|)).
    BilliardTrajectory(std::shared_ptr<const Arrangement> arr, Itinerary itinerary, Vector A, std::vector<Vector> chain,
                       Vector B);

    const Arrangement& arrangement() const { return *arr_; }
    std::shared_ptr<const Arrangement> arrangement_ptr() const { return arr_; }
    const Itinerary& itinerary() const { return itinerary_; }
    const Vector& A() const { return A_; }
    const Vector& B() const { return B_; }
    const std::vector<Vector>& chain() const { return chain_; }
    std::size_t size() const { return chain_.size(); }

    /// Vertex i of the full path: 0 -> A, 1..k -> chain, k+1 -> B.
    const Vector& vertex(std::size_t i) const;
    /// Unit direction n_{i,i+1} of edge i (i = 0..k).
    const Vector& edge_direction(std::size_t i) const { return edges_.at(i); }
    const std::vector<Vector>& edge_directions() const { return edges_; }
    double edge_length(std::size_t i) const { return lengths_.at(i); }
    double length() const { return total_; }

private:
    std::shared_ptr<const Arrangement> arr_;
    Itinerary itinerary_;
    Vector A_;
    Vector B_;
    std::vector<Vector> chain_;
    std::vector<Vector> edges_;
    std::vector<double> lengths_;
    double total_ = 0.0;
};

struct ReflectionResidual {
    double energy;
    double momentum;
};

/// Residuals of |v-| = |v+| and pi_L(v+) = pi_L(v-) at vertex i (1-based, 1..k),
/// using the labelled subspace only.
ReflectionResidual reflection_residual(const BilliardTrajectory& traj, std::size_t i);

inline constexpr double kTransverseTol = 1e-8;

/// True iff every vertex changes direction: |n_{i-1,i} - n_{i,i+1}| > tol.
bool is_transverse(const BilliardTrajectory& traj, double tol = kTransverseTol);

/// Genericity of (A, chain, B): no vertex on a neighbouring subspace of the itinerary,
/// anchors off the collision locus, and the rays q_1 -> A and q_k -> B meet no
/// subspace beyond their initial points.
bool is_generic(const Arrangement& arr, const Itinerary& itinerary, const Vector& A, const std::vector<Vector>& chain,
                const Vector& B, double tol = kMembershipTol);

/// True iff no edge q_i q_{i+1} (1 <= i < k) comes within tol of a subspace at an interior point.
bool interior_edges_clear(const Arrangement& arr, const std::vector<Vector>& chain, double tol = kMembershipTol);

/// True iff some edge direction lies in the subspace of one of its endpoints.
bool has_edge_in_subspace(const Arrangement& arr, const Itinerary& itinerary, const Vector& A,
                          const std::vector<Vector>& chain, const Vector& B, double tol = kMembershipTol);

struct BoundaryLines {
    OrientedLine minus;
    OrientedLine plus;
};

BoundaryLines boundary_lines(const BilliardTrajectory& traj);

}  // namespace linbill
