#pragma once
/**
 * @file generating_family.hpp
 * @brief Path-length action over the chain space L_1 x ... x L_k and its minimizer.
 *
 * For anchors A, B and a chain (q_1, ..., q_k) with q_i in L_i the action is the
 * polygonal length S = |A - q_1| + sum |q_i - q_{i+1}| + |q_k - B|. Its critical
 * points at generic configurations are exactly the billiard segments realizing the
 * itinerary, and the endpoint gradients give the incoming and outgoing directions.
 *
 * The minimizer works in intrinsic chain coordinates c_i (q_i = B_i c_i), so the
 * constraint q_i in L_i holds exactly. It runs damped Newton with the analytic
 * block Hessian and falls back to exact block-coordinate minimization (each block
 * is a closed-form two-leg reflection problem) near coincident vertices, where S
 * is not differentiable.
 */

#include "linbill/arrangement.hpp"
#include "linbill/trajectory.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace linbill {

/// A point of L_1 x ... x L_k in intrinsic coordinates, with cached ambient points.
struct Chain {
    std::vector<Vector> coords;
    std::vector<Vector> points;

    static Chain from_coords(const Arrangement& arr, const Itinerary& it, std::vector<Vector> coords);
    /// Orthogonally projects each point onto its subspace.
    static Chain from_points(const Arrangement& arr, const Itinerary& it, const std::vector<Vector>& points);
    /// q_i = pi_{L_i}((1 - s_i) A + s_i B), s_i = i / (k + 1).
    static Chain chord_projection(const Arrangement& arr, const Itinerary& it, const Vector& A, const Vector& B);

    Vector flat() const;
    static Chain from_flat(const Arrangement& arr, const Itinerary& it, const Vector& flat);
    std::size_t size() const { return points.size(); }
};

/// S(A, chain, B); defined everywhere, smooth away from coincident vertices.
double action(const Vector& A, const std::vector<Vector>& chain, const Vector& B);

/// Per-block covectors B_i^T (n_{i-1,i} - n_{i,i+1}). Throws NonSmoothPoint at coincidences.
std::vector<Vector> gradient(const Arrangement& arr, const Itinerary& it, const Vector& A, const Chain& chain,
                             const Vector& B);

/// Second variation of S with fixed endpoints, in chain coordinates.
struct HessianModel {
    std::vector<double> betas;             ///< 1/r_{i-1,i} + 1/r_{i,i+1}
    std::vector<double> edge_lengths;      ///< r_{i,i+1}, i = 0..k
    std::vector<Vector> unit_edges;        ///< n_{i,i+1}, i = 0..k
    std::vector<Vector> a_in;              ///< pi_i(n_{i-1,i}), ambient
    std::vector<Vector> a_out;             ///< pi_i(n_{i,i+1}), ambient
    std::vector<Matrix> norm_forms;        ///< Gram matrix of ||.||_i in L_i coordinates
    std::vector<Matrix> coupling_up;       ///< S_{i,i+1}: L_{i+1} -> L_i
    std::vector<Matrix> coupling_down;     ///< S_{i+1,i}: L_i -> L_{i+1}
    std::vector<Eigen::Index> offsets;     ///< block offsets into the flat coordinate vector
    Matrix hessian;                        ///< d^2 S in chain coordinates (Euclidean)
    Matrix M;                              ///< G^{-1} hessian: d^2 S(x, y) = <x, M y>_*

    Eigen::Index block_size(std::size_t i) const;
    /// max_i |a_in_i - a_out_i|; zero at critical points.
    double a_consistency() const;
    /// Operator norms of S_{i,i+1} and S_{i+1,i} in the ||.||_i / ||.||_j norms.
    std::vector<double> coupling_norms() const;
    /// Smallest eigenvalue of M (= of the pencil (hessian, G)); +inf when there are no free coordinates.
    double min_eigenvalue() const;
};

HessianModel hessian(const Arrangement& arr, const Itinerary& it, const Vector& A, const Chain& chain, const Vector& B);

struct PreconditionedP {
    Matrix P;                ///< D M with D = blockdiag(1/beta_i)
    Matrix A;                ///< I - P
    std::vector<double> a;   ///< r_{i,i+1} / (r_{i,i-1} + r_{i,i+1})
    std::vector<double> b;   ///< r_{i,i-1} / (r_{i,i-1} + r_{i,i+1})
    double spectral_radius_A = 0.0;
};

PreconditionedP preconditioned_P(const HessianModel& h);

enum class Classification { ValidBilliard, Ghost, EdgeInSubspace, NonGenericRay };

std::string to_string(Classification c);

struct SolverOptions {
    int max_iters = 500;
    double grad_tol = 1e-10;         ///< relative to max(1, S)
    double step_tol = 1e-12;
    double coincidence_tol = 1e-9;   ///< relative to |A - B|
    double switch_tol = 1e-6;        ///< relative to |A - B|; triggers the non-smooth fallback
    double armijo = 1e-4;
    double step_floor = 1e-12;
    double generic_tol = kMembershipTol;
    int n_multistart = 0;
    std::uint64_t seed = 0;
};

struct MinimizeResult {
    Chain chain;
    double value = 0.0;
    double grad_norm = 0.0;
    Classification classification = Classification::ValidBilliard;
    std::optional<BilliardTrajectory> trajectory;
    std::optional<double> hessian_min_eig;
    int iterations = 0;
    bool used_fallback = false;
};

/// Unique global minimizer of S_{A,B} over the chain space. A and B must lie off
/// the collision locus (PreconditionError). Throws MaxIterations on failure.
MinimizeResult minimize(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const Vector& A, const Vector& B,
                        const SolverOptions& opts = {}, const std::optional<Chain>& start = std::nullopt);

struct MultistartReport {
    MinimizeResult reference;
    std::vector<MinimizeResult> runs;
    double max_deviation = 0.0;  ///< max over runs of max_i |q_i - q_i^ref|
};

/// Re-solves from `n` random chains whose coordinates lie in a ball of radius 10|A - B|.
MultistartReport multistart(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const Vector& A,
                            const Vector& B, int n, std::uint64_t seed, const SolverOptions& opts = {});

struct EnvelopeGradients {
    Vector vA;
    Vector vB;
};

/// vA = -grad_A S, vB = +grad_B S at the solved chain.
EnvelopeGradients envelope_gradients(const MinimizeResult& result, const Vector& A, const Vector& B);

}  // namespace linbill
