#pragma once
/**
 * @file nbody.hpp
 * @brief N point masses in R^d as a linear billiard.
 *
 * Configurations (q_1, ..., q_N) are embedded by x_a = sqrt(m_a) q_a, turning the
 * mass metric into the Euclidean one. Binary collisions are the subspaces
 * Delta_ab = {q_a = q_b}. With centre-of-mass reduction everything is expressed
 * in an orthonormal basis of {sum m_a q_a = 0}.
 */

#include "linbill/symmetry.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <memory>

namespace linbill {

struct NBodySystem {
    std::size_t N = 0;
    std::size_t d = 0;
    std::vector<double> masses;
    bool reduce_cm = false;

    NBodySystem(std::size_t N, std::size_t d, std::vector<double> masses, bool reduce_cm);

    /// Dimension of the billiard space: N d, or (N - 1) d when reduced.
    std::size_t dim() const;
    /// N d x dim(): columns form an orthonormal basis of the embedded configuration space.
    const Matrix& basis() const { return basis_; }

    /// Physical positions or velocities (body-major, length N d) to billiard coordinates.
    Vector embed(const Vector& physical) const;
    /// Inverse of embed (adds back the centre of mass at the origin when reduced).
    Vector unembed(const Vector& x) const;

    /// sqrt((m_a + m_b) / (m_a m_b)).
    double sigma(std::size_t a, std::size_t b) const;
    /// Total momentum sum m_a v_a of physical velocities.
    Vector total_momentum(const Vector& physical_velocity) const;
    /// sum m_a |v_a|^2.
    double mass_norm_sq(const Vector& physical_velocity) const;

private:
    Matrix basis_;
};

/// Delta_ab for a < b, named "D<a+1><b+1>", with sigma = sigma_ab.
Arrangement build_arrangement(const NBodySystem& sys);

/// The same rotation acting on every body (the plane spanned by axes i, j of R^d),
/// in billiard coordinates.
Matrix diagonal_rotation(const NBodySystem& sys, std::size_t i, std::size_t j);

using Complex = std::complex<double>;

struct SlicePoint {
    double phi = 0.0;
    double psi = 0.0;
    /// Bit 0: the first collision leaves velocities unchanged; bit 1: likewise the second.
    int branch = 0;
    std::array<Complex, 3> v_minus{};
    std::array<Complex, 3> v_mid{};
    std::array<Complex, 3> v_plus{};
    std::array<double, 3> arg_plus{};
    double momentum_residual = 0.0;  ///< |sum v_a^+|
    double energy_residual = 0.0;    ///< |sum (1/3)|v_a^+|^2 - 1|
};

struct ScatterSlice {
    std::array<Complex, 3> v_minus{};
    double w_norm = 0.0;  ///< |w| = |v_1^- - v_2^-| / 2
    std::vector<double> phi_grid;
    std::vector<double> psi_grid;
    std::vector<SlicePoint> points;  ///< phi-major

    double max_momentum_residual() const;
    double max_energy_residual() const;
};

/// Three equal masses 1/3 in the plane with incoming velocities 1, e^{2 pi i/3},
/// e^{4 pi i/3} and itinerary (Delta_12, Delta_13).
ScatterSlice three_body_slice(const std::vector<double>& phi_grid, const std::vector<double>& psi_grid);

/// Evaluates one point of the slice.
SlicePoint slice_point(const std::array<Complex, 3>& v_minus, double phi, double psi);

struct CrossValidation {
    int samples = 0;
    int excluded = 0;                  ///< non-transverse or degenerate grid points
    double max_reflection_residual = 0.0;
    double max_chain_deviation = 0.0;  ///< solver chain vs constructed chain
    double max_J_deviation = 0.0;      ///< diagonal rotation, across both collisions
    int solver_valid = 0;              ///< how many solves were classified ValidBilliard
};

/// For sampled grid points, builds an explicit trajectory in reduced coordinates
/// that realizes the slice velocities, checks both reflections, and re-solves
/// its anchors with the generic minimizer.
CrossValidation cross_validate_slice(const ScatterSlice& slice, int sample_budget, std::uint64_t seed);

}  // namespace linbill
