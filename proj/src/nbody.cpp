#include "linbill/nbody.hpp"

#include "linbill/errors.hpp"
#include "linbill/generating_family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace linbill {

NBodySystem::NBodySystem(std::size_t n_bodies, std::size_t dim_d, std::vector<double> m, bool reduce)
    : N(n_bodies), d(dim_d), masses(std::move(m)), reduce_cm(reduce) {
    if (N < 2) throw InputError("nbody: need at least two bodies");
    if (d < 1) throw InputError("nbody: spatial dimension must be positive");
    if (masses.size() != N) throw InputError("nbody: one mass per body required");
    for (double mass : masses)
        if (!(mass > 0.0) || !std::isfinite(mass)) throw InputError("nbody: masses must be positive");
    const auto full = static_cast<Eigen::Index>(N * d);
    if (!reduce_cm) {
        basis_ = Matrix::Identity(full, full);
        return;
    }
    double total = 0.0;
    for (double mass : masses) total += mass;
    // Centre-of-mass directions u (x) e_j with u_a = sqrt(m_a / M).
    Matrix cm(full, static_cast<Eigen::Index>(d));
    cm.setZero();
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t j = 0; j < d; ++j)
            cm(static_cast<Eigen::Index>(a * d + j), static_cast<Eigen::Index>(j)) = std::sqrt(masses[a] / total);
    basis_ = orthogonal_complement(cm, N * d);
}

std::size_t NBodySystem::dim() const { return static_cast<std::size_t>(basis_.cols()); }

Vector NBodySystem::embed(const Vector& physical) const {
    if (static_cast<std::size_t>(physical.size()) != N * d) throw InputError("nbody embed: wrong vector length");
    Vector y(physical.size());
    for (std::size_t a = 0; a < N; ++a)
        y.segment(static_cast<Eigen::Index>(a * d), static_cast<Eigen::Index>(d)) =
            std::sqrt(masses[a]) * physical.segment(static_cast<Eigen::Index>(a * d), static_cast<Eigen::Index>(d));
    return basis_.transpose() * y;
}

Vector NBodySystem::unembed(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) throw InputError("nbody unembed: wrong vector length");
    Vector y = basis_ * x;
    for (std::size_t a = 0; a < N; ++a)
        y.segment(static_cast<Eigen::Index>(a * d), static_cast<Eigen::Index>(d)) /= std::sqrt(masses[a]);
    return y;
}

double NBodySystem::sigma(std::size_t a, std::size_t b) const {
    return std::sqrt((masses.at(a) + masses.at(b)) / (masses.at(a) * masses.at(b)));
}

Vector NBodySystem::total_momentum(const Vector& v) const {
    Vector p = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < N; ++a)
        p += masses[a] * v.segment(static_cast<Eigen::Index>(a * d), static_cast<Eigen::Index>(d));
    return p;
}

double NBodySystem::mass_norm_sq(const Vector& v) const {
    double s = 0.0;
    for (std::size_t a = 0; a < N; ++a)
        s += masses[a] * v.segment(static_cast<Eigen::Index>(a * d), static_cast<Eigen::Index>(d)).squaredNorm();
    return s;
}

Arrangement build_arrangement(const NBodySystem& sys) {
    const auto full = static_cast<Eigen::Index>(sys.N * sys.d);
    const auto dd = static_cast<Eigen::Index>(sys.d);
    std::vector<Subspace> subs;
    for (std::size_t a = 0; a < sys.N; ++a) {
        for (std::size_t b = a + 1; b < sys.N; ++b) {
            const double s = sys.sigma(a, b);
            Matrix normals = Matrix::Zero(full, dd);
            for (Eigen::Index j = 0; j < dd; ++j) {
                normals(static_cast<Eigen::Index>(a) * dd + j, j) = 1.0 / (std::sqrt(sys.masses[a]) * s);
                normals(static_cast<Eigen::Index>(b) * dd + j, j) = -1.0 / (std::sqrt(sys.masses[b]) * s);
            }
            const Matrix reduced = orthonormalize(sys.basis().transpose() * normals);
            const Matrix span = orthogonal_complement(reduced, sys.dim());
            subs.push_back(
                Subspace::from_columns("D" + std::to_string(a + 1) + std::to_string(b + 1), span, s));
        }
    }
    return Arrangement(sys.dim(), std::move(subs));
}

Matrix diagonal_rotation(const NBodySystem& sys, std::size_t i, std::size_t j) {
    const Matrix R = plane_rotation(sys.d, i, j);
    const auto full = static_cast<Eigen::Index>(sys.N * sys.d);
    const auto dd = static_cast<Eigen::Index>(sys.d);
    Matrix xi = Matrix::Zero(full, full);
    for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(sys.N); ++a) xi.block(a * dd, a * dd, dd, dd) = R;
    return sys.basis().transpose() * xi * sys.basis();
}

namespace {

constexpr double kStraightTol = 1e-8;

}  // namespace

SlicePoint slice_point(const std::array<Complex, 3>& vm, double phi, double psi) {
    SlicePoint p;
    p.phi = phi;
    p.psi = psi;
    p.v_minus = vm;
    // First collision, bodies 1 and 2: the pair sum is kept, the relative velocity rotates.
    const Complex w = 0.5 * std::abs(vm[0] - vm[1]) * std::polar(1.0, phi);
    p.v_mid = {0.5 * (vm[0] + vm[1]) + w, 0.5 * (vm[0] + vm[1]) - w, vm[2]};
    // Second collision, bodies 1 and 3.
    const auto& mid = p.v_mid;
    const Complex u = 0.5 * std::abs(mid[2] - mid[0]) * std::polar(1.0, psi);
    p.v_plus = {0.5 * (mid[0] + mid[2]) + u, mid[1], 0.5 * (mid[0] + mid[2]) - u};
    if (std::abs(p.v_mid[0] - vm[0]) < kStraightTol) p.branch |= 1;
    if (std::abs(p.v_plus[0] - mid[0]) < kStraightTol) p.branch |= 2;
    Complex total = 0.0;
    double energy = 0.0;
    for (int a = 0; a < 3; ++a) {
        total += p.v_plus[static_cast<std::size_t>(a)];
        energy += std::norm(p.v_plus[static_cast<std::size_t>(a)]) / 3.0;
        p.arg_plus[static_cast<std::size_t>(a)] = std::arg(p.v_plus[static_cast<std::size_t>(a)]);
    }
    p.momentum_residual = std::abs(total);
    p.energy_residual = std::abs(energy - 1.0);
    return p;
}

double ScatterSlice::max_momentum_residual() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.momentum_residual);
    return m;
}

double ScatterSlice::max_energy_residual() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.energy_residual);
    return m;
}

ScatterSlice three_body_slice(const std::vector<double>& phi_grid, const std::vector<double>& psi_grid) {
    if (phi_grid.empty() || psi_grid.empty()) throw InputError("three_body_slice: empty grid");
    ScatterSlice s;
    s.v_minus = {Complex(1.0, 0.0), std::polar(1.0, 2.0 * std::numbers::pi / 3.0),
                 std::polar(1.0, 4.0 * std::numbers::pi / 3.0)};
    s.w_norm = 0.5 * std::abs(s.v_minus[0] - s.v_minus[1]);
    s.phi_grid = phi_grid;
    s.psi_grid = psi_grid;
    for (double phi : phi_grid)
        for (double psi : psi_grid) s.points.push_back(slice_point(s.v_minus, phi, psi));
    return s;
}

namespace {

Vector to_physical(const std::array<Complex, 3>& v) {
    Vector out(6);
    for (int a = 0; a < 3; ++a) {
        out(2 * a) = v[static_cast<std::size_t>(a)].real();
        out(2 * a + 1) = v[static_cast<std::size_t>(a)].imag();
    }
    return out;
}

}  // namespace

CrossValidation cross_validate_slice(const ScatterSlice& slice, int sample_budget, std::uint64_t seed) {
    const NBodySystem sys(3, 2, {1.0 / 3, 1.0 / 3, 1.0 / 3}, true);
    const auto arr = std::make_shared<const Arrangement>(build_arrangement(sys));
    const Itinerary it = Itinerary::from_names(*arr, {"D12", "D13"});
    const RotationGenerator gen(*arr, diagonal_rotation(sys, 0, 1));

    CrossValidation cv;
    if (slice.points.empty()) return cv;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, slice.points.size() - 1);
    for (int s = 0; s < sample_budget; ++s) {
        const SlicePoint& pt = slice.points[pick(rng)];
        const Complex gap = pt.v_mid[2] - pt.v_mid[0];
        if (pt.branch != 0 || std::abs(gap) < 1e-9) {
            ++cv.excluded;
            continue;
        }
        // Bodies 1 and 2 meet at p, body 3 waits at -2p (centre of mass at 0); one time
        // unit later bodies 1 and 3 meet because 3p = v_3^m - v_1^m.
        const Complex p = gap / 3.0;
        const Vector Q1 = to_physical({p, p, -2.0 * p});
        const Vector Vm = to_physical(pt.v_minus);
        const Vector Vmid = to_physical(pt.v_mid);
        const Vector Vp = to_physical(pt.v_plus);
        const Vector Q2 = Q1 + Vmid;
        const Vector A = sys.embed(Q1 - Vm);
        const Vector B = sys.embed(Q2 + Vp);
        const std::vector<Vector> chain{sys.embed(Q1), sys.embed(Q2)};
        try {
            const BilliardTrajectory traj(arr, it, A, chain, B);
            for (std::size_t i = 1; i <= 2; ++i) {
                const auto res = reflection_residual(traj, i);
                cv.max_reflection_residual = std::max({cv.max_reflection_residual, res.energy, res.momentum});
            }
            cv.max_J_deviation = std::max(cv.max_J_deviation, conservation_report(traj, {gen}).max_angular_deviation);
            const auto sol = minimize(arr, it, A, B);
            if (sol.classification == Classification::ValidBilliard) ++cv.solver_valid;
            for (std::size_t i = 0; i < 2; ++i)
                cv.max_chain_deviation = std::max(cv.max_chain_deviation, (sol.chain.points[i] - chain[i]).norm());
            ++cv.samples;
        } catch (const PreconditionError&) {
            ++cv.excluded;  // an anchor landed on the collision locus
        }
    }
    return cv;
}

}  // namespace linbill
