#include "linbill/symmetry.hpp"

#include "linbill/errors.hpp"

#include <algorithm>
#include <cmath>

namespace linbill {

namespace {

constexpr double kSkewTol = 1e-12;
constexpr double kPreserveTol = 1e-10;

}  // namespace

RotationGenerator::RotationGenerator(const Arrangement& arr, Matrix xi) : xi_(std::move(xi)) {
    const auto n = static_cast<Eigen::Index>(arr.dim());
    if (xi_.rows() != n || xi_.cols() != n) throw InputError("rotation generator: wrong matrix size");
    if ((xi_ + xi_.transpose()).norm() >= kSkewTol * std::max(1.0, xi_.norm()))
        throw PreconditionError("rotation generator: matrix is not skew-symmetric");
    if (preservation_defect(arr, xi_) >= kPreserveTol * std::max(1.0, xi_.norm()))
        throw PreconditionError("rotation generator: does not preserve every collision subspace");
}

double RotationGenerator::norm() const { return std::sqrt(0.5) * xi_.norm(); }

double RotationGenerator::preservation_defect(const Arrangement& arr, const Matrix& xi) {
    double worst = 0.0;
    for (const auto& L : arr.subspaces()) {
        if (L.rank() == 0) continue;
        const Matrix image = xi * L.basis();
        worst = std::max(worst, (image - L.basis() * (L.basis().transpose() * image)).norm());
    }
    return worst;
}

Matrix plane_rotation(std::size_t dim, std::size_t i, std::size_t j) {
    if (i >= dim || j >= dim || i == j) throw InputError("plane_rotation: bad axis indices");
    Matrix xi = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    xi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    xi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -1.0;
    return xi;
}

Subspace translation_core(const Arrangement& arr) {
    const auto n = static_cast<Eigen::Index>(arr.dim());
    // x lies in every L iff N_L^T x = 0 for all L: null space of the stacked normals.
    Eigen::Index rows = 0;
    for (const auto& L : arr.subspaces()) rows += L.normal_basis().cols();
    Matrix stacked(rows, n);
    Eigen::Index r = 0;
    for (const auto& L : arr.subspaces()) {
        stacked.middleRows(r, L.normal_basis().cols()) = L.normal_basis().transpose();
        r += L.normal_basis().cols();
    }
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10) ++rank;
    std::vector<Vector> cols;
    for (Eigen::Index c = rank; c < n; ++c) cols.emplace_back(svd.matrixV().col(c));
    if (static_cast<std::size_t>(cols.size()) == arr.dim()) throw PreconditionError("translation_core: core is all of E");
    return Subspace("L_tr", arr.dim(), cols);
}

Vector linear_momentum(const Subspace& core, const Vector& v) { return core.project(v); }

Vector linear_momentum(const Arrangement& arr, const Vector& v) { return translation_core(arr).project(v); }

double angular_momentum(const RotationGenerator& gen, const Vector& x, const Vector& v) {
    if (x.size() != gen.xi().rows() || v.size() != gen.xi().rows()) throw InputError("angular_momentum: dimension mismatch");
    return (gen.xi() * v).dot(x);
}

ConservationReport conservation_report(const BilliardTrajectory& traj, const std::vector<RotationGenerator>& gens) {
    const Subspace core = translation_core(traj.arrangement());
    ConservationReport rep;
    for (std::size_t e = 0; e <= traj.size(); ++e) {
        ConservationRow row;
        row.edge = e;
        row.linear = core.project(traj.edge_direction(e));
        for (const auto& g : gens) row.J.push_back(angular_momentum(g, traj.vertex(e), traj.edge_direction(e)));
        rep.edges.push_back(std::move(row));
    }
    for (std::size_t i = 1; i <= traj.size(); ++i) {
        const Vector& q = traj.vertex(i);
        const Vector& vm = traj.edge_direction(i - 1);
        const Vector& vp = traj.edge_direction(i);
        rep.max_linear_deviation = std::max(rep.max_linear_deviation, (core.project(vp) - core.project(vm)).norm());
        for (const auto& g : gens) {
            const double jump = std::abs(angular_momentum(g, q, vp) - angular_momentum(g, q, vm));
            rep.max_angular_deviation = std::max(rep.max_angular_deviation, jump);
            const double scale = q.norm() * g.norm();
            if (scale > 0.0) rep.max_angular_relative = std::max(rep.max_angular_relative, jump / scale);
        }
    }
    return rep;
}

}  // namespace linbill
