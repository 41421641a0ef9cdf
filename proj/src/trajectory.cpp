#include "linbill/trajectory.hpp"

#include "linbill/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace linbill {

OrientedLine OrientedLine::through(const Vector& point, const Vector& dir) {
    const double n = dir.norm();
    if (!(n > 0.0)) throw InputError("oriented line: zero direction");
    Vector v = dir / n;
    Vector Q = point - point.dot(v) * v;
    return {std::move(v), std::move(Q)};
}

BilliardTrajectory::BilliardTrajectory(std::shared_ptr<const Arrangement> arr, Itinerary itinerary, Vector A,
                                       std::vector<Vector> chain, Vector B)
    : arr_(std::move(arr)), itinerary_(std::move(itinerary)), A_(std::move(A)), B_(std::move(B)),
      chain_(std::move(chain)) {
    if (!arr_) throw InputError("trajectory: null arrangement");
    if (chain_.size() != itinerary_.size()) throw InputError("trajectory: chain length differs from itinerary length");
    const auto n = static_cast<Eigen::Index>(arr_->dim());
    if (A_.size() != n || B_.size() != n) throw InputError("trajectory: anchor dimension mismatch");
    for (const auto& q : chain_)
        if (q.size() != n) throw InputError("trajectory: vertex dimension mismatch");
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        const Vector& q = chain_[i];
        if ((*arr_)[itinerary_[i]].distance(q) > kMembershipTol * std::max(1.0, q.norm()))
            throw InputError("trajectory: vertex " + std::to_string(i + 1) + " is off its collision subspace");
    }
    const std::size_t k = chain_.size();
    for (std::size_t i = 0; i <= k; ++i) {
        const Vector d = vertex(i + 1) - vertex(i);
        const double r = d.norm();
        if (!(r > 0.0)) throw InputError("trajectory: consecutive vertices coincide");
        edges_.push_back(d / r);
        lengths_.push_back(r);
        total_ += r;
    }
}

const Vector& BilliardTrajectory::vertex(std::size_t i) const {
    if (i == 0) return A_;
    if (i == chain_.size() + 1) return B_;
    return chain_.at(i - 1);
}

ReflectionResidual reflection_residual(const BilliardTrajectory& traj, std::size_t i) {
    if (i < 1 || i > traj.size()) throw InputError("reflection_residual: vertex index out of range");
    const Subspace& L = traj.arrangement()[traj.itinerary()[i - 1]];
    const Vector& vm = traj.edge_direction(i - 1);
    const Vector& vp = traj.edge_direction(i);
    return {std::abs(vm.norm() - vp.norm()), (L.project(vp) - L.project(vm)).norm()};
}

bool is_transverse(const BilliardTrajectory& traj, double tol) {
    for (std::size_t i = 1; i <= traj.size(); ++i)
        if ((traj.edge_direction(i - 1) - traj.edge_direction(i)).norm() <= tol) return false;
    return true;
}

bool is_generic(const Arrangement& arr, const Itinerary& itinerary, const Vector& A, const std::vector<Vector>& chain,
                const Vector& B, double tol) {
    const std::size_t k = chain.size();
    if (k != itinerary.size()) throw InputError("is_generic: chain length differs from itinerary length");
    if (arr.on_locus(A, tol) || arr.on_locus(B, tol)) return false;
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0 && arr[itinerary[i - 1]].contains(chain[i], tol)) return false;
        if (i + 1 < k && arr[itinerary[i + 1]].contains(chain[i], tol)) return false;
    }
    if (k == 0) return segment_collisions(arr, A, B, tol).empty();
    const Vector din = A - chain.front();
    const Vector dout = B - chain.back();
    if (din.norm() == 0.0 || dout.norm() == 0.0) return false;
    if (!ray_collisions(arr, chain.front(), din.normalized(), tol).empty()) return false;
    if (!ray_collisions(arr, chain.back(), dout.normalized(), tol).empty()) return false;
    return true;
}

bool interior_edges_clear(const Arrangement& arr, const std::vector<Vector>& chain, double tol) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const double len = (chain[i + 1] - chain[i]).norm();
        if (len == 0.0) return false;
        const double eps = std::min(0.25, 1e-7 / len + tol / len);
        for (const auto& hit : segment_collisions(arr, chain[i], chain[i + 1], tol))
            if (hit.t > eps && hit.t < 1.0 - eps) return false;
    }
    return true;
}

bool has_edge_in_subspace(const Arrangement& arr, const Itinerary& itinerary, const Vector& A,
                          const std::vector<Vector>& chain, const Vector& B, double tol) {
    const std::size_t k = chain.size();
    auto vert = [&](std::size_t i) -> const Vector& { return i == 0 ? A : (i == k + 1 ? B : chain[i - 1]); };
    for (std::size_t e = 0; e <= k; ++e) {
        const Vector d = vert(e + 1) - vert(e);
        const double r = d.norm();
        if (r == 0.0) continue;
        const Vector n = d / r;
        if (e >= 1 && arr[itinerary[e - 1]].contains(n, tol)) return true;
        if (e < k && arr[itinerary[e]].contains(n, tol)) return true;
    }
    return false;
}

BoundaryLines boundary_lines(const BilliardTrajectory& traj) {
    const std::size_t k = traj.size();
    return {OrientedLine::through(traj.A(), traj.edge_direction(0)),
            OrientedLine::through(traj.B(), traj.edge_direction(k))};
}

}  // namespace linbill
