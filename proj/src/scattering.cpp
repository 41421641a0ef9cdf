#include "linbill/scattering.hpp"

#include "linbill/errors.hpp"
#include "linbill/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace linbill {

std::vector<int> RelationPatch::index(std::size_t flat_idx) const {
    const int m = grid.points_per_axis;
    std::vector<int> idx(axes());
    for (std::size_t a = axes(); a-- > 0;) {
        idx[a] = static_cast<int>(flat_idx % static_cast<std::size_t>(m));
        flat_idx /= static_cast<std::size_t>(m);
    }
    return idx;
}

std::size_t RelationPatch::flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int i : idx) f = f * static_cast<std::size_t>(grid.points_per_axis) + static_cast<std::size_t>(i);
    return f;
}

std::pair<Vector, Vector> RelationPatch::anchors(const std::vector<int>& idx) const {
    const auto n = static_cast<Eigen::Index>(dim());
    const double mid = 0.5 * (grid.points_per_axis - 1);
    Vector A = grid.A_center;
    Vector B = grid.B_center;
    for (Eigen::Index j = 0; j < n; ++j) {
        A(j) += (idx[static_cast<std::size_t>(j)] - mid) * grid.spacing;
        B(j) += (idx[static_cast<std::size_t>(j + n)] - mid) * grid.spacing;
    }
    return {A, B};
}

std::size_t RelationPatch::valid_count() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
}

OrientedLine reduce(const Vector& A, const Vector& vA) {
    if (A.size() != vA.size()) throw InputError("reduce: dimension mismatch");
    if (std::abs(vA.norm() - 1.0) > 1e-10) throw InputError("reduce: direction must be a unit vector");
    return {vA, A - A.dot(vA) * vA};
}

RelationSample make_sample(const MinimizeResult& r, const Vector& A, const Vector& B) {
    if (r.classification != Classification::ValidBilliard)
        throw PreconditionError("make_sample: result is not a valid billiard");
    const auto env = envelope_gradients(r, A, B);
    RelationSample s;
    s.A = A;
    s.B = B;
    s.vA = env.vA;
    s.vB = env.vB;
    s.ell_minus = reduce(A, env.vA);
    s.ell_plus = reduce(B, env.vB);
    s.chain = r.chain;
    s.value = r.value;
    return s;
}

RelationPatch sample_relation(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const PatchGrid& grid,
                              const SolverOptions& opts, unsigned jobs) {
    if (!arr) throw InputError("sample_relation: null arrangement");
    const auto n = static_cast<Eigen::Index>(arr->dim());
    if (grid.A_center.size() != n || grid.B_center.size() != n) throw InputError("sample_relation: anchor dimension mismatch");
    if (grid.points_per_axis < 1 || !(grid.spacing > 0.0)) throw InputError("sample_relation: degenerate grid");

    RelationPatch patch;
    patch.itinerary = it;
    patch.grid = grid;
    std::size_t total = 1;
    for (std::size_t a = 0; a < patch.axes(); ++a) total *= static_cast<std::size_t>(grid.points_per_axis);
    patch.cells.resize(total);
    patch.status.resize(total, Classification::Ghost);
    patch.failures.resize(total);

    parallel_for(total, jobs, [&](std::size_t f) {
        const auto [A, B] = patch.anchors(patch.index(f));
        try {
            const auto r = minimize(arr, it, A, B, opts);
            patch.status[f] = r.classification;
            if (r.classification == Classification::ValidBilliard) patch.cells[f] = make_sample(r, A, B);
        } catch (const std::exception& e) {
            patch.failures[f] = e.what();
        }
    });
    return patch;
}

namespace {

struct Tangent {
    Vector dA, dvA, dB, dvB;
};

/// Central-difference tangents along every lattice axis at node `idx`, or empty
/// if some neighbour is missing.
std::optional<std::vector<Tangent>> tangents_at(const RelationPatch& p, const std::vector<int>& idx) {
    const double h = p.grid.spacing;
    std::vector<Tangent> out;
    for (std::size_t a = 0; a < p.axes(); ++a) {
        auto up = idx;
        auto dn = idx;
        ++up[a];
        --dn[a];
        if (dn[a] < 0 || up[a] >= p.grid.points_per_axis) return std::nullopt;
        const auto& su = p.cells[p.flat(up)];
        const auto& sd = p.cells[p.flat(dn)];
        if (!su || !sd) return std::nullopt;
        Tangent t;
        t.dA = (su->A - sd->A) / (2 * h);
        t.dB = (su->B - sd->B) / (2 * h);
        t.dvA = (su->vA - sd->vA) / (2 * h);
        t.dvB = (su->vB - sd->vB) / (2 * h);
        out.push_back(std::move(t));
    }
    return out;
}

double omega(const Vector& dq, const Vector& dv, const Vector& dq2, const Vector& dv2) {
    return dq.dot(dv2) - dq2.dot(dv);
}

}  // namespace

double lagrangian_residual(const RelationPatch& patch) {
    if (patch.grid.points_per_axis < 3) throw InputError("lagrangian_residual: need at least 3 points per axis");
    double worst = 0.0;
    bool any = false;
    for (std::size_t f = 0; f < patch.size(); ++f) {
        if (!patch.cells[f]) continue;
        const auto T = tangents_at(patch, patch.index(f));
        if (!T) continue;
        any = true;
        for (std::size_t i = 0; i < T->size(); ++i) {
            for (std::size_t j = i + 1; j < T->size(); ++j) {
                const Tangent& X = (*T)[i];
                const Tangent& Y = (*T)[j];
                const double w = omega(X.dB, X.dvB, Y.dB, Y.dvB) - omega(X.dA, X.dvA, Y.dA, Y.dvA);
                worst = std::max(worst, std::abs(w));
            }
        }
    }
    if (!any) throw InputError("lagrangian_residual: no interior node with a complete stencil");
    return worst;
}

LegendrianReport legendrian_theta_residual(const RelationPatch& patch, bool allow_short) {
    if (patch.itinerary.size() <= 1 && !allow_short)
        throw PreconditionError("legendrian_theta_residual: itinerary length must exceed 1");
    if (patch.grid.points_per_axis < 3) throw InputError("legendrian_theta_residual: need at least 3 points per axis");
    LegendrianReport rep;
    bool any = false;
    for (std::size_t f = 0; f < patch.size(); ++f) {
        if (!patch.cells[f]) continue;
        const auto T = tangents_at(patch, patch.index(f));
        if (!T) continue;
        any = true;
        const RelationSample& s = *patch.cells[f];
        for (const Tangent& X : *T) {
            const double theta = s.ell_minus.Q.dot(X.dvA) - s.ell_plus.Q.dot(X.dvB);
            rep.residual = std::max(rep.residual, std::abs(theta));
        }
    }
    if (!any) throw InputError("legendrian_theta_residual: no interior node with a complete stencil");

    std::vector<int> centre(patch.axes(), (patch.grid.points_per_axis - 1) / 2);
    if (const auto T = tangents_at(patch, centre)) {
        const auto n = static_cast<Eigen::Index>(patch.dim());
        Matrix J(2 * n, static_cast<Eigen::Index>(T->size()));
        for (std::size_t a = 0; a < T->size(); ++a) {
            J.col(static_cast<Eigen::Index>(a)) << (*T)[a].dvA, (*T)[a].dvB;
        }
        Eigen::JacobiSVD<Matrix> svd(J);
        const auto& sv = svd.singularValues();
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-6 * std::max(1.0, sv(0))) ++rep.direction_rank;
    }
    return rep;
}

RelationSample scale_action(const RelationSample& s, double lam) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw InputError("scale_action: factor must be positive");
    RelationSample out = s;
    out.A *= lam;
    out.B *= lam;
    for (auto& c : out.chain.coords) c *= lam;
    for (auto& q : out.chain.points) q *= lam;
    out.ell_minus.Q *= lam;
    out.ell_plus.Q *= lam;
    out.value *= lam;
    return out;
}

}  // namespace linbill
