#include "linbill/arrangement.hpp"

#include "linbill/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace linbill {

Matrix orthonormalize(const Matrix& raw, double rank_tol) {
    const Eigen::Index n = raw.rows();
    Matrix out(n, 0);
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        Vector v = raw.col(j);
        const double scale = std::max(1.0, v.norm());
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index c = 0; c < out.cols(); ++c) v -= out.col(c).dot(v) * out.col(c);
        }
        const double nv = v.norm();
        if (nv <= rank_tol * scale) continue;
        out.conservativeResize(n, out.cols() + 1);
        out.col(out.cols() - 1) = v / nv;
    }
    return out;
}

Matrix orthogonal_complement(const Matrix& basis, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    if (basis.cols() == 0) return Matrix::Identity(n, n);
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    return q.rightCols(n - basis.cols());
}

Subspace::Subspace(std::string name, Matrix basis, Matrix normal, double sigma)
    : name_(std::move(name)), basis_(std::move(basis)), normal_(std::move(normal)), sigma_(sigma) {}

Subspace::Subspace(std::string name, std::size_t dim, const std::vector<Vector>& rows, double sigma)
    : name_(std::move(name)), sigma_(sigma) {
    if (dim == 0) throw InputError("subspace '" + name_ + "': ambient dimension must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("subspace '" + name_ + "': sigma must be positive");
    Matrix raw(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (static_cast<std::size_t>(rows[j].size()) != dim)
            throw InputError("subspace '" + name_ + "': basis vector has wrong dimension");
        if (!rows[j].allFinite()) throw InputError("subspace '" + name_ + "': non-finite basis vector");
        raw.col(static_cast<Eigen::Index>(j)) = rows[j];
    }
    basis_ = orthonormalize(raw);
    if (basis_.cols() != raw.cols())
        throw InputError("subspace '" + name_ + "': basis vectors are linearly dependent");
    if (rank() >= dim) throw InputError("subspace '" + name_ + "': codimension must be at least 1");
    normal_ = orthogonal_complement(basis_, dim);
}

Subspace Subspace::from_columns(std::string name, const Matrix& columns, double sigma) {
    std::vector<Vector> rows;
    for (Eigen::Index j = 0; j < columns.cols(); ++j) rows.emplace_back(columns.col(j));
    return Subspace(std::move(name), static_cast<std::size_t>(columns.rows()), rows, sigma);
}

Vector Subspace::project(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != ambient_dim()) throw InputError("project: dimension mismatch");
    if (basis_.cols() == 0) return Vector::Zero(x.size());
    return basis_ * (basis_.transpose() * x);
}

Vector Subspace::perp(const Vector& x) const { return x - project(x); }

double Subspace::distance(const Vector& x) const { return perp(x).norm(); }

Vector Subspace::coords(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != ambient_dim()) throw InputError("coords: dimension mismatch");
    return basis_.transpose() * x;
}

Vector Subspace::point(const Vector& c) const {
    if (c.size() != basis_.cols()) throw InputError("point: coordinate dimension mismatch");
    if (basis_.cols() == 0) return Vector::Zero(basis_.rows());
    return basis_ * c;
}

Subspace Subspace::with_sigma(double sigma) const {
    if (!(sigma > 0.0)) throw InputError("sigma must be positive");
    return Subspace(name_, basis_, normal_, sigma);
}

Arrangement::Arrangement(std::size_t dim, std::vector<Subspace> subspaces)
    : dim_(dim), codim_(0), subspaces_(std::move(subspaces)) {
    if (dim_ < 2) throw InputError("arrangement: dimension must be at least 2");
    if (subspaces_.empty()) throw InputError("arrangement: at least one subspace required");
    codim_ = subspaces_.front().codim();
    for (const auto& L : subspaces_) {
        if (L.ambient_dim() != dim_) throw InputError("arrangement: subspace '" + L.name() + "' has wrong ambient dimension");
        if (L.codim() != codim_) throw InputError("arrangement: subspaces must share a common codimension");
    }
    for (std::size_t i = 0; i < subspaces_.size(); ++i) {
        for (std::size_t j = i + 1; j < subspaces_.size(); ++j) {
            if (subspaces_[i].name() == subspaces_[j].name())
                throw InputError("arrangement: duplicate subspace name '" + subspaces_[i].name() + "'");
            const Matrix& bj = subspaces_[j].basis();
            double off = 0.0;
            if (bj.cols() > 0) off = (bj - subspaces_[i].basis() * (subspaces_[i].basis().transpose() * bj)).norm();
            // Equal codimension: containment is equality.
            if (off < kMembershipTol)
                throw InputError("arrangement: subspaces '" + subspaces_[i].name() + "' and '" + subspaces_[j].name() +
                                 "' coincide");
        }
    }
}

std::optional<std::size_t> Arrangement::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < subspaces_.size(); ++i)
        if (subspaces_[i].name() == name) return i;
    return std::nullopt;
}

double Arrangement::distance_to_locus(const Vector& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& L : subspaces_) best = std::min(best, L.distance(x));
    return best;
}

bool Arrangement::pairwise_transverse(double tol) const {
    for (std::size_t i = 0; i < subspaces_.size(); ++i) {
        for (std::size_t j = i + 1; j < subspaces_.size(); ++j) {
            Matrix stacked(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(2 * codim_));
            stacked << subspaces_[i].normal_basis(), subspaces_[j].normal_basis();
            Eigen::JacobiSVD<Matrix> svd(stacked);
            const auto& s = svd.singularValues();
            Eigen::Index rank = 0;
            for (Eigen::Index r = 0; r < s.size(); ++r)
                if (s(r) > tol) ++rank;
            if (static_cast<std::size_t>(rank) != 2 * codim_) return false;
        }
    }
    return true;
}

Arrangement Arrangement::with_sigmas(const std::vector<double>& sigmas) const {
    if (sigmas.size() != subspaces_.size()) throw InputError("with_sigmas: one sigma per subspace required");
    std::vector<Subspace> out;
    for (std::size_t i = 0; i < subspaces_.size(); ++i) out.push_back(subspaces_[i].with_sigma(sigmas[i]));
    return Arrangement(dim_, std::move(out));
}

Itinerary::Itinerary(const Arrangement& arr, std::vector<std::size_t> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw InputError("itinerary: at least one label required");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] >= arr.size()) throw InputError("itinerary: label index out of range");
        if (i > 0 && labels_[i] == labels_[i - 1]) throw InputError("itinerary: consecutive labels must differ");
    }
}

Itinerary Itinerary::from_names(const Arrangement& arr, const std::vector<std::string>& names) {
    std::vector<std::size_t> labels;
    for (const auto& n : names) {
        auto idx = arr.index_of(n);
        if (!idx) throw InputError("itinerary: unknown subspace label '" + n + "'");
        labels.push_back(*idx);
    }
    return Itinerary(arr, std::move(labels));
}

std::vector<std::string> Itinerary::names(const Arrangement& arr) const {
    std::vector<std::string> out;
    for (auto l : labels_) out.push_back(arr[l].name());
    return out;
}

Vector project(const Subspace& L, const Vector& x) { return L.project(x); }

double distance_to(const Subspace& L, const Vector& x) { return L.distance(x); }

std::vector<Collision> segment_collisions(const Arrangement& arr, const Vector& p, const Vector& q, double tol) {
    if (static_cast<std::size_t>(p.size()) != arr.dim() || static_cast<std::size_t>(q.size()) != arr.dim())
        throw InputError("segment_collisions: dimension mismatch");
    if ((q - p).norm() == 0.0) throw InputError("segment_collisions: degenerate segment p = q");
    std::vector<Collision> hits;
    const Vector d = q - p;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const Vector a = arr[i].perp(p);
        const Vector b = arr[i].perp(d);
        const double bb = b.squaredNorm();
        double t = 0.0;
        if (bb > 1e-30) t = std::clamp(-a.dot(b) / bb, 0.0, 1.0);
        if ((a + t * b).norm() <= tol) hits.push_back({i, t});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Collision& x, const Collision& y) { return x.t < y.t; });
    return hits;
}

std::vector<Collision> ray_collisions(const Arrangement& arr, const Vector& p, const Vector& dir, double tol,
                                      double s_min) {
    if (static_cast<std::size_t>(p.size()) != arr.dim() || static_cast<std::size_t>(dir.size()) != arr.dim())
        throw InputError("ray_collisions: dimension mismatch");
    if (dir.norm() == 0.0) throw InputError("ray_collisions: zero direction");
    std::vector<Collision> hits;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const Vector a = arr[i].perp(p);
        const Vector b = arr[i].perp(dir);
        const double bb = b.squaredNorm();
        if (bb <= 1e-30) continue;  // parallel: constant distance, judged at the start point by the caller
        const double s = -a.dot(b) / bb;
        if (s <= s_min) continue;  // distance already increasing: escaped
        if ((a + s * b).norm() <= tol) hits.push_back({i, s});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Collision& x, const Collision& y) { return x.t < y.t; });
    return hits;
}

double principal_angle(const Subspace& L, const Subspace& M) {
    if (L.rank() == 0 || M.rank() == 0)
        throw PreconditionError("principal angle undefined for the zero subspace");
    const Subspace& big = L.rank() >= M.rank() ? L : M;
    const Subspace& small = L.rank() >= M.rank() ? M : L;
    Eigen::JacobiSVD<Matrix> cos_svd(big.basis().transpose() * small.basis());
    const double c = std::min(1.0, cos_svd.singularValues()(0));
    if (c < 0.7) return std::acos(c);
    // Near-aligned: sines of the principal angles are the singular values of the
    // component of `small` orthogonal to `big`; this is accurate for tiny angles.
    const Matrix resid = small.basis() - big.basis() * (big.basis().transpose() * small.basis());
    Eigen::JacobiSVD<Matrix> sin_svd(resid);
    const auto& s = sin_svd.singularValues();
    return std::asin(std::clamp(s(s.size() - 1), 0.0, 1.0));
}

double min_angle(const Arrangement& arr) {
    if (arr.size() < 2) throw PreconditionError("min_angle: needs at least two subspaces");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < arr.size(); ++i) {
        for (std::size_t j = i + 1; j < arr.size(); ++j) {
            const double theta = principal_angle(arr[i], arr[j]);
            if (theta < 1e-9)
                throw PreconditionError("min_angle: subspaces '" + arr[i].name() + "' and '" + arr[j].name() +
                                        "' intersect nontrivially");
            best = std::min(best, theta);
        }
    }
    return best;
}

}  // namespace linbill
