#pragma once
/**
 * @file arrangement.hpp
 * @brief Euclidean space with a finite collection of linear collision subspaces.
 *
 * A subspace L is stored through an orthonormal basis B (columns), so the
 * orthogonal projection is applied as B(B^T x) and never materialized as a
 * dim x dim matrix. The zero subspace is an empty basis and is fully supported.
 *
 * All types are immutable after construction and safe to share across threads.
 */

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace linbill {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute membership tolerance on unit-scale data.
inline constexpr double kMembershipTol = 1e-9;

/// Orthonormal basis (columns) of the span of `raw` columns. Columns whose
/// residual after two Gram-Schmidt passes is below `rank_tol` are dropped.
Matrix orthonormalize(const Matrix& raw, double rank_tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of span(basis) in R^dim.
Matrix orthogonal_complement(const Matrix& basis, std::size_t dim);

class Subspace {
public:
    /// `rows` are raw spanning vectors of length `dim`; they are orthonormalized
    /// and must be linearly independent.
    Subspace(std::string name, std::size_t dim, const std::vector<Vector>& rows, double sigma = 1.0);

    /// Builds directly from a matrix whose columns span the subspace.
    static Subspace from_columns(std::string name, const Matrix& columns, double sigma = 1.0);

    const std::string& name() const { return name_; }
    std::size_t ambient_dim() const { return static_cast<std::size_t>(basis_.rows()); }
    std::size_t rank() const { return static_cast<std::size_t>(basis_.cols()); }
    std::size_t codim() const { return ambient_dim() - rank(); }
    double sigma() const { return sigma_; }

    /// dim x rank, orthonormal columns.
    const Matrix& basis() const { return basis_; }
    /// dim x codim, orthonormal columns spanning the orthogonal complement.
    const Matrix& normal_basis() const { return normal_; }

    Vector project(const Vector& x) const;
    /// x - project(x).
    Vector perp(const Vector& x) const;
    double distance(const Vector& x) const;
    bool contains(const Vector& x, double tol = kMembershipTol) const { return distance(x) <= tol; }

    /// Coordinates of project(x) in the basis.
    Vector coords(const Vector& x) const;
    Vector point(const Vector& coords) const;

    Subspace with_sigma(double sigma) const;

private:
    Subspace(std::string name, Matrix basis, Matrix normal, double sigma);

    std::string name_;
    Matrix basis_;
    Matrix normal_;
    double sigma_;
};

class Arrangement {
public:
    /// Validates dim >= 2, equal codimension, pairwise distinct subspaces.
    Arrangement(std::size_t dim, std::vector<Subspace> subspaces);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return subspaces_.size(); }
    std::size_t common_codim() const { return codim_; }
    const Subspace& operator[](std::size_t i) const { return subspaces_.at(i); }
    const std::vector<Subspace>& subspaces() const { return subspaces_; }

    std::optional<std::size_t> index_of(const std::string& name) const;

    /// Distance from x to the collision locus (union of subspaces).
    double distance_to_locus(const Vector& x) const;
    bool on_locus(const Vector& x, double tol = kMembershipTol) const { return distance_to_locus(x) <= tol; }

    /// codim(L cap M) = 2 codim for every distinct pair. Informational only.
    bool pairwise_transverse(double tol = 1e-10) const;

    /// Same subspaces with every sigma replaced.
    Arrangement with_sigmas(const std::vector<double>& sigmas) const;

private:
    std::size_t dim_;
    std::size_t codim_;
    std::vector<Subspace> subspaces_;
};

/// Ordered subspace labels. Consecutive repeats are rejected. An empty
/// itinerary stands for free motion and is only produced by `free_motion()`.
class Itinerary {
public:
    Itinerary(const Arrangement& arr, std::vector<std::size_t> labels);
    static Itinerary from_names(const Arrangement& arr, const std::vector<std::string>& names);
    static Itinerary free_motion() { return Itinerary(); }

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    std::size_t operator[](std::size_t i) const { return labels_.at(i); }
    const std::vector<std::size_t>& labels() const { return labels_; }
    std::vector<std::string> names(const Arrangement& arr) const;

    bool operator==(const Itinerary&) const = default;

private:
    Itinerary() = default;
    std::vector<std::size_t> labels_;
};

struct Collision {
    std::size_t subspace;
    double t;
};

Vector project(const Subspace& L, const Vector& x);
double distance_to(const Subspace& L, const Vector& x);

/// Parameters t in [0,1] at which p + t(q-p) comes within `tol` of a subspace,
/// one entry per subspace (the parameter of closest approach), sorted by t.
std::vector<Collision> segment_collisions(const Arrangement& arr, const Vector& p, const Vector& q,
                                          double tol = kMembershipTol);

/// Same test along the ray p + s*dir, s > s_min. Uses the closed-form escape
/// test: the squared distance to L is a convex quadratic in s, so once it is
/// increasing past s_min no further approach is possible.
std::vector<Collision> ray_collisions(const Arrangement& arr, const Vector& p, const Vector& dir,
                                      double tol = kMembershipTol, double s_min = 1e-9);

/// Smallest principal angle between L and M, in [0, pi/2].
double principal_angle(const Subspace& L, const Subspace& M);

/// Minimum over pairs of the smallest principal angle. Throws PreconditionError
/// when some pair meets in a nonzero vector (or is the zero subspace).
double min_angle(const Arrangement& arr);

}  // namespace linbill
