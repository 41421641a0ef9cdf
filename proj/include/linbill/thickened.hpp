#pragma once
/**
 * @file thickened.hpp
 * @brief The r-thickened deterministic billiard: each L is replaced by the solid
 * cylinder d(q, L) <= rho_L = sigma_L r, and the table is the closure of the
 * complement of their interiors.
 *
 * Contents: exact event-driven simulation, minimization of the path length over
 * the product of solid cylinders with honest/ghost classification, the
 * curve-shortening replacement, and r-families converging to a point billiard.
 */

#include "linbill/generating_family.hpp"

#include <limits>
#include <optional>
#include <string>

namespace linbill {

class ThickenedTable {
public:
    ThickenedTable(std::shared_ptr<const Arrangement> arr, double r);

    const Arrangement& arrangement() const { return *arr_; }
    std::shared_ptr<const Arrangement> arrangement_ptr() const { return arr_; }
    double r() const { return r_; }
    /// rho_L = sigma_L r.
    double radius(std::size_t i) const { return (*arr_)[i].sigma() * r_; }
    /// True iff x is strictly inside some open cylinder (beyond a 1e-10 margin).
    bool strictly_inside(const Vector& x) const;

private:
    std::shared_ptr<const Arrangement> arr_;
    double r_;
};

struct Hit {
    double t;
    std::size_t label;
    Vector point;   ///< snapped onto the cylinder
    Vector normal;  ///< outward unit normal, in L^perp
};

/// Smallest positive entering root over all cylinders, or none if the ray escapes.
/// Grazing contacts are misses. Throws PreconditionError if p is strictly inside a
/// cylinder and CornerCollision if the hit point touches a second cylinder.
std::optional<Hit> first_hit(const ThickenedTable& table, const Vector& p, const Vector& v);

struct ThickenedEvent {
    double time;
    std::size_t label;
    Vector point;
    Vector v_in;
    Vector v_out;
};

enum class PathEnd { Escaped, TimeLimit, EventLimit, Corner };

std::string to_string(PathEnd e);

struct ThickenedPath {
    Vector start;
    Vector start_velocity;
    std::vector<ThickenedEvent> events;
    Vector end;
    Vector end_velocity;
    double end_time = 0.0;
    PathEnd termination = PathEnd::Escaped;
    std::string corner_message;  ///< set when termination == Corner

    std::vector<std::size_t> labels() const;
};

/// Iterates first_hit and specular reflection v+ = v - 2<v, nu> nu. A corner hit
/// ends the path with termination Corner; the events so far are kept.
ThickenedPath simulate(const ThickenedTable& table, const Vector& p, const Vector& v, int max_events = 1000,
                       double t_max = 1e6);

struct ThickenedOptions {
    int max_iters = 20000;      ///< projected-gradient iterations
    int newton_iters = 100;     ///< boundary Newton iterations
    double grad_tol = 1e-12;    ///< relative to max(1, S)
    double multiplier_tol = 1e-8;
    double boundary_tol = 1e-9; ///< relative slack for "on the cylinder"
    std::optional<std::vector<Vector>> start;  ///< ambient start chain (projected first)
};

struct ThickenedResult {
    std::vector<Vector> chain;
    double value = 0.0;
    Classification classification = Classification::Ghost;
    std::vector<double> multipliers;  ///< -<dS/dq_i, nu_i> at boundary vertices, NaN if interior
    std::vector<bool> on_boundary;
    int iterations = 0;
    bool used_newton = false;
};

/// Minimizes S over L_1^(r) x ... x L_k^(r). Honest (ValidBilliard) iff every vertex
/// lies on its cylinder with a positive multiplier and no edge enters another
/// cylinder; interior vertices or tangencies give Ghost.
ThickenedResult minimize_thickened(const ThickenedTable& table, const Itinerary& it, const Vector& A, const Vector& B,
                                   const ThickenedOptions& opts = {});

struct ReplayReport {
    bool same_labels = false;
    double max_vertex_deviation = 0.0;
    ThickenedPath path;
};

/// Re-runs an honest solution through `simulate` from A along its first edge, up to
/// path length S, and compares events with the solution's vertices.
ReplayReport replay(const ThickenedTable& table, const Itinerary& it, const Vector& A, const ThickenedResult& res);

struct CurveShortening {
    std::vector<Vector> chain;
    /// lengths[0] is the input length; lengths[i] follows the i-th replacement.
    std::vector<double> lengths;
};

/// Replaces q_1, ..., q_k in turn by a point of Z_i^(r) inside the triangle
/// (q_{i-1}, q_i, q_{i+1}) on the median from q_i. Requires a transverse chain and
/// r small enough that the median leaves the cylinder.
CurveShortening curve_shorten(const ThickenedTable& table, const Itinerary& it, const Vector& A,
                              const std::vector<Vector>& chain, const Vector& B);

struct RFamilyEntry {
    double r;
    std::optional<ThickenedResult> result;
    double deviation = std::numeric_limits<double>::quiet_NaN();  ///< max_i |q_i^(r) - q_i|
    bool itinerary_match = false;
    std::string error;
};

/// Thickened minimizers for each r, compared with the transverse point billiard at (A, B).
std::vector<RFamilyEntry> r_family(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const Vector& A,
                                   const Vector& B, const std::vector<double>& r_list, unsigned jobs = 1);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace linbill
