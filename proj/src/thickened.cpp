#include "linbill/thickened.hpp"

#include "linbill/errors.hpp"
#include "linbill/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace linbill {

namespace {

constexpr double kGrazingTol = 1e-14;
constexpr double kCornerTol = 1e-9;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double inside_margin(double rho) { return 1e-10 * std::max(1.0, rho); }

}  // namespace

ThickenedTable::ThickenedTable(std::shared_ptr<const Arrangement> arr, double r) : arr_(std::move(arr)), r_(r) {
    if (!arr_) throw InputError("thickened table: null arrangement");
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("thickened table: r must be positive");
}

bool ThickenedTable::strictly_inside(const Vector& x) const {
    for (std::size_t i = 0; i < arr_->size(); ++i) {
        const double rho = radius(i);
        if ((*arr_)[i].distance(x) < rho - inside_margin(rho)) return true;
    }
    return false;
}

std::optional<Hit> first_hit(const ThickenedTable& table, const Vector& p, const Vector& v) {
    const Arrangement& arr = table.arrangement();
    if (static_cast<std::size_t>(p.size()) != arr.dim() || static_cast<std::size_t>(v.size()) != arr.dim())
        throw InputError("first_hit: dimension mismatch");
    if (table.strictly_inside(p)) throw PreconditionError("first_hit: start point lies inside a cylinder");

    std::optional<Hit> best;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const double rho = table.radius(i);
        const Vector a = arr[i].perp(p);
        const Vector b = arr[i].perp(v);
        const double bb = b.squaredNorm();
        const double ab = a.dot(b);
        if (bb <= 1e-30 || ab >= 0.0) continue;  // parallel, or moving away
        // |a + t b|^2 = rho^2; disc / bb = rho^2 - (closest distance)^2.
        const double disc = ab * ab - bb * (a.squaredNorm() - rho * rho);
        if (disc / bb < kGrazingTol * std::max(1.0, rho * rho)) continue;
        const double t = std::max(0.0, (-ab - std::sqrt(disc)) / bb);
        if (best && t >= best->t) continue;
        Vector x = p + t * v;
        const Vector xp = arr[i].perp(x);
        const double xn = xp.norm();
        if (!(xn > 0.0)) continue;
        const Vector nu = xp / xn;
        x += (rho - xn) * nu;
        best = Hit{t, i, x, nu};
    }
    if (best) {
        for (std::size_t j = 0; j < arr.size(); ++j) {
            if (j == best->label) continue;
            if (arr[j].distance(best->point) < table.radius(j) + kCornerTol)
                throw CornerCollision("hit on '" + arr[best->label].name() + "' touches cylinder '" + arr[j].name() + "'");
        }
    }
    return best;
}

std::string to_string(PathEnd e) {
    switch (e) {
        case PathEnd::Escaped: return "escaped";
        case PathEnd::TimeLimit: return "time_limit";
        case PathEnd::EventLimit: return "event_limit";
        case PathEnd::Corner: return "corner";
    }
    return "unknown";
}

std::vector<std::size_t> ThickenedPath::labels() const {
    std::vector<std::size_t> out;
    for (const auto& e : events) out.push_back(e.label);
    return out;
}

ThickenedPath simulate(const ThickenedTable& table, const Vector& p, const Vector& v, int max_events, double t_max) {
    if (std::abs(v.norm() - 1.0) > 1e-12) throw InputError("simulate: velocity must be a unit vector");
    ThickenedPath path;
    path.start = p;
    path.start_velocity = v;
    Vector x = p;
    Vector u = v;
    double t = 0.0;
    for (;;) {
        if (static_cast<int>(path.events.size()) >= max_events) {
            path.termination = PathEnd::EventLimit;
            break;
        }
        std::optional<Hit> hit;
        try {
            hit = first_hit(table, x, u);
        } catch (const CornerCollision& e) {
            path.termination = PathEnd::Corner;
            path.corner_message = e.what();
            break;
        }
        if (!hit) {
            path.termination = PathEnd::Escaped;
            break;
        }
        if (t + hit->t > t_max) {
            x += (t_max - t) * u;
            t = t_max;
            path.termination = PathEnd::TimeLimit;
            break;
        }
        t += hit->t;
        x = hit->point;
        Vector out = u - 2.0 * u.dot(hit->normal) * hit->normal;
        out.normalize();
        path.events.push_back({t, hit->label, x, u, out});
        u = out;
    }
    path.end = x;
    path.end_velocity = u;
    path.end_time = t;
    return path;
}

namespace {

struct Edges {
    std::vector<Vector> unit;
    std::vector<double> len;
};

Edges edges_of(const Vector& A, const std::vector<Vector>& q, const Vector& B) {
    const std::size_t k = q.size();
    Edges e;
    for (std::size_t j = 0; j <= k; ++j) {
        const Vector& a = j == 0 ? A : q[j - 1];
        const Vector& b = j == k ? B : q[j];
        const Vector d = b - a;
        const double r = d.norm();
        e.len.push_back(r);
        e.unit.push_back(r > 0.0 ? Vector(d / r) : Vector(Vector::Zero(d.size())));
    }
    return e;
}

/// dS/dq_i = n_{i-1,i} - n_{i,i+1}; zero-length legs contribute nothing.
std::vector<Vector> ambient_gradient(const Vector& A, const std::vector<Vector>& q, const Vector& B) {
    const Edges e = edges_of(A, q, B);
    std::vector<Vector> g;
    for (std::size_t i = 0; i < q.size(); ++i) g.push_back(e.unit[i] - e.unit[i + 1]);
    return g;
}

Matrix ambient_hessian(const Vector& A, const std::vector<Vector>& q, const Vector& B) {
    const std::size_t k = q.size();
    const Eigen::Index n = A.size();
    const Edges e = edges_of(A, q, B);
    Matrix H = Matrix::Zero(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k) * n);
    for (std::size_t j = 0; j <= k; ++j) {
        if (!(e.len[j] > 0.0)) throw NonSmoothPoint("thickened: coincident consecutive vertices");
        const Matrix He = (Matrix::Identity(n, n) - e.unit[j] * e.unit[j].transpose()) / e.len[j];
        const bool tail = j >= 1;
        const bool head = j < k;
        const Eigen::Index ti = static_cast<Eigen::Index>(j) - 1;
        const Eigen::Index hi = static_cast<Eigen::Index>(j);
        if (tail) H.block(ti * n, ti * n, n, n) += He;
        if (head) H.block(hi * n, hi * n, n, n) += He;
        if (tail && head) {
            H.block(ti * n, hi * n, n, n) -= He;
            H.block(hi * n, ti * n, n, n) -= He;
        }
    }
    return H;
}

Vector project_cylinder(const Subspace& L, double rho, const Vector& q) {
    const Vector par = L.project(q);
    const Vector perp = q - par;
    const double d = perp.norm();
    if (d <= rho) return q;
    return par + perp * (rho / d);
}

struct Problem {
    const ThickenedTable& table;
    const Itinerary& it;
    const Vector& A;
    const Vector& B;

    const Subspace& L(std::size_t i) const { return table.arrangement()[it[i]]; }
    double rho(std::size_t i) const { return table.radius(it[i]); }
    std::size_t k() const { return it.size(); }
    double value(const std::vector<Vector>& q) const { return action(A, q, B); }
    std::vector<Vector> project(const std::vector<Vector>& q) const {
        std::vector<Vector> out;
        for (std::size_t i = 0; i < k(); ++i) out.push_back(project_cylinder(L(i), rho(i), q[i]));
        return out;
    }
};

double sq_dist(const std::vector<Vector>& x, const std::vector<Vector>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]).squaredNorm();
    return s;
}

double dot(const std::vector<Vector>& x, const std::vector<Vector>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i].dot(y[i]);
    return s;
}

/// Projected gradient with Barzilai-Borwein steps and Armijo backtracking along the projection arc.
int projected_gradient(const Problem& pb, std::vector<Vector>& q, const ThickenedOptions& opts) {
    q = pb.project(q);
    const double scale = std::max(1e-300, (pb.A - pb.B).norm());
    double f = pb.value(q);
    auto g = ambient_gradient(pb.A, q, pb.B);
    double t = 0.1 * scale;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        std::vector<Vector> unit_step(pb.k());
        for (std::size_t i = 0; i < pb.k(); ++i) unit_step[i] = q[i] - g[i];
        const double stationarity = std::sqrt(sq_dist(pb.project(unit_step), q));
        if (stationarity < opts.grad_tol * std::max(1.0, f)) break;

        std::vector<Vector> trial;
        double ft = f;
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls) {
            std::vector<Vector> y(pb.k());
            for (std::size_t i = 0; i < pb.k(); ++i) y[i] = q[i] - t * g[i];
            trial = pb.project(y);
            std::vector<Vector> d(pb.k());
            for (std::size_t i = 0; i < pb.k(); ++i) d[i] = trial[i] - q[i];
            ft = pb.value(trial);
            if (ft <= f + 1e-4 * dot(g, d)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        const auto g_new = ambient_gradient(pb.A, trial, pb.B);
        std::vector<Vector> s(pb.k()), yv(pb.k());
        for (std::size_t i = 0; i < pb.k(); ++i) {
            s[i] = trial[i] - q[i];
            yv[i] = g_new[i] - g[i];
        }
        const double ss = dot(s, s);
        const double sy = dot(s, yv);
        const bool moved = ss > 0.0;
        q = std::move(trial);
        f = ft;
        g = g_new;
        if (!moved) break;
        t = sy > 0.0 ? std::clamp(ss / sy, 1e-12 * scale, 1e3 * scale) : 10.0 * t;
    }
    return iter;
}

/// Newton on the product of cylinder surfaces. Each vertex is q = B c + rho N y with
/// |y| = 1; the sphere is charted at the current y by y(w) = (y + T w) / |y + T w|,
/// whose second derivative at w = 0 is -y delta_ab. Returns true on convergence.
bool boundary_newton(const Problem& pb, std::vector<Vector>& q, const ThickenedOptions& opts, int& iters) {
    const std::size_t k = pb.k();
    const Eigen::Index n = pb.A.size();
    std::vector<Vector> c(k), y(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Subspace& L = pb.L(i);
        c[i] = L.coords(q[i]);
        const Vector z = L.normal_basis().transpose() * q[i];
        if (!(z.norm() > 0.0)) return false;
        y[i] = z / z.norm();
    }
    auto assemble = [&](const std::vector<Vector>& cc, const std::vector<Vector>& yy) {
        std::vector<Vector> out(k);
        for (std::size_t i = 0; i < k; ++i) {
            out[i] = pb.L(i).normal_basis() * (pb.rho(i) * yy[i]);
            if (pb.L(i).rank() > 0) out[i] += pb.L(i).basis() * cc[i];
        }
        return out;
    };
    const Eigen::Index m = n - 1;  // dimension of each cylinder surface
    for (int it = 0; it < opts.newton_iters; ++it) {
        ++iters;
        q = assemble(c, y);
        const double f = pb.value(q);
        const auto g = ambient_gradient(pb.A, q, pb.B);
        Matrix J = Matrix::Zero(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k) * m);
        std::vector<Matrix> T(k);
        Vector lam(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            const Subspace& L = pb.L(i);
            const auto r = static_cast<Eigen::Index>(L.rank());
            T[i] = orthogonal_complement(y[i], static_cast<std::size_t>(y[i].size()));
            const auto ii = static_cast<Eigen::Index>(i);
            if (r > 0) J.block(ii * n, ii * m, n, r) = L.basis();
            if (m - r > 0) J.block(ii * n, ii * m + r, n, m - r) = pb.rho(i) * L.normal_basis() * T[i];
            lam(ii) = -g[i].dot(L.normal_basis() * y[i]);
        }
        Vector gflat(static_cast<Eigen::Index>(k) * n);
        for (std::size_t i = 0; i < k; ++i) gflat.segment(static_cast<Eigen::Index>(i) * n, n) = g[i];
        const Vector grad = J.transpose() * gflat;
        if (grad.norm() < opts.grad_tol * std::max(1.0, f)) return true;

        Matrix H = J.transpose() * ambient_hessian(pb.A, q, pb.B) * J;
        for (std::size_t i = 0; i < k; ++i) {
            const auto r = static_cast<Eigen::Index>(pb.L(i).rank());
            const auto ii = static_cast<Eigen::Index>(i);
            for (Eigen::Index a = r; a < m; ++a) H(ii * m + a, ii * m + a) += pb.rho(i) * lam(ii);
        }
        Eigen::LLT<Matrix> llt(H);
        if (llt.info() != Eigen::Success) return false;
        const Vector p = -llt.solve(grad);
        const double slope = grad.dot(p);
        double t = 1.0;
        bool accepted = false;
        std::vector<Vector> c_new(k), y_new(k);
        while (t > 1e-14) {
            for (std::size_t i = 0; i < k; ++i) {
                const auto r = static_cast<Eigen::Index>(pb.L(i).rank());
                const auto ii = static_cast<Eigen::Index>(i);
                c_new[i] = c[i] + t * p.segment(ii * m, r);
                const Vector yy = y[i] + T[i] * (t * p.segment(ii * m + r, m - r));
                y_new[i] = yy / yy.norm();
            }
            // Allow for rounding in S once the predicted decrease is below machine precision.
            if (pb.value(assemble(c_new, y_new)) <= f + 1e-4 * t * slope + 8 * kEps * std::max(1.0, f)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            q = assemble(c, y);
            return grad.norm() < 1e3 * opts.grad_tol * std::max(1.0, f);
        }
        c = c_new;
        y = y_new;
    }
    q = assemble(c, y);
    return false;
}

/// Outward normals and multipliers; a vertex off its cylinder gets NaN.
void fill_multipliers(const Problem& pb, const std::vector<Vector>& q, double tol, ThickenedResult& res) {
    const auto g = ambient_gradient(pb.A, q, pb.B);
    res.multipliers.assign(pb.k(), std::numeric_limits<double>::quiet_NaN());
    res.on_boundary.assign(pb.k(), false);
    for (std::size_t i = 0; i < pb.k(); ++i) {
        const Vector perp = pb.L(i).perp(q[i]);
        const double d = perp.norm();
        if (d < pb.rho(i) * (1.0 - tol)) continue;
        res.on_boundary[i] = true;
        res.multipliers[i] = -g[i].dot(perp / d);
    }
}

bool honest_kkt(const Problem& pb, const std::vector<Vector>& q, const ThickenedOptions& opts, ThickenedResult& res) {
    fill_multipliers(pb, q, opts.boundary_tol, res);
    for (std::size_t i = 0; i < pb.k(); ++i) {
        if (!res.on_boundary[i] || !(res.multipliers[i] > opts.multiplier_tol)) return false;
    }
    // Tangential stationarity: dS/dq_i = -lambda_i nu_i.
    const auto g = ambient_gradient(pb.A, q, pb.B);
    for (std::size_t i = 0; i < pb.k(); ++i) {
        const Vector perp = pb.L(i).perp(q[i]);
        const Vector tang = g[i] + res.multipliers[i] * perp / perp.norm();
        if (tang.norm() > 1e-7) return false;
    }
    return true;
}

/// Minimum distance from the segment [p, q] to L, minus rho.
double segment_clearance(const Subspace& L, double rho, const Vector& p, const Vector& q) {
    const Vector a = L.perp(p);
    const Vector b = L.perp(q - p);
    const double bb = b.squaredNorm();
    double t = 0.0;
    if (bb > 1e-30) t = std::clamp(-a.dot(b) / bb, 0.0, 1.0);
    return (a + t * b).norm() - rho;
}

bool edges_clear(const ThickenedTable& table, const Vector& A, const std::vector<Vector>& q, const Vector& B) {
    const std::size_t k = q.size();
    const Arrangement& arr = table.arrangement();
    for (std::size_t e = 0; e <= k; ++e) {
        const Vector& p0 = e == 0 ? A : q[e - 1];
        const Vector& p1 = e == k ? B : q[e];
        for (std::size_t j = 0; j < arr.size(); ++j) {
            const double rho = table.radius(j);
            if (segment_clearance(arr[j], rho, p0, p1) < -1e-9 * std::max(1.0, rho)) return false;
        }
    }
    return true;
}

}  // namespace

ThickenedResult minimize_thickened(const ThickenedTable& table, const Itinerary& it, const Vector& A, const Vector& B,
                                   const ThickenedOptions& opts) {
    const Arrangement& arr = table.arrangement();
    if (static_cast<std::size_t>(A.size()) != arr.dim() || static_cast<std::size_t>(B.size()) != arr.dim())
        throw InputError("minimize_thickened: anchor dimension mismatch");
    if (it.empty()) throw InputError("minimize_thickened: empty itinerary");
    if (table.strictly_inside(A) || table.strictly_inside(B))
        throw PreconditionError("minimize_thickened: anchors must lie outside every cylinder");

    const Problem pb{table, it, A, B};
    ThickenedResult res;

    auto finish_honest = [&](std::vector<Vector> q) {
        res.chain = std::move(q);
        res.value = pb.value(res.chain);
        res.classification =
            edges_clear(table, A, res.chain, B) ? Classification::ValidBilliard : Classification::NonGenericRay;
        return res;
    };

    // Fast path: push a transverse point billiard onto the cylinders and run Newton there.
    if (!opts.start) {
        try {
            const auto point = minimize(table.arrangement_ptr(), it, A, B);
            if (point.classification == Classification::ValidBilliard && is_transverse(*point.trajectory)) {
                std::vector<Vector> q;
                for (std::size_t i = 0; i < it.size(); ++i) {
                    const Vector jump = point.trajectory->edge_direction(i + 1) - point.trajectory->edge_direction(i);
                    const Vector nu = pb.L(i).perp(jump).normalized();
                    q.push_back(point.chain.points[i] + pb.rho(i) * nu);
                }
                int iters = 0;
                if (boundary_newton(pb, q, opts, iters) && honest_kkt(pb, q, opts, res)) {
                    res.iterations = iters;
                    res.used_newton = true;
                    return finish_honest(std::move(q));
                }
            }
        } catch (const std::runtime_error&) {
        } catch (const std::domain_error&) {
        }
    }

    std::vector<Vector> q;
    if (opts.start) {
        if (opts.start->size() != it.size()) throw InputError("minimize_thickened: start chain has wrong length");
        q = *opts.start;
    } else {
        q = Chain::chord_projection(arr, it, A, B).points;
    }
    res.iterations = projected_gradient(pb, q, opts);

    // Polish on the cylinder surfaces; convexity makes any honest KKT point the minimizer.
    std::vector<Vector> qn = q;
    bool pushable = true;
    for (std::size_t i = 0; i < it.size(); ++i) {
        const Vector perp = pb.L(i).perp(qn[i]);
        if (!(perp.norm() > 1e-3 * pb.rho(i))) {
            pushable = false;
            break;
        }
        qn[i] += (pb.rho(i) / perp.norm() - 1.0) * perp;
    }
    if (pushable) {
        int iters = 0;
        bool ok = false;
        try {
            ok = boundary_newton(pb, qn, opts, iters);
        } catch (const NonSmoothPoint&) {
        }
        res.iterations += iters;
        if (ok && pb.value(qn) <= pb.value(q) + 1e-9 * std::max(1.0, pb.value(q)) && honest_kkt(pb, qn, opts, res)) {
            res.used_newton = true;
            return finish_honest(std::move(qn));
        }
    }
    fill_multipliers(pb, q, opts.boundary_tol, res);
    res.chain = std::move(q);
    res.value = pb.value(res.chain);
    res.classification = Classification::Ghost;
    return res;
}

ReplayReport replay(const ThickenedTable& table, const Itinerary& it, const Vector& A, const ThickenedResult& res) {
    if (res.chain.empty()) throw InputError("replay: empty chain");
    ReplayReport rep;
    const Vector v = (res.chain.front() - A).normalized();
    rep.path = simulate(table, A, v, static_cast<int>(it.size()) + 8, res.value * (1.0 + 1e-12));
    rep.same_labels = rep.path.labels() == it.labels();
    if (rep.same_labels) {
        for (std::size_t i = 0; i < it.size(); ++i)
            rep.max_vertex_deviation = std::max(rep.max_vertex_deviation, (rep.path.events[i].point - res.chain[i]).norm());
    } else {
        rep.max_vertex_deviation = std::numeric_limits<double>::infinity();
    }
    return rep;
}

CurveShortening curve_shorten(const ThickenedTable& table, const Itinerary& it, const Vector& A,
                              const std::vector<Vector>& chain, const Vector& B) {
    const std::size_t k = chain.size();
    if (k != it.size() || k == 0) throw InputError("curve_shorten: chain length differs from itinerary length");
    const Arrangement& arr = table.arrangement();
    for (std::size_t i = 0; i < k; ++i)
        if (!arr[it[i]].contains(chain[i], 1e-9 * std::max(1.0, chain[i].norm())))
            throw PreconditionError("curve_shorten: chain vertex is off its subspace");
    CurveShortening out;
    out.chain = chain;
    out.lengths.push_back(action(A, chain, B));
    for (std::size_t i = 0; i < k; ++i) {
        const Vector& prev = i == 0 ? A : out.chain[i - 1];
        const Vector& next = i + 1 == k ? B : out.chain[i + 1];
        const Vector& qi = out.chain[i];
        const Vector u = prev - qi;
        const Vector w = next - qi;
        const double scale = std::max(u.norm(), w.norm());
        // Twice the triangle area over the longest side: zero for a straight-through vertex.
        const double area2 = std::sqrt(std::max(0.0, u.squaredNorm() * w.squaredNorm() - std::pow(u.dot(w), 2)));
        if (!(area2 > 1e-10 * scale * scale)) throw PreconditionError("curve_shorten: vertex is not transverse");
        const Vector mid = 0.5 * (prev + next);
        const Subspace& L = arr[it[i]];
        const double reach = L.perp(mid - qi).norm();
        const double rho = table.radius(it[i]);
        if (!(reach > rho)) throw PreconditionError("curve_shorten: r too large for this chain");
        const double t = rho / reach;
        Vector q2 = qi + t * (mid - qi);
        const Vector perp = L.perp(q2);
        q2 += (rho / perp.norm() - 1.0) * perp;
        out.chain[i] = q2;
        out.lengths.push_back(action(A, out.chain, B));
    }
    return out;
}

std::vector<RFamilyEntry> r_family(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const Vector& A,
                                   const Vector& B, const std::vector<double>& r_list, unsigned jobs) {
    const auto point = minimize(arr, it, A, B);
    if (point.classification != Classification::ValidBilliard || !is_transverse(*point.trajectory))
        throw PreconditionError("r_family: the point billiard at (A, B) is not a transverse valid billiard");
    std::vector<RFamilyEntry> out(r_list.size());
    parallel_for(r_list.size(), jobs, [&](std::size_t j) {
        RFamilyEntry& e = out[j];
        e.r = r_list[j];
        try {
            const ThickenedTable table(arr, e.r);
            auto res = minimize_thickened(table, it, A, B);
            double dev = 0.0;
            for (std::size_t i = 0; i < it.size(); ++i)
                dev = std::max(dev, (res.chain[i] - point.chain.points[i]).norm());
            e.deviation = dev;
            if (res.classification == Classification::ValidBilliard) {
                const auto rep = replay(table, it, A, res);
                e.itinerary_match = rep.same_labels && rep.max_vertex_deviation < 1e-8;
            }
            e.result = std::move(res);
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
    });
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("loglog_slope: values must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) throw InputError("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / den;
}

}  // namespace linbill
