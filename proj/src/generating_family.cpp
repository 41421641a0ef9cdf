#include "linbill/generating_family.hpp"

#include "linbill/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace linbill {

namespace {

/// Flat-coordinate view of S_{A,B}. `eps` > 0 replaces |d| by sqrt(|d|^2 + eps^2).
class ChainProblem {
public:
    ChainProblem(const Arrangement& arr, const Itinerary& it, const Vector& A, const Vector& B)
        : arr_(arr), it_(it), A_(A), B_(B) {
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < it.size(); ++i) {
            offsets_.push_back(off);
            off += static_cast<Eigen::Index>(arr[it[i]].rank());
        }
        nvars_ = off;
    }

    Eigen::Index nvars() const { return nvars_; }
    std::size_t k() const { return it_.size(); }
    const Matrix& basis(std::size_t i) const { return arr_[it_[i]].basis(); }
    Eigen::Index offset(std::size_t i) const { return offsets_[i]; }
    Eigen::Index block(std::size_t i) const { return basis(i).cols(); }

    std::vector<Vector> points(const Vector& c) const {
        std::vector<Vector> q;
        q.reserve(k());
        for (std::size_t i = 0; i < k(); ++i) {
            if (block(i) == 0)
                q.push_back(Vector::Zero(A_.size()));
            else
                q.push_back(basis(i) * c.segment(offset(i), block(i)));
        }
        return q;
    }

    const Vector& vertex(const std::vector<Vector>& q, std::size_t i) const {
        return i == 0 ? A_ : (i == k() + 1 ? B_ : q[i - 1]);
    }

    double value(const Vector& c, double eps = 0.0) const {
        const auto q = points(c);
        double s = 0.0;
        for (std::size_t e = 0; e <= k(); ++e) {
            const double r2 = (vertex(q, e + 1) - vertex(q, e)).squaredNorm();
            s += std::sqrt(r2 + eps * eps);
        }
        return s;
    }

    /// Smallest interior gap r_{i,i+1}, 1 <= i < k.
    double min_gap(const Vector& c) const {
        const auto q = points(c);
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < k(); ++i) g = std::min(g, (q[i + 1] - q[i]).norm());
        return g;
    }

    /// Ambient gradient blocks dS/dq_i.
    std::vector<Vector> ambient_gradient(const std::vector<Vector>& q, double eps) const {
        std::vector<Vector> g(k(), Vector::Zero(A_.size()));
        for (std::size_t e = 0; e <= k(); ++e) {
            const Vector d = vertex(q, e + 1) - vertex(q, e);
            const double rho = std::sqrt(d.squaredNorm() + eps * eps);
            if (!(rho > 0.0)) throw NonSmoothPoint("coincident consecutive vertices");
            const Vector n = d / rho;
            // Edge e runs from vertex e (chain index e-1) to vertex e+1 (chain index e).
            if (e >= 1) g[e - 1] -= n;
            if (e < k()) g[e] += n;
        }
        return g;
    }

    Vector grad(const Vector& c, double eps = 0.0) const {
        const auto q = points(c);
        const auto g = ambient_gradient(q, eps);
        Vector out(nvars_);
        for (std::size_t i = 0; i < k(); ++i)
            if (block(i) > 0) out.segment(offset(i), block(i)) = basis(i).transpose() * g[i];
        return out;
    }

    Matrix hess(const Vector& c, double eps = 0.0) const {
        const auto q = points(c);
        const Eigen::Index n = A_.size();
        Matrix H = Matrix::Zero(nvars_, nvars_);
        for (std::size_t e = 0; e <= k(); ++e) {
            const Vector d = vertex(q, e + 1) - vertex(q, e);
            const double rho = std::sqrt(d.squaredNorm() + eps * eps);
            if (!(rho > 0.0)) throw NonSmoothPoint("coincident consecutive vertices");
            const Matrix He = (Matrix::Identity(n, n) - d * d.transpose() / (rho * rho)) / rho;
            // Edge e touches chain vertices e-1 (tail, if e >= 1) and e (head, if e < k).
            const bool tail = e >= 1;
            const bool head = e < k();
            if (tail && block(e - 1) > 0) {
                const Matrix& Bt = basis(e - 1);
                H.block(offset(e - 1), offset(e - 1), block(e - 1), block(e - 1)) += Bt.transpose() * He * Bt;
            }
            if (head && block(e) > 0) {
                const Matrix& Bh = basis(e);
                H.block(offset(e), offset(e), block(e), block(e)) += Bh.transpose() * He * Bh;
            }
            if (tail && head && block(e - 1) > 0 && block(e) > 0) {
                const Matrix off = -(basis(e - 1).transpose() * He * basis(e));
                H.block(offset(e - 1), offset(e), block(e - 1), block(e)) += off;
                H.block(offset(e), offset(e - 1), block(e), block(e - 1)) += off.transpose();
            }
        }
        return H;
    }

    /// Closed-form minimizer of |a - x| + |x - b| over x in L_i, in L_i coordinates.
    Vector block_minimizer(std::size_t i, const Vector& a, const Vector& b) const {
        const Matrix& Bi = basis(i);
        const Vector ca = Bi.transpose() * a;
        const Vector cb = Bi.transpose() * b;
        const double alpha = (a - Bi * ca).norm();
        const double beta = (b - Bi * cb).norm();
        if (alpha + beta == 0.0) return 0.5 * (ca + cb);
        return ca + (alpha / (alpha + beta)) * (cb - ca);
    }

    /// One Gauss-Seidel sweep of exact block minimization.
    void block_sweep(Vector& c) const {
        for (std::size_t i = 0; i < k(); ++i) {
            if (block(i) == 0) continue;
            const auto q = points(c);
            c.segment(offset(i), block(i)) = block_minimizer(i, vertex(q, i), vertex(q, i + 2));
        }
    }

    /// Damped Newton on the eps-smoothed action (strictly convex for eps > 0).
    void smoothed_newton(Vector& c, double eps, double tol, int max_iters) const {
        for (int it = 0; it < max_iters; ++it) {
            const Vector g = grad(c, eps);
            if (g.norm() <= tol) return;
            Eigen::LLT<Matrix> llt(hess(c, eps));
            Vector p = llt.info() == Eigen::Success ? Vector(-llt.solve(g)) : Vector(-g);
            const double f0 = value(c, eps);
            double t = 1.0;
            while (value(c + t * p, eps) > f0 + 1e-4 * t * g.dot(p)) {
                t *= 0.5;
                if (t < 1e-14) return;
            }
            c += t * p;
        }
    }

private:
    const Arrangement& arr_;
    const Itinerary& it_;
    const Vector& A_;
    const Vector& B_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index nvars_ = 0;
};

void check_dims(const Arrangement& arr, const Vector& A, const Vector& B) {
    const auto n = static_cast<Eigen::Index>(arr.dim());
    if (A.size() != n || B.size() != n) throw InputError("anchor dimension mismatch");
}

std::vector<Eigen::Index> block_offsets(const Arrangement& arr, const Itinerary& it) {
    std::vector<Eigen::Index> off;
    Eigen::Index o = 0;
    for (std::size_t i = 0; i < it.size(); ++i) {
        off.push_back(o);
        o += static_cast<Eigen::Index>(arr[it[i]].rank());
    }
    off.push_back(o);
    return off;
}

}  // namespace

Chain Chain::from_coords(const Arrangement& arr, const Itinerary& it, std::vector<Vector> coords) {
    if (coords.size() != it.size()) throw InputError("chain: wrong number of blocks");
    Chain ch;
    for (std::size_t i = 0; i < it.size(); ++i) ch.points.push_back(arr[it[i]].point(coords[i]));
    ch.coords = std::move(coords);
    return ch;
}

Chain Chain::from_points(const Arrangement& arr, const Itinerary& it, const std::vector<Vector>& points) {
    if (points.size() != it.size()) throw InputError("chain: wrong number of points");
    std::vector<Vector> coords;
    for (std::size_t i = 0; i < it.size(); ++i) coords.push_back(arr[it[i]].coords(points[i]));
    return from_coords(arr, it, std::move(coords));
}

Chain Chain::chord_projection(const Arrangement& arr, const Itinerary& it, const Vector& A, const Vector& B) {
    check_dims(arr, A, B);
    const double k = static_cast<double>(it.size());
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double s = static_cast<double>(i + 1) / (k + 1.0);
        pts.push_back((1.0 - s) * A + s * B);
    }
    return from_points(arr, it, pts);
}

Vector Chain::flat() const {
    Eigen::Index n = 0;
    for (const auto& c : coords) n += c.size();
    Vector out(n);
    Eigen::Index o = 0;
    for (const auto& c : coords) {
        out.segment(o, c.size()) = c;
        o += c.size();
    }
    return out;
}

Chain Chain::from_flat(const Arrangement& arr, const Itinerary& it, const Vector& flat) {
    const auto off = block_offsets(arr, it);
    if (flat.size() != off.back()) throw InputError("chain: flat coordinate size mismatch");
    std::vector<Vector> coords;
    for (std::size_t i = 0; i < it.size(); ++i) coords.push_back(flat.segment(off[i], off[i + 1] - off[i]));
    return from_coords(arr, it, std::move(coords));
}

double action(const Vector& A, const std::vector<Vector>& chain, const Vector& B) {
    if (chain.empty()) return (B - A).norm();
    double s = (chain.front() - A).norm() + (B - chain.back()).norm();
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) s += (chain[i + 1] - chain[i]).norm();
    return s;
}

std::vector<Vector> gradient(const Arrangement& arr, const Itinerary& it, const Vector& A, const Chain& chain,
                             const Vector& B) {
    check_dims(arr, A, B);
    ChainProblem prob(arr, it, A, B);
    const Vector g = prob.grad(chain.flat());
    std::vector<Vector> out;
    for (std::size_t i = 0; i < it.size(); ++i) out.push_back(g.segment(prob.offset(i), prob.block(i)));
    return out;
}

Eigen::Index HessianModel::block_size(std::size_t i) const { return offsets.at(i + 1) - offsets.at(i); }

double HessianModel::a_consistency() const {
    double m = 0.0;
    for (std::size_t i = 0; i < a_in.size(); ++i) m = std::max(m, (a_in[i] - a_out[i]).norm());
    return m;
}

namespace {

Matrix sqrt_spd(const Matrix& G, bool inverse) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    if (inverse) ev = ev.cwiseInverse();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::vector<double> HessianModel::coupling_norms() const {
    std::vector<double> out;
    auto opnorm = [&](const Matrix& S, std::size_t i, std::size_t j) {
        if (S.size() == 0) return 0.0;
        const Matrix T = sqrt_spd(norm_forms[i], false) * S * sqrt_spd(norm_forms[j], true);
        Eigen::JacobiSVD<Matrix> svd(T);
        return svd.singularValues()(0);
    };
    for (std::size_t i = 0; i < coupling_up.size(); ++i) {
        out.push_back(opnorm(coupling_up[i], i, i + 1));
        out.push_back(opnorm(coupling_down[i], i + 1, i));
    }
    return out;
}

double HessianModel::min_eigenvalue() const {
    if (hessian.rows() == 0) return std::numeric_limits<double>::infinity();
    Matrix G = Matrix::Zero(hessian.rows(), hessian.cols());
    for (std::size_t i = 0; i < norm_forms.size(); ++i)
        G.block(offsets[i], offsets[i], block_size(i), block_size(i)) = norm_forms[i];
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(hessian, G);
    if (es.info() != Eigen::Success) throw PreconditionError("hessian: norm form is not positive definite");
    return es.eigenvalues().minCoeff();
}

HessianModel hessian(const Arrangement& arr, const Itinerary& it, const Vector& A, const Chain& chain,
                     const Vector& B) {
    check_dims(arr, A, B);
    if (chain.size() != it.size()) throw InputError("hessian: chain length differs from itinerary length");
    ChainProblem prob(arr, it, A, B);
    const std::size_t k = it.size();
    const Eigen::Index n = A.size();

    HessianModel h;
    h.offsets = block_offsets(arr, it);
    for (std::size_t e = 0; e <= k; ++e) {
        const Vector d = prob.vertex(chain.points, e + 1) - prob.vertex(chain.points, e);
        const double r = d.norm();
        if (!(r > 0.0)) throw NonSmoothPoint("hessian: coincident consecutive vertices");
        h.edge_lengths.push_back(r);
        h.unit_edges.push_back(d / r);
    }
    for (std::size_t i = 0; i < k; ++i) {
        const Subspace& L = arr[it[i]];
        h.betas.push_back(1.0 / h.edge_lengths[i] + 1.0 / h.edge_lengths[i + 1]);
        h.a_in.push_back(L.project(h.unit_edges[i]));
        h.a_out.push_back(L.project(h.unit_edges[i + 1]));
        const Vector ac = L.basis().transpose() * h.unit_edges[i];
        if (ac.norm() >= 1.0 - 1e-12) throw PreconditionError("hessian: incoming edge lies in its collision subspace");
        h.norm_forms.push_back(Matrix::Identity(ac.size(), ac.size()) - ac * ac.transpose());
    }
    h.hessian = prob.hess(chain.flat());

    auto proj_perp = [&](const Vector& u) { return Matrix(Matrix::Identity(n, n) - u * u.transpose()); };
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const Matrix Pi = proj_perp(h.unit_edges[i + 1]);
        const Matrix& Bi = arr[it[i]].basis();
        const Matrix& Bj = arr[it[i + 1]].basis();
        h.coupling_up.push_back(h.norm_forms[i].ldlt().solve(Matrix(Bi.transpose() * Pi * Bj)));
        h.coupling_down.push_back(h.norm_forms[i + 1].ldlt().solve(Matrix(Bj.transpose() * Pi * Bi)));
    }

    h.M = Matrix::Zero(h.hessian.rows(), h.hessian.cols());
    for (std::size_t i = 0; i < k; ++i) {
        const Eigen::Index bi = h.block_size(i);
        if (bi == 0) continue;
        h.M.middleRows(h.offsets[i], bi) = h.norm_forms[i].ldlt().solve(Matrix(h.hessian.middleRows(h.offsets[i], bi)));
    }
    return h;
}

PreconditionedP preconditioned_P(const HessianModel& h) {
    const std::size_t k = h.betas.size();
    PreconditionedP out;
    const Eigen::Index n = h.M.rows();
    Vector dinv(n);
    for (std::size_t i = 0; i < k; ++i) {
        dinv.segment(h.offsets[i], h.block_size(i)).setConstant(1.0 / h.betas[i]);
        const double r_prev = h.edge_lengths[i];
        const double r_next = h.edge_lengths[i + 1];
        out.a.push_back(r_next / (r_prev + r_next));
        out.b.push_back(r_prev / (r_prev + r_next));
    }
    out.P = dinv.asDiagonal() * h.M;
    out.A = Matrix::Identity(n, n) - out.P;
    if (n > 0) {
        Eigen::EigenSolver<Matrix> es(out.A, false);
        out.spectral_radius_A = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    return out;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::ValidBilliard: return "ValidBilliard";
        case Classification::Ghost: return "Ghost";
        case Classification::EdgeInSubspace: return "EdgeInSubspace";
        case Classification::NonGenericRay: return "NonGenericRay";
    }
    return "Unknown";
}

namespace {

/// Block-coordinate descent followed by a smoothing-continuation pass. Returns the
/// lowest-action point found. Escapes the stalls block descent can suffer at
/// coincident vertices, where S is convex but not differentiable.
Vector nonsmooth_fallback(const ChainProblem& prob, Vector c, double scale) {
    double f = prob.value(c);
    for (int sweep = 0; sweep < 200; ++sweep) {
        Vector trial = c;
        prob.block_sweep(trial);
        const double ft = prob.value(trial);
        const bool progress = ft < f - 1e-15 * std::max(1.0, f);
        if (ft <= f) {
            c = trial;
            f = ft;
        }
        if (!progress) break;
    }
    Vector best = c;
    double fbest = f;
    Vector cs = c;
    for (double rel : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
        const double eps = rel * scale;
        prob.smoothed_newton(cs, eps, 1e-13 * std::max(1.0, scale), 60);
        const double fs = prob.value(cs);
        if (fs < fbest) {
            fbest = fs;
            best = cs;
        }
    }
    return best;
}

Classification classify(const Arrangement& arr, const Itinerary& it, const Vector& A, const Chain& ch, const Vector& B,
                        double coincidence, double tol) {
    for (std::size_t i = 0; i + 1 < ch.size(); ++i)
        if ((ch.points[i + 1] - ch.points[i]).norm() < coincidence) return Classification::Ghost;
    if (has_edge_in_subspace(arr, it, A, ch.points, B, tol)) return Classification::EdgeInSubspace;
    if (!is_generic(arr, it, A, ch.points, B, tol) || !interior_edges_clear(arr, ch.points, tol))
        return Classification::NonGenericRay;
    return Classification::ValidBilliard;
}

}  // namespace

MinimizeResult minimize(std::shared_ptr<const Arrangement> arr_ptr, const Itinerary& it, const Vector& A,
                        const Vector& B, const SolverOptions& opts, const std::optional<Chain>& start) {
    if (!arr_ptr) throw InputError("minimize: null arrangement");
    const Arrangement& arr = *arr_ptr;
    check_dims(arr, A, B);
    if (arr.on_locus(A, opts.generic_tol) || arr.on_locus(B, opts.generic_tol))
        throw PreconditionError("minimize: anchors must lie off the collision locus");

    const double scale = std::max((A - B).norm(), 1e-300);
    ChainProblem prob(arr, it, A, B);
    Vector c = start ? start->flat() : Chain::chord_projection(arr, it, A, B).flat();
    if (c.size() != prob.nvars()) throw InputError("minimize: start chain has wrong shape");

    MinimizeResult res;
    const double coincide = opts.coincidence_tol * scale;
    const double switch_gap = opts.switch_tol * scale;
    int fallbacks = 0;
    bool converged = prob.nvars() == 0;
    bool ghost = false;

    auto run_fallback = [&]() {
        c = nonsmooth_fallback(prob, c, scale);
        res.used_fallback = true;
        ++fallbacks;
        if (prob.min_gap(c) < coincide) ghost = true;
    };

    int iter = 0;
    for (; iter < opts.max_iters && !converged && !ghost; ++iter) {
        if (prob.min_gap(c) < switch_gap && fallbacks < 3) {
            run_fallback();
            continue;
        }
        if (prob.min_gap(c) < coincide) {
            ghost = true;
            break;
        }
        const double f = prob.value(c);
        const Vector g = prob.grad(c);
        if (g.norm() <= opts.grad_tol * std::max(1.0, f)) {
            converged = true;
            break;
        }
        Eigen::LLT<Matrix> llt(prob.hess(c));
        if (llt.info() != Eigen::Success) {
            if (fallbacks >= 3) break;
            run_fallback();
            continue;
        }
        const Vector p = -llt.solve(g);
        const double slope = g.dot(p);
        double t = 1.0;
        bool accepted = false;
        while (t >= opts.step_floor) {
            const Vector trial = c + t * p;
            // Guard against stepping onto a non-smooth point during the search.
            if (prob.value(trial) <= f + opts.armijo * t * slope) {
                c = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // Rounding floor: accept if the gradient is already small, else fall back.
            if (g.norm() <= 1e3 * opts.grad_tol * std::max(1.0, f)) {
                converged = true;
                break;
            }
            if (fallbacks >= 3) break;
            run_fallback();
            continue;
        }
        if ((t * p).norm() < opts.step_tol * std::max(1.0, c.norm())) {
            const Vector g2 = prob.grad(c);
            if (g2.norm() <= 1e3 * opts.grad_tol * std::max(1.0, prob.value(c))) {
                converged = true;
                break;
            }
        }
    }
    if (converged && prob.nvars() > 0 && prob.min_gap(c) >= switch_gap) {
        // Newton converges quadratically; a few full steps take the chain to rounding level.
        for (int p = 0; p < 3; ++p) {
            const Vector g = prob.grad(c);
            Eigen::LLT<Matrix> llt(prob.hess(c));
            if (llt.info() != Eigen::Success) break;
            const Vector trial = c - llt.solve(g);
            if (!(prob.grad(trial).norm() < g.norm())) break;
            c = trial;
        }
    }
    if (!converged && !ghost) {
        if (prob.min_gap(c) < coincide)
            ghost = true;
        else
            throw MaxIterations("minimize: no convergence after " + std::to_string(opts.max_iters) + " iterations");
    }

    res.iterations = iter;
    res.chain = Chain::from_flat(arr, it, c);
    res.value = prob.value(c);
    res.classification = classify(arr, it, A, res.chain, B, coincide, opts.generic_tol);
    if (res.classification != Classification::Ghost) {
        res.grad_norm = prob.nvars() > 0 ? prob.grad(c).norm() : 0.0;
    } else {
        res.grad_norm = std::numeric_limits<double>::quiet_NaN();
    }
    if (res.classification == Classification::ValidBilliard) {
        res.trajectory.emplace(arr_ptr, it, A, res.chain.points, B);
        res.hessian_min_eig = hessian(arr, it, A, res.chain, B).min_eigenvalue();
    }
    return res;
}

MultistartReport multistart(std::shared_ptr<const Arrangement> arr, const Itinerary& it, const Vector& A,
                            const Vector& B, int n, std::uint64_t seed, const SolverOptions& opts) {
    MultistartReport rep;
    rep.reference = minimize(arr, it, A, B, opts);
    const double radius = 10.0 * (A - B).norm();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < n; ++s) {
        std::vector<Vector> coords;
        for (std::size_t i = 0; i < it.size(); ++i) {
            const auto m = static_cast<Eigen::Index>((*arr)[it[i]].rank());
            Vector c(m);
            for (Eigen::Index j = 0; j < m; ++j) c(j) = gauss(rng);
            if (m > 0 && c.norm() > 0.0) c *= radius * std::pow(unif(rng), 1.0 / static_cast<double>(m)) / c.norm();
            coords.push_back(c);
        }
        auto run = minimize(arr, it, A, B, opts, Chain::from_coords(*arr, it, std::move(coords)));
        for (std::size_t i = 0; i < it.size(); ++i)
            rep.max_deviation =
                std::max(rep.max_deviation, (run.chain.points[i] - rep.reference.chain.points[i]).norm());
        rep.runs.push_back(std::move(run));
    }
    return rep;
}

EnvelopeGradients envelope_gradients(const MinimizeResult& result, const Vector& A, const Vector& B) {
    const Vector& first = result.chain.size() ? result.chain.points.front() : B;
    const Vector& last = result.chain.size() ? result.chain.points.back() : A;
    const Vector gradA = (A - first) / (A - first).norm();
    const Vector gradB = (B - last) / (B - last).norm();
    return {-gradA, gradB};
}

}  // namespace linbill
