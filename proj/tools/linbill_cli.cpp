// linbill: command-line front end.
//
// Exit codes: 0 ValidBilliard / success, 2 Ghost, 3 EdgeInSubspace, 4 NonGenericRay,
// 64 usage or input error, 70 solver failure.

#include "linbill/errors.hpp"
#include "linbill/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace linbill;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitSolver = 70;

int exit_code(Classification c) {
    switch (c) {
        case Classification::ValidBilliard: return 0;
        case Classification::Ghost: return 2;
        case Classification::EdgeInSubspace: return 3;
        case Classification::NonGenericRay: return 4;
    }
    return kExitSolver;
}

struct Globals {
    std::string arrangement;
    std::string out = ".";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    double tol = 1e-10;
};

struct Problem {
    std::string itinerary;
    std::string A;
    std::string B;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

Vector parse_vector(const std::string& s, std::size_t dim, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() != dim)
        throw InputError(what + " needs " + std::to_string(dim) + " comma-separated coordinates");
    Vector v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        try {
            std::size_t used = 0;
            v(static_cast<Eigen::Index>(i)) = std::stod(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
        } catch (const std::logic_error&) {
            throw InputError(what + ": bad number '" + parts[i] + "'");
        }
    }
    return v;
}

std::shared_ptr<const Arrangement> load(const Globals& g) {
    if (g.arrangement.empty()) throw InputError("--arrangement is required");
    return std::make_shared<const Arrangement>(load_arrangement(g.arrangement));
}

std::string out_path(const Globals& g, const std::string& name) {
    std::filesystem::create_directories(g.out);
    return (std::filesystem::path(g.out) / name).string();
}

void add_problem(CLI::App* cmd, Problem& p) {
    cmd->add_option("--itinerary", p.itinerary, "Comma-separated subspace names, e.g. L1,L2")->required();
    cmd->add_option("--A", p.A, "Start anchor, comma-separated")->required();
    cmd->add_option("--B", p.B, "End anchor, comma-separated")->required();
}

Itinerary parse_itinerary(const Arrangement& arr, const std::string& s) {
    return Itinerary::from_names(arr, split(s, ','));
}

Json result_json(const Arrangement& arr, const Itinerary& it, const MinimizeResult& r) {
    Json chain = Json::array();
    for (const auto& q : r.chain.points) chain.push_back(vector_to_json(q));
    Json j{{"itinerary", it.names(arr)},
           {"chain", chain},
           {"value", r.value},
           {"grad_norm", r.grad_norm},
           {"classification", to_string(r.classification)},
           {"iterations", r.iterations},
           {"used_fallback", r.used_fallback}};
    j["hessian_min_eig"] = r.hessian_min_eig ? Json(*r.hessian_min_eig) : Json(nullptr);
    return j;
}

struct SolveArgs {
    int max_iters = 500;
    int multistart = 0;
    double coincidence_tol = 1e-9;
    std::string generators;
};

int cmd_solve(const Globals& g, const Problem& p, const SolveArgs& s) {
    const auto arr = load(g);
    const Itinerary it = parse_itinerary(*arr, p.itinerary);
    const Vector A = parse_vector(p.A, arr->dim(), "--A");
    const Vector B = parse_vector(p.B, arr->dim(), "--B");
    SolverOptions opts;
    opts.grad_tol = g.tol;
    opts.max_iters = s.max_iters;
    opts.seed = g.seed;
    opts.n_multistart = s.multistart;
    opts.coincidence_tol = s.coincidence_tol;
    const std::vector<RotationGenerator> gens =
        s.generators.empty() ? std::vector<RotationGenerator>{} : generators_from_json(read_json(s.generators), *arr);
    const MinimizeResult r = minimize(arr, it, A, B, opts);
    Json res = result_json(*arr, it, r);
    if (s.multistart > 0) {
        const auto ms = multistart(arr, it, A, B, s.multistart, g.seed, opts);
        res["multistart_runs"] = s.multistart;
        res["multistart_max_deviation"] = ms.max_deviation;
    }
    if (r.trajectory) {
        write_text(out_path(g, "trajectory.json"), trajectory_to_json(*r.trajectory).dump(2) + "\n");
        const auto report = conservation_report(*r.trajectory, gens);
        write_text(out_path(g, "conservation.csv"), conservation_csv(report));
        double refl = 0.0;
        for (std::size_t i = 1; i <= r.trajectory->size(); ++i) {
            const auto rr = reflection_residual(*r.trajectory, i);
            refl = std::max({refl, rr.energy, rr.momentum});
        }
        res["length"] = r.trajectory->length();
        res["max_reflection_residual"] = refl;
        res["max_linear_momentum_jump"] = report.max_linear_deviation;
        res["max_angular_momentum_jump"] = report.max_angular_deviation;
    }
    write_text(out_path(g, "result.json"), res.dump(2) + "\n");
    std::cout << "classification " << to_string(r.classification) << "\nlength " << fmt(r.value) << "\n";
    return exit_code(r.classification);
}

int cmd_scatter(const Globals& g, const Problem& p, double spacing, int points) {
    const auto arr = load(g);
    const Itinerary it = parse_itinerary(*arr, p.itinerary);
    PatchGrid grid;
    grid.A_center = parse_vector(p.A, arr->dim(), "--A");
    grid.B_center = parse_vector(p.B, arr->dim(), "--B");
    grid.spacing = spacing;
    grid.points_per_axis = points;
    SolverOptions opts;
    opts.grad_tol = g.tol;
    const auto patch = sample_relation(arr, it, grid, opts, g.jobs);
    write_text(out_path(g, "patch.csv"), patch_csv(patch));
    write_text(out_path(g, "patch.gp"), patch_gnuplot("patch.csv", arr->dim()));
    std::cout << "cells " << patch.size() << "\nvalid " << patch.valid_count() << "\n";
    if (patch.valid_count() == patch.size()) {
        std::cout << "lagrangian_residual " << fmt(lagrangian_residual(patch)) << "\n";
        if (it.size() >= 2) std::cout << "theta_residual " << fmt(legendrian_theta_residual(patch).residual) << "\n";
    }
    return 0;
}

struct ThickenArgs {
    double r = 0.0;
    std::string r_list;
    std::string v;
    int max_events = 1000;
    double t_max = 1e6;
};

int cmd_thicken(const Globals& g, const Problem& p, const ThickenArgs& t) {
    const auto arr = load(g);
    const Vector A = parse_vector(p.A, arr->dim(), "--A");
    if (!t.v.empty()) {
        // Pure simulation from A.
        if (!(t.r > 0.0)) throw InputError("--v needs --r > 0");
        const ThickenedTable table(arr, t.r);
        const auto path = simulate(table, A, parse_vector(t.v, arr->dim(), "--v"), t.max_events, t.t_max);
        write_text(out_path(g, "events.csv"), events_csv(table, path));
        std::cout << "events " << path.events.size() << "\ntermination " << to_string(path.termination) << "\n";
        return 0;
    }
    const Itinerary it = parse_itinerary(*arr, p.itinerary);
    const Vector B = parse_vector(p.B, arr->dim(), "--B");
    if (!t.r_list.empty()) {
        std::vector<double> rs;
        for (const auto& s : split(t.r_list, ',')) rs.push_back(parse_vector(s, 1, "--r-list")(0));
        const auto family = r_family(arr, it, A, B, rs, g.jobs);
        write_text(out_path(g, "rfamily.csv"), rfamily_csv(family));
        write_text(out_path(g, "rfamily.gp"), rfamily_gnuplot("rfamily.csv"));
        std::vector<double> x, y;
        for (const auto& e : family)
            if (e.result && e.deviation > 0.0) {
                x.push_back(e.r);
                y.push_back(e.deviation);
            }
        if (x.size() >= 2) std::cout << "loglog_slope " << fmt(loglog_slope(x, y)) << "\n";
        return 0;
    }
    if (!(t.r > 0.0)) throw InputError("thicken needs --r or --r-list");
    const ThickenedTable table(arr, t.r);
    const auto res = minimize_thickened(table, it, A, B);
    Json j{{"r", t.r}, {"classification", to_string(res.classification)}, {"value", res.value}};
    Json chain = Json::array();
    for (const auto& q : res.chain) chain.push_back(vector_to_json(q));
    j["chain"] = chain;
    Json mult = Json::array();
    for (double m : res.multipliers) mult.push_back(std::isfinite(m) ? Json(m) : Json(nullptr));
    j["multipliers"] = mult;
    if (res.classification == Classification::ValidBilliard) {
        const auto rep = replay(table, it, A, res);
        write_text(out_path(g, "events.csv"), events_csv(table, rep.path));
        j["replay_same_labels"] = rep.same_labels;
        j["replay_max_vertex_deviation"] = rep.max_vertex_deviation;
    }
    write_text(out_path(g, "thickened.json"), j.dump(2) + "\n");
    std::cout << "classification " << to_string(res.classification) << "\nlength " << fmt(res.value) << "\n";
    return exit_code(res.classification);
}

int cmd_origami(const Globals& g, int max_len, int budget) {
    const auto arr = load(g);
    const auto rows = search_realizable(arr, max_len, budget, g.seed, g.jobs);
    write_text(out_path(g, "realizability.csv"), realizability_csv(*arr, rows));
    std::size_t longest = 0;
    for (const auto& r : rows)
        if (r.status == Realizability::Realized) longest = std::max(longest, r.itinerary.size());
    try {
        std::cout << "bound " << itinerary_bound(*arr) << "\n";
    } catch (const PreconditionError&) {
        std::cout << "bound none\n";
    }
    std::cout << "max_realized_length " << longest << "\n";
    return 0;
}

int cmd_threebody(const Globals& g, int phi_points, int psi_points, int cross_samples) {
    if (phi_points < 1 || psi_points < 1) throw InputError("grid sizes must be positive");
    auto grid = [](int n) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(2.0 * std::numbers::pi * i / n);
        return v;
    };
    const auto slice = three_body_slice(grid(phi_points), grid(psi_points));
    write_text(out_path(g, "slice.csv"), slice_csv(slice));
    write_text(out_path(g, "slice.gp"), slice_gnuplot("slice.csv"));
    std::cout << "w_norm " << fmt(slice.w_norm) << " (nominal value 3/2; |v1 - v2|/2 gives sqrt(3)/2 = "
              << fmt(std::sqrt(3.0) / 2.0) << ")\n";
    std::cout << "max_momentum_residual " << fmt(slice.max_momentum_residual()) << "\n";
    std::cout << "max_energy_residual " << fmt(slice.max_energy_residual()) << "\n";
    if (cross_samples > 0) {
        const auto cv = cross_validate_slice(slice, cross_samples, g.seed);
        std::cout << "cross_samples " << cv.samples << "\ncross_excluded " << cv.excluded << "\ncross_max_chain_deviation "
                  << fmt(cv.max_chain_deviation) << "\ncross_max_reflection_residual "
                  << fmt(cv.max_reflection_residual) << "\ncross_max_J_deviation " << fmt(cv.max_J_deviation) << "\n";
    }
    return 0;
}

int cmd_enumerate(const Globals& g, int max_len) {
    const auto arr = load(g);
    if (max_len < 1) throw InputError("--max-len must be positive");
    std::string out = "length,itinerary,angle_filtered\n";
    for (const auto& it : enumerate_itineraries(*arr, max_len)) {
        std::string labels;
        for (const auto& n : it.names(*arr)) labels += (labels.empty() ? "" : " ") + n;
        out += std::to_string(it.size()) + "," + labels + "," + (angle_filtered(*arr, it) ? "1" : "0") + "\n";
    }
    write_text(out_path(g, "itineraries.csv"), out);
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear billiards: solve itineraries, sample scattering relations, thicken, unfold"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--arrangement", g.arrangement, "Arrangement JSON file");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tol", g.tol, "Relative gradient tolerance")->check(CLI::PositiveNumber)->capture_default_str();

    Problem p;
    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Minimize path length for an itinerary");
    add_problem(solve, p);
    solve->add_option("--max-iters", sa.max_iters)->check(CLI::PositiveNumber);
    solve->add_option("--multistart", sa.multistart, "Extra random starts to compare")->check(CLI::NonNegativeNumber);
    solve->add_option("--coincidence-tol", sa.coincidence_tol, "Ghost threshold, relative to |A - B|")
        ->check(CLI::PositiveNumber);
    solve->add_option("--generators", sa.generators, "JSON array of skew matrices for the J report");

    double spacing = 1e-3;
    int points = 5;
    auto* scatter = app.add_subcommand("scatter", "Sample the scattering relation on an (A, B) patch");
    add_problem(scatter, p);
    scatter->add_option("--spacing", spacing)->check(CLI::PositiveNumber);
    scatter->add_option("--points", points, "Grid points per axis")->check(CLI::Range(2, 99));

    ThickenArgs t;
    auto* thicken = app.add_subcommand("thicken", "Thickened billiard: r-family, minimizer or simulation");
    thicken->add_option("--itinerary", p.itinerary);
    thicken->add_option("--A", p.A)->required();
    thicken->add_option("--B", p.B);
    thicken->add_option("--r", t.r);
    thicken->add_option("--r-list", t.r_list, "Comma-separated radii");
    thicken->add_option("--v", t.v, "Initial velocity: simulate from A instead of solving");
    thicken->add_option("--max-events", t.max_events)->check(CLI::PositiveNumber);
    thicken->add_option("--t-max", t.t_max)->check(CLI::PositiveNumber);

    int max_len = 4, budget = 10000;
    auto* origami = app.add_subcommand("origami", "Realizability search over itineraries");
    origami->add_option("--max-len", max_len)->check(CLI::PositiveNumber);
    origami->add_option("--budget", budget)->check(CLI::PositiveNumber);

    int phi_points = 64, psi_points = 64, cross_samples = 0;
    auto* threebody = app.add_subcommand("threebody", "Three-body scattering slice");
    threebody->add_option("--phi-points", phi_points);
    threebody->add_option("--psi-points", psi_points);
    threebody->add_option("--cross-validate", cross_samples, "Grid points to re-solve with the generic solver");

    int enum_len = 3;
    auto* enumerate = app.add_subcommand("enumerate", "List itineraries with the angle filter");
    enumerate->add_option("--max-len", enum_len);

    app.fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*solve) return cmd_solve(g, p, sa);
        if (*scatter) return cmd_scatter(g, p, spacing, points);
        if (*thicken) {
            if (t.v.empty() && (p.itinerary.empty() || p.B.empty()))
                throw InputError("thicken needs --itinerary and --B unless --v is given");
            return cmd_thicken(g, p, t);
        }
        if (*origami) return cmd_origami(g, max_len, budget);
        if (*threebody) return cmd_threebody(g, phi_points, psi_points, cross_samples);
        if (*enumerate) return cmd_enumerate(g, enum_len);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}
