#include "linbill/io.hpp"

#include "linbill/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace linbill {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void append_vec(std::string& row, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        row += ',';
        row += fmt(v(i));
    }
}

void append_nan(std::string& row, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) row += ",nan";
}

std::string axis_header(const std::string& prefix, std::size_t n) {
    std::string h;
    for (std::size_t i = 0; i < n; ++i) h += "," + prefix + std::to_string(i);
    return h;
}

}  // namespace

Json vector_to_json(const Vector& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected a numeric array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InputError("expected a numeric array");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Arrangement arrangement_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("subspaces"))
        throw InputError("arrangement JSON needs \"dim\" and \"subspaces\"");
    if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1) throw InputError("arrangement dim must be a positive integer");
    const auto dim = j["dim"].get<std::size_t>();
    std::vector<Subspace> subs;
    for (const auto& s : j["subspaces"]) {
        if (!s.contains("name") || !s["name"].is_string()) throw InputError("subspace needs a string \"name\"");
        if (!s.contains("basis") || !s["basis"].is_array()) throw InputError("subspace needs a \"basis\" array");
        std::vector<Vector> rows;
        for (const auto& r : s["basis"]) rows.push_back(vector_from_json(r));
        const double sigma = s.value("sigma", 1.0);
        subs.emplace_back(s["name"].get<std::string>(), dim, rows, sigma);
    }
    return Arrangement(dim, std::move(subs));
}

Json arrangement_to_json(const Arrangement& arr) {
    Json subs = Json::array();
    for (const auto& L : arr.subspaces()) {
        Json basis = Json::array();
        for (Eigen::Index c = 0; c < L.basis().cols(); ++c) basis.push_back(vector_to_json(L.basis().col(c)));
        subs.push_back({{"name", L.name()}, {"basis", basis}, {"sigma", L.sigma()}});
    }
    return {{"dim", arr.dim()}, {"subspaces", subs}};
}

std::vector<RotationGenerator> generators_from_json(const Json& j, const Arrangement& arr) {
    if (!j.is_array()) throw InputError("generators JSON must be an array of matrices");
    const auto n = static_cast<Eigen::Index>(arr.dim());
    std::vector<RotationGenerator> gens;
    for (const auto& mj : j) {
        if (!mj.is_array() || static_cast<Eigen::Index>(mj.size()) != n) throw InputError("generator must have dim rows");
        Matrix xi(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Vector row = vector_from_json(mj[static_cast<std::size_t>(r)]);
            if (row.size() != n) throw InputError("generator must be square");
            xi.row(r) = row.transpose();
        }
        gens.emplace_back(arr, xi);
    }
    return gens;
}

Json generator_to_json(const Matrix& xi) {
    Json j = Json::array();
    for (Eigen::Index r = 0; r < xi.rows(); ++r) j.push_back(vector_to_json(xi.row(r).transpose()));
    return j;
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

Arrangement load_arrangement(const std::string& path) {
    try {
        return arrangement_from_json(read_json(path));
    } catch (const Json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
    if (!out) throw InputError("write failed: " + path);
}

Json trajectory_to_json(const BilliardTrajectory& traj) {
    Json chain = Json::array();
    for (const auto& q : traj.chain()) chain.push_back(vector_to_json(q));
    return {{"A", vector_to_json(traj.A())},
            {"B", vector_to_json(traj.B())},
            {"chain", chain},
            {"itinerary", traj.itinerary().names(traj.arrangement())},
            {"length", traj.length()}};
}

BilliardTrajectory trajectory_from_json(const Json& j, std::shared_ptr<const Arrangement> arr) {
    if (!arr) throw InputError("trajectory_from_json: null arrangement");
    try {
        std::vector<Vector> chain;
        for (const auto& q : j.at("chain")) chain.push_back(vector_from_json(q));
        const auto names = j.at("itinerary").get<std::vector<std::string>>();
        BilliardTrajectory traj(arr, Itinerary::from_names(*arr, names), vector_from_json(j.at("A")), std::move(chain),
                                vector_from_json(j.at("B")));
        if (j.contains("length")) {
            const double stored = j["length"].get<double>();
            if (std::abs(stored - traj.length()) > 1e-9 * std::max(1.0, traj.length()))
                throw InputError("trajectory JSON: stored length disagrees with the chain");
        }
        return traj;
    } catch (const Json::exception& e) {
        throw InputError(std::string("trajectory JSON: ") + e.what());
    }
}

std::string patch_csv(const RelationPatch& patch) {
    const std::size_t n = patch.dim();
    std::string out = "cell" + axis_header("A", n) + axis_header("B", n) + ",status" + axis_header("vA", n) +
                      axis_header("vB", n) + axis_header("Qm", n) + axis_header("Qp", n) + ",S\n";
    for (std::size_t c = 0; c < patch.size(); ++c) {
        const auto [A, B] = patch.anchors(patch.index(c));
        std::string row = std::to_string(c);
        append_vec(row, A);
        append_vec(row, B);
        row += ',';
        row += patch.failures[c].empty() ? to_string(patch.status[c]) : "SolverFailure";
        const auto& cell = patch.cells[c];
        const auto nn = static_cast<Eigen::Index>(n);
        if (cell) {
            append_vec(row, cell->vA);
            append_vec(row, cell->vB);
            append_vec(row, cell->ell_minus.Q);
            append_vec(row, cell->ell_plus.Q);
            row += "," + fmt(cell->value);
        } else {
            append_nan(row, 4 * nn);
            row += ",nan";
        }
        out += row + "\n";
    }
    return out;
}

std::string patch_gnuplot(const std::string& csv_name, std::size_t dim) {
    // Columns: cell, A (dim), B (dim), status, vA, vB, Q_-, Q_+, S.
    const std::size_t qp = 1 + 2 * dim + 1 + 3 * dim + 1;
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key off\n"
      << "set xlabel 'A0'\nset ylabel 'A1'\nset zlabel 'Qp0'\n"
      << "splot '" << csv_name << "' every ::1 using 2:3:" << qp << " with points pt 7\n";
    return s.str();
}

std::string events_csv(const ThickenedTable& table, const ThickenedPath& path) {
    const auto n = table.arrangement().dim();
    std::string out = "time,label" + axis_header("x", n) + axis_header("vin", n) + axis_header("vout", n) + "\n";
    for (const auto& e : path.events) {
        std::string row = fmt(e.time) + "," + table.arrangement()[e.label].name();
        append_vec(row, e.point);
        append_vec(row, e.v_in);
        append_vec(row, e.v_out);
        out += row + "\n";
    }
    std::string row = fmt(path.end_time) + ",end:" + to_string(path.termination);
    append_vec(row, path.end);
    append_vec(row, path.end_velocity);
    append_vec(row, path.end_velocity);
    out += row + "\n";
    return out;
}

std::string rfamily_csv(const std::vector<RFamilyEntry>& family) {
    std::string out = "r,status,deviation,itinerary_match,length,error\n";
    for (const auto& e : family) {
        std::string row = fmt(e.r) + ",";
        row += e.result ? to_string(e.result->classification) : "SolverFailure";
        row += "," + fmt(e.deviation) + "," + (e.itinerary_match ? "1" : "0") + ",";
        row += e.result ? fmt(e.result->value) : "nan";
        std::string err = e.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        out += row + "," + err + "\n";
    }
    return out;
}

std::string rfamily_gnuplot(const std::string& csv_name) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set logscale xy\n"
      << "set xlabel 'r'\nset ylabel 'max vertex deviation'\n"
      << "plot '" << csv_name << "' every ::1 using 1:3 with linespoints title 'deviation', x title 'slope 1'\n";
    return s.str();
}

std::string realizability_csv(const Arrangement& arr, const std::vector<RealizabilityRow>& rows) {
    std::string out = "length,itinerary,status,filtered,samples,A,B,chain\n";
    auto join = [](const Vector& v) {
        std::string s;
        for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v(i));
        return s;
    };
    for (const auto& r : rows) {
        std::string labels;
        for (const auto& name : r.itinerary.names(arr)) labels += (labels.empty() ? "" : " ") + name;
        std::string row = std::to_string(r.itinerary.size()) + "," + labels + "," +
                          (r.status == Realizability::Realized ? "realized" : "not_found") + "," +
                          (r.filtered ? "1" : "0") + "," + std::to_string(r.samples) + ",";
        if (r.status == Realizability::Realized) {
            row += join(*r.witness_A) + "," + join(*r.witness_B) + ",";
            for (std::size_t i = 0; i < r.witness_chain.size(); ++i)
                row += (i ? " | " : "") + join(r.witness_chain[i]);
        } else {
            row += ",,";
        }
        out += row + "\n";
    }
    return out;
}

std::string slice_csv(const ScatterSlice& slice) {
    std::string out = "phi,psi,branch,arg1,arg2,arg3,momentum_residual,energy_residual\n";
    for (const auto& p : slice.points) {
        out += fmt(p.phi) + "," + fmt(p.psi) + "," + std::to_string(p.branch) + "," + fmt(p.arg_plus[0]) + "," +
               fmt(p.arg_plus[1]) + "," + fmt(p.arg_plus[2]) + "," + fmt(p.momentum_residual) + "," +
               fmt(p.energy_residual) + "\n";
    }
    return out;
}

std::string slice_gnuplot(const std::string& csv_name) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key off\n"
      << "set xlabel 'arg v1+'\nset ylabel 'arg v2+'\nset zlabel 'arg v3+'\n"
      << "splot '" << csv_name << "' every ::1 using 4:5:6 with points pt 7 ps 0.3\n";
    return s.str();
}

std::string conservation_csv(const ConservationReport& report) {
    std::size_t nl = report.edges.empty() ? 0 : static_cast<std::size_t>(report.edges.front().linear.size());
    std::size_t ng = report.edges.empty() ? 0 : report.edges.front().J.size();
    std::string out = "edge" + axis_header("p", nl) + axis_header("J", ng) + "\n";
    for (const auto& e : report.edges) {
        std::string row = std::to_string(e.edge);
        append_vec(row, e.linear);
        for (double j : e.J) row += "," + fmt(j);
        out += row + "\n";
    }
    return out;
}

}  // namespace linbill
