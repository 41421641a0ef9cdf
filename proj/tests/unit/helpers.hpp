#pragma once

#include "linbill/arrangement.hpp"

#include <cmath>
#include <initializer_list>
#include <memory>
#include <numbers>
#include <random>
#include <string>

namespace testutil {

using linbill::Arrangement;
using linbill::Subspace;
using linbill::Vector;

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

/// x-axis in R^2.
inline std::shared_ptr<const Arrangement> mirror() {
    return std::make_shared<const Arrangement>(2, std::vector<Subspace>{Subspace("L1", 2, {vec({1, 0})})});
}

/// The origin in R^2.
inline std::shared_ptr<const Arrangement> origin2() {
    return std::make_shared<const Arrangement>(2, std::vector<Subspace>{Subspace("O", 2, {})});
}

/// Lines through 0 in R^2 at the given angles from the x-axis.
inline std::shared_ptr<const Arrangement> lines(std::initializer_list<double> angles) {
    std::vector<Subspace> subs;
    int i = 1;
    for (double a : angles) subs.emplace_back("L" + std::to_string(i++), 2, std::vector<Vector>{vec({std::cos(a), std::sin(a)})});
    return std::make_shared<const Arrangement>(2, std::move(subs));
}

/// Random subspaces of a given rank in R^n, in general position.
inline std::shared_ptr<const Arrangement> random_arrangement(std::size_t n, std::size_t rank, std::size_t count,
                                                             std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<Subspace> subs;
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<Vector> rows;
        for (std::size_t r = 0; r < rank; ++r) {
            Vector v(static_cast<Eigen::Index>(n));
            for (auto& x : v) x = g(rng);
            rows.push_back(v);
        }
        subs.emplace_back("R" + std::to_string(s + 1), n, rows);
    }
    return std::make_shared<const Arrangement>(n, std::move(subs));
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g;
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = scale * g(rng);
    return v;
}

inline std::string fixture(const std::string& name) { return std::string(LINBILL_FIXTURES) + "/" + name; }

}  // namespace testutil
