#pragma once

// Reference computations used only by the tests. They follow the textbook
// definitions directly and share no code with the library's neighbor index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "klmi/estimator.hpp"
#include "klmi/metric_space.hpp"

namespace klmi::testing {

struct BruteBall {
    std::size_t inner = 0;     // c, seed included
    std::size_t boundary = 0;  // b
    double weight = 1.0;       // (h - c) / b
    double same_label = 0.0;   // h_y
};

// Expands the ball radius over the distinct distances from the seed until at
// least h points (seed included) are covered.
inline BruteBall brute_ball(const DistanceMatrix& dm, std::span<const ClassId> labels,
                            std::size_t seed, std::size_t h) {
    BruteBall out;
    if (h == 1) {
        out.inner = 1;
        out.same_label = 1.0;
        return out;
    }
    std::set<double> radii;
    for (std::size_t j = 0; j < dm.size(); ++j)
        if (j != seed) radii.insert(dm(seed, j));
    for (double r : radii) {
        std::size_t closer = 1, at = 0, closer_same = 1, at_same = 0;
        for (std::size_t j = 0; j < dm.size(); ++j) {
            if (j == seed) continue;
            const bool same = labels[j] == labels[seed];
            if (dm(seed, j) < r) {
                ++closer;
                closer_same += same;
            } else if (dm(seed, j) == r) {
                ++at;
                at_same += same;
            }
        }
        if (closer + at >= h) {
            out.inner = closer;
            out.boundary = at;
            out.weight = static_cast<double>(h - closer) / static_cast<double>(at);
            out.same_label = static_cast<double>(closer_same) +
                             static_cast<double>(h - closer) * static_cast<double>(at_same) /
                                 static_cast<double>(at);
            return out;
        }
    }
    return out;
}

// Integer lattice points: manhattan distances between them are integers, so
// draws are everywhere.
inline PointSet lattice_points(std::size_t side, std::size_t dims) {
    PointSet pts;
    std::vector<std::size_t> idx(dims, 0);
    for (;;) {
        std::vector<double> p(dims);
        for (std::size_t k = 0; k < dims; ++k) p[k] = static_cast<double>(idx[k]);
        pts.push_back(p);
        std::size_t k = 0;
        while (k < dims && ++idx[k] == side) idx[k++] = 0;
        if (k == dims) break;
    }
    return pts;
}

inline PointSet random_points(std::size_t n, std::size_t d, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointSet pts(n, std::vector<double>(d));
    for (auto& p : pts)
        for (double& v : p) v = u(gen);
    return pts;
}

inline std::vector<std::int64_t> random_labels(std::size_t n, std::size_t classes, std::mt19937_64& gen) {
    std::uniform_int_distribution<std::int64_t> u(0, static_cast<std::int64_t>(classes) - 1);
    std::vector<std::int64_t> labels(n);
    for (auto& l : labels) l = u(gen);
    return labels;
}

}  // namespace klmi::testing
