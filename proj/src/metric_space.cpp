#include "klmi/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "klmi/error.hpp"
#include "klmi/parallel.hpp"

namespace klmi {

Metric parse_metric(std::string_view name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "manhattan") return Metric::manhattan;
    if (name == "chebyshev") return Metric::chebyshev;
    if (name == "hamming") return Metric::hamming;
    throw UsageError("unknown metric '" + std::string(name) +
                     "' (expected euclidean, manhattan, chebyshev or hamming)");
}

std::string_view metric_name(Metric metric) noexcept {
    switch (metric) {
        case Metric::euclidean: return "euclidean";
        case Metric::manhattan: return "manhattan";
        case Metric::chebyshev: return "chebyshev";
        case Metric::hamming: return "hamming";
    }
    return "unknown";
}

DistanceMatrix DistanceMatrix::scaled(double alpha) const {
    if (!(alpha > 0) || !std::isfinite(alpha))
        throw DomainError("distance scale factor must be positive and finite");
    std::vector<double> e(entries_);
    for (double& v : e) v *= alpha;
    return {n_, std::move(e)};
}

DistanceMatrix DistanceMatrix::reordered(std::span<const std::size_t> order) const {
    if (order.size() != n_) throw ShapeError("reordered: order length differs from matrix size");
    std::vector<double> e(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b) e[a * n_ + b] = (*this)(order[a], order[b]);
    return {n_, std::move(e)};
}

namespace {

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    double acc = 0.0;
    switch (metric) {
        case Metric::euclidean:
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double d = a[k] - b[k];
                acc += d * d;
            }
            return std::sqrt(acc);
        case Metric::manhattan:
            for (std::size_t k = 0; k < a.size(); ++k) acc += std::fabs(a[k] - b[k]);
            return acc;
        case Metric::chebyshev:
            for (std::size_t k = 0; k < a.size(); ++k) acc = std::max(acc, std::fabs(a[k] - b[k]));
            return acc;
        case Metric::hamming:
            for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] != b[k] ? 1.0 : 0.0;
            return acc;
    }
    return acc;
}

bool same_group(double lower, double upper, double eps) { return upper - lower <= eps * upper; }

}  // namespace

DistanceMatrix pairwise_distances(const PointSet& points, Metric metric, unsigned threads) {
    if (points.empty()) throw DomainError("pairwise_distances: no points");
    const std::size_t d = points.front().size();
    if (d == 0) throw ShapeError("pairwise_distances: points have no coordinates");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d)
            throw ShapeError("pairwise_distances: point " + std::to_string(i) + " has " +
                             std::to_string(points[i].size()) + " coordinates, expected " +
                             std::to_string(d));
        for (double v : points[i])
            if (!std::isfinite(v))
                throw DomainError("pairwise_distances: non-finite coordinate in point " +
                                  std::to_string(i));
    }

    const std::size_t n = points.size();
    std::vector<double> e(n * n, 0.0);
    // Row i fills its upper triangle; the mirror is written afterwards so the
    // matrix is exactly symmetric.
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) e[i * n + j] = distance(points[i], points[j], metric);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e[j * n + i] = e[i * n + j];
    return {n, std::move(e)};
}

DistanceMatrix validate_matrix(const std::vector<std::vector<double>>& entries) {
    const std::size_t n = entries.size();
    if (n == 0) throw DomainError("distance matrix is empty");
    for (std::size_t i = 0; i < n; ++i)
        if (entries[i].size() != n)
            throw ShapeError("distance matrix row " + std::to_string(i) + " has " +
                             std::to_string(entries[i].size()) + " entries, expected " +
                             std::to_string(n));

    constexpr double kSymmetryTolerance = 1e-9;
    std::vector<double> e(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = entries[i][j];
            if (!std::isfinite(v)) throw ValidationError("non-finite distance", i, j);
            if (v < 0) throw ValidationError("negative distance", i, j);
            if (i == j && v != 0) throw ValidationError("nonzero diagonal", i, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = entries[i][j];
            const double b = entries[j][i];
            if (std::fabs(a - b) > kSymmetryTolerance * std::max(a, b))
                throw ValidationError("asymmetric distances", i, j);
            const double mean = a == b ? a : 0.5 * (a + b);
            e[i * n + j] = mean;
            e[j * n + i] = mean;
        }
        e[i * n + i] = 0.0;
    }
    return {n, std::move(e)};
}

BoundaryGroup find_boundary(std::span<const double> sorted, std::size_t h, double eps) {
    if (h == 0 || h > sorted.size() + 1)
        throw DomainError("ball occupancy h=" + std::to_string(h) + " outside [1, " +
                          std::to_string(sorted.size() + 1) + "]");
    if (h == 1) return {};
    const std::size_t pos = h - 2;  // the (h-1)-th nearest other point
    std::size_t begin = pos;
    while (begin > 0 && same_group(sorted[begin - 1], sorted[begin], eps)) --begin;
    std::size_t end = pos + 1;
    while (end < sorted.size() && same_group(sorted[end - 1], sorted[end], eps)) ++end;
    return {begin, end, sorted[begin]};
}

namespace {

std::vector<std::uint32_t> sorted_others(std::span<const double> row, std::size_t seed) {
    std::vector<std::uint32_t> idx;
    idx.reserve(row.size() - 1);
    for (std::size_t j = 0; j < row.size(); ++j)
        if (j != seed) idx.push_back(static_cast<std::uint32_t>(j));
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return row[a] < row[b] || (row[a] == row[b] && a < b);
    });
    return idx;
}

NeighborBall make_ball(std::size_t seed, std::size_t h, const BoundaryGroup& g,
                       std::span<const std::uint32_t> order) {
    NeighborBall ball;
    ball.seed = seed;
    ball.h = h;
    ball.radius = g.radius;
    ball.inner.reserve(g.inner_count());
    ball.inner.push_back(seed);
    for (std::size_t k = 0; k < g.begin; ++k) ball.inner.push_back(order[k]);
    for (std::size_t k = g.begin; k < g.end; ++k) ball.boundary.push_back(order[k]);
    ball.boundary_weight =
        g.tie_count() == 0 ? 1.0
                           : static_cast<double>(h - g.inner_count()) /
                                 static_cast<double>(g.tie_count());
    return ball;
}

}  // namespace

NeighborBall neighbor_ball(const DistanceMatrix& dm, std::size_t seed, std::size_t h,
                           double tie_epsilon) {
    if (seed >= dm.size()) throw DomainError("seed index out of range");
    const auto row = dm.row(seed);
    const auto order = sorted_others(row, seed);
    std::vector<double> dist(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) dist[k] = row[order[k]];
    return make_ball(seed, h, find_boundary(dist, h, tie_epsilon), order);
}

NeighborIndex::NeighborIndex(const DistanceMatrix& dm, double tie_epsilon, unsigned threads)
    : n_(dm.size()), tie_epsilon_(tie_epsilon) {
    if (!(tie_epsilon >= 0) || !std::isfinite(tie_epsilon))
        throw DomainError("tie epsilon must be finite and >= 0");
    if (n_ > std::numeric_limits<std::uint32_t>::max())
        throw DomainError("too many points for a neighbor index");
    order_.resize(n_ * stride());
    sorted_.resize(n_ * stride());
    parallel_for(n_, threads, [&](std::size_t seed) {
        const auto row = dm.row(seed);
        const auto idx = sorted_others(row, seed);
        std::copy(idx.begin(), idx.end(), order_.begin() + seed * stride());
        for (std::size_t k = 0; k < idx.size(); ++k) sorted_[seed * stride() + k] = row[idx[k]];
    });
}

BoundaryGroup NeighborIndex::boundary(std::size_t seed, std::size_t h) const {
    if (seed >= n_) throw DomainError("seed index out of range");
    return find_boundary(sorted_distances(seed), h, tie_epsilon_);
}

NeighborBall NeighborIndex::ball(std::size_t seed, std::size_t h) const {
    return make_ball(seed, h, boundary(seed, h), order(seed));
}

bool NeighborIndex::has_draws() const noexcept {
    for (std::size_t seed = 0; seed < n_; ++seed) {
        const auto d = sorted_distances(seed);
        for (std::size_t k = 1; k < d.size(); ++k)
            if (same_group(d[k - 1], d[k], tie_epsilon_)) return true;
    }
    return false;
}

}  // namespace klmi
