#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace klmi {

enum class Metric { euclidean, manhattan, chebyshev, hamming };

/// Parses the lowercase metric identifier. Throws UsageError on anything else.
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric) noexcept;

using PointSet = std::vector<std::vector<double>>;

/// Symmetric n x n matrix of nonnegative finite distances with a zero
/// diagonal. Immutable once built; obtain one from pairwise_distances() or
/// validate_matrix(). The triangle inequality is not required.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {entries_.data() + i * n_, n_};
    }

    /// Every entry multiplied by alpha (> 0).
    DistanceMatrix scaled(double alpha) const;

    /// Matrix of the records taken in the given order: result(a, b) = (*this)(order[a], order[b]).
    DistanceMatrix reordered(std::span<const std::size_t> order) const;

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    DistanceMatrix(std::size_t n, std::vector<double> entries)
        : n_(n), entries_(std::move(entries)) {}

    friend DistanceMatrix pairwise_distances(const PointSet&, Metric, unsigned);
    friend DistanceMatrix validate_matrix(const std::vector<std::vector<double>>&);

    std::size_t n_ = 0;
    std::vector<double> entries_;
};

/// Full matrix of pairwise distances. Hamming counts coordinates that differ.
/// Rows are computed in parallel over `threads` workers (0 = all cores); the
/// result does not depend on the thread count.
DistanceMatrix pairwise_distances(const PointSet& points, Metric metric, unsigned threads = 1);

/// Accepts a square matrix with an exactly zero diagonal, nonnegative finite
/// entries and symmetry within 1e-9 relative tolerance; the accepted matrix is
/// symmetrized by averaging. Throws ShapeError for non-square input and
/// ValidationError naming the offending indices otherwise.
DistanceMatrix validate_matrix(const std::vector<std::vector<double>>& entries);

/// Resolution of the h-point ball around one seed.
///
/// `inner` holds the seed and every point strictly closer than `radius`;
/// `boundary` holds the points at the radius, each counted with
/// `boundary_weight` = (h - |inner|) / |boundary|, so that
/// |inner| + boundary_weight * |boundary| = h. For h = 1 the ball is the seed
/// alone: boundary is empty, boundary_weight is 1 and radius is 0.
struct NeighborBall {
    std::size_t seed = 0;
    std::size_t h = 0;
    std::vector<std::size_t> inner;
    std::vector<std::size_t> boundary;
    double boundary_weight = 1.0;
    double radius = 0.0;
};

/// Positions [begin, end) of the boundary group inside a seed's sorted list of
/// other points; positions before `begin` are strictly inside the ball.
struct BoundaryGroup {
    std::size_t begin = 0;
    std::size_t end = 0;
    double radius = 0.0;

    std::size_t inner_count() const noexcept { return begin + 1; }  // plus the seed
    std::size_t tie_count() const noexcept { return end - begin; }
};

/// Finds the boundary group for ball occupancy h in an ascending list of the
/// distances from a seed to the other n - 1 points. Two adjacent distances
/// a <= b belong to the same group when b - a <= tie_epsilon * b; with
/// epsilon 0 that is exact equality.
BoundaryGroup find_boundary(std::span<const double> sorted_others, std::size_t h,
                            double tie_epsilon);

/// The h-point ball of one seed, sorting that seed's distance row.
/// Throws DomainError unless 1 <= h <= n.
NeighborBall neighbor_ball(const DistanceMatrix& dm, std::size_t seed, std::size_t h,
                           double tie_epsilon = 0.0);

/// Per-seed distance ordering of all other points, computed once so balls of
/// any occupancy can be resolved without re-sorting. Ties in distance are
/// ordered by index.
class NeighborIndex {
public:
    explicit NeighborIndex(const DistanceMatrix& dm, double tie_epsilon = 0.0,
                           unsigned threads = 1);

    std::size_t size() const noexcept { return n_; }
    double tie_epsilon() const noexcept { return tie_epsilon_; }

    /// Other points of `seed`, nearest first.
    std::span<const std::uint32_t> order(std::size_t seed) const noexcept {
        return {order_.data() + seed * stride(), stride()};
    }
    std::span<const double> sorted_distances(std::size_t seed) const noexcept {
        return {sorted_.data() + seed * stride(), stride()};
    }

    /// Throws DomainError unless 1 <= h <= n.
    BoundaryGroup boundary(std::size_t seed, std::size_t h) const;
    NeighborBall ball(std::size_t seed, std::size_t h) const;

    /// True when some seed has two other points in one tie group.
    bool has_draws() const noexcept;

private:
    std::size_t stride() const noexcept { return n_ == 0 ? 0 : n_ - 1; }

    std::size_t n_ = 0;
    double tie_epsilon_ = 0.0;
    std::vector<std::uint32_t> order_;
    std::vector<double> sorted_;
};

}  // namespace klmi
