#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "klmi/metric_space.hpp"

namespace klmi {

using ClassId = std::uint32_t;

/// Which count sits inside the logarithm of the bias sum: the number of
/// labels n_x (the default, which makes the bias the exact expectation of the
/// naive estimate under independence) or the per-class count n_c.
enum class LogVariant { nx, nc };

LogVariant parse_log_variant(std::string_view name);
std::string_view log_variant_name(LogVariant variant) noexcept;

using Geometry = std::variant<PointSet, DistanceMatrix>;

/// n labelled outcomes. Labels are dense class ids 0..n_x-1 numbered in order
/// of first appearance; `label_names[c]` is the original token of class c.
struct LabeledDataset {
    std::vector<ClassId> labels;
    std::vector<std::size_t> class_counts;
    std::vector<std::string> label_names;
    Geometry geometry;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t num_classes() const noexcept { return class_counts.size(); }
};

/// Builds a dataset from opaque label tokens. Throws ShapeError when the
/// number of labels differs from the geometry size, DomainError when empty.
LabeledDataset make_dataset(std::span<const std::string> tokens, Geometry geometry);

/// Same, from arbitrary integer labels (renumbered densely; names are the decimal values).
LabeledDataset make_dataset(std::span<const std::int64_t> labels, Geometry geometry);

struct EstimatorOptions {
    Metric metric = Metric::euclidean;  ///< used when the geometry is a point set
    double tie_epsilon = 0.0;
    std::optional<std::size_t> nx_override;  ///< declared alphabet size, >= classes present
    LogVariant log_variant = LogVariant::nx;
    unsigned threads = 1;  ///< 0 = all cores
};

/// The distance matrix of a dataset: computed for point sets, returned as-is otherwise.
DistanceMatrix resolve_distances(const LabeledDataset& ds, Metric metric, unsigned threads = 1);

/// Per-seed same-label count h_y(i) for one ball occupancy h.
struct SameLabelCounts {
    std::size_t h = 0;
    std::vector<double> values;
};

SameLabelCounts same_label_counts(const LabeledDataset& ds, std::size_t h,
                                  const EstimatorOptions& options = {});

/// Core counting routine on a prebuilt neighbor index. h_y(i) is the number
/// of strictly-inside points sharing the seed's label (seed included) plus
/// the boundary weight times the number of same-label boundary points.
SameLabelCounts same_label_counts(const NeighborIndex& index, std::span<const ClassId> labels,
                                  std::size_t h, unsigned threads = 1);

/// Naive estimate in bits: mean over seeds of log2(n_x h_y(i) / h).
/// Terms are accumulated in sorted order, so the result does not depend on
/// the order of the records.
double naive_mi(const SameLabelCounts& counts, std::size_t n_x);

/// Distribution of h_y under independence of labels and geometry, and the
/// bias it induces in the naive estimate.
struct BiasTable {
    std::size_t h = 0;
    std::size_t n_x = 0;
    std::vector<double> p_r;  ///< p_r[r - 1] = P(h_y = r), r = 1..h
    double i_b = 0.0;         ///< bits
};

/// p_r = sum_c (n_c / n) Hypergeometric(n-1, n_c-1, h-1) evaluated at r - 1.
/// Uses `nx_override` and `log_variant` from the options; other fields are ignored.
BiasTable bias_table(std::span<const std::size_t> class_counts, std::size_t h,
                     const EstimatorOptions& options = {});

struct MiEstimate {
    std::size_t n = 0;
    std::size_t n_x = 0;
    std::vector<std::size_t> class_counts;
    std::size_t h = 0;
    double i0 = 0.0;  ///< naive estimate, bits
    double ib = 0.0;  ///< bias, bits
    double ie = 0.0;  ///< i0 - ib, bits
};

MiEstimate unbiased_mi(const LabeledDataset& ds, std::size_t h,
                       const EstimatorOptions& options = {});

MiEstimate unbiased_mi(const NeighborIndex& index, std::span<const ClassId> labels,
                       std::span<const std::size_t> class_counts, std::size_t h,
                       const EstimatorOptions& options = {});

struct SweepResult {
    std::vector<MiEstimate> estimates;  ///< one per h, ascending
    std::size_t selected = 0;           ///< index of the largest ie, smallest h on ties

    const MiEstimate& best() const { return estimates.at(selected); }
};

/// Evaluates every h in [h_min, h_max] and selects the h maximising ie.
SweepResult sweep_h(const LabeledDataset& ds, std::size_t h_min, std::size_t h_max,
                    const EstimatorOptions& options = {});

SweepResult sweep_h(const NeighborIndex& index, std::span<const ClassId> labels,
                    std::span<const std::size_t> class_counts, std::size_t h_min,
                    std::size_t h_max, const EstimatorOptions& options = {});

}  // namespace klmi
