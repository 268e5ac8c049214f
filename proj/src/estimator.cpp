#include "klmi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "klmi/error.hpp"
#include "klmi/hypergeom.hpp"
#include "klmi/parallel.hpp"

namespace klmi {

LogVariant parse_log_variant(std::string_view name) {
    if (name == "nx") return LogVariant::nx;
    if (name == "nc") return LogVariant::nc;
    throw UsageError("unknown log variant '" + std::string(name) + "' (expected nx or nc)");
}

std::string_view log_variant_name(LogVariant variant) noexcept {
    return variant == LogVariant::nx ? "nx" : "nc";
}

namespace {

std::size_t geometry_size(const Geometry& g) {
    return std::visit([](const auto& v) -> std::size_t { return v.size(); }, g);
}

template <typename Key, typename Name>
LabeledDataset densify(std::span<const Key> raw, Geometry geometry, Name&& name_of) {
    if (raw.empty()) throw DomainError("dataset has no records");
    if (raw.size() != geometry_size(geometry))
        throw ShapeError("dataset has " + std::to_string(raw.size()) + " labels but geometry of size " +
                         std::to_string(geometry_size(geometry)));
    LabeledDataset ds;
    ds.labels.reserve(raw.size());
    std::unordered_map<Key, ClassId> ids;
    for (const auto& key : raw) {
        auto [it, inserted] = ids.try_emplace(key, static_cast<ClassId>(ds.class_counts.size()));
        if (inserted) {
            ds.class_counts.push_back(0);
            ds.label_names.push_back(name_of(key));
        }
        ds.labels.push_back(it->second);
        ++ds.class_counts[it->second];
    }
    ds.geometry = std::move(geometry);
    return ds;
}

// Shared by the naive estimate and the bias sum so that identical counts give
// bit-identical terms.
double log_term(double n_x, double count, double h) { return std::log2(n_x * count / h); }

void check_h(std::size_t h, std::size_t n) {
    if (h < 1 || h > n)
        throw DomainError("h=" + std::to_string(h) + " outside [1, " + std::to_string(n) + "]");
}

std::size_t effective_nx(std::size_t present, const EstimatorOptions& options) {
    if (!options.nx_override) return present;
    if (*options.nx_override < present)
        throw DomainError("nx override " + std::to_string(*options.nx_override) +
                          " is smaller than the " + std::to_string(present) +
                          " classes present");
    return *options.nx_override;
}

void check_counts(std::span<const ClassId> labels, std::span<const std::size_t> class_counts) {
    std::vector<std::size_t> seen(class_counts.size(), 0);
    for (ClassId c : labels) {
        if (c >= class_counts.size()) throw DomainError("label id outside the class table");
        ++seen[c];
    }
    if (!std::equal(seen.begin(), seen.end(), class_counts.begin()))
        throw DomainError("class counts do not match the labels");
    for (std::size_t c : class_counts)
        if (c == 0) throw DomainError("class counts must all be >= 1");
}

}  // namespace

LabeledDataset make_dataset(std::span<const std::string> tokens, Geometry geometry) {
    return densify(tokens, std::move(geometry), [](const std::string& s) { return s; });
}

LabeledDataset make_dataset(std::span<const std::int64_t> labels, Geometry geometry) {
    return densify(labels, std::move(geometry), [](std::int64_t v) { return std::to_string(v); });
}

DistanceMatrix resolve_distances(const LabeledDataset& ds, Metric metric, unsigned threads) {
    if (const auto* dm = std::get_if<DistanceMatrix>(&ds.geometry)) return *dm;
    return pairwise_distances(std::get<PointSet>(ds.geometry), metric, threads);
}

SameLabelCounts same_label_counts(const NeighborIndex& index, std::span<const ClassId> labels,
                                  std::size_t h, unsigned threads) {
    const std::size_t n = index.size();
    if (labels.size() != n) throw ShapeError("label count differs from neighbor index size");
    check_h(h, n);
    SameLabelCounts out{h, std::vector<double>(n)};
    parallel_for(n, threads, [&](std::size_t seed) {
        const BoundaryGroup g = index.boundary(seed, h);
        const auto order = index.order(seed);
        const ClassId own = labels[seed];
        std::size_t inside = 1;
        for (std::size_t k = 0; k < g.begin; ++k) inside += labels[order[k]] == own;
        std::size_t on_boundary = 0;
        for (std::size_t k = g.begin; k < g.end; ++k) on_boundary += labels[order[k]] == own;
        double value = static_cast<double>(inside);
        if (on_boundary != 0) {
            // (h - c) * matches / b in integers first, one rounding at the division.
            value += static_cast<double>((h - g.inner_count()) * on_boundary) /
                     static_cast<double>(g.tie_count());
        }
        out.values[seed] = value;
    });
    return out;
}

SameLabelCounts same_label_counts(const LabeledDataset& ds, std::size_t h,
                                  const EstimatorOptions& options) {
    check_h(h, ds.size());
    const NeighborIndex index(resolve_distances(ds, options.metric, options.threads),
                              options.tie_epsilon, options.threads);
    return same_label_counts(index, ds.labels, h, options.threads);
}

double naive_mi(const SameLabelCounts& counts, std::size_t n_x) {
    if (counts.values.empty()) throw DomainError("naive_mi: no seeds");
    if (n_x == 0) throw DomainError("naive_mi: n_x must be >= 1");
    std::vector<double> sorted(counts.values);
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() >= 1.0))
        throw std::logic_error("naive_mi: same-label count below 1 violates the seed invariant");

    const auto n = static_cast<double>(sorted.size());
    const auto nx = static_cast<double>(n_x);
    const auto h = static_cast<double>(counts.h);
    double total = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        total += (static_cast<double>(j - i) / n) * log_term(nx, sorted[i], h);
        i = j;
    }
    return total;
}

BiasTable bias_table(std::span<const std::size_t> class_counts, std::size_t h,
                     const EstimatorOptions& options) {
    if (class_counts.empty()) throw DomainError("bias_table: no classes");
    for (std::size_t c : class_counts)
        if (c == 0) throw DomainError("bias_table: class counts must all be >= 1");
    const std::size_t n = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    check_h(h, n);

    // Canonical class order keeps the sums independent of how classes are numbered.
    std::vector<std::size_t> counts(class_counts.begin(), class_counts.end());
    std::sort(counts.begin(), counts.end());

    BiasTable table;
    table.h = h;
    table.n_x = effective_nx(counts.size(), options);
    table.p_r.assign(h, 0.0);

    const auto dn = static_cast<double>(n);
    const auto dh = static_cast<double>(h);
    const auto nx = static_cast<double>(table.n_x);
    double nc_variant_bias = 0.0;
    for (std::size_t r = 1; r <= h; ++r) {
        double weighted = 0.0;
        for (std::size_t nc : counts) {
            const hypergeom::Params urn{n - 1, nc - 1, h - 1};
            const double u = hypergeom::pmf(urn, r - 1);
            if (u == 0.0) continue;
            const double mass = static_cast<double>(nc) * u;
            weighted += mass;
            if (options.log_variant == LogVariant::nc)
                nc_variant_bias += (mass / dn) * log_term(static_cast<double>(nc), double(r), dh);
        }
        table.p_r[r - 1] = weighted / dn;
    }

    if (options.log_variant == LogVariant::nc) {
        table.i_b = nc_variant_bias;
    } else {
        double ib = 0.0;
        for (std::size_t r = 1; r <= h; ++r)
            if (table.p_r[r - 1] != 0.0) ib += table.p_r[r - 1] * log_term(nx, double(r), dh);
        table.i_b = ib;
    }
    return table;
}

MiEstimate unbiased_mi(const NeighborIndex& index, std::span<const ClassId> labels,
                       std::span<const std::size_t> class_counts, std::size_t h,
                       const EstimatorOptions& options) {
    check_counts(labels, class_counts);
    MiEstimate est;
    est.n = labels.size();
    est.class_counts.assign(class_counts.begin(), class_counts.end());
    est.n_x = effective_nx(class_counts.size(), options);
    est.h = h;
    est.i0 = naive_mi(same_label_counts(index, labels, h, options.threads), est.n_x);
    est.ib = bias_table(class_counts, h, options).i_b;
    est.ie = est.i0 - est.ib;
    return est;
}

MiEstimate unbiased_mi(const LabeledDataset& ds, std::size_t h, const EstimatorOptions& options) {
    check_h(h, ds.size());
    const NeighborIndex index(resolve_distances(ds, options.metric, options.threads),
                              options.tie_epsilon, options.threads);
    return unbiased_mi(index, ds.labels, ds.class_counts, h, options);
}

SweepResult sweep_h(const NeighborIndex& index, std::span<const ClassId> labels,
                    std::span<const std::size_t> class_counts, std::size_t h_min,
                    std::size_t h_max, const EstimatorOptions& options) {
    if (h_min < 1 || h_min > h_max)
        throw DomainError("empty h range [" + std::to_string(h_min) + ", " +
                          std::to_string(h_max) + "]");
    check_h(h_max, index.size());
    check_counts(labels, class_counts);

    SweepResult result;
    result.estimates.resize(h_max - h_min + 1);
    EstimatorOptions inner = options;
    inner.threads = 1;
    parallel_for(result.estimates.size(), options.threads, [&](std::size_t k) {
        result.estimates[k] = unbiased_mi(index, labels, class_counts, h_min + k, inner);
    });
    for (std::size_t k = 1; k < result.estimates.size(); ++k)
        if (result.estimates[k].ie > result.estimates[result.selected].ie) result.selected = k;
    return result;
}

SweepResult sweep_h(const LabeledDataset& ds, std::size_t h_min, std::size_t h_max,
                    const EstimatorOptions& options) {
    if (h_min < 1 || h_min > h_max)
        throw DomainError("empty h range [" + std::to_string(h_min) + ", " +
                          std::to_string(h_max) + "]");
    check_h(h_max, ds.size());
    const NeighborIndex index(resolve_distances(ds, options.metric, options.threads),
                              options.tie_epsilon, options.threads);
    return sweep_h(index, ds.labels, ds.class_counts, h_min, h_max, options);
}

}  // namespace klmi
