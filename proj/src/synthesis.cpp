#include "klmi/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "klmi/error.hpp"
#include "klmi/parallel.hpp"

namespace klmi::synthesis {

Family parse_family(std::string_view name) {
    if (name == "independent-uniform") return Family::independent_uniform;
    if (name == "gaussian-clusters") return Family::gaussian_clusters;
    if (name == "label-permutation") return Family::label_permutation;
    throw UsageError("unknown generator family '" + std::string(name) + "'");
}

std::string_view family_name(Family family) noexcept {
    switch (family) {
        case Family::independent_uniform: return "independent-uniform";
        case Family::gaussian_clusters: return "gaussian-clusters";
        case Family::label_permutation: return "label-permutation";
    }
    return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x >= threshold) return x % bound;
    }
}

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const GeneratorSpec& spec) {
    if (spec.n == 0) throw DomainError("generator: n must be >= 1");
    if (spec.class_probs.empty()) throw DomainError("generator: no class probabilities");
    if (spec.d == 0) throw DomainError("generator: dimension must be >= 1");
    double total = 0.0;
    for (double p : spec.class_probs) {
        if (!(p > 0) || !std::isfinite(p))
            throw DomainError("generator: class probabilities must be positive");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw DomainError("generator: class probabilities must sum to 1");
    if (spec.family == Family::gaussian_clusters) {
        if (spec.class_means.size() != spec.class_probs.size())
            throw DomainError("generator: need one mean vector per class");
        for (const auto& m : spec.class_means)
            if (m.size() != spec.d) throw DomainError("generator: mean vector dimension mismatch");
        if (!(spec.spread > 0) || !std::isfinite(spec.spread))
            throw DomainError("generator: spread must be positive");
    }
}

namespace {

std::vector<std::int64_t> multinomial_labels(const std::vector<double>& probs, std::size_t n,
                                             Rng& rng) {
    std::vector<double> cumulative(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cumulative.begin());
    std::vector<std::int64_t> labels(n);
    for (auto& label : labels) {
        const double u = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        label = it - cumulative.begin();
    }
    return labels;
}

std::vector<std::size_t> rounded_counts(const std::vector<double>& probs, std::size_t n) {
    std::vector<std::size_t> counts(probs.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < probs.size(); ++c) {
        const double exact = probs[c] * static_cast<double>(n);
        counts[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[remainders[k % remainders.size()].second];
    return counts;
}

PointSet uniform_points(std::size_t n, std::size_t d, Rng& rng) {
    PointSet points(n, std::vector<double>(d));
    for (auto& p : points)
        for (double& v : p) v = rng.uniform();
    return points;
}

}  // namespace

LabeledDataset generate(const GeneratorSpec& spec) {
    validate(spec);
    Rng rng(spec.rng_seed);
    switch (spec.family) {
        case Family::independent_uniform: {
            auto labels = multinomial_labels(spec.class_probs, spec.n, rng);
            auto points = uniform_points(spec.n, spec.d, rng);
            return make_dataset(std::span<const std::int64_t>(labels), std::move(points));
        }
        case Family::gaussian_clusters: {
            auto labels = multinomial_labels(spec.class_probs, spec.n, rng);
            PointSet points(spec.n, std::vector<double>(spec.d));
            for (std::size_t i = 0; i < spec.n; ++i) {
                const auto& mean = spec.class_means[static_cast<std::size_t>(labels[i])];
                for (std::size_t k = 0; k < spec.d; ++k)
                    points[i][k] = mean[k] + spec.spread * rng.normal();
            }
            return make_dataset(std::span<const std::int64_t>(labels), std::move(points));
        }
        case Family::label_permutation: {
            Rng geometry_rng(spec.geometry_seed);
            auto points = uniform_points(spec.n, spec.d, geometry_rng);
            const auto counts = rounded_counts(spec.class_probs, spec.n);
            std::vector<std::int64_t> labels;
            labels.reserve(spec.n);
            for (std::size_t c = 0; c < counts.size(); ++c)
                labels.insert(labels.end(), counts[c], static_cast<std::int64_t>(c));
            rng.shuffle(std::span<std::int64_t>(labels));
            return make_dataset(std::span<const std::int64_t>(labels), std::move(points));
        }
    }
    throw DomainError("generator: unknown family");
}

namespace {

constexpr std::size_t kBlock = 64;

// Per-replicate outputs plus per-block histograms, reduced in a fixed order.
struct Accumulator {
    explicit Accumulator(std::size_t replicates, std::size_t h)
        : i0(replicates), ib(replicates), ie(replicates),
          histograms((replicates + kBlock - 1) / kBlock, std::vector<double>(h, 0.0)),
          analytic((replicates + kBlock - 1) / kBlock, std::vector<double>(h, 0.0)),
          counts((replicates + kBlock - 1) / kBlock) {}

    std::size_t blocks() const noexcept { return histograms.size(); }

    std::vector<double> i0, ib, ie;
    std::vector<std::vector<double>> histograms;
    std::vector<std::vector<double>> analytic;
    std::vector<std::vector<std::size_t>> counts;
};

void bin_counts(const SameLabelCounts& counts, std::vector<double>& histogram) {
    for (double v : counts.values) {
        const double lo = std::floor(v);
        const double frac = v - lo;
        const auto r = static_cast<std::size_t>(lo);
        histogram[r - 1] += 1.0 - frac;
        if (frac > 0) histogram[r] += frac;
    }
}

void add_counts(std::vector<std::size_t>& total, std::span<const std::size_t> counts) {
    if (total.size() < counts.size()) total.resize(counts.size(), 0);
    for (std::size_t c = 0; c < counts.size(); ++c) total[c] += counts[c];
}

// Dense ids follow first appearance, so tally by the generator's class index
// (kept as the label name) to make totals comparable across replicates.
void add_generator_counts(std::vector<std::size_t>& total, const LabeledDataset& ds,
                          std::size_t classes) {
    total.resize(classes, 0);
    for (std::size_t c = 0; c < ds.num_classes(); ++c)
        total[std::stoul(ds.label_names[c])] += ds.class_counts[c];
}

void mean_and_stderr(const std::vector<double>& xs, double& mean, double& stderr_out) {
    const auto r = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    mean = sum / r;
    if (xs.size() < 2) {
        stderr_out = 0.0;
        return;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    stderr_out = std::sqrt(ss / (r - 1.0) / r);
}

OracleReport finish(Accumulator& acc, std::size_t n, std::size_t h) {
    OracleReport report;
    const std::size_t replicates = acc.i0.size();
    report.replicates = replicates;
    report.n = n;
    report.h = h;
    report.empirical_p_r.assign(h, 0.0);
    report.analytic_p_r.assign(h, 0.0);
    for (std::size_t b = 0; b < acc.blocks(); ++b) {
        for (std::size_t r = 0; r < h; ++r) {
            report.empirical_p_r[r] += acc.histograms[b][r];
            report.analytic_p_r[r] += acc.analytic[b][r];
        }
        add_counts(report.class_counts, acc.counts[b]);
    }
    const double pooled = static_cast<double>(replicates) * static_cast<double>(n);
    double tv = 0.0;
    for (std::size_t r = 0; r < h; ++r) {
        report.empirical_p_r[r] /= pooled;
        report.analytic_p_r[r] /= static_cast<double>(replicates);
        tv += std::fabs(report.empirical_p_r[r] - report.analytic_p_r[r]);
    }
    report.tv_distance = 0.5 * tv;
    double unused = 0.0;
    mean_and_stderr(acc.i0, report.mean_i0, report.stderr_i0);
    mean_and_stderr(acc.ib, report.mean_ib, unused);
    mean_and_stderr(acc.ie, report.mean_ie, report.stderr_ie);
    return report;
}

}  // namespace

OracleReport permutation_bias_oracle(const DistanceMatrix& geometry,
                                     std::span<const std::size_t> class_counts, std::size_t h,
                                     std::size_t replicates, std::uint64_t rng_seed,
                                     const EstimatorOptions& options) {
    const std::size_t n = geometry.size();
    if (replicates == 0) throw DomainError("oracle: replicates must be >= 1");
    if (std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}) != n)
        throw DomainError("oracle: class counts must sum to the number of points");
    if (h < 1 || h > n)
        throw DomainError("h=" + std::to_string(h) + " outside [1, " + std::to_string(n) + "]");

    const BiasTable bias = bias_table(class_counts, h, options);
    const NeighborIndex index(geometry, options.tie_epsilon, options.threads);

    std::vector<ClassId> multiset;
    multiset.reserve(n);
    for (std::size_t c = 0; c < class_counts.size(); ++c)
        multiset.insert(multiset.end(), class_counts[c], static_cast<ClassId>(c));

    Accumulator acc(replicates, h);
    parallel_for(acc.blocks(), options.threads, [&](std::size_t b) {
        std::vector<ClassId> labels(multiset);
        auto& histogram = acc.histograms[b];
        const std::size_t end = std::min(replicates, (b + 1) * kBlock);
        for (std::size_t rep = b * kBlock; rep < end; ++rep) {
            std::copy(multiset.begin(), multiset.end(), labels.begin());
            Rng rng = Rng::stream(rng_seed, rep);
            rng.shuffle(std::span<ClassId>(labels));
            const auto counts = same_label_counts(index, labels, h, 1);
            bin_counts(counts, histogram);
            acc.i0[rep] = naive_mi(counts, bias.n_x);
            acc.ib[rep] = bias.i_b;
            acc.ie[rep] = acc.i0[rep] - bias.i_b;
            for (std::size_t r = 0; r < h; ++r) acc.analytic[b][r] += bias.p_r[r];
        }
    });

    OracleReport report = finish(acc, n, h);
    report.n_x = bias.n_x;
    report.class_counts.assign(class_counts.begin(), class_counts.end());
    return report;
}

OracleReport independence_suite(const GeneratorSpec& spec, std::size_t h, std::size_t replicates,
                                const EstimatorOptions& options) {
    validate(spec);
    if (spec.family == Family::gaussian_clusters)
        throw DomainError("independence suite needs an independent family, got " +
                          std::string(family_name(spec.family)));
    if (replicates == 0) throw DomainError("independence suite: replicates must be >= 1");
    if (h < 1 || h > spec.n)
        throw DomainError("h=" + std::to_string(h) + " outside [1, " + std::to_string(spec.n) + "]");

    constexpr std::size_t kMaxAttempts = 100;
    Accumulator acc(replicates, h);
    parallel_for(acc.blocks(), options.threads, [&](std::size_t b) {
        const std::size_t end = std::min(replicates, (b + 1) * kBlock);
        for (std::size_t rep = b * kBlock; rep < end; ++rep) {
            GeneratorSpec replicate_spec = spec;
            const std::uint64_t base = Rng::derive_seed(spec.rng_seed, rep);
            for (std::size_t attempt = 0;; ++attempt) {
                if (attempt == kMaxAttempts)
                    throw DomainError("independence suite: could not generate draw-free geometry");
                replicate_spec.rng_seed = attempt == 0 ? base : Rng::derive_seed(base, attempt);
                const LabeledDataset ds = generate(replicate_spec);
                const NeighborIndex index(resolve_distances(ds, options.metric, 1),
                                          options.tie_epsilon, 1);
                if (index.has_draws()) continue;

                EstimatorOptions single = options;
                single.threads = 1;
                const BiasTable bias = bias_table(ds.class_counts, h, single);
                const auto counts = same_label_counts(index, ds.labels, h, 1);
                bin_counts(counts, acc.histograms[b]);
                for (std::size_t r = 0; r < h; ++r) acc.analytic[b][r] += bias.p_r[r];
                add_generator_counts(acc.counts[b], ds, spec.class_probs.size());
                acc.i0[rep] = naive_mi(counts, bias.n_x);
                acc.ib[rep] = bias.i_b;
                acc.ie[rep] = acc.i0[rep] - bias.i_b;
                break;
            }
        }
    });

    OracleReport report = finish(acc, spec.n, h);
    report.n_x = options.nx_override.value_or(spec.class_probs.size());
    return report;
}

}  // namespace klmi::synthesis
