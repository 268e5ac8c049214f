#include "klmi/cli.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "klmi/dataio.hpp"
#include "klmi/error.hpp"
#include "klmi/estimator.hpp"
#include "klmi/synthesis.hpp"

namespace klmi::cli {
namespace {

struct Config {
    std::string points;
    std::string matrix;
    std::string metric = "euclidean";
    std::size_t h = 0;
    std::size_t h_min = 1;
    std::optional<std::size_t> h_max;
    std::vector<std::size_t> counts;
    double tie_epsilon = 0.0;
    std::optional<std::size_t> nx_override;
    std::string log_variant = "nx";
    std::string format = "json";
    std::uint64_t seed = 0;
    std::size_t replicates = 1000;
    unsigned threads = 0;
    bool header = false;
    std::string delimiter = ",";
    std::size_t dim = 2;
    std::string family = "independent-uniform";
};

char parse_delimiter(const std::string& text) {
    if (text == "\\t" || text == "tab" || text == "\t") return '\t';
    if (text.size() != 1) throw UsageError("delimiter must be a single character or 'tab'");
    return text.front();
}

EstimatorOptions estimator_options(const Config& cfg) {
    EstimatorOptions opts;
    opts.metric = parse_metric(cfg.metric);
    opts.tie_epsilon = cfg.tie_epsilon;
    opts.nx_override = cfg.nx_override;
    opts.log_variant = parse_log_variant(cfg.log_variant);
    opts.threads = cfg.threads;
    return opts;
}

std::optional<LabeledDataset> load_input(const Config& cfg) {
    dataio::ReadOptions read;
    read.delimiter = parse_delimiter(cfg.delimiter);
    read.header = cfg.header;
    if (!cfg.points.empty()) return dataio::read_points(cfg.points, read);
    if (!cfg.matrix.empty()) return dataio::read_matrix(cfg.matrix, read);
    return std::nullopt;
}

LabeledDataset require_input(const Config& cfg) {
    auto ds = load_input(cfg);
    if (!ds) throw UsageError("one of --points or --matrix is required");
    return std::move(*ds);
}

void add_input_options(CLI::App& sub, Config& cfg) {
    auto* points = sub.add_option("--points", cfg.points, "Labelled points file (label,x1,...,xd)");
    auto* matrix =
        sub.add_option("--matrix", cfg.matrix, "Labelled distance matrix file (label,d1,...,dn)");
    points->excludes(matrix);
    sub.add_option("--metric", cfg.metric, "Metric for points: euclidean, manhattan, chebyshev, hamming")
        ->capture_default_str();
    sub.add_flag("--header", cfg.header, "Skip the first line of the input file");
    sub.add_option("--delimiter", cfg.delimiter, "Field delimiter character, or 'tab'")
        ->capture_default_str();
    sub.add_option("--tie-epsilon", cfg.tie_epsilon,
                   "Relative tolerance merging near-equal distances into one tie group")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void add_estimator_options(CLI::App& sub, Config& cfg) {
    sub.add_option("--nx-override", cfg.nx_override,
                   "Declared number of labels (>= labels present) used for n_x")
        ->check(CLI::PositiveNumber);
    sub.add_option("--log-variant", cfg.log_variant,
                   "Count inside the bias logarithm: nx (default) or nc")
        ->check(CLI::IsMember({"nx", "nc"}))
        ->capture_default_str();
    sub.add_option("--format", cfg.format, "Output format: json or tsv")->capture_default_str();
    sub.add_option("--threads", cfg.threads, "Worker threads, 0 = all cores")->capture_default_str();
}

int do_estimate(const Config& cfg, std::ostream& out) {
    const auto format = dataio::parse_format(cfg.format);
    const auto opts = estimator_options(cfg);
    const auto ds = require_input(cfg);
    out << dataio::write_result(unbiased_mi(ds, cfg.h, opts), format);
    return kOk;
}

int do_sweep(const Config& cfg, std::ostream& out) {
    const auto format = dataio::parse_format(cfg.format);
    const auto opts = estimator_options(cfg);
    const auto ds = require_input(cfg);
    const std::size_t h_max =
        cfg.h_max.value_or(std::max<std::size_t>(1, std::min<std::size_t>(64, ds.size() - 1)));
    if (cfg.h_min > h_max)
        throw UsageError("--h-min " + std::to_string(cfg.h_min) + " exceeds --h-max " +
                         std::to_string(h_max));
    out << dataio::write_result(sweep_h(ds, cfg.h_min, h_max, opts), format);
    return kOk;
}

int do_bias(const Config& cfg, std::ostream& out) {
    const auto format = dataio::parse_format(cfg.format);
    const auto opts = estimator_options(cfg);
    out << dataio::write_result(bias_table(cfg.counts, cfg.h, opts), cfg.counts, format);
    return kOk;
}

int do_simulate(const Config& cfg, std::ostream& out) {
    const auto format = dataio::parse_format(cfg.format);
    const auto opts = estimator_options(cfg);
    if (auto ds = load_input(cfg)) {
        const auto dm = resolve_distances(*ds, opts.metric, opts.threads);
        out << dataio::write_result(synthesis::permutation_bias_oracle(
                                        dm, ds->class_counts, cfg.h, cfg.replicates, cfg.seed, opts),
                                    format);
        return kOk;
    }
    if (cfg.counts.empty()) throw UsageError("simulate needs --points, --matrix or --counts");
    synthesis::GeneratorSpec spec;
    spec.n = std::accumulate(cfg.counts.begin(), cfg.counts.end(), std::size_t{0});
    if (spec.n == 0) throw UsageError("--counts must not sum to zero");
    for (std::size_t c : cfg.counts)
        spec.class_probs.push_back(static_cast<double>(c) / static_cast<double>(spec.n));
    spec.family = synthesis::parse_family(cfg.family);
    spec.d = cfg.dim;
    spec.rng_seed = cfg.seed;
    spec.geometry_seed = cfg.seed;
    out << dataio::write_result(synthesis::independence_suite(spec, cfg.h, cfg.replicates, opts),
                                format);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"Unbiased nearest-neighbour mutual information between discrete labels and "
                 "metric-space data",
                 "klmi"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    auto* estimate = app.add_subcommand("estimate", "Estimate I_0, I_b and I_e for one h");
    add_input_options(*estimate, cfg);
    add_estimator_options(*estimate, cfg);
    estimate->add_option("--h", cfg.h, "Ball occupancy, including the seed")
        ->required()
        ->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Estimate over a range of h and select the maximal I_e");
    add_input_options(*sweep, cfg);
    add_estimator_options(*sweep, cfg);
    sweep->add_option("--h-min", cfg.h_min, "Smallest h")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--h-max", cfg.h_max, "Largest h (default min(64, n-1))")->check(CLI::PositiveNumber);

    auto* bias = app.add_subcommand("bias", "Bias table from class counts alone");
    add_estimator_options(*bias, cfg);
    bias->add_option("--counts", cfg.counts, "Comma-separated class counts, e.g. 100,60,40")
        ->required()
        ->delimiter(',');
    bias->add_option("--h", cfg.h, "Ball occupancy, including the seed")
        ->required()
        ->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand(
        "simulate",
        "Monte Carlo check of the bias: label permutation on an input file, or generated "
        "independent datasets from --counts");
    add_input_options(*simulate, cfg);
    add_estimator_options(*simulate, cfg);
    simulate->add_option("--h", cfg.h, "Ball occupancy, including the seed")
        ->required()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--counts", cfg.counts,
                         "Class counts for generated data; probabilities are counts / n")
        ->delimiter(',');
    simulate->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--replicates", cfg.replicates, "Monte Carlo replicates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--dim", cfg.dim, "Dimension of generated points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--family", cfg.family,
                         "Generator for --counts: independent-uniform or label-permutation")
        ->check(CLI::IsMember({"independent-uniform", "label-permutation"}))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        for (auto* sub : {estimate, sweep, bias, simulate})
            if (sub->parsed()) {
                out << sub->help();
                return kOk;
            }
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "klmi: usage error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (estimate->parsed()) return do_estimate(cfg, out);
        if (sweep->parsed()) return do_sweep(cfg, out);
        if (bias->parsed()) return do_bias(cfg, out);
        return do_simulate(cfg, out);
    } catch (const UsageError& e) {
        err << "klmi: usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "klmi: error: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace klmi::cli
