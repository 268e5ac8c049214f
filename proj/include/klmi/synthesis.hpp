#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "klmi/estimator.hpp"

namespace klmi::synthesis {

enum class Family {
    independent_uniform,  ///< Y iid uniform on [0,1]^d, labels iid from class_probs
    gaussian_clusters,    ///< Y ~ N(class_means[x], spread^2 I)
    label_permutation,    ///< fixed uniform geometry from geometry_seed, fixed label multiset shuffled
};

Family parse_family(std::string_view name);
std::string_view family_name(Family family) noexcept;

struct GeneratorSpec {
    std::size_t n = 0;
    std::vector<double> class_probs;
    Family family = Family::independent_uniform;
    std::size_t d = 1;
    std::uint64_t rng_seed = 0;

    std::vector<std::vector<double>> class_means;  ///< gaussian_clusters only
    double spread = 1.0;                           ///< gaussian_clusters only
    std::uint64_t geometry_seed = 0;               ///< label_permutation only
};

/// Throws DomainError for n = 0, empty or non-normalised probabilities,
/// d = 0 or inconsistent cluster means.
void validate(const GeneratorSpec& spec);

/// Replicate random source: a std::mt19937_64 engine seeded through
/// SplitMix64, with distributions implemented here (the std:: ones are not
/// specified bit-for-bit) so streams are reproducible on any platform.
/// Uniform reals take the top 53 bits, bounded integers use rejection
/// sampling, normals use Box-Muller (cosine branch).
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64+splitmix64";

    explicit Rng(std::uint64_t seed);

    /// Independent stream for (seed, stream index).
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_seed(seed, index));
    }
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

    std::uint64_t next() { return engine_(); }
    double uniform();                          ///< [0, 1)
    std::uint64_t below(std::uint64_t bound);  ///< [0, bound), bound >= 1
    double normal();                           ///< standard normal

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Deterministic in rng_seed. Class counts are multinomial draws from
/// class_probs, except for label_permutation, whose counts are the
/// largest-remainder rounding of n * class_probs.
LabeledDataset generate(const GeneratorSpec& spec);

struct OracleReport {
    std::string rng{Rng::kName};
    std::size_t replicates = 0;
    std::size_t n = 0;
    std::size_t n_x = 0;
    std::vector<std::size_t> class_counts;  ///< summed over replicates when geometry is regenerated
    std::size_t h = 0;
    std::vector<double> empirical_p_r;  ///< pooled over seeds and replicates
    std::vector<double> analytic_p_r;   ///< bias-table probabilities (replicate mean)
    double tv_distance = 0.0;
    double mean_i0 = 0.0;
    double mean_ib = 0.0;
    double mean_ie = 0.0;
    double stderr_i0 = 0.0;
    double stderr_ie = 0.0;
};

/// Urn-model check on fixed geometry: each replicate assigns the label
/// multiset to the points by a uniform random permutation. Fractional h_y
/// (draws) splits its unit of mass linearly between the two adjacent
/// integers. Throws DomainError for h outside [1, n] or replicates = 0.
OracleReport permutation_bias_oracle(const DistanceMatrix& geometry,
                                     std::span<const std::size_t> class_counts, std::size_t h,
                                     std::size_t replicates, std::uint64_t rng_seed,
                                     const EstimatorOptions& options = {});

/// Generates a fresh independent dataset per replicate (regenerating any
/// draw-containing geometry) and reports the replicate means of I_0 and I_e
/// with their standard errors. Throws DomainError for a dependent family.
OracleReport independence_suite(const GeneratorSpec& spec, std::size_t h, std::size_t replicates,
                                const EstimatorOptions& options = {});

}  // namespace klmi::synthesis
