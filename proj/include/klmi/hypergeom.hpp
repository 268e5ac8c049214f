#pragma once

#include <cstdint>

namespace klmi::hypergeom {

using count_t = std::uint64_t;

/// Urn with `population` balls of which `successes` are marked; `draws` balls
/// are taken without replacement.
struct Params {
    count_t population = 0;
    count_t successes = 0;
    count_t draws = 0;

    bool valid() const noexcept { return successes <= population && draws <= population; }
};

/// ln C(n, k). Exact integer evaluation for n <= 62, log-gamma otherwise.
/// Throws DomainError when k > n.
double log_binomial(count_t n, count_t k);

/// Probability of exactly k marked balls among the draws. Zero outside the
/// support max(0, draws - (population - successes)) <= k <= min(draws, successes).
///
/// Each binomial factor is evaluated with Loader's saddle-point expansion
/// (Stirling remainder plus deviance term) rather than by differencing large
/// log-gamma values, which keeps the relative error near machine precision for
/// populations in the millions. Throws DomainError for invalid params.
double pmf(const Params& params, count_t k);

/// Support bounds [lo, hi] of the pmf.
count_t support_min(const Params& params) noexcept;
count_t support_max(const Params& params) noexcept;

}  // namespace klmi::hypergeom
