#include "klmi/hypergeom.hpp"

#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "klmi/error.hpp"

namespace klmi::hypergeom {
namespace {

__extension__ typedef unsigned __int128 uint128_t;

constexpr double kLn2Pi = 1.837877066409345483560659472811;

// stirlerr(n) = ln(n!) - ln(sqrt(2 pi n) (n/e)^n) for small integer n, computed
// once in extended precision.
const std::array<double, 16>& small_stirlerr() {
    static const std::array<double, 16> table = [] {
        std::array<double, 16> t{};
        long double fact = 1.0L;
        for (int n = 1; n < 16; ++n) {
            fact *= n;
            const long double ln = static_cast<long double>(n);
            t[n] = static_cast<double>(std::log(fact) - (ln + 0.5L) * std::log(ln) + ln -
                                       0.5L * static_cast<long double>(kLn2Pi));
        }
        return t;
    }();
    return table;
}

double stirlerr(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n < 16.0) return small_stirlerr()[static_cast<std::size_t>(n)];
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x ln(x/np) + np - x, evaluated by series when x is close to np.
double bd0(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        if (std::fabs(s) < DBL_MIN) return s;
        double ej = 2 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double next = s + ej / (2 * j + 1);
            if (next == s) return next;
            s = next;
        }
    }
    return x * std::log(x / np) + np - x;
}

// Binomial(n, p) density at x, q = 1 - p supplied separately for accuracy.
double binomial_density(double x, double n, double p, double q) {
    if (p == 0) return x == 0 ? 1.0 : 0.0;
    if (q == 0) return x == n ? 1.0 : 0.0;
    if (x == 0) {
        if (n == 0) return 1.0;
        return std::exp(p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q));
    }
    if (x == n) return std::exp(q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p));
    const double lc =
        stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    // ln(2 pi x (n - x) / n); n - x is exact, unlike 1 - x/n when x/n is near 1.
    const double lf = std::log(2.0 * std::numbers::pi * x * (n - x) / n);
    return std::exp(lc - 0.5 * lf);
}

}  // namespace

double log_binomial(count_t n, count_t k) {
    if (k > n)
        throw DomainError("log_binomial: k=" + std::to_string(k) + " exceeds n=" +
                          std::to_string(n));
    if (k == 0 || k == n) return 0.0;
    if (n <= 62) {
        const count_t r = k < n - k ? k : n - k;
        uint128_t c = 1;
        for (count_t i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
        return std::log(static_cast<double>(c));
    }
    const auto dn = static_cast<double>(n);
    const auto dk = static_cast<double>(k);
    return std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1);
}

count_t support_min(const Params& p) noexcept {
    const count_t failures = p.population - p.successes;
    return p.draws > failures ? p.draws - failures : 0;
}

count_t support_max(const Params& p) noexcept {
    return p.draws < p.successes ? p.draws : p.successes;
}

double pmf(const Params& params, count_t k) {
    if (!params.valid())
        throw DomainError("hypergeometric: invalid params (population=" +
                          std::to_string(params.population) +
                          ", successes=" + std::to_string(params.successes) +
                          ", draws=" + std::to_string(params.draws) + ")");
    if (k < support_min(params) || k > support_max(params)) return 0.0;
    if (params.draws == 0) return 1.0;

    const auto total = static_cast<double>(params.population);
    const auto marked = static_cast<double>(params.successes);
    const auto unmarked = total - marked;
    const auto drawn = static_cast<double>(params.draws);
    const auto x = static_cast<double>(k);

    // C(K,k) C(N-K,n-k) / C(N,n) written as a ratio of binomial densities at
    // p = n/N, where the normalising powers of p and q cancel.
    const double p = drawn / total;
    const double q = (total - drawn) / total;
    const double num1 = binomial_density(x, marked, p, q);
    const double num2 = binomial_density(drawn - x, unmarked, p, q);
    const double den = binomial_density(drawn, total, p, q);
    return num1 * num2 / den;
}

}  // namespace klmi::hypergeom
