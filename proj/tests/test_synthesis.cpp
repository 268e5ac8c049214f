#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "klmi/error.hpp"
#include "klmi/synthesis.hpp"
#include "support/brute_force.hpp"

using namespace klmi;
using namespace klmi::synthesis;

namespace {

GeneratorSpec uniform_spec(std::size_t n, std::vector<double> probs, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.n = n;
    spec.class_probs = std::move(probs);
    spec.family = Family::independent_uniform;
    spec.d = 2;
    spec.rng_seed = seed;
    return spec;
}

bool same_report(const OracleReport& a, const OracleReport& b) {
    return a.empirical_p_r == b.empirical_p_r && a.analytic_p_r == b.analytic_p_r &&
           a.mean_i0 == b.mean_i0 && a.mean_ie == b.mean_ie && a.stderr_i0 == b.stderr_i0 &&
           a.tv_distance == b.tv_distance && a.class_counts == b.class_counts;
}

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(1, 1));
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(2, 0));

    Rng r(7);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        CHECK_UNARY(u >= 0.0 && u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));

    std::vector<std::size_t> hits(5, 0);
    for (int i = 0; i < 50000; ++i) ++hits[r.below(5)];
    for (auto h : hits) CHECK(h == doctest::Approx(10000).epsilon(0.05));

    double m = 0.0, s = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double z = r.normal();
        m += z;
        s += z * z;
    }
    CHECK(std::fabs(m / 100000) < 0.02);
    CHECK(s / 100000 == doctest::Approx(1.0).epsilon(0.02));

    std::vector<int> v(20);
    std::iota(v.begin(), v.end(), 0);
    r.shuffle(std::span<int>(v));
    std::vector<int> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 20; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("validate rejects degenerate specs") {
    CHECK_THROWS_AS(validate(uniform_spec(0, {1.0}, 1)), DomainError);
    CHECK_THROWS_AS(validate(uniform_spec(5, {}, 1)), DomainError);
    CHECK_THROWS_AS(validate(uniform_spec(5, {0.5, 0.4}, 1)), DomainError);
    CHECK_THROWS_AS(validate(uniform_spec(5, {1.0, 0.0}, 1)), DomainError);
    auto spec = uniform_spec(5, {0.5, 0.5}, 1);
    spec.d = 0;
    CHECK_THROWS_AS(validate(spec), DomainError);
    spec.d = 1;
    spec.family = Family::gaussian_clusters;
    CHECK_THROWS_AS(validate(spec), DomainError);
    spec.class_means = {{0.0}, {1.0}};
    CHECK_NOTHROW(validate(spec));
    spec.spread = 0.0;
    CHECK_THROWS_AS(validate(spec), DomainError);
}

TEST_CASE("family names round trip") {
    for (auto f : {Family::independent_uniform, Family::gaussian_clusters, Family::label_permutation})
        CHECK(parse_family(family_name(f)) == f);
    CHECK_THROWS_AS(parse_family("uniform"), UsageError);
}

TEST_CASE("generate: single class, determinism, families") {
    for (auto family : {Family::independent_uniform, Family::label_permutation}) {
        auto spec = uniform_spec(10, {1.0}, 9);
        spec.family = family;
        const auto ds = generate(spec);
        CHECK(ds.size() == 10);
        CHECK(ds.class_counts == std::vector<std::size_t>{10});
    }

    const auto spec = uniform_spec(50, {0.2, 0.3, 0.5}, 123);
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(a.labels == b.labels);
    CHECK(std::get<PointSet>(a.geometry) == std::get<PointSet>(b.geometry));
    auto other = spec;
    other.rng_seed = 124;
    CHECK(std::get<PointSet>(generate(other).geometry) != std::get<PointSet>(a.geometry));

    auto perm = spec;
    perm.family = Family::label_permutation;
    perm.geometry_seed = 5;
    const auto p1 = generate(perm);
    perm.rng_seed = 999;
    const auto p2 = generate(perm);
    CHECK(std::get<PointSet>(p1.geometry) == std::get<PointSet>(p2.geometry));
    CHECK(p1.labels != p2.labels);
    auto sorted_counts = [](std::vector<std::size_t> c) {
        std::sort(c.begin(), c.end());
        return c;
    };
    CHECK(sorted_counts(p1.class_counts) == std::vector<std::size_t>{10, 15, 25});
    CHECK(sorted_counts(p2.class_counts) == std::vector<std::size_t>{10, 15, 25});
}

TEST_CASE("multinomial class counts follow the probabilities") {
    const auto ds = generate(uniform_spec(20000, {0.5, 0.3, 0.2}, 77));
    std::vector<std::size_t> by_class(3);
    for (std::size_t c = 0; c < ds.num_classes(); ++c)
        by_class[std::stoul(ds.label_names[c])] = ds.class_counts[c];
    CHECK(by_class[0] == doctest::Approx(10000).epsilon(0.03));
    CHECK(by_class[1] == doctest::Approx(6000).epsilon(0.04));
    CHECK(by_class[2] == doctest::Approx(4000).epsilon(0.05));
}

TEST_CASE("well-separated gaussian clusters have same-class h = 2 balls") {
    GeneratorSpec spec;
    spec.n = 1000;
    spec.class_probs = {0.5, 0.5};
    spec.family = Family::gaussian_clusters;
    spec.d = 1;
    spec.class_means = {{0.0}, {1.0}};
    spec.spread = 0.01;
    spec.rng_seed = 2024;
    const auto ds = generate(spec);
    const auto counts = same_label_counts(ds, 2);
    for (double v : counts.values) CHECK(v == 2.0);
}

TEST_CASE("permutation oracle matches the two-by-two urn") {
    std::mt19937_64 gen(1);
    const auto dm = pairwise_distances(testing::random_points(4, 2, gen), Metric::euclidean);
    const std::vector<std::size_t> counts{2, 2};
    const auto report = permutation_bias_oracle(dm, counts, 2, 100000, 17);
    CHECK(report.replicates == 100000);
    CHECK(report.rng == "mt19937_64+splitmix64");
    CHECK(report.empirical_p_r[0] == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(report.empirical_p_r[1] == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(report.tv_distance < 0.01);
    CHECK(std::fabs(report.mean_i0 - report.mean_ib) <= 4 * report.stderr_i0);
    CHECK(report.mean_ib == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("permutation oracle edge cases") {
    std::mt19937_64 gen(2);
    const auto dm = pairwise_distances(testing::random_points(12, 2, gen), Metric::euclidean);

    const auto once = permutation_bias_oracle(dm, std::vector<std::size_t>{5, 7}, 3, 1, 0);
    CHECK(std::accumulate(once.empirical_p_r.begin(), once.empirical_p_r.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(once.stderr_i0 == 0.0);

    for (std::size_t h : {1, 4, 12}) {
        const auto single = permutation_bias_oracle(dm, std::vector<std::size_t>{12}, h, 50, 3);
        CHECK(single.empirical_p_r[h - 1] == 1.0);
        CHECK(single.analytic_p_r[h - 1] == 1.0);
        CHECK(single.mean_i0 == 0.0);
        CHECK(single.mean_ie == 0.0);
    }

    CHECK_THROWS_AS(permutation_bias_oracle(dm, std::vector<std::size_t>{5, 7}, 13, 10, 0), DomainError);
    CHECK_THROWS_AS(permutation_bias_oracle(dm, std::vector<std::size_t>{5, 7}, 0, 10, 0), DomainError);
    CHECK_THROWS_AS(permutation_bias_oracle(dm, std::vector<std::size_t>{5, 7}, 2, 0, 0), DomainError);
    CHECK_THROWS_AS(permutation_bias_oracle(dm, std::vector<std::size_t>{5, 6}, 2, 10, 0), DomainError);
}

TEST_CASE("permutation oracle splits fractional counts and keeps unit mass") {
    const auto dm = pairwise_distances(testing::lattice_points(4, 2), Metric::manhattan);
    const auto report = permutation_bias_oracle(dm, std::vector<std::size_t>{8, 8}, 4, 2000, 11);
    CHECK(std::accumulate(report.empirical_p_r.begin(), report.empirical_p_r.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracles are reproducible and thread-count independent") {
    std::mt19937_64 gen(4);
    const auto dm = pairwise_distances(testing::random_points(20, 2, gen), Metric::euclidean);
    EstimatorOptions serial, parallel;
    parallel.threads = 3;
    const std::vector<std::size_t> counts{8, 7, 5};
    const auto a = permutation_bias_oracle(dm, counts, 4, 3000, 99, serial);
    const auto b = permutation_bias_oracle(dm, counts, 4, 3000, 99, parallel);
    CHECK(same_report(a, b));
    CHECK_FALSE(same_report(a, permutation_bias_oracle(dm, counts, 4, 3000, 100, serial)));

    const auto spec = uniform_spec(40, {0.6, 0.4}, 5);
    CHECK(same_report(independence_suite(spec, 3, 300, serial), independence_suite(spec, 3, 300, parallel)));
}

TEST_CASE("independence suite: small unbiasedness check") {
    const auto report = independence_suite(uniform_spec(60, {0.5, 0.3, 0.2}, 8), 4, 1500);
    MESSAGE("mean I_e " << report.mean_ie << " +- " << report.stderr_ie << ", mean I_0 " << report.mean_i0);
    CHECK(std::fabs(report.mean_ie) <= 4 * report.stderr_ie);
    CHECK(report.mean_i0 > 10 * report.stderr_i0);
    CHECK(report.tv_distance < 0.02);
    CHECK(std::accumulate(report.class_counts.begin(), report.class_counts.end(), std::size_t{0}) ==
          60 * 1500);
}

TEST_CASE("independence suite: n_c log variant diagnostic") {
    EstimatorOptions nc;
    nc.log_variant = LogVariant::nc;
    const auto report = independence_suite(uniform_spec(60, {0.7, 0.2, 0.1}, 8), 4, 500, nc);
    MESSAGE("n_c variant mean I_e " << report.mean_ie << " +- " << report.stderr_ie);
}

TEST_CASE("independence suite: one class is exactly zero") {
    for (auto family : {Family::independent_uniform, Family::label_permutation}) {
        auto spec = uniform_spec(30, {1.0}, 3);
        spec.family = family;
        const auto report = independence_suite(spec, 5, 40);
        CHECK(report.mean_ie == 0.0);
        CHECK(report.stderr_ie == 0.0);
        CHECK(report.mean_i0 == 0.0);
    }
}

TEST_CASE("independence suite rejects dependent families and bad h") {
    GeneratorSpec spec = uniform_spec(20, {0.5, 0.5}, 1);
    spec.family = Family::gaussian_clusters;
    spec.class_means = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(independence_suite(spec, 2, 10), DomainError);
    CHECK_THROWS_AS(independence_suite(uniform_spec(20, {0.5, 0.5}, 1), 21, 10), DomainError);
    CHECK_THROWS_AS(independence_suite(uniform_spec(20, {0.5, 0.5}, 1), 2, 0), DomainError);
}
