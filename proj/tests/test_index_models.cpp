#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "randsum/index_models.hpp"

using namespace randsum;

TEST_CASE("pmf and cdf spot values") {
    const auto geo = IndexModel::geometric(0.5);
    CHECK(geo.pmf(0) == 0.0);
    CHECK(geo.pmf(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(geo.pmf(3) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(geo.cdf(2) == doctest::Approx(0.75).epsilon(1e-14));

    const auto poi = IndexModel::poisson(4.0);
    CHECK(poi.pmf(0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-13));
    CHECK(poi.pmf(4) ==
          doctest::Approx(std::exp(-4.0) * 256.0 / 24.0).epsilon(1e-13));

    const auto bin = IndexModel::binomial(3, 0.5);
    CHECK(bin.pmf(4) == 0.0);
    CHECK(bin.pmf(-2) == 0.0);
    CHECK(bin.pmf(1) == doctest::Approx(0.375).epsilon(1e-13));
    CHECK(bin.cdf(3) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("index moments") {
    const auto geo = index_moments(IndexModel::geometric(0.5));
    CHECK(geo.mean == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(geo.variance == doctest::Approx(2.0).epsilon(1e-14));

    const auto poi = index_moments(IndexModel::poisson(4.0));
    CHECK(poi.mean == 4.0);
    CHECK(poi.variance == 4.0);

    // Degenerate binomial corners are point masses.
    const auto one = index_moments(IndexModel::binomial(1, 1.0));
    CHECK(one.mean == 1.0);
    CHECK(one.variance == 0.0);
    CHECK(IndexModel::binomial(5, 0.0).mean() == 0.0);

    const auto det = index_moments(IndexModel::deterministic(4));
    CHECK(det.mean == 4.0);
    CHECK(det.variance == 0.0);
}

TEST_CASE("construction rejects bad parameters") {
    CHECK_THROWS_AS(IndexModel::geometric(0.0), std::invalid_argument);
    CHECK_THROWS_AS(IndexModel::geometric(1.5), std::invalid_argument);
    CHECK_THROWS_AS(IndexModel::poisson(0.0), std::invalid_argument);
    CHECK_THROWS_AS(IndexModel::poisson(-3.0), std::invalid_argument);
    CHECK_THROWS_AS(IndexModel::binomial(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(IndexModel::binomial(4, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(IndexModel::custom({0.5, -0.1}), std::invalid_argument);
    // Mass missing without an envelope that certifies it.
    CHECK_THROWS_AS(IndexModel::custom({0.5, 0.25}), std::invalid_argument);
}

TEST_CASE("inverse square-root moment: certified series") {
    // Independently computed via (p/(1-p)) Li_{1/2}(1-p) at 30 digits.
    const auto v = inv_sqrt_moment(IndexModel::geometric(0.25), 1e-12);
    CHECK(std::abs(v.value - 0.6343202699465254) < 1e-10);
    CHECK(v.truncation_error <= 1e-12);
    CHECK(v.value > 0.5);          // sqrt(p)
    CHECK(v.value < 2.0 / 3.0);    // 2 sqrt(p) / (1 + sqrt(p))

    // Point mass at 4: the moment is exactly 1/2.
    const auto det = inv_sqrt_moment(IndexModel::deterministic(4), 1e-12);
    CHECK(det.value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(det.truncation_error == 0.0);
}

TEST_CASE("inverse square-root moment: sandwich over a p grid") {
    // sqrt(p) <= E[N^{-1/2}] <= 2 sqrt(p)/(1 + sqrt(p)) for the geometric
    // index, checked across two decades.
    for (int i = 1; i <= 24; ++i) {
        const double p = i / 25.0;
        const auto v = inv_sqrt_moment(IndexModel::geometric(p), 1e-11);
        const double root = std::sqrt(p);
        CHECK(v.value + v.truncation_error >= root);
        CHECK(v.value <= 2.0 * root / (1.0 + root) + 1e-11);
    }
}

TEST_CASE("inverse moment of the geometric index") {
    CHECK(std::abs(inv_moment_geometric(0.5) - 0.6931471805599453) < 1e-14);
    CHECK(std::abs(inv_moment_geometric(0.1) - 0.2558427881104495) < 1e-14);
    CHECK(std::abs(inv_moment_geometric(0.01) - 0.04651687056553628) < 1e-14);
    CHECK(inv_moment_geometric(1.0) == 1.0);
    CHECK_THROWS_AS(inv_moment_geometric(0.0), std::invalid_argument);

    // Jensen: E[1/N] >= (E[N^{-1/2}])^2.
    for (double p : {0.9, 0.5, 0.2, 0.05, 0.01}) {
        const auto half = inv_sqrt_moment(IndexModel::geometric(p), 1e-12);
        CHECK(inv_moment_geometric(p) >= half.value * half.value - 1e-12);
    }
}

TEST_CASE("certified tail bounds dominate brute-force tails") {
    const auto poi = IndexModel::poisson(4.0);
    for (std::int64_t k : {8, 12, 20}) {
        double exact = 0.0;
        for (std::int64_t n = k + 1; n < 200; ++n) exact += poi.pmf(n);
        CHECK(poi.tail_prob(k) >= exact);
        CHECK(poi.tail_prob(k) <= 10.0 * exact + 1e-300);
        double exact_mean = 0.0;
        for (std::int64_t n = k + 1; n < 200; ++n)
            exact_mean += static_cast<double>(n) * poi.pmf(n);
        CHECK(poi.tail_mean(k) >= exact_mean);
    }

    const auto geo = IndexModel::geometric(0.3);
    for (std::int64_t k : {1, 5, 17}) {
        double exact = 0.0, exact_mean = 0.0;
        for (std::int64_t n = k + 1; n < 400; ++n) {
            exact += geo.pmf(n);
            exact_mean += static_cast<double>(n) * geo.pmf(n);
        }
        CHECK(geo.tail_prob(k) == doctest::Approx(exact).epsilon(1e-10));
        CHECK(geo.tail_mean(k) == doctest::Approx(exact_mean).epsilon(1e-10));
    }

    const auto bin = IndexModel::binomial(30, 0.25);
    double exact = 0.0;
    for (std::int64_t n = 16; n <= 30; ++n) exact += bin.pmf(n);
    CHECK(bin.tail_prob(15) >= exact);
    CHECK(bin.tail_prob(30) == 0.0);
}

TEST_CASE("truncation horizon meets its tolerance") {
    for (double tol : {1e-6, 1e-10, 1e-12}) {
        const auto geo = IndexModel::geometric(0.05);
        CHECK(geo.tail_prob(geo.truncation_horizon(tol)) <= tol);
        const auto poi = IndexModel::poisson(64.0);
        CHECK(poi.tail_prob(poi.truncation_horizon(tol)) <= tol);
    }
    CHECK(IndexModel::binomial(17, 0.5).truncation_horizon(1e-12) == 17);
}

TEST_CASE("sampling: degenerate families and determinism") {
    RandomStream s1(42), s2(42);
    const auto ones = sample_index(IndexModel::geometric(1.0), s1, 8);
    for (auto n : ones) CHECK(n == 1);
    const auto zeros = sample_index(IndexModel::binomial(5, 0.0), s2, 8);
    for (auto n : zeros) CHECK(n == 0);

    const auto model = IndexModel::geometric(0.2);
    RandomStream a = RandomStream::derive(7, 1), b = RandomStream::derive(7, 1);
    CHECK(sample_index(model, a, 32) == sample_index(model, b, 32));
    RandomStream c = RandomStream::derive(7, 2);
    CHECK(sample_index(model, a, 32) != sample_index(model, c, 32));
}

TEST_CASE("sampling: sample means track the model means") {
    struct Case {
        IndexModel model;
        const char* name;
    };
    const Case cases[] = {
        {IndexModel::geometric(0.1), "geometric(0.1)"},
        {IndexModel::poisson(4.0), "poisson(4)"},
        {IndexModel::binomial(20, 0.3), "binomial(20,0.3)"},
    };
    const std::size_t n = 200000;
    for (const auto& c : cases) {
        CAPTURE(c.name);
        RandomStream stream = RandomStream::derive(20240817, 11);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += static_cast<double>(c.model.sample(stream));
        const double mean = sum / static_cast<double>(n);
        const double band =
            4.0 * std::sqrt(c.model.variance() / static_cast<double>(n));
        CHECK(std::abs(mean - c.model.mean()) <= band);
    }
}

TEST_CASE("scaled-index Kolmogorov distance") {
    // Geometric vs Exp(1): the sup sits at the left edge of the first jump,
    // 1 - exp(-0.1) for p = 0.1 (verified by enumerating jump candidates).
    const double d01 = exact_dk_scaled_index(
        IndexModel::geometric(0.1), ScaledIndexLimit::exponential_rate_one());
    CHECK(std::abs(d01 - 0.09516258196404043) < 1e-9);

    for (double p : {0.5, 0.1, 0.01, 0.001}) {
        const double d = exact_dk_scaled_index(
            IndexModel::geometric(p),
            ScaledIndexLimit::exponential_rate_one());
        CHECK(d <= 12.0 * p);
        CHECK(d > 0.0);
    }

    // A deterministic index scaled by its own mean is the point mass at 1.
    CHECK(exact_dk_scaled_index(IndexModel::deterministic(4),
                                ScaledIndexLimit::point_mass_one()) == 0.0);

    // Geometric(0.5) vs point mass at 1: mu = 2, so the distance is
    // max(P(N < 2), P(N > 2)) = 0.5.
    CHECK(exact_dk_scaled_index(IndexModel::geometric(0.5),
                                ScaledIndexLimit::point_mass_one()) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scaled-index limit CDFs") {
    const auto exp1 = ScaledIndexLimit::exponential_rate_one();
    CHECK(exp1.cdf(-1.0) == 0.0);
    CHECK(exp1.cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(exp1.tail_beyond(3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

    const auto point = ScaledIndexLimit::point_mass_one();
    CHECK(point.cdf(0.999) == 0.0);
    CHECK(point.cdf(1.0) == 1.0);
    CHECK(point.cdf_left(1.0) == 0.0);

    const auto tri = ScaledIndexLimit::custom(
        [](double x) { return x * x / 4.0; }, 2.0);
    CHECK(tri.cdf(1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(tri.cdf(5.0) == 1.0);
    CHECK(tri.cdf(-2.0) == 0.0);
}
