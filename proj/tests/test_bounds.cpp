#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "randsum/bounds.hpp"
#include "randsum/special_functions.hpp"

// Frozen reference values follow the same discipline as the other test files:
// closed forms are evaluated by hand, series were computed by an independent
// 40-digit implementation and pinned here to the printed precision.

using namespace randsum;

namespace {
const SummandModel rad = SummandModel::iid(SummandDist::rademacher());
const SummandModel sched_rad =
    SummandModel::schedule_one_plus_inv_j(SummandDist::rademacher());
}

TEST_CASE("metric names") {
    CHECK(std::string(metric_name(Metric::kolmogorov)) == "kolmogorov");
    CHECK(std::string(metric_name(Metric::wasserstein)) == "wasserstein");
}

TEST_CASE("conditional bound closed forms") {
    // Rademacher, n = 4, mu = 4: s_n^2 = 1, so W: 6*4/8, K: 0.56*4/8.
    auto w = conditional_be_bound(4, rad, 4.0, Metric::wasserstein);
    CHECK(w.value == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(w.truncation_error == 0.0);
    CHECK(w.metric == Metric::wasserstein);
    CHECK(w.theorem_tag == "conditional-normal-approx");
    auto k = conditional_be_bound(4, rad, 4.0, Metric::kolmogorov);
    CHECK(k.value == doctest::Approx(0.28).epsilon(1e-15));
    CHECK(k.certified() == k.value);

    // n = 0 conditions on an empty sum; both laws collapse to the same point.
    CHECK(conditional_be_bound(0, rad, 4.0, Metric::kolmogorov).value == 0.0);
    CHECK(conditional_be_bound(0, rad, 4.0, Metric::wasserstein).value == 0.0);

    // A schedule changes the per-index moments.  n = 2 under 1 + 1/j:
    // sum sigma^2 = 2 + 1.5 = 3.5, sum xi = 2^1.5 + 1.5^1.5.
    const double sum_xi = std::pow(2.0, 1.5) + std::pow(1.5, 1.5);
    auto ks = conditional_be_bound(2, sched_rad, 4.0, Metric::kolmogorov);
    CHECK(ks.value == doctest::Approx(0.56 * sum_xi /
                                      (std::pow(3.5 / 4.0, 1.5) * 8.0))
                          .epsilon(1e-14));

    CHECK_THROWS_AS(conditional_be_bound(-1, rad, 4.0, Metric::kolmogorov),
                    std::invalid_argument);
    CHECK_THROWS_AS(conditional_be_bound(4, rad, 0.0, Metric::kolmogorov),
                    std::invalid_argument);
}

TEST_CASE("conditional bound scales linearly in its constant") {
    ConstantsRegistry doubled;
    doubled.c_k = 1.12;
    doubled.c_w = 12.0;
    auto base_k = conditional_be_bound(7, sched_rad, 2.0, Metric::kolmogorov);
    auto big_k =
        conditional_be_bound(7, sched_rad, 2.0, Metric::kolmogorov, doubled);
    CHECK(big_k.value == doctest::Approx(2.0 * base_k.value).epsilon(1e-15));
    auto base_w = conditional_be_bound(7, sched_rad, 2.0, Metric::wasserstein);
    auto big_w =
        conditional_be_bound(7, sched_rad, 2.0, Metric::wasserstein, doubled);
    CHECK(big_w.value == doctest::Approx(2.0 * base_w.value).epsilon(1e-15));
}

TEST_CASE("sum vs mixture, iid closed forms") {
    // Wasserstein: C_W xi / (sqrt(mu) sigma^2), no truncation.
    const auto geo = IndexModel::geometric(0.25);
    auto w = w_vs_z_bound(geo, rad, Metric::wasserstein);
    CHECK(w.value == doctest::Approx(6.0 / 2.0).epsilon(1e-15));
    CHECK(w.truncation_error == 0.0);
    CHECK(w.theorem_tag == "sum-vs-mixture");

    // Kolmogorov rides on E[N^{-1/2}] = 0.63432026994652542 for p = 0.25.
    // The series value sits within its own certificate of the frozen number.
    auto k = w_vs_z_bound(geo, rad, Metric::kolmogorov);
    CHECK(std::abs(k.value - 0.56 * 0.63432026994652542) <=
          k.truncation_error + 1e-13);
    CHECK(k.truncation_error <= 1e-10);
    CHECK(k.certified() >= 0.56 * 0.63432026994652542 - 1e-13);
}

TEST_CASE("sum vs mixture respects the inverse-root envelope") {
    // For an iid model the Kolmogorov value is C_K (xi/sigma^3) E[N^{-1/2}]
    // and must sit inside the geometric envelope for every p.
    for (double p : {0.02, 0.1, 0.25, 0.5, 0.9}) {
        const auto env = geometric_inv_sqrt_envelope(p);
        auto k = w_vs_z_bound(IndexModel::geometric(p), rad,
                              Metric::kolmogorov);
        CHECK(k.value / 0.56 >= env.lower - 1e-9);
        CHECK(k.value / 0.56 <= env.upper + 1e-9);
        CHECK(k.value <= 2.0 * 0.56 * std::sqrt(p) + 1e-9);
    }
    CHECK(geometric_inv_sqrt_envelope(0.25).lower ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(geometric_inv_sqrt_envelope(0.25).upper ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(geometric_inv_sqrt_envelope(1.0).upper == 1.0);
    CHECK_THROWS_AS(geometric_inv_sqrt_envelope(0.0), std::invalid_argument);
}

TEST_CASE("sum vs mixture, series mode reduces to the iid value") {
    // A schedule whose rule is constant 1 is the iid model in disguise.
    const auto flat = SummandModel::schedule(
        SummandDist::rademacher(), [](std::size_t) { return 1.0; },
        ScheduleEnvelope{1.0, 1.0}, 1.0);
    REQUIRE_FALSE(flat.is_iid());

    const auto geo = IndexModel::geometric(0.25);
    auto k_iid = w_vs_z_bound(geo, rad, Metric::kolmogorov);
    auto k_series = w_vs_z_bound(geo, flat, Metric::kolmogorov);
    CHECK(std::abs(k_series.value - k_iid.value) <=
          k_series.truncation_error + k_iid.truncation_error + 1e-12);

    // Wasserstein series and closed form differ by C_W P(N = 0) / sqrt(mu),
    // zero for the geometric support and e^{-100}-small for Poisson(100).
    auto w_geo = w_vs_z_bound(geo, flat, Metric::wasserstein);
    CHECK(std::abs(w_geo.value - 3.0) <= w_geo.truncation_error + 1e-12);

    const auto poi = IndexModel::poisson(100.0);
    auto w_iid = w_vs_z_bound(poi, rad, Metric::wasserstein);
    auto w_ser = w_vs_z_bound(poi, flat, Metric::wasserstein);
    CHECK(w_iid.value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(std::abs(w_ser.value - w_iid.value) <=
          w_ser.truncation_error + 1e-12);
}

TEST_CASE("sum vs mixture on a genuine schedule stays certified") {
    const auto geo = IndexModel::geometric(0.05);
    auto k = w_vs_z_bound(geo, sched_rad, Metric::kolmogorov);
    // Frozen: 0.56 sum_n p(1-p)^{n-1} xihat_n / (sqrt(n) sighat_n^3).
    CHECK(k.value == doctest::Approx(0.18986161028503584).epsilon(1e-9));
    CHECK(k.truncation_error <= 1e-10);
    auto w = w_vs_z_bound(geo, sched_rad, Metric::wasserstein);
    CHECK(w.value > 0.0);
    CHECK(w.truncation_error <= 1e-10);
}

TEST_CASE("mixture transfer is a tagged passthrough") {
    auto t = mixture_transfer_dk(0.09516258196404043);
    CHECK(t.value == 0.09516258196404043);
    CHECK(t.metric == Metric::kolmogorov);
    CHECK(t.theorem_tag == "mixture-transfer");
    CHECK_THROWS_AS(mixture_transfer_dk(-1e-12), std::invalid_argument);
}

TEST_CASE("mixture vs normal closed form") {
    // sigma sqrt(2/pi) sqrt(Var N) / E[N].
    auto poi = mixture_vs_normal_w1_bound(1.0, IndexModel::poisson(4.0));
    CHECK(poi.value ==
          doctest::Approx(sqrt_two_over_pi / 2.0).epsilon(1e-15));
    CHECK(poi.metric == Metric::wasserstein);
    CHECK(poi.theorem_tag == "mixture-vs-normal");

    auto geo = mixture_vs_normal_w1_bound(2.0, IndexModel::geometric(0.5));
    CHECK(geo.value ==
          doctest::Approx(2.0 * sqrt_two_over_pi * std::sqrt(2.0) / 2.0)
              .epsilon(1e-15));

    // A deterministic index has no fluctuation to pay for.
    CHECK(mixture_vs_normal_w1_bound(1.0, IndexModel::deterministic(9)).value
          == 0.0);
    CHECK_THROWS_AS(mixture_vs_normal_w1_bound(0.0, IndexModel::poisson(4.0)),
                    std::invalid_argument);
}

TEST_CASE("gaussian pair bound") {
    auto k = gaussian_pair_bound(1.0, 0.5, Metric::kolmogorov);
    CHECK(k.value == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(k.theorem_tag == "normal-variance-pair");
    auto w = gaussian_pair_bound(1.0, 0.5, Metric::wasserstein);
    CHECK(w.value == doctest::Approx(1.5).epsilon(1e-15));

    // Symmetric in the two scales, zero at equality, dominates the exact
    // Kolmogorov distance (frozen in the distance tests: 0.16133728441738433
    // for scales 1 and 0.5).
    for (Metric m : {Metric::kolmogorov, Metric::wasserstein}) {
        CHECK(gaussian_pair_bound(0.5, 1.0, m).value ==
              doctest::Approx(gaussian_pair_bound(1.0, 0.5, m).value)
                  .epsilon(1e-15));
        CHECK(gaussian_pair_bound(1.3, 1.3, m).value == 0.0);
    }
    CHECK(k.value >= 0.16133728441738433);
    CHECK_THROWS_AS(gaussian_pair_bound(1.0, 0.0, Metric::kolmogorov),
                    std::invalid_argument);
}

TEST_CASE("variance drift series") {
    // iid: the running variance never moves.
    auto flat = variance_drift_bound(IndexModel::geometric(0.5), rad,
                                     Metric::kolmogorov);
    CHECK(flat.value == 0.0);
    CHECK(flat.truncation_error == 0.0);

    // Frozen: sum_n 0.5^n (H_n/n)/(1 + H_n/n) for the 1 + 1/j schedule.
    auto k = variance_drift_bound(IndexModel::geometric(0.5), sched_rad,
                                  Metric::kolmogorov);
    CHECK(k.value == doctest::Approx(0.44428004129700624).epsilon(1e-9));
    CHECK(k.truncation_error <= 1e-10);
    CHECK(k.theorem_tag == "variance-drift");

    auto k05 = variance_drift_bound(IndexModel::geometric(0.05), sched_rad,
                                    Metric::kolmogorov);
    CHECK(k05.value == doctest::Approx(0.21701426408059247).epsilon(1e-9));

    // Wasserstein flavour: positive, certified, shrinking in the index mean.
    auto w_small = variance_drift_bound(IndexModel::poisson(16.0), sched_rad,
                                        Metric::wasserstein);
    auto w_big = variance_drift_bound(IndexModel::poisson(256.0), sched_rad,
                                      Metric::wasserstein);
    CHECK(w_small.value > 0.0);
    CHECK(w_small.truncation_error <= 1e-10);
    CHECK(w_big.value < w_small.value);

    // Finite index support truncates nothing.
    auto b = variance_drift_bound(IndexModel::binomial(6, 0.5), sched_rad,
                                  Metric::wasserstein);
    CHECK(b.truncation_error == 0.0);
}

TEST_CASE("combined limit bound composes its pieces") {
    const auto geo = IndexModel::geometric(0.5);
    auto drift =
        variance_drift_bound(geo, sched_rad, Metric::kolmogorov);
    auto mix = combined_limit_bound(geo, sched_rad,
                                    LimitComparison::mixture_dk, 0.25);
    CHECK(mix.value ==
          doctest::Approx(drift.value + 0.25).epsilon(1e-14));
    CHECK(mix.metric == Metric::kolmogorov);
    CHECK(mix.theorem_tag == "limit-vs-mixture");
    CHECK_THROWS_AS(
        combined_limit_bound(geo, sched_rad, LimitComparison::mixture_dk),
        std::invalid_argument);

    const auto poi = IndexModel::poisson(16.0);
    auto dw = variance_drift_bound(poi, sched_rad, Metric::wasserstein);
    auto mn = mixture_vs_normal_w1_bound(1.0, poi);  // limit variance is 1
    auto nw = combined_limit_bound(poi, sched_rad, LimitComparison::normal_w1);
    CHECK(nw.value == doctest::Approx(dw.value + mn.value).epsilon(1e-14));
    CHECK(nw.theorem_tag == "limit-vs-normal");
}

TEST_CASE("geometric to laplace, iid") {
    // p = 0.01, rademacher: 2 * 0.56 * 0.1 + 0.12 exactly.
    auto a = geometric_laplace_bound(0.01, rad, BoundMode::iid);
    CHECK(a.bound.value == doctest::Approx(0.232).epsilon(1e-15));
    CHECK(a.bound.truncation_error == 0.0);
    CHECK(a.bound.metric == Metric::kolmogorov);
    CHECK(a.bound.theorem_tag == "geometric-laplace-iid");
    CHECK(a.target.kind() == LimitLaw::Kind::laplace);
    CHECK(a.target.location() == 0.0);
    CHECK(a.target.scale() == doctest::Approx(1.0 / sqrt_two).epsilon(1e-15));

    auto b = geometric_laplace_bound(0.1, rad, BoundMode::iid);
    CHECK(b.bound.value ==
          doctest::Approx(1.5541750979388585).epsilon(1e-15));

    // Sharp variant swaps 2 sqrt(p) for the exact E[N^{-1/2}] series.
    auto s = geometric_laplace_bound(0.25, rad, BoundMode::iid, {}, 1e-10,
                                     true);
    CHECK(std::abs(s.bound.value - (0.56 * 0.63432026994652542 + 3.0)) <=
          s.bound.truncation_error + 1e-13);
    CHECK(s.bound.value <
          geometric_laplace_bound(0.25, rad, BoundMode::iid).bound.value);

    CHECK_THROWS_AS(geometric_laplace_bound(0.1, sched_rad, BoundMode::iid),
                    std::invalid_argument);
}

TEST_CASE("geometric to laplace, schedule modes") {
    // Frozen composite for p = 0.05 under 1 + 1/j: 0.6 + drift + series.
    auto g = geometric_laplace_bound(0.05, sched_rad, BoundMode::noniid);
    CHECK(g.bound.value ==
          doctest::Approx(1.0068758743656283).epsilon(1e-9));
    CHECK(g.bound.truncation_error <= 2e-10);
    CHECK(g.bound.theorem_tag == "geometric-laplace-general");
    CHECK(g.target.scale() == doctest::Approx(1.0 / sqrt_two).epsilon(1e-15));

    // Variance-weighted alternative: series + 12p sup sigma^2 / E[sigma_N^2],
    // with E[sigma_N^2] = 1 + E[1/N] = 1.1576701196607364 and sup = 2.
    auto alt = geometric_laplace_bound(0.05, sched_rad, BoundMode::noniid_alt);
    CHECK(alt.bound.value ==
          doctest::Approx(1.226426327314848).epsilon(1e-9));
    CHECK(alt.bound.theorem_tag == "geometric-laplace-variance-weighted");
    CHECK(alt.target.scale() ==
          doctest::Approx(std::sqrt(1.1576701196607364) / sqrt_two)
              .epsilon(1e-9));

    // The general mode fed an iid model reproduces the sharp iid bound.
    auto red = geometric_laplace_bound(0.25, rad, BoundMode::noniid);
    auto sharp = geometric_laplace_bound(0.25, rad, BoundMode::iid, {}, 1e-10,
                                         true);
    CHECK(std::abs(red.bound.value - sharp.bound.value) <=
          red.bound.truncation_error + sharp.bound.truncation_error + 1e-12);
    CHECK(red.target.scale() ==
          doctest::Approx(sharp.target.scale()).epsilon(1e-15));
}

TEST_CASE("geometric to laplace is invariant under summand scaling") {
    // X -> cX leaves xi/sigma^3 alone, so the bound value is unchanged and
    // only the target scale stretches by c.
    auto one = geometric_laplace_bound(0.1, SummandModel::iid(
                                                SummandDist::gaussian(1.0)),
                                       BoundMode::iid);
    auto three = geometric_laplace_bound(0.1, SummandModel::iid(
                                                  SummandDist::gaussian(3.0)),
                                         BoundMode::iid);
    CHECK(one.bound.value == doctest::Approx(three.bound.value)
                                 .epsilon(1e-14));
    CHECK(three.target.scale() ==
          doctest::Approx(3.0 * one.target.scale()).epsilon(1e-14));
}

TEST_CASE("geometric to laplace constant monotonicity") {
    ConstantsRegistry doubled;
    doubled.c_k = 1.12;
    auto base = geometric_laplace_bound(0.1, rad, BoundMode::iid);
    auto big = geometric_laplace_bound(0.1, rad, BoundMode::iid, doubled);
    CHECK(big.bound.value ==
          doctest::Approx(2.0 * (base.bound.value - 1.2) + 1.2)
              .epsilon(1e-14));
    CHECK(big.bound.value > base.bound.value);
}

TEST_CASE("normal limit bounds, iid closed forms") {
    // Poisson(100), rademacher: (6 + sqrt(2/pi)) / 10.
    auto p100 = normal_limit_bound(IndexModel::poisson(100.0), rad,
                                   BoundMode::iid);
    CHECK(p100.bound.value ==
          doctest::Approx(0.67978845608028654).epsilon(1e-14));
    CHECK(p100.bound.metric == Metric::wasserstein);
    CHECK(p100.bound.theorem_tag == "poisson-normal-iid");
    CHECK(p100.target.kind() == LimitLaw::Kind::normal);
    CHECK(p100.target.scale() == 1.0);

    auto p64 = normal_limit_bound(IndexModel::poisson(64.0), rad,
                                  BoundMode::iid);
    CHECK(p64.bound.value ==
          doctest::Approx(0.84973557010035817).epsilon(1e-14));

    // Quartering lambda doubles the bound exactly (both means are exact
    // powers of two times 25, so the divisions share their rounding).
    auto p25 = normal_limit_bound(IndexModel::poisson(25.0), rad,
                                  BoundMode::iid);
    CHECK(p25.bound.value == 2.0 * p100.bound.value);

    // Binomial(100, 0.25): (6 + sqrt(2 * 0.75 / pi)) / 5.
    auto b = normal_limit_bound(IndexModel::binomial(100, 0.25), rad,
                                BoundMode::iid);
    CHECK(b.bound.value ==
          doctest::Approx(1.3381976597885342).epsilon(1e-14));
    CHECK(b.bound.theorem_tag == "binomial-normal-iid");

    // p = 1 removes the index fluctuation term entirely.
    auto sure = normal_limit_bound(IndexModel::binomial(25, 1.0), rad,
                                   BoundMode::iid);
    CHECK(sure.bound.value == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("normal limit bounds, schedule mode") {
    const auto poi = IndexModel::poisson(64.0);
    auto g = normal_limit_bound(poi, sched_rad, BoundMode::noniid);
    // Composite of the three pieces it is defined from.
    auto wz = w_vs_z_bound(poi, sched_rad, Metric::wasserstein);
    auto dr = variance_drift_bound(poi, sched_rad, Metric::wasserstein);
    auto mx = mixture_vs_normal_w1_bound(1.0, poi);
    CHECK(g.bound.value ==
          doctest::Approx(wz.value + dr.value + mx.value).epsilon(1e-14));
    CHECK(g.bound.theorem_tag == "poisson-normal-general");
    CHECK(g.target.scale() == doctest::Approx(1.0).epsilon(1e-15));

    // Fed an iid model, the schedule mode collapses to the iid closed form.
    auto red = normal_limit_bound(poi, rad, BoundMode::noniid);
    auto iid = normal_limit_bound(poi, rad, BoundMode::iid);
    CHECK(red.bound.value == iid.bound.value);

    CHECK_THROWS_AS(
        normal_limit_bound(poi, sched_rad, BoundMode::noniid_alt),
        std::invalid_argument);
    CHECK_THROWS_AS(
        normal_limit_bound(IndexModel::geometric(0.5), rad, BoundMode::iid),
        std::invalid_argument);
    CHECK_THROWS_AS(
        normal_limit_bound(IndexModel::binomial(5, 0.0), rad, BoundMode::iid),
        std::invalid_argument);
}

TEST_CASE("variance of the random sum") {
    // iid collapses to sigma^2 by Wald.
    auto flat = variance_of_w(IndexModel::geometric(0.3), rad);
    CHECK(flat.value == 1.0);
    CHECK(flat.truncation_error == 0.0);

    // Frozen: 1 + E[1/N] for the 1 + 1/j schedule over a geometric index.
    auto g = variance_of_w(IndexModel::geometric(0.1), sched_rad);
    CHECK(g.value == doctest::Approx(1.2558427881104495).epsilon(1e-10));
    CHECK(g.truncation_error <= 1e-10);
    auto g05 = variance_of_w(IndexModel::geometric(0.05), sched_rad);
    CHECK(g05.value == doctest::Approx(1.1576701196607364).epsilon(1e-10));

    // Finite support is summed exactly: binomial(3, 0.5) under 1 + 1/j gives
    // (2 * 7/8 + 1.5 * 1/2 + 4/3 * 1/8) / 1.5 = 16/9.
    auto b = variance_of_w(IndexModel::binomial(3, 0.5), sched_rad);
    CHECK(b.value == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
    CHECK(b.truncation_error == 0.0);

    // A custom index with envelope mass has no exactly summable survival.
    auto leaky = IndexModel::custom({0.0, 0.5, 0.25},
                                    GeometricTailEnvelope{0.25, 0.5});
    CHECK_THROWS_AS(variance_of_w(leaky, sched_rad), std::invalid_argument);
}

TEST_CASE("every bound is nonnegative across a small grid") {
    for (double p : {0.02, 0.25, 0.8}) {
        for (const auto* model : {&rad, &sched_rad}) {
            for (auto mode : {BoundMode::noniid, BoundMode::noniid_alt}) {
                auto t = geometric_laplace_bound(p, *model, mode);
                CHECK(t.bound.value >= 0.0);
                CHECK(t.bound.truncation_error >= 0.0);
            }
        }
        auto iid = geometric_laplace_bound(p, rad, BoundMode::iid);
        CHECK(iid.bound.value >= 0.0);
    }
    for (double lam : {4.0, 64.0}) {
        for (const auto* model : {&rad, &sched_rad}) {
            auto t = normal_limit_bound(IndexModel::poisson(lam), *model,
                                        BoundMode::noniid);
            CHECK(t.bound.value >= 0.0);
            CHECK(t.bound.truncation_error >= 0.0);
        }
    }
}
