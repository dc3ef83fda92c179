#include "randsum/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "randsum/special_functions.hpp"

namespace randsum {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("randsum: ") + what);
}

struct CompensatedSum {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string echo_constants(const ConstantsRegistry& constants) {
    return " c_k=" + fmt(constants.c_k) + " c_w=" + fmt(constants.c_w);
}

const char* family_word(IndexFamily family) {
    switch (family) {
        case IndexFamily::geometric: return "geometric";
        case IndexFamily::poisson: return "poisson";
        case IndexFamily::binomial: return "binomial";
        case IndexFamily::custom: return "custom";
    }
    return "?";
}

// min(|1 - a/x|, |1 - x/a|): the Kolmogorov variance-ratio term.
double ratio_min(double x, double a) {
    return std::min(std::abs(1.0 - a / x), std::abs(1.0 - x / a));
}

// min(sqrt(x) |1 - a/x|, sqrt(a) |1 - x/a|): the Wasserstein counterpart in
// variance coordinates, where x is sigma_hat_n^2 and a the limit.
double drift_w_term(double x, double a) {
    return std::min(std::sqrt(x) * std::abs(1.0 - a / x),
                    std::sqrt(a) * std::abs(1.0 - x / a));
}

// P(N >= j) without certified-overestimate slack: exact closed form for the
// geometric, complemented cdf otherwise.  Callers must not pass an index whose
// cdf is itself truncated (custom model with a tail envelope), because the
// complement would absorb the unlisted mass and overshoot.
double survival(const IndexModel& index, std::int64_t j) {
    if (index.family() == IndexFamily::geometric)
        return j <= 1 ? 1.0 : std::exp(static_cast<double>(j - 1) *
                                       std::log1p(-index.p()));
    return std::max(0.0, 1.0 - index.cdf(j - 1));
}

}  // namespace

const char* metric_name(Metric metric) {
    return metric == Metric::kolmogorov ? "kolmogorov" : "wasserstein";
}

BoundValue conditional_be_bound(std::int64_t n, const SummandModel& summands,
                                double mu, Metric metric,
                                const ConstantsRegistry& constants) {
    require(n >= 0, "conditional bound needs n >= 0");
    require(mu > 0.0, "conditional bound needs mu > 0");
    require(constants.c_k > 0.0 && constants.c_w > 0.0,
            "constants must be positive");
    BoundValue out;
    out.metric = metric;
    out.theorem_tag = "conditional-normal-approx";
    out.inputs_digest = "n=" + std::to_string(n) + " mu=" + fmt(mu) +
                        echo_constants(constants);
    if (n == 0) return out;  // both conditional laws are the point mass at 0

    const auto agg = summands.aggregates(static_cast<std::size_t>(n));
    const double sum_sigma_sq = agg.sigma_hat_sq * static_cast<double>(n);
    const double sum_xi = agg.xi_hat * static_cast<double>(n);
    require(sum_sigma_sq > 0.0, "conditional bound needs s_n^2 > 0");
    const double s_sq = sum_sigma_sq / mu;
    if (metric == Metric::wasserstein)
        out.value = constants.c_w * sum_xi / (s_sq * std::pow(mu, 1.5));
    else
        out.value =
            constants.c_k * sum_xi / (std::pow(s_sq, 1.5) * std::pow(mu, 1.5));
    return out;
}

BoundValue w_vs_z_bound(const IndexModel& index, const SummandModel& summands,
                        Metric metric, const ConstantsRegistry& constants,
                        double tol) {
    require(tol > 0.0, "series tolerance must be positive");
    require(constants.c_k > 0.0 && constants.c_w > 0.0,
            "constants must be positive");
    const double mu = index.mean();
    require(mu > 0.0, "index mean must be positive");

    BoundValue out;
    out.metric = metric;
    out.theorem_tag = "sum-vs-mixture";
    out.inputs_digest = std::string("index=") + family_word(index.family()) +
                        " mu=" + fmt(mu) + " tol=" + fmt(tol) +
                        echo_constants(constants);

    if (summands.is_iid()) {
        const double sigma_sq = summands.base().variance();
        const double xi = summands.base().abs_third_moment();
        if (metric == Metric::wasserstein) {
            out.value = constants.c_w * xi / (std::sqrt(mu) * sigma_sq);
            return out;
        }
        const double factor =
            constants.c_k * xi / std::pow(sigma_sq, 1.5);
        const auto inv = inv_sqrt_moment(index, tol / std::max(factor, 1e-30));
        out.value = factor * inv.value;
        out.truncation_error = factor * inv.truncation_error;
        return out;
    }

    // E_N of the conditional bound.  Terms: Wasserstein
    // C_W xi_hat_n / (sigma_hat_n^2 sqrt(mu)); Kolmogorov
    // C_K xi_hat_n / (sqrt(n) sigma_hat_n^3).
    const double xi_hi = summands.xi_hat_hi();
    const double var_lo = summands.sigma_hat_sq_lo();
    auto tail_cert = [&](std::int64_t k) {
        if (metric == Metric::wasserstein)
            return constants.c_w * xi_hi / (var_lo * std::sqrt(mu)) *
                   index.tail_prob(k);
        return constants.c_k * xi_hi / std::pow(var_lo, 1.5) /
               std::sqrt(static_cast<double>(k + 1)) * index.tail_prob(k);
    };
    std::int64_t horizon = index.truncation_horizon(tol);
    while (tail_cert(horizon) > tol &&
           (!index.has_finite_support() || horizon < index.support_max()))
        horizon += std::max<std::int64_t>(horizon / 4, 16);

    CompensatedSum series;
    auto acc = summands.accumulator();
    for (std::int64_t n = 1; n <= horizon; ++n) {
        acc.advance();
        const double w = index.pmf(n);
        if (w == 0.0) continue;
        const auto& agg = acc.current();
        if (metric == Metric::wasserstein)
            series.add(w * constants.c_w * agg.xi_hat /
                       (agg.sigma_hat_sq * std::sqrt(mu)));
        else
            series.add(w * constants.c_k * agg.xi_hat /
                       (std::sqrt(static_cast<double>(n)) *
                        std::pow(agg.sigma_hat_sq, 1.5)));
    }
    out.value = series.sum;
    out.truncation_error = tail_cert(horizon);
    return out;
}

BoundValue mixture_transfer_dk(double dk_scaled_index) {
    require(dk_scaled_index >= 0.0, "index distance must be nonnegative");
    BoundValue out;
    out.value = dk_scaled_index;
    out.metric = Metric::kolmogorov;
    out.theorem_tag = "mixture-transfer";
    out.inputs_digest = "dk=" + fmt(dk_scaled_index);
    return out;
}

BoundValue mixture_vs_normal_w1_bound(double sigma, const IndexModel& index) {
    require(sigma > 0.0, "mixture bound needs sigma > 0");
    BoundValue out;
    out.metric = Metric::wasserstein;
    out.theorem_tag = "mixture-vs-normal";
    out.value =
        sigma * sqrt_two_over_pi * std::sqrt(index.variance()) / index.mean();
    out.inputs_digest = std::string("sigma=") + fmt(sigma) +
                        " index=" + family_word(index.family()) +
                        " mu=" + fmt(index.mean());
    return out;
}

BoundValue gaussian_pair_bound(double sigma, double tau, Metric metric) {
    require(sigma > 0.0 && tau > 0.0, "pair bound needs sigma, tau > 0");
    BoundValue out;
    out.metric = metric;
    out.theorem_tag = "normal-variance-pair";
    out.inputs_digest = "sigma=" + fmt(sigma) + " tau=" + fmt(tau);
    const double r1 = std::abs(1.0 - (tau * tau) / (sigma * sigma));
    const double r2 = std::abs(1.0 - (sigma * sigma) / (tau * tau));
    if (metric == Metric::kolmogorov)
        out.value = std::min(r1, r2);
    else
        out.value = 2.0 * std::min(sigma * r1, tau * r2);
    return out;
}

BoundValue variance_drift_bound(const IndexModel& index,
                                const SummandModel& summands, Metric metric,
                                double tol) {
    require(tol > 0.0, "series tolerance must be positive");
    BoundValue out;
    out.metric = metric;
    out.theorem_tag = "variance-drift";
    out.inputs_digest = std::string("index=") + family_word(index.family()) +
                        " mu=" + fmt(index.mean()) + " tol=" + fmt(tol);
    if (summands.is_iid()) return out;  // sigma_hat_n^2 is constant

    const auto limit = summands.sigma_hat_sq_limit();
    require(limit.has_value(),
            "variance drift needs the schedule's limiting variance");
    const double a = *limit;
    const double mu = index.mean();

    // Tail envelope: Kolmogorov terms are below 1; Wasserstein terms are
    // below the larger endpoint value of the drift function over the
    // schedule's certified variance range (the function vanishes at the
    // limit and is monotone moving away from it on either side).
    auto tail_cert = [&](std::int64_t k) {
        if (metric == Metric::kolmogorov) return index.tail_prob(k);
        const double env = std::max(drift_w_term(summands.sigma_hat_sq_lo(), a),
                                    drift_w_term(summands.sigma_hat_sq_hi(), a));
        return 2.0 / std::sqrt(mu) * env *
               std::sqrt(index.tail_mean(k) * index.tail_prob(k));
    };
    std::int64_t horizon = index.truncation_horizon(tol);
    while (tail_cert(horizon) > tol &&
           (!index.has_finite_support() || horizon < index.support_max()))
        horizon += std::max<std::int64_t>(horizon / 4, 16);

    CompensatedSum series;
    auto acc = summands.accumulator();
    for (std::int64_t n = 1; n <= horizon; ++n) {
        acc.advance();
        const double w = index.pmf(n);
        if (w == 0.0) continue;
        const double x = acc.current().sigma_hat_sq;
        if (metric == Metric::kolmogorov)
            series.add(w * ratio_min(x, a));
        else
            series.add(w * 2.0 * std::sqrt(static_cast<double>(n) / mu) *
                       drift_w_term(x, a));
    }
    out.value = series.sum;
    out.truncation_error = tail_cert(horizon);
    return out;
}

BoundValue combined_limit_bound(const IndexModel& index,
                                const SummandModel& summands,
                                LimitComparison mode,
                                std::optional<double> dk_index_vs_limit,
                                const ConstantsRegistry&, double tol) {
    if (mode == LimitComparison::mixture_dk) {
        require(dk_index_vs_limit.has_value(),
                "mixture comparison needs the index-level distance");
        auto drift =
            variance_drift_bound(index, summands, Metric::kolmogorov, tol);
        auto transfer = mixture_transfer_dk(*dk_index_vs_limit);
        BoundValue out;
        out.metric = Metric::kolmogorov;
        out.theorem_tag = "limit-vs-mixture";
        out.value = drift.value + transfer.value;
        out.truncation_error = drift.truncation_error;
        out.inputs_digest = drift.inputs_digest + " dk=" + fmt(transfer.value);
        return out;
    }
    auto drift =
        variance_drift_bound(index, summands, Metric::wasserstein, tol);
    const double sigma_hat_sq = summands.is_iid()
                                    ? summands.base().variance()
                                    : summands.sigma_hat_sq_limit().value();
    auto mix =
        mixture_vs_normal_w1_bound(std::sqrt(sigma_hat_sq), index);
    BoundValue out;
    out.metric = Metric::wasserstein;
    out.theorem_tag = "limit-vs-normal";
    out.value = drift.value + mix.value;
    out.truncation_error = drift.truncation_error;
    out.inputs_digest = drift.inputs_digest;
    return out;
}

InvSqrtEnvelope geometric_inv_sqrt_envelope(double p) {
    require(p > 0.0 && p <= 1.0, "geometric envelope needs p in (0, 1]");
    const double root = std::sqrt(p);
    return {root, 2.0 * root / (1.0 + root)};
}

TheoremBound geometric_laplace_bound(double p, const SummandModel& summands,
                                     BoundMode mode,
                                     const ConstantsRegistry& constants,
                                     double tol, bool sharp) {
    const auto index = IndexModel::geometric(p);
    BoundValue bound;
    bound.metric = Metric::kolmogorov;
    const std::string echo = "p=" + fmt(p) + " tol=" + fmt(tol) +
                             echo_constants(constants);

    if (mode == BoundMode::iid) {
        require(summands.is_iid(), "iid mode needs an iid summand model");
        const double sigma_sq = summands.base().variance();
        const double sigma = std::sqrt(sigma_sq);
        const double ratio =
            summands.base().abs_third_moment() / std::pow(sigma_sq, 1.5);
        bound.theorem_tag = "geometric-laplace-iid";
        if (sharp) {
            const auto series =
                w_vs_z_bound(index, summands, Metric::kolmogorov, constants,
                             tol);
            bound.value = series.value + 12.0 * p;
            bound.truncation_error = series.truncation_error;
        } else {
            bound.value =
                2.0 * constants.c_k * ratio * std::sqrt(p) + 12.0 * p;
        }
        bound.inputs_digest = echo + (sharp ? " sharp=1" : " sharp=0");
        return {bound, LimitLaw::laplace(0.0, sigma / sqrt_two)};
    }

    const auto series =
        w_vs_z_bound(index, summands, Metric::kolmogorov, constants, tol);
    if (mode == BoundMode::noniid) {
        const auto drift =
            variance_drift_bound(index, summands, Metric::kolmogorov, tol);
        const double sigma_hat_sq = summands.is_iid()
                                        ? summands.base().variance()
                                        : summands.sigma_hat_sq_limit().value();
        bound.theorem_tag = "geometric-laplace-general";
        bound.value = 12.0 * p + drift.value + series.value;
        bound.truncation_error =
            drift.truncation_error + series.truncation_error;
        bound.inputs_digest = echo;
        return {bound,
                LimitLaw::laplace(0.0, std::sqrt(sigma_hat_sq) / sqrt_two)};
    }

    // Variance-weighted alternative.  E[sigma_N^2] enters a denominator, so
    // its series lower estimate keeps the bound conservative.
    const auto ew = variance_of_w(index, summands, tol);
    require(ew.value > 0.0, "variance-weighted mode needs Var(W) > 0");
    const double sup_sigma_sq = summands.sup_sigma_sq();
    bound.theorem_tag = "geometric-laplace-variance-weighted";
    bound.value = series.value + 12.0 * p * sup_sigma_sq / ew.value;
    bound.truncation_error = series.truncation_error;
    bound.inputs_digest = echo + " var_w=" + fmt(ew.value);
    return {bound, LimitLaw::laplace(0.0, std::sqrt(ew.value) / sqrt_two)};
}

TheoremBound normal_limit_bound(const IndexModel& index,
                                const SummandModel& summands, BoundMode mode,
                                const ConstantsRegistry& constants,
                                double tol) {
    require(index.family() == IndexFamily::poisson ||
                index.family() == IndexFamily::binomial,
            "normal limit bounds cover poisson and binomial indices");
    require(mode != BoundMode::noniid_alt,
            "the variance-weighted mode exists for the geometric index only");
    const double mu = index.mean();
    require(mu > 0.0, "normal limit bound needs E[N] > 0");
    const bool poisson = index.family() == IndexFamily::poisson;

    BoundValue bound;
    bound.metric = Metric::wasserstein;
    const std::string echo = std::string("index=") +
                             family_word(index.family()) + " mu=" + fmt(mu) +
                             " tol=" + fmt(tol) + echo_constants(constants);

    if (mode == BoundMode::iid) {
        require(summands.is_iid(), "iid mode needs an iid summand model");
        const double sigma_sq = summands.base().variance();
        const double sigma = std::sqrt(sigma_sq);
        const double xi = summands.base().abs_third_moment();
        // sqrt(Var N)/mu is 1/sqrt(lambda) for the Poisson index and
        // sqrt((1-p)/(mp)) for the binomial one.
        bound.value = constants.c_w * xi / (sigma_sq * std::sqrt(mu)) +
                      sigma * sqrt_two_over_pi * std::sqrt(index.variance()) /
                          mu;
        bound.theorem_tag =
            poisson ? "poisson-normal-iid" : "binomial-normal-iid";
        bound.inputs_digest = echo;
        return {bound, LimitLaw::normal(sigma)};
    }

    const auto series =
        w_vs_z_bound(index, summands, Metric::wasserstein, constants, tol);
    const auto drift =
        variance_drift_bound(index, summands, Metric::wasserstein, tol);
    const double sigma_hat_sq = summands.is_iid()
                                    ? summands.base().variance()
                                    : summands.sigma_hat_sq_limit().value();
    const auto mix =
        mixture_vs_normal_w1_bound(std::sqrt(sigma_hat_sq), index);
    bound.value = series.value + drift.value + mix.value;
    bound.truncation_error = series.truncation_error + drift.truncation_error;
    bound.theorem_tag =
        poisson ? "poisson-normal-general" : "binomial-normal-general";
    bound.inputs_digest = echo;
    return {bound, LimitLaw::normal(std::sqrt(sigma_hat_sq))};
}

SeriesValue variance_of_w(const IndexModel& index,
                          const SummandModel& summands, double tol) {
    require(tol > 0.0, "series tolerance must be positive");
    const double mu = index.mean();
    require(mu > 0.0, "variance of W needs E[N] > 0");
    require(index.family() != IndexFamily::custom ||
                index.has_finite_support(),
            "variance of W needs an exactly summable index");
    if (summands.is_iid()) return {summands.base().variance(), 0.0};

    const double sup_sigma_sq = summands.sup_sigma_sq();
    auto tail_cert = [&](std::int64_t k) {
        // sum_{j>k} sigma_j^2 P(N >= j) <= sup sigma^2 E[N; N > k].
        return sup_sigma_sq * index.tail_mean(k) / mu;
    };
    std::int64_t horizon = index.truncation_horizon(tol);
    while (tail_cert(horizon) > tol &&
           (!index.has_finite_support() || horizon < index.support_max()))
        horizon += std::max<std::int64_t>(horizon / 4, 16);
    if (index.has_finite_support())
        horizon = std::min(horizon, index.support_max());

    CompensatedSum series;
    for (std::int64_t j = 1; j <= horizon; ++j) {
        const double s = survival(index, j);
        if (s == 0.0) break;
        series.add(summands.moments_at(static_cast<std::size_t>(j)).first * s);
    }
    return {series.sum / mu,
            index.has_finite_support() && horizon >= index.support_max()
                ? 0.0
                : tail_cert(horizon)};
}

}  // namespace randsum
