#include "randsum/index_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace randsum {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("randsum: ") + msg);
}

// Kahan-compensated accumulator; the certified series run to a few hundred
// thousand terms and their tolerances sit near 1e-12.
struct CompensatedSum {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

IndexModel IndexModel::geometric(double p) {
    require(p > 0.0 && p <= 1.0, "geometric index requires p in (0, 1]");
    IndexModel model;
    model.family_ = IndexFamily::geometric;
    model.p_ = p;
    model.mean_ = 1.0 / p;
    model.variance_ = (1.0 - p) / (p * p);
    return model;
}

IndexModel IndexModel::poisson(double lambda) {
    require(lambda > 0.0 && std::isfinite(lambda),
            "poisson index requires lambda > 0");
    require(lambda <= 700.0, "poisson index rate above the supported cap 700");
    IndexModel model;
    model.family_ = IndexFamily::poisson;
    model.lambda_ = lambda;
    model.mean_ = lambda;
    model.variance_ = lambda;
    return model;
}

IndexModel IndexModel::binomial(std::int64_t m, double p) {
    require(m >= 1, "binomial index requires m >= 1");
    require(p >= 0.0 && p <= 1.0, "binomial index requires p in [0, 1]");
    IndexModel model;
    model.family_ = IndexFamily::binomial;
    model.m_ = m;
    model.p_ = p;
    model.mean_ = static_cast<double>(m) * p;
    model.variance_ = static_cast<double>(m) * p * (1.0 - p);
    return model;
}

IndexModel IndexModel::custom(std::vector<double> probs,
                              std::optional<GeometricTailEnvelope> tail) {
    require(!probs.empty(), "custom index needs at least one pmf entry");
    require(probs.size() <= (std::size_t{1} << 24),
            "custom index pmf longer than the supported cap");
    double total = 0.0;
    for (double q : probs) {
        require(q >= 0.0 && std::isfinite(q),
                "custom index pmf entries must be finite and nonnegative");
        total += q;
    }
    require(total <= 1.0 + 1e-9, "custom index pmf mass exceeds 1");
    if (tail) {
        require(tail->constant >= 0.0 && tail->ratio > 0.0 && tail->ratio < 1.0,
                "custom index tail envelope needs ratio in (0, 1)");
    } else {
        require(std::abs(total - 1.0) <= 1e-9,
                "custom index pmf must sum to 1 unless a tail envelope is "
                "declared");
    }

    IndexModel model;
    model.family_ = IndexFamily::custom;
    model.probs_ = std::move(probs);
    model.envelope_ = tail;
    model.cumulative_.resize(model.probs_.size());
    CompensatedSum cum;
    double mean = 0.0, second = 0.0;
    for (std::size_t n = 0; n < model.probs_.size(); ++n) {
        cum.add(model.probs_[n]);
        model.cumulative_[n] = std::min(cum.sum, 1.0);
        mean += static_cast<double>(n) * model.probs_[n];
        second += static_cast<double>(n) * static_cast<double>(n) *
                  model.probs_[n];
    }
    model.mean_ = mean;
    model.variance_ = std::max(0.0, second - mean * mean);
    return model;
}

IndexModel IndexModel::deterministic(std::int64_t n) {
    require(n >= 0, "deterministic index must be nonnegative");
    std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
    probs.back() = 1.0;
    return custom(std::move(probs));
}

double IndexModel::pmf(std::int64_t n) const {
    if (n < 0) return 0.0;
    switch (family_) {
        case IndexFamily::geometric:
            if (n < 1) return 0.0;
            if (p_ == 1.0) return n == 1 ? 1.0 : 0.0;
            return p_ * std::exp(static_cast<double>(n - 1) * std::log1p(-p_));
        case IndexFamily::poisson:
            return std::exp(-lambda_ +
                            static_cast<double>(n) * std::log(lambda_) -
                            std::lgamma(static_cast<double>(n) + 1.0));
        case IndexFamily::binomial: {
            if (n > m_) return 0.0;
            if (p_ == 0.0) return n == 0 ? 1.0 : 0.0;
            if (p_ == 1.0) return n == m_ ? 1.0 : 0.0;
            const double dn = static_cast<double>(n);
            const double dm = static_cast<double>(m_);
            return std::exp(std::lgamma(dm + 1.0) - std::lgamma(dn + 1.0) -
                            std::lgamma(dm - dn + 1.0) + dn * std::log(p_) +
                            (dm - dn) * std::log1p(-p_));
        }
        case IndexFamily::custom: {
            const auto idx = static_cast<std::size_t>(n);
            if (idx < probs_.size()) return probs_[idx];
            if (envelope_)
                return envelope_->constant *
                       std::pow(envelope_->ratio, static_cast<double>(n));
            return 0.0;
        }
    }
    return 0.0;
}

double IndexModel::cdf(std::int64_t n) const {
    if (n < 0) return 0.0;
    switch (family_) {
        case IndexFamily::geometric:
            if (n < 1) return 0.0;
            if (p_ == 1.0) return 1.0;
            // 1 - (1-p)^n, evaluated without cancellation.
            return -std::expm1(static_cast<double>(n) * std::log1p(-p_));
        case IndexFamily::poisson:
        case IndexFamily::binomial: {
            // Summing the pmf directly is exact enough for every caller here;
            // both families cap the loop at a few thousand terms in practice.
            if (family_ == IndexFamily::binomial && n >= m_) return 1.0;
            CompensatedSum c;
            for (std::int64_t k = 0; k <= n; ++k) c.add(pmf(k));
            return std::min(c.sum, 1.0);
        }
        case IndexFamily::custom: {
            const auto idx = static_cast<std::size_t>(n);
            if (idx < cumulative_.size()) return cumulative_[idx];
            return cumulative_.back();
        }
    }
    return 0.0;
}

double IndexModel::tail_prob(std::int64_t n) const {
    if (n < 0) return 1.0;
    switch (family_) {
        case IndexFamily::geometric:
            if (p_ == 1.0) return n >= 1 ? 0.0 : 1.0;
            return std::exp(static_cast<double>(n) * std::log1p(-p_));
        case IndexFamily::poisson: {
            // Geometric-ratio domination: pmf(k+1)/pmf(k) = lambda/(k+1), so
            // beyond n the tail is bounded by pmf(n+1)/(1 - lambda/(n+2)).
            const double rho = lambda_ / static_cast<double>(n + 2);
            if (rho >= 1.0) return 1.0;
            return std::min(1.0, pmf(n + 1) / (1.0 - rho));
        }
        case IndexFamily::binomial: {
            if (n >= m_) return 0.0;
            if (p_ == 1.0) return 1.0;  // all mass at m > n
            const double ratio = (static_cast<double>(m_ - n - 1) * p_) /
                                 (static_cast<double>(n + 2) * (1.0 - p_));
            if (ratio >= 1.0) return 1.0;
            return std::min(1.0, pmf(n + 1) / (1.0 - ratio));
        }
        case IndexFamily::custom: {
            const auto idx = static_cast<std::size_t>(n);
            double within = 0.0;
            if (idx < cumulative_.size())
                within = cumulative_.back() - cumulative_[idx];
            double beyond = 1.0 - cumulative_.back();
            if (envelope_) {
                const double r = envelope_->ratio;
                const auto k = static_cast<double>(
                    std::max<std::int64_t>(n + 1,
                                           static_cast<std::int64_t>(
                                               probs_.size())));
                beyond = std::min(beyond > 0.0 ? beyond : 1.0,
                                  envelope_->constant * std::pow(r, k) /
                                      (1.0 - r));
            }
            return std::min(1.0, within + std::max(0.0, beyond));
        }
    }
    return 1.0;
}

double IndexModel::tail_mean(std::int64_t n) const {
    switch (family_) {
        case IndexFamily::geometric: {
            if (n < 1) return mean_;
            if (p_ == 1.0) return 0.0;
            // E[N; N > n] = (1-p)^n (n + 1/p), exact.
            return std::exp(static_cast<double>(n) * std::log1p(-p_)) *
                   (static_cast<double>(n) + 1.0 / p_);
        }
        case IndexFamily::poisson:
            // E[N; N > n] = lambda * P(N >= n).
            if (n < 1) return mean_;
            return lambda_ * std::min(1.0, pmf(n) + tail_prob(n));
        case IndexFamily::binomial:
            return static_cast<double>(m_) * tail_prob(n);
        case IndexFamily::custom: {
            double s = 0.0;
            for (std::size_t k = std::max<std::int64_t>(n + 1, 0);
                 k < probs_.size(); ++k)
                s += static_cast<double>(k) * probs_[k];
            if (envelope_) {
                const double r = envelope_->ratio;
                const auto start = std::max<std::int64_t>(
                    n + 1, static_cast<std::int64_t>(probs_.size()));
                const double k = static_cast<double>(start);
                // sum_{j >= k} j r^j = r^k (k - (k-1) r) / (1-r)^2
                s += envelope_->constant * std::pow(r, k) *
                     (k - (k - 1.0) * r) / ((1.0 - r) * (1.0 - r));
            }
            return s;
        }
    }
    return 0.0;
}

std::int64_t IndexModel::truncation_horizon(double tol) const {
    require(tol > 0.0, "truncation tolerance must be positive");
    switch (family_) {
        case IndexFamily::geometric: {
            if (p_ == 1.0) return 1;
            const double k = std::log(tol) / std::log1p(-p_);
            return std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                 std::ceil(k)) + 1);
        }
        case IndexFamily::poisson: {
            std::int64_t k = static_cast<std::int64_t>(
                std::ceil(lambda_ + 8.0 * std::sqrt(lambda_) + 16.0));
            while (tail_prob(k) > tol) {
                k += std::max<std::int64_t>(
                    1, static_cast<std::int64_t>(std::sqrt(lambda_) / 2.0));
                if (k > (std::int64_t{1} << 40))
                    throw std::runtime_error(
                        "randsum: poisson truncation horizon search failed");
            }
            return k;
        }
        case IndexFamily::binomial:
            return m_;
        case IndexFamily::custom: {
            std::int64_t k = static_cast<std::int64_t>(probs_.size()) - 1;
            if (envelope_) {
                while (tail_prob(k) > tol) {
                    ++k;
                    if (k > (std::int64_t{1} << 40))
                        throw std::runtime_error(
                            "randsum: custom truncation horizon search "
                            "failed");
                }
            }
            return k;
        }
    }
    return 0;
}

bool IndexModel::has_finite_support() const {
    return family_ == IndexFamily::binomial ||
           (family_ == IndexFamily::custom && !envelope_);
}

std::int64_t IndexModel::support_min() const {
    return family_ == IndexFamily::geometric ? 1 : 0;
}

std::int64_t IndexModel::support_max() const {
    if (family_ == IndexFamily::binomial) return m_;
    if (family_ == IndexFamily::custom && !envelope_)
        return static_cast<std::int64_t>(probs_.size()) - 1;
    throw std::logic_error("randsum: support_max on an unbounded index");
}

std::int64_t IndexModel::sample(RandomStream& stream) const {
    switch (family_) {
        case IndexFamily::geometric: {
            if (p_ == 1.0) {
                (void)stream.uniform01();  // keep draw counts uniform
                return 1;
            }
            const double u = stream.uniform01();
            return 1 + static_cast<std::int64_t>(
                           std::floor(std::log(u) / std::log1p(-p_)));
        }
        case IndexFamily::poisson: {
            // Sequential CDF inversion; exact and O(lambda) per draw.
            double u = stream.uniform01();
            double pk = std::exp(-lambda_);
            double c = pk;
            std::int64_t k = 0;
            while (u > c) {
                ++k;
                pk *= lambda_ / static_cast<double>(k);
                c += pk;
                if (pk < 1e-300) break;  // residual mass below representable
            }
            return k;
        }
        case IndexFamily::binomial: {
            if (p_ == 0.0 || p_ == 1.0) {
                (void)stream.uniform01();
                return p_ == 0.0 ? 0 : m_;
            }
            const double log_p0 =
                static_cast<double>(m_) * std::log1p(-p_);
            if (log_p0 > -700.0) {
                double u = stream.uniform01();
                double pk = std::exp(log_p0);
                double c = pk;
                std::int64_t k = 0;
                const double odds = p_ / (1.0 - p_);
                while (u > c && k < m_) {
                    ++k;
                    pk *= odds * static_cast<double>(m_ - k + 1) /
                          static_cast<double>(k);
                    c += pk;
                    if (pk < 1e-300) break;
                }
                return k;
            }
            // pmf(0) underflows; fall back to summing Bernoulli draws.
            std::int64_t k = 0;
            for (std::int64_t j = 0; j < m_; ++j)
                if (stream.uniform01() < p_) ++k;
            return k;
        }
        case IndexFamily::custom: {
            const double u = stream.uniform01();
            const auto it = std::lower_bound(cumulative_.begin(),
                                             cumulative_.end(), u);
            if (it == cumulative_.end())
                return static_cast<std::int64_t>(cumulative_.size()) - 1;
            return static_cast<std::int64_t>(it - cumulative_.begin());
        }
    }
    return 0;
}

double IndexModel::p() const {
    if (family_ != IndexFamily::geometric && family_ != IndexFamily::binomial)
        throw std::logic_error("randsum: index family has no parameter p");
    return p_;
}

double IndexModel::lambda() const {
    if (family_ != IndexFamily::poisson)
        throw std::logic_error("randsum: index family has no parameter lambda");
    return lambda_;
}

std::int64_t IndexModel::m() const {
    if (family_ != IndexFamily::binomial)
        throw std::logic_error("randsum: index family has no parameter m");
    return m_;
}

IndexMoments index_moments(const IndexModel& model) {
    return IndexMoments{model.mean(), model.variance()};
}

std::vector<std::int64_t> sample_index(const IndexModel& model,
                                       RandomStream& stream,
                                       std::size_t count) {
    std::vector<std::int64_t> out(count);
    for (auto& n : out) n = model.sample(stream);
    return out;
}

SeriesValue inv_sqrt_moment(const IndexModel& model, double tol) {
    require(tol > 0.0, "inv_sqrt_moment tolerance must be positive");
    CompensatedSum sum;
    // n^{-1/2} <= (K+1)^{-1/2} beyond the horizon, so the dropped mass is at
    // most (K+1)^{-1/2} P(N > K); grow K until that certificate meets tol.
    std::int64_t n = 1;
    double weight;  // pmf(n), advanced by the family's ratio recurrence
    switch (model.family()) {
        case IndexFamily::geometric: {
            const double p = model.p();
            weight = p;
            const double q = 1.0 - p;
            while (true) {
                sum.add(weight / std::sqrt(static_cast<double>(n)));
                const double tail =
                    model.tail_prob(n) / std::sqrt(static_cast<double>(n + 1));
                if (tail <= tol) return {sum.sum, tail};
                weight *= q;
                ++n;
                if (n > (std::int64_t{1} << 31))
                    throw std::runtime_error(
                        "randsum: inv_sqrt_moment series did not converge");
            }
        }
        case IndexFamily::poisson: {
            const double lambda = model.lambda();
            weight = lambda * std::exp(-lambda);  // pmf(1)
            while (true) {
                sum.add(weight / std::sqrt(static_cast<double>(n)));
                const double tail =
                    model.tail_prob(n) / std::sqrt(static_cast<double>(n + 1));
                if (tail <= tol) return {sum.sum, tail};
                ++n;
                weight *= lambda / static_cast<double>(n);
            }
        }
        case IndexFamily::binomial:
        case IndexFamily::custom: {
            const std::int64_t hi = model.has_finite_support()
                                        ? model.support_max()
                                        : model.truncation_horizon(tol);
            for (n = 1; n <= hi; ++n)
                sum.add(model.pmf(n) / std::sqrt(static_cast<double>(n)));
            const double tail = model.has_finite_support()
                                    ? 0.0
                                    : model.tail_prob(hi) /
                                          std::sqrt(static_cast<double>(hi + 1));
            return {sum.sum, tail};
        }
    }
    return {};
}

double inv_moment_geometric(double p) {
    require(p > 0.0 && p <= 1.0, "inv_moment_geometric requires p in (0, 1]");
    if (p == 1.0) return 1.0;
    return -p * std::log(p) / (1.0 - p);
}

ScaledIndexLimit ScaledIndexLimit::exponential_rate_one() {
    ScaledIndexLimit limit;
    limit.kind_ = Kind::exponential_rate_one;
    limit.upper_support_ = std::numeric_limits<double>::infinity();
    return limit;
}

ScaledIndexLimit ScaledIndexLimit::point_mass_one() {
    ScaledIndexLimit limit;
    limit.kind_ = Kind::point_mass_one;
    limit.upper_support_ = 1.0;
    return limit;
}

ScaledIndexLimit ScaledIndexLimit::custom(std::function<double(double)> cdf,
                                          double upper_support) {
    require(static_cast<bool>(cdf), "custom scaled-index limit needs a CDF");
    require(upper_support > 0.0 && std::isfinite(upper_support),
            "custom scaled-index limit needs a finite positive upper support");
    ScaledIndexLimit limit;
    limit.kind_ = Kind::custom;
    limit.cdf_ = std::move(cdf);
    limit.upper_support_ = upper_support;
    return limit;
}

double ScaledIndexLimit::cdf(double x) const {
    switch (kind_) {
        case Kind::exponential_rate_one:
            return x <= 0.0 ? 0.0 : -std::expm1(-x);
        case Kind::point_mass_one:
            return x >= 1.0 ? 1.0 : 0.0;
        case Kind::custom:
            if (x <= 0.0) return 0.0;
            if (x >= upper_support_) return 1.0;
            return std::clamp(cdf_(x), 0.0, 1.0);
    }
    return 0.0;
}

double ScaledIndexLimit::cdf_left(double x) const {
    if (kind_ == Kind::point_mass_one) return x > 1.0 ? 1.0 : 0.0;
    return cdf(x);  // the other kinds are continuous
}

double ScaledIndexLimit::tail_beyond(double x) const {
    switch (kind_) {
        case Kind::exponential_rate_one:
            return x <= 0.0 ? 1.0 : std::exp(-x);
        case Kind::point_mass_one:
            return x >= 1.0 ? 0.0 : 1.0;
        case Kind::custom:
            return 1.0 - cdf(x);
    }
    return 0.0;
}

double exact_dk_scaled_index(const IndexModel& model,
                             const ScaledIndexLimit& limit) {
    const double mu = model.mean();
    require(mu > 0.0, "exact_dk_scaled_index needs E[N] > 0");

    if (limit.kind() == ScaledIndexLimit::Kind::point_mass_one) {
        // Both CDFs are flat away from their jumps; the sup reduces to the
        // index mass strictly below and strictly above the atom at 1.
        const double x = mu;  // N/mu crosses 1 at N = mu
        const std::int64_t floor_x = static_cast<std::int64_t>(std::floor(x));
        const bool integer_mu = std::floor(x) == x;
        const double below =
            model.cdf(integer_mu ? floor_x - 1 : floor_x);  // P(N < mu)
        const double above = 1.0 - model.cdf(floor_x);      // P(N > mu)
        return std::max(below, above);
    }

    // Continuous limit: sup candidates are the two edges of every index jump.
    double sup = 0.0;
    double cum = 0.0;
    std::int64_t n = model.support_min();
    std::int64_t guard = 0;
    while (true) {
        const double at = static_cast<double>(n) / mu;
        const double f_limit = limit.cdf(at);
        sup = std::max(sup, std::abs(cum - f_limit));  // left edge of jump
        cum = std::min(1.0, cum + model.pmf(n));
        sup = std::max(sup, std::abs(cum - f_limit));  // right edge
        const double tail_n = model.tail_prob(n);
        const double tail_u = limit.tail_beyond(at);
        if (std::max(tail_n, tail_u) <= 1e-13) break;
        if (model.has_finite_support() && n >= model.support_max() &&
            tail_u <= 1e-13)
            break;
        ++n;
        if (++guard > (std::int64_t{1} << 32))
            throw std::runtime_error(
                "randsum: exact_dk_scaled_index scan did not terminate");
    }
    return sup;
}

}  // namespace randsum
