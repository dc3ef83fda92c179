#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "randsum/rng.hpp"

// Random index N of the sum: the supported families, their moments, certified
// tail bounds used to truncate every expectation-over-N series, and the exact
// Kolmogorov distance between the scaled index N/E[N] and its limit law.
//
// Support conventions: geometric lives on {1, 2, ...} (success-counting form,
// pmf p(1-p)^{n-1}); Poisson and binomial live on {0, 1, ...}.  Every series
// over N taken elsewhere starts at n = 1: the n = 0 summand is zero because
// the sum conditioned on N = 0 is the point mass at 0.

namespace randsum {

enum class IndexFamily { geometric, poisson, binomial, custom };

// Declares P(N = n) <= constant * ratio^n beyond the explicitly listed probs,
// which is what makes tail queries on an infinite custom model certifiable.
struct GeometricTailEnvelope {
    double constant = 0.0;
    double ratio = 0.0;
};

class IndexModel {
  public:
    static IndexModel geometric(double p);
    static IndexModel poisson(double lambda);
    static IndexModel binomial(std::int64_t m, double p);
    // probs[n] = P(N = n) starting at n = 0.  Either the probs account for
    // all mass (sum to 1 within 1e-9) or a geometric tail envelope certifies
    // what is missing; anything else is rejected.
    static IndexModel custom(std::vector<double> probs,
                             std::optional<GeometricTailEnvelope> tail = {});
    static IndexModel deterministic(std::int64_t n);

    IndexFamily family() const { return family_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }

    double pmf(std::int64_t n) const;
    double cdf(std::int64_t n) const;  // P(N <= n)

    // Certified upper bounds on P(N > n) and E[N; N > n]; exact where a
    // closed form exists (geometric, finite supports).
    double tail_prob(std::int64_t n) const;
    double tail_mean(std::int64_t n) const;

    // Smallest horizon K (within a coarse search) with tail_prob(K) <= tol.
    std::int64_t truncation_horizon(double tol) const;

    bool has_finite_support() const;
    std::int64_t support_min() const;
    std::int64_t support_max() const;  // only when has_finite_support()

    std::int64_t sample(RandomStream& stream) const;

    // Family parameters; throw when queried on the wrong family.
    double p() const;
    double lambda() const;
    std::int64_t m() const;

  private:
    IndexModel() = default;

    IndexFamily family_ = IndexFamily::custom;
    double p_ = 0.0;
    double lambda_ = 0.0;
    std::int64_t m_ = 0;
    double mean_ = 0.0;
    double variance_ = 0.0;
    std::vector<double> probs_;     // custom only
    std::vector<double> cumulative_;  // custom only
    std::optional<GeometricTailEnvelope> envelope_;
};

struct IndexMoments {
    double mean = 0.0;
    double variance = 0.0;
};

IndexMoments index_moments(const IndexModel& model);

std::vector<std::int64_t> sample_index(const IndexModel& model,
                                       RandomStream& stream,
                                       std::size_t count);

// Value of a truncated nonnegative series together with a certified bound on
// everything the truncation dropped.
struct SeriesValue {
    double value = 0.0;
    double truncation_error = 0.0;
};

// E[N^{-1/2}] with the n = 0 term contributing zero.
SeriesValue inv_sqrt_moment(const IndexModel& model, double tol = 1e-10);

// E[N^{-1}] for the geometric family: -p log(p) / (1 - p), continued to 1 at
// p = 1.
double inv_moment_geometric(double p);

// Limit law of the scaled index N/E[N]: either Exp(1), the point mass at 1,
// or a caller-supplied continuous CDF with compact support [0, upper_support].
class ScaledIndexLimit {
  public:
    enum class Kind { exponential_rate_one, point_mass_one, custom };

    static ScaledIndexLimit exponential_rate_one();
    static ScaledIndexLimit point_mass_one();
    static ScaledIndexLimit custom(std::function<double(double)> cdf,
                                   double upper_support);

    Kind kind() const { return kind_; }
    double cdf(double x) const;
    double cdf_left(double x) const;   // left limit; differs only at atoms
    double tail_beyond(double x) const;  // 1 - cdf(x), exact for named kinds
    double upper_support() const { return upper_support_; }

  private:
    ScaledIndexLimit() = default;
    Kind kind_ = Kind::exponential_rate_one;
    std::function<double(double)> cdf_;
    double upper_support_ = 0.0;
};

// Exact sup-distance between the CDF of N/E[N] and the limit CDF, located by
// scanning both jump edges of every index atom (and the limit's own atom when
// it has one).  The discarded tail is driven below 1e-13 before returning.
double exact_dk_scaled_index(const IndexModel& model,
                             const ScaledIndexLimit& limit);

}  // namespace randsum
