#pragma once

#include <string>

#include "randsum/index_models.hpp"
#include "randsum/limits.hpp"
#include "randsum/summands.hpp"

// Every approximation-error bound as a first-class value: which metric, which
// statement it instantiates (theorem_tag, named by what the statement does),
// the certified truncation error of any series involved, and an echo of the
// inputs for report provenance.  value + truncation_error is always a valid
// bound; value alone is the computed partial sum.

namespace randsum {

enum class Metric { kolmogorov, wasserstein };

const char* metric_name(Metric metric);

struct ConstantsRegistry {
    double c_k = 0.56;  // Kolmogorov Berry-Esseen constant
    double c_w = 6.0;   // Wasserstein Berry-Esseen constant
};

struct BoundValue {
    double value = 0.0;
    Metric metric = Metric::kolmogorov;
    std::string theorem_tag;
    double truncation_error = 0.0;
    std::string inputs_digest;

    double certified() const { return value + truncation_error; }
};

// Distance of the sum of the first n summands, scaled by 1/sqrt(mu), to the
// normal law with the matching variance.  n = 0 gives 0: both laws are the
// point mass at zero.
BoundValue conditional_be_bound(std::int64_t n, const SummandModel& summands,
                                double mu, Metric metric,
                                const ConstantsRegistry& constants = {});

// Distance of W to the variance mixture Z sharing its index, as the certified
// expectation of the conditional bound over N.  iid fast paths: the closed
// form C_W xi / (sqrt(mu) sigma^2) for Wasserstein and the certified series
// C_K (xi / sigma^3) E[N^{-1/2}] for Kolmogorov.
BoundValue w_vs_z_bound(const IndexModel& index, const SummandModel& summands,
                        Metric metric, const ConstantsRegistry& constants = {},
                        double tol = 1e-10);

// A Kolmogorov distance between the mixing laws transfers unchanged to the
// normal scale mixtures they induce, for every sigma at once.
BoundValue mixture_transfer_dk(double dk_scaled_index);

// Wasserstein distance of the scale mixture with mixing N/E[N] to the normal
// law with the same sigma: sigma sqrt(2/pi) sqrt(Var N) / E[N].
BoundValue mixture_vs_normal_w1_bound(double sigma, const IndexModel& index);

// Distance between centered normals with standard deviations sigma and tau.
BoundValue gaussian_pair_bound(double sigma, double tau, Metric metric);

// Distance of the index-driven variance mixture to the mixture with the
// limiting variance: a pmf-weighted series over the variance-ratio terms.
BoundValue variance_drift_bound(const IndexModel& index,
                                const SummandModel& summands, Metric metric,
                                double tol = 1e-10);

enum class LimitComparison { mixture_dk, normal_w1 };

// Distance of the variance mixture Z to the stated limit: the drift series
// plus either a supplied index-level Kolmogorov distance (mixture_dk) or the
// mixture-vs-normal Wasserstein term (normal_w1).  Bounding L(W) against the
// limit additionally needs w_vs_z_bound via the triangle inequality.
BoundValue combined_limit_bound(const IndexModel& index,
                                const SummandModel& summands,
                                LimitComparison mode,
                                std::optional<double> dk_index_vs_limit = {},
                                const ConstantsRegistry& constants = {},
                                double tol = 1e-10);

// Sandwich for E[N^{-1/2}] under the geometric index.
struct InvSqrtEnvelope {
    double lower = 0.0;  // sqrt(p)
    double upper = 0.0;  // 2 sqrt(p) / (1 + sqrt(p))
};
InvSqrtEnvelope geometric_inv_sqrt_envelope(double p);

enum class BoundMode { iid, noniid, noniid_alt };

struct TheoremBound {
    BoundValue bound;
    LimitLaw target;
};

// Kolmogorov distance of the geometric random sum to its Laplace limit.
// iid: 2 C_K (xi/sigma^3) sqrt(p) + 12 p against Laplace(0, sigma/sqrt 2);
// with sharp set, the sqrt(p) envelope is replaced by the exact series
// E[N^{-1/2}].  noniid: 12 p + drift series + certified series
// C_K E[N^{-1/2} xi_hat_N / sigma_hat_N^3], against Laplace(0,
// sigma_hat/sqrt 2).  noniid_alt: the variance-weighted alternative with
// target scale drawn from E[sigma_N^2] = Var(W).
TheoremBound geometric_laplace_bound(double p, const SummandModel& summands,
                                     BoundMode mode,
                                     const ConstantsRegistry& constants = {},
                                     double tol = 1e-10, bool sharp = false);

// Wasserstein distance of the Poisson or binomial random sum to its normal
// limit; index must be one of those two families.  iid closed forms:
// (C_W xi/sigma^2 + sigma sqrt(2/pi)) / sqrt(lambda) and
// (C_W xi/sigma^2 + sigma sqrt(2(1-p)/pi)) / sqrt(mp); noniid adds the
// certified series and drift terms.
TheoremBound normal_limit_bound(const IndexModel& index,
                                const SummandModel& summands,
                                BoundMode mode,
                                const ConstantsRegistry& constants = {},
                                double tol = 1e-10);

// Var(W) = mu^{-1} sum_j sigma_j^2 P(N >= j), with certified tail <= tol.
SeriesValue variance_of_w(const IndexModel& index,
                          const SummandModel& summands, double tol = 1e-10);

}  // namespace randsum
