#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "randsum/bounds.hpp"
#include "randsum/index_models.hpp"
#include "randsum/limits.hpp"
#include "randsum/summands.hpp"

// Kolmogorov and Wasserstein distances between random-sum laws and limit
// laws: empirical estimators with stated confidence bands, an exact lattice
// oracle, and numerical CDF-difference integration.

namespace randsum {

enum class DistanceMethod { empirical, exact_lattice, numeric_cdf };

struct DistanceEstimate {
    double value = 0.0;
    Metric metric = Metric::kolmogorov;
    DistanceMethod method = DistanceMethod::empirical;
    // Statistical half-width for empirical methods; accumulated numeric or
    // truncation error for the exact ones.
    double band = 0.0;
    std::optional<std::size_t> n_samples;
    std::optional<std::uint64_t> seed;
};

// sup over both jump edges of every order statistic against the target CDF.
// Input order does not matter: the estimator sorts a copy.  band is the DKW
// half-width sqrt(log(2/delta) / (2n)).
DistanceEstimate empirical_dk(const std::vector<double>& samples,
                              const LimitLaw& target, double delta = 0.01);

// W1 between the empirical measure and the target.  Each order-statistic
// interval is integrated exactly through the target's tail integrals (no
// midpoint rule), so band carries only the accumulated evaluation error of
// those integrals.
DistanceEstimate empirical_w1(const std::vector<double>& samples,
                              const LimitLaw& target);

// Exact Kolmogorov distance between a lattice law and the target: the sup is
// scanned over both jump edges of every atom, plus the target's own jump
// edge when it carries an atom at zero.  band = pmf deficiency (untracked
// mass can sit anywhere) + the target's cdf tolerance.
DistanceEstimate exact_dk_lattice(const LatticePmf& pmf,
                                  const LimitLaw& target);

// int |F_a - F_b| dz over a window certified to leave at most tail_tol of
// either law's first-moment mass outside; band = 2 * tail_tol (window plus
// quadrature budgets).
DistanceEstimate numeric_w1_between_cdfs(const LimitLaw& a, const LimitLaw& b,
                                         double tail_tol = 1e-8);

// Exact law of W = mu^{-1/2} sum_{j<=N} X_j for iid lattice summands, by
// incremental convolution up to the tail_tol index horizon; the dropped index
// tail is the returned deficiency.  Atoms for different n are merged by exact
// integer bookkeeping on (n, k) pairs, which requires offset/step to admit a
// small rational refinement.
LatticePmf random_sum_exact_pmf(const IndexModel& index,
                                const SummandModel& summands,
                                double tail_tol = 1e-10);

// Closed-form distances between N(0, sigma^2) and N(0, tau^2).  Kolmogorov:
// the sup sits where the two densities cross, t*^2 = 2 s^2 t^2 log(t/s) /
// (t^2 - s^2); Wasserstein: sqrt(2/pi) |sigma - tau|.
DistanceEstimate gaussian_pair_exact(double sigma, double tau, Metric metric);

}  // namespace randsum
