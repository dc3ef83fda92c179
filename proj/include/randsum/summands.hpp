#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "randsum/rng.hpp"

// Centered summands X_j with finite third absolute moments.  A model is
// either iid or a deterministic variance schedule: a base preset rescaled by
// a per-index factor, which keeps E[X_j] = 0 and gives closed-form moments
// sigma_j^2 = r_j sigma^2 and xi_j = r_j^{3/2} xi for variance rule r_j.

namespace randsum {

struct LatticeSpec {
    double offset = 0.0;  // value of the first atom
    double step = 0.0;    // spacing between consecutive atoms
    std::vector<double> probs;
};

class SummandDist {
  public:
    enum class Kind {
        rademacher,
        two_point,
        centered_uniform,
        centered_exponential,
        gaussian,
        lattice,
    };

    static SummandDist rademacher();
    // Atoms a < 0 < b with the centering weights P(X=a) = b/(b-a),
    // P(X=b) = -a/(b-a).
    static SummandDist two_point(double a, double b);
    static SummandDist centered_uniform(double half_width);
    static SummandDist centered_exponential();  // Exp(1) - 1
    static SummandDist gaussian(double sigma);
    // Atoms offset + step*i with the given weights; must already be centered.
    static SummandDist lattice(double offset, double step,
                               std::vector<double> probs);

    Kind kind() const { return kind_; }
    double variance() const { return variance_; }
    double abs_third_moment() const { return xi_; }
    bool is_lattice() const { return lattice_.has_value(); }
    const LatticeSpec& lattice_spec() const;

    double sample(RandomStream& stream) const;

  private:
    SummandDist() = default;
    Kind kind_ = Kind::rademacher;
    double variance_ = 0.0;
    double xi_ = 0.0;
    double a_ = 0.0, b_ = 0.0;        // two_point / uniform half-width / sigma
    std::optional<LatticeSpec> lattice_;
    std::vector<double> lattice_cumulative_;
};

struct MomentAggregates {
    std::size_t n = 0;
    double sigma_hat_sq = 0.0;  // n^{-1} sum_{j<=n} sigma_j^2
    double xi_hat = 0.0;        // n^{-1} sum_{j<=n} xi_j
    std::optional<double> sigma_hat_sq_limit;
};

// Bounds on the variance rule r_j over all j >= 1, used to certify series
// tails that involve sigma_hat_n or xi_hat_n beyond a truncation horizon.
struct ScheduleEnvelope {
    double rule_lo = 1.0;
    double rule_hi = 1.0;
};

class SummandModel {
  public:
    static SummandModel iid(SummandDist dist);
    // General variance schedule sigma_j^2 = rule(j) * base variance; the
    // envelope must bound rule(j) for every j and rule_limit its Cesaro
    // limit, both supplied by the caller because they are what certify
    // infinite-series truncations.
    static SummandModel schedule(SummandDist base,
                                 std::function<double(std::size_t)> rule,
                                 ScheduleEnvelope envelope, double rule_limit);
    // The named rule r_j = 1 + 1/j (envelope (1, 2], Cesaro limit 1).
    static SummandModel schedule_one_plus_inv_j(SummandDist base);

    bool is_iid() const { return !rule_; }
    const SummandDist& base() const { return base_; }
    double variance_rule(std::size_t j) const;

    // (sigma_j^2, xi_j)
    std::pair<double, double> moments_at(std::size_t j) const;

    MomentAggregates aggregates(std::size_t n) const;

    // O(1)-per-step aggregate walker for the series evaluations.
    class Accumulator {
      public:
        explicit Accumulator(const SummandModel& model);
        void advance();  // extends the window from n to n+1
        const MomentAggregates& current() const { return state_; }

      private:
        const SummandModel* model_;
        MomentAggregates state_;
        double sum_sigma_sq_ = 0.0, sum_xi_ = 0.0;
    };
    Accumulator accumulator() const { return Accumulator(*this); }

    std::optional<double> sigma_hat_sq_limit() const;

    // Envelope-derived constants for certified series tails: bounds on
    // sigma_hat_n^2 and xi_hat_n valid for every n, and sup_j sigma_j^2.
    double sigma_hat_sq_lo() const;
    double sigma_hat_sq_hi() const;
    double xi_hat_hi() const;
    double sup_sigma_sq() const;

    double sample_partial_sum(std::size_t n, RandomStream& stream) const;

  private:
    explicit SummandModel(SummandDist base) : base_(std::move(base)) {}
    SummandDist base_;
    std::function<double(std::size_t)> rule_;  // empty for iid
    ScheduleEnvelope envelope_{};
    double rule_limit_ = 1.0;
};

// Exact pmf on an arithmetic lattice, possibly missing `deficiency` of its
// mass to an index-tail truncation.  Atom i sits at offset + step * i.
struct LatticePmf {
    double offset = 0.0;
    double step = 1.0;
    std::vector<double> probs;
    double deficiency = 0.0;

    double mass() const;
    double mean() const;
    double variance() const;
    double value_at(std::size_t i) const { return offset + step * static_cast<double>(i); }
};

// Distribution of X_1 + ... + X_n for an iid lattice summand, by n-fold
// convolution.  n = 0 gives the point mass at 0.
LatticePmf lattice_partial_pmf(const SummandModel& model, std::size_t n);

}  // namespace randsum
