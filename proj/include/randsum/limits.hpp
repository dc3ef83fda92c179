#pragma once

#include <optional>
#include <vector>

#include "randsum/index_models.hpp"
#include "randsum/rng.hpp"

// Limit laws for normalized random sums.  Besides the normal and Laplace
// laws these are variance mixtures Y = sigma * sqrt(U) * Z with Z standard
// normal: U can follow a ScaledIndexLimit (the law of N/E[N] in the limit)
// or be N/E[N] itself for a concrete index model.  Every cdf value carries a
// certified absolute error bound, cdf_tolerance(), because downstream
// verdicts hinge on comparing these numbers against Monte Carlo bands.

namespace randsum {

class LimitLaw {
  public:
    enum class Kind { normal, laplace, scale_mixture, index_mixture };

    static LimitLaw normal(double sigma);
    // Density exp(-|z - location| / scale) / (2 scale).
    static LimitLaw laplace(double location, double scale);
    static LimitLaw scale_mixture(double sigma, ScaledIndexLimit mixing);
    static LimitLaw index_mixture(double sigma, IndexModel index);

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    double location() const { return location_; }
    double variance() const;

    double cdf(double z) const;
    // Left limit; differs from cdf only at an atom, which these laws can
    // have only at zero (an index with P(N = 0) > 0, or mixing mass at 0).
    double cdf_left(double z) const;
    double atom_mass_at_zero() const;
    double cdf_tolerance() const { return cdf_tol_; }

    // Density of the continuous part; rejects custom mixing laws, whose
    // cdf-only description does not expose one.
    double pdf(double z) const;

    // Smallest z with cdf(z) >= q, up to the cdf tolerance.
    double quantile(double q) const;

    double sample(RandomStream& stream) const;

    // E[Y 1{Y <= z}]; closed form, normal and laplace kinds only.
    double lower_partial_mean(double z) const;

    // E[(Y - r)^+] and E[(-Y - r)^+] for r >= 0 (they coincide for the
    // centered kinds).  Used to certify truncations of integrals of |F - G|
    // over the real line.
    double upper_tail_integral(double r) const;
    double lower_tail_integral(double r) const;

  private:
    LimitLaw() = default;
    double mixture_cdf(double z) const;
    double mixture_tail_integral(double r) const;

    Kind kind_ = Kind::normal;
    double scale_ = 1.0;     // sigma for normal/mixtures, b for laplace
    double location_ = 0.0;  // laplace only; every other kind is centered
    double cdf_tol_ = 0.0;
    std::optional<ScaledIndexLimit> mixing_;
    std::optional<IndexModel> index_;
};

std::vector<double> sample_limit(const LimitLaw& law, RandomStream& stream,
                                 std::size_t count);

}  // namespace randsum
