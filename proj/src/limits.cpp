#include "randsum/limits.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "randsum/special_functions.hpp"

namespace randsum {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("randsum: ") + what);
}

// E[(sigma Z - r)^+] for Z standard normal; valid for every real r.
double normal_plus_part(double sigma, double r) {
    if (sigma == 0.0) return r < 0.0 ? -r : 0.0;
    const double t = r / sigma;
    return sigma * normal_pdf(t) - r * (0.5 * std::erfc(t / sqrt_two));
}

// Phi(z / (sigma sqrt(u))) extended by continuity to u = 0.
double mixed_normal_cdf(double z, double sigma, double u) {
    if (u <= 0.0) return z > 0.0 ? 1.0 : (z < 0.0 ? 0.0 : 0.5);
    return normal_cdf(z / (sigma * std::sqrt(u)));
}

// Exp(1) mixing integrals.  Substituting u = t^2 turns
// int_0^inf g(u) e^{-u} du into int_0^T 2 t e^{-t^2} g(t^2) dt with the
// discarded mass beyond T^2 = 28 below 7e-13 of sup|g|.
constexpr double exp_mix_cut = 28.0;

double exp_mixture_integral(const std::function<double(double)>& g) {
    const double upper = std::sqrt(exp_mix_cut);
    auto f = [&](double t) {
        return 2.0 * t * std::exp(-t * t) * g(t * t);
    };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, 0.0, upper, 14, 1e-11);
}

// Certified midpoint of int_(0,B] h dG for h monotone in u, by bracketing
// with lower/upper Stieltjes sums on a refining uniform grid.  The atom of G
// at zero is excluded; callers account for it separately.
double stieltjes_monotone(const ScaledIndexLimit& mixing,
                          const std::function<double(double)>& h, double tol) {
    const double b = mixing.upper_support();
    require(b > 0.0, "mixing law needs positive upper support");
    const double g0 = mixing.cdf(0.0);
    for (std::size_t m = 64; m <= (std::size_t{1} << 22); m *= 2) {
        double lo = 0.0, hi = 0.0;
        double g_prev = g0;
        double h_prev = h(0.0);
        for (std::size_t i = 1; i <= m; ++i) {
            const double u = b * static_cast<double>(i) / static_cast<double>(m);
            const double g_here = mixing.cdf(u);
            const double dg = g_here - g_prev;
            const double h_here = h(u);
            lo += dg * std::min(h_prev, h_here);
            hi += dg * std::max(h_prev, h_here);
            g_prev = g_here;
            h_prev = h_here;
        }
        if (hi - lo <= tol) return 0.5 * (lo + hi);
    }
    throw std::runtime_error(
        "randsum: mixing-law bracketing failed to reach its tolerance");
}

}  // namespace

LimitLaw LimitLaw::normal(double sigma) {
    require(sigma > 0.0, "normal limit requires sigma > 0");
    LimitLaw law;
    law.kind_ = Kind::normal;
    law.scale_ = sigma;
    law.cdf_tol_ = 1e-14;
    return law;
}

LimitLaw LimitLaw::laplace(double location, double scale) {
    require(scale > 0.0, "laplace limit requires scale > 0");
    LimitLaw law;
    law.kind_ = Kind::laplace;
    law.scale_ = scale;
    law.location_ = location;
    law.cdf_tol_ = 1e-14;
    return law;
}

LimitLaw LimitLaw::scale_mixture(double sigma, ScaledIndexLimit mixing) {
    require(sigma > 0.0, "scale mixture requires sigma > 0");
    LimitLaw law;
    law.kind_ = Kind::scale_mixture;
    law.scale_ = sigma;
    law.mixing_ = std::move(mixing);
    // Custom mixing is integrated by first-order bracketing, so its
    // certificate is coarser than the quadrature-backed named kinds.
    switch (law.mixing_->kind()) {
        case ScaledIndexLimit::Kind::point_mass_one:
            law.cdf_tol_ = 1e-14;
            break;
        case ScaledIndexLimit::Kind::exponential_rate_one:
            law.cdf_tol_ = 1e-9;
            break;
        case ScaledIndexLimit::Kind::custom:
            law.cdf_tol_ = 1e-6;
            break;
    }
    return law;
}

LimitLaw LimitLaw::index_mixture(double sigma, IndexModel index) {
    require(sigma > 0.0, "index mixture requires sigma > 0");
    LimitLaw law;
    law.kind_ = Kind::index_mixture;
    law.scale_ = sigma;
    law.index_ = std::move(index);
    law.cdf_tol_ = 1e-9;
    return law;
}

double LimitLaw::variance() const {
    switch (kind_) {
        case Kind::normal:
            return scale_ * scale_;
        case Kind::laplace:
            return 2.0 * scale_ * scale_;
        case Kind::scale_mixture: {
            const double s2 = scale_ * scale_;
            switch (mixing_->kind()) {
                case ScaledIndexLimit::Kind::exponential_rate_one:
                case ScaledIndexLimit::Kind::point_mass_one:
                    return s2;  // E[U] = 1 for both
                case ScaledIndexLimit::Kind::custom:
                    return s2 * stieltjes_monotone(
                                    *mixing_, [](double u) { return u; },
                                    2e-6 * (1.0 + mixing_->upper_support()));
            }
            return s2;
        }
        case Kind::index_mixture:
            // Var(Y) = sigma^2 E[N] / E[N] = sigma^2.
            return scale_ * scale_;
    }
    return 0.0;
}

double LimitLaw::atom_mass_at_zero() const {
    switch (kind_) {
        case Kind::normal:
        case Kind::laplace:
            return 0.0;
        case Kind::scale_mixture:
            return mixing_->cdf(0.0);
        case Kind::index_mixture:
            return index_->pmf(0);
    }
    return 0.0;
}

double LimitLaw::mixture_cdf(double z) const {
    if (kind_ == Kind::scale_mixture) {
        switch (mixing_->kind()) {
            case ScaledIndexLimit::Kind::point_mass_one:
                return normal_cdf(z / scale_);
            case ScaledIndexLimit::Kind::exponential_rate_one: {
                const double body = exp_mixture_integral(
                    [&](double u) { return mixed_normal_cdf(z, scale_, u); });
                // Mass beyond the cut contributes in [0, e^{-cut}].
                const double tail = std::exp(-exp_mix_cut);
                return body + 0.5 * tail;
            }
            case ScaledIndexLimit::Kind::custom: {
                const double atom =
                    z >= 0.0 ? mixing_->cdf(0.0) : 0.0;
                return atom + stieltjes_monotone(
                                  *mixing_,
                                  [&](double u) {
                                      return mixed_normal_cdf(z, scale_, u);
                                  },
                                  4e-7);
            }
        }
    }
    // Index mixture: sum over atoms of N with a certified discarded tail.
    const IndexModel& index = *index_;
    const double mu = index.mean();
    const std::int64_t horizon = index.truncation_horizon(5e-10);
    double sum = 0.0, c = 0.0;
    for (std::int64_t n = index.support_min(); n <= horizon; ++n) {
        const double w = index.pmf(n);
        if (w == 0.0) continue;
        const double term =
            n == 0 ? (z >= 0.0 ? w : 0.0)
                   : w * mixed_normal_cdf(z, scale_,
                                          static_cast<double>(n) / mu);
        const double y = term - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum + 0.5 * index.tail_prob(horizon);
}

double LimitLaw::cdf(double z) const {
    switch (kind_) {
        case Kind::normal:
            return normal_cdf(z / scale_);
        case Kind::laplace:
            return laplace_cdf(z, location_, scale_);
        case Kind::scale_mixture:
        case Kind::index_mixture:
            return mixture_cdf(z);
    }
    return 0.0;
}

double LimitLaw::pdf(double z) const {
    switch (kind_) {
        case Kind::normal:
            return normal_pdf(z / scale_) / scale_;
        case Kind::laplace:
            return std::exp(-std::abs(z - location_) / scale_) /
                   (2.0 * scale_);
        case Kind::scale_mixture:
            switch (mixing_->kind()) {
                case ScaledIndexLimit::Kind::point_mass_one:
                    return normal_pdf(z / scale_) / scale_;
                case ScaledIndexLimit::Kind::exponential_rate_one:
                    // d/dz of the mixture cdf under the same u = t^2 cut.
                    return exp_mixture_integral([&](double u) {
                        const double s = scale_ * std::sqrt(u);
                        return normal_pdf(z / s) / s;
                    });
                case ScaledIndexLimit::Kind::custom:
                    throw std::logic_error(
                        "randsum: a cdf-only mixing law exposes no density");
            }
            return 0.0;
        case Kind::index_mixture: {
            const IndexModel& index = *index_;
            const double mu = index.mean();
            const std::int64_t horizon = index.truncation_horizon(1e-10);
            double sum = 0.0;
            for (std::int64_t n = std::max<std::int64_t>(index.support_min(), 1);
                 n <= horizon; ++n) {
                const double w = index.pmf(n);
                if (w == 0.0) continue;
                const double s =
                    scale_ * std::sqrt(static_cast<double>(n) / mu);
                sum += w * normal_pdf(z / s) / s;
            }
            // Dropped terms are each below pmf(n) / (s_n sqrt(2 pi)) with
            // s_n increasing, so the tail is under tail_prob(horizon)
            // sqrt(mu / horizon) / (sigma sqrt(2 pi)).
            return sum;
        }
    }
    return 0.0;
}

double LimitLaw::cdf_left(double z) const {
    if (z == 0.0) {
        const double atom = atom_mass_at_zero();
        if (atom > 0.0) return cdf(0.0) - atom;
    }
    return cdf(z);
}

double LimitLaw::quantile(double q) const {
    require(q > 0.0 && q < 1.0, "quantile needs q in (0, 1)");
    switch (kind_) {
        case Kind::normal:
            return scale_ * normal_quantile(q);
        case Kind::laplace:
            return laplace_quantile(q, location_, scale_);
        default:
            break;
    }
    double hi = scale_;
    while (cdf(hi) < q) hi *= 2.0;
    double lo = -scale_;
    while (cdf(lo) > q) lo *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (cdf(mid) >= q)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-13 * (1.0 + std::abs(hi))) break;
    }
    return hi;
}

double LimitLaw::sample(RandomStream& stream) const {
    switch (kind_) {
        case Kind::normal:
            return scale_ * stream.normal();
        case Kind::laplace: {
            const double u = stream.uniform01();
            return location_ + (u < 0.5 ? scale_ * std::log(2.0 * u)
                                        : -scale_ * std::log(2.0 * (1.0 - u)));
        }
        case Kind::scale_mixture: {
            double u = 1.0;
            switch (mixing_->kind()) {
                case ScaledIndexLimit::Kind::point_mass_one:
                    break;
                case ScaledIndexLimit::Kind::exponential_rate_one:
                    u = stream.exponential();
                    break;
                case ScaledIndexLimit::Kind::custom: {
                    // Generalized inverse of the mixing cdf by bisection.
                    const double target = stream.uniform01();
                    double lo = 0.0, hi = mixing_->upper_support();
                    for (int iter = 0; iter < 80; ++iter) {
                        const double mid = 0.5 * (lo + hi);
                        if (mixing_->cdf(mid) >= target)
                            hi = mid;
                        else
                            lo = mid;
                    }
                    u = hi;
                    break;
                }
            }
            return scale_ * std::sqrt(u) * stream.normal();
        }
        case Kind::index_mixture: {
            const double n = static_cast<double>(index_->sample(stream));
            return scale_ * std::sqrt(n / index_->mean()) * stream.normal();
        }
    }
    return 0.0;
}

double LimitLaw::lower_partial_mean(double z) const {
    switch (kind_) {
        case Kind::normal:
            return -scale_ * normal_pdf(z / scale_);
        case Kind::laplace: {
            // E[Y 1{Y<=z}] = a F(z) + E[V 1{V<=z-a}] for the centered part V.
            const double b = scale_;
            const double s = z - location_;
            const double centered = s <= 0.0
                                        ? 0.5 * (s - b) * std::exp(s / b)
                                        : -0.5 * (s + b) * std::exp(-s / b);
            return location_ * laplace_cdf(z, location_, b) + centered;
        }
        default:
            throw std::logic_error(
                "randsum: partial means are provided for normal and laplace "
                "limits only");
    }
}

double LimitLaw::mixture_tail_integral(double r) const {
    if (kind_ == Kind::scale_mixture) {
        switch (mixing_->kind()) {
            case ScaledIndexLimit::Kind::point_mass_one:
                return normal_plus_part(scale_, r);
            case ScaledIndexLimit::Kind::exponential_rate_one: {
                const double body = exp_mixture_integral([&](double u) {
                    return normal_plus_part(scale_ * std::sqrt(u), r);
                });
                // Beyond the cut the integrand is below
                // sigma sqrt(u) e^{-u} / sqrt(2 pi); by parts,
                // int_U^inf sqrt(u) e^{-u} du <= e^{-U} (sqrt(U) + 1/(2 sqrt(U))).
                const double root = std::sqrt(exp_mix_cut);
                const double tail = scale_ * inv_sqrt_two_pi *
                                    std::exp(-exp_mix_cut) *
                                    (root + 0.5 / root);
                return body + tail;
            }
            case ScaledIndexLimit::Kind::custom:
                return stieltjes_monotone(
                    *mixing_,
                    [&](double u) {
                        return normal_plus_part(scale_ * std::sqrt(u), r);
                    },
                    1e-6 * (1.0 + scale_));
        }
    }
    const IndexModel& index = *index_;
    const double mu = index.mean();
    std::int64_t horizon = index.truncation_horizon(1e-12);
    // Terms grow like sqrt(n); certify the discarded part with
    // sum_{n>K} sqrt(n) pmf(n) <= sqrt(tail_mean(K) tail_prob(K)).
    auto tail_cert = [&](std::int64_t k) {
        return scale_ * inv_sqrt_two_pi / std::sqrt(mu) *
               std::sqrt(index.tail_mean(k) * index.tail_prob(k));
    };
    while (tail_cert(horizon) > 1e-10 &&
           (!index.has_finite_support() || horizon < index.support_max()))
        horizon += std::max<std::int64_t>(horizon / 4, 16);
    double sum = 0.0;
    for (std::int64_t n = std::max<std::int64_t>(index.support_min(), 1);
         n <= horizon; ++n) {
        const double w = index.pmf(n);
        if (w == 0.0) continue;
        sum += w * normal_plus_part(
                       scale_ * std::sqrt(static_cast<double>(n) / mu), r);
    }
    return sum + tail_cert(horizon);
}

namespace {

// E[(V - s)^+] for V Laplace(0, b), any real s.
double laplace_plus_part(double b, double s) {
    if (s >= 0.0) return 0.5 * b * std::exp(-s / b);
    return -s + 0.5 * b * std::exp(s / b);
}

}  // namespace

double LimitLaw::upper_tail_integral(double r) const {
    require(r >= 0.0, "tail integral needs r >= 0");
    switch (kind_) {
        case Kind::normal:
            return normal_plus_part(scale_, r);
        case Kind::laplace:
            return laplace_plus_part(scale_, r - location_);
        case Kind::scale_mixture:
        case Kind::index_mixture:
            return mixture_tail_integral(r);
    }
    return 0.0;
}

double LimitLaw::lower_tail_integral(double r) const {
    require(r >= 0.0, "tail integral needs r >= 0");
    // -Y has the same law for every kind except an off-center laplace.
    if (kind_ == Kind::laplace)
        return laplace_plus_part(scale_, r + location_);
    return upper_tail_integral(r);
}

std::vector<double> sample_limit(const LimitLaw& law, RandomStream& stream,
                                 std::size_t count) {
    std::vector<double> out(count);
    for (auto& y : out) y = law.sample(stream);
    return out;
}

}  // namespace randsum
