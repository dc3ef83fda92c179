#include "randsum/distances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "randsum/special_functions.hpp"

namespace randsum {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("randsum: ") + what);
}

// Antiderivative of the CDF and of the survival function:
// A(z) = E[(z - Y)^+] = int_{-inf}^z F,  B(z) = E[(Y - z)^+] = int_z^inf (1-F).
// Both reduce to the law's one-sided tail integrals, which every LimitLaw
// kind certifies, via A(z) - B(z) = z - E[Y].
double cdf_antideriv(const LimitLaw& law, double z) {
    const double mean = law.location();
    if (z <= 0.0) return law.lower_tail_integral(-z);
    return z - mean + law.upper_tail_integral(z);
}

double survival_antideriv(const LimitLaw& law, double z) {
    const double mean = law.location();
    if (z >= 0.0) return law.upper_tail_integral(z);
    return mean - z + law.lower_tail_integral(-z);
}

// Per-call evaluation error of the tail integrals, used to budget bands.
double tail_integral_slop(const LimitLaw& law) {
    return 4.0 * law.cdf_tolerance() * (1.0 + law.scale());
}

// Best rational approximation p/q to r with q <= q_max, by continued
// fractions.  Returns false when even the best one misses by more than tol.
bool rational_approx(double r, std::int64_t q_max, double tol,
                     std::int64_t* p_out, std::int64_t* q_out) {
    std::int64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // convergents
    double x = r;
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(x);
        if (std::abs(fl) > 4e18) break;
        const auto a = static_cast<std::int64_t>(fl);
        const std::int64_t p2 = a * p0 + p1, q2 = a * q0 + q1;
        if (q2 > q_max) break;
        p1 = p0; q1 = q0; p0 = p2; q0 = q2;
        const double frac = x - fl;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    if (q0 == 0) return false;
    if (std::abs(r - static_cast<double>(p0) / static_cast<double>(q0)) >
        tol)
        return false;
    *p_out = p0;
    *q_out = q0;
    return true;
}

}  // namespace

DistanceEstimate empirical_dk(const std::vector<double>& samples,
                              const LimitLaw& target, double delta) {
    require(!samples.empty(), "empirical distance needs samples");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    std::vector<double> xs = samples;
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = target.cdf(xs[i]);
        sup = std::max(sup, std::abs(static_cast<double>(i + 1) / n - f));
        sup = std::max(sup, std::abs(static_cast<double>(i) / n - f));
    }
    DistanceEstimate out;
    out.value = sup;
    out.metric = Metric::kolmogorov;
    out.method = DistanceMethod::empirical;
    out.band = std::sqrt(std::log(2.0 / delta) / (2.0 * n));
    out.n_samples = xs.size();
    return out;
}

DistanceEstimate empirical_w1(const std::vector<double>& samples,
                              const LimitLaw& target) {
    require(!samples.empty(), "empirical distance needs samples");
    std::vector<double> xs = samples;
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());

    // int |Fhat - F| dz, interval by interval.  Fhat is i/n on
    // (x_{i-1}, x_i), 0 left of the smallest sample and 1 right of the
    // largest; each piece integrates in closed form through A(z), with the
    // crossing point given by the target quantile.
    double total = cdf_antideriv(target, xs.front());
    total += survival_antideriv(target, xs.back());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double a = xs[i - 1], b = xs[i];
        if (!(a < b)) continue;
        const double u = static_cast<double>(i) / n;
        const double c = std::clamp(target.quantile(u), a, b);
        const double ia = cdf_antideriv(target, a);
        const double ib = cdf_antideriv(target, b);
        const double ic = cdf_antideriv(target, c);
        const double piece =
            u * (c - a) - (ic - ia) + (ib - ic) - u * (b - c);
        total += std::max(piece, 0.0);
    }
    DistanceEstimate out;
    out.value = total;
    out.metric = Metric::wasserstein;
    out.method = DistanceMethod::empirical;
    out.band = 2.0 * (n + 1.0) * tail_integral_slop(target);
    out.n_samples = xs.size();
    return out;
}

DistanceEstimate exact_dk_lattice(const LatticePmf& pmf,
                                  const LimitLaw& target) {
    require(!pmf.probs.empty(), "lattice pmf is empty");
    double running = 0.0;
    double lattice_below_zero = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const double x = pmf.value_at(i);
        const double f = target.cdf(x);
        sup = std::max(sup, std::abs(running - f));  // left edge
        running += pmf.probs[i];
        sup = std::max(sup, std::abs(running - f));
        if (x < 0.0) lattice_below_zero = running;
    }
    // A target atom at zero adds one jump the lattice scan cannot see unless
    // zero happens to be an atom of the lattice too.
    if (target.atom_mass_at_zero() > 0.0)
        sup = std::max(sup,
                       std::abs(lattice_below_zero - target.cdf_left(0.0)));
    DistanceEstimate out;
    out.value = sup;
    out.metric = Metric::kolmogorov;
    out.method = DistanceMethod::exact_lattice;
    out.band = pmf.deficiency + target.cdf_tolerance();
    return out;
}

DistanceEstimate numeric_w1_between_cdfs(const LimitLaw& a, const LimitLaw& b,
                                         double tail_tol) {
    require(tail_tol > 0.0, "tail tolerance must be positive");

    // Symmetric window grown until the part of int |F_a - F_b| outside it,
    // which is at most the sum of the four one-sided first-moment tails, is
    // certified below tail_tol.
    double radius = 4.0 * std::max(a.scale() + std::abs(a.location()),
                                   b.scale() + std::abs(b.location()));
    radius = std::max(radius, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        const double right =
            survival_antideriv(a, radius) + survival_antideriv(b, radius);
        const double left =
            cdf_antideriv(a, -radius) + cdf_antideriv(b, -radius);
        if (right <= 0.5 * tail_tol && left <= 0.5 * tail_tol) break;
        radius *= 2.0;
    }

    // |F_a - F_b| has kinks at the locations and possibly a jump at zero;
    // integrate between those breakpoints so the adaptive rule never
    // straddles one.
    std::vector<double> cuts = {-radius, radius};
    for (double c : {0.0, a.location(), b.location()})
        if (c > -radius && c < radius) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto diff = [&](double z) { return std::abs(a.cdf(z) - b.cdf(z)); };
    double body = 0.0, err_total = 0.0;
    using quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        body += quad::integrate(diff, cuts[i], cuts[i + 1], 12, 1e-10, &err);
        err_total += err;
    }
    require(err_total <= tail_tol, "quadrature failed its error budget");

    DistanceEstimate out;
    out.value = body;
    out.metric = Metric::wasserstein;
    out.method = DistanceMethod::numeric_cdf;
    out.band = 2.0 * tail_tol;
    return out;
}

LatticePmf random_sum_exact_pmf(const IndexModel& index,
                                const SummandModel& summands,
                                double tail_tol) {
    require(tail_tol > 0.0, "tail tolerance must be positive");
    require(summands.is_iid() && summands.base().is_lattice(),
            "the exact law needs iid lattice summands");
    const double mu = index.mean();
    require(mu > 0.0, "the exact law needs E[N] > 0");
    const auto& spec = summands.base().lattice_spec();
    const double scale = 1.0 / std::sqrt(mu);
    const auto width = static_cast<std::int64_t>(spec.probs.size());

    if (width == 1) {
        // A centered single atom sits at zero, so W does too.
        LatticePmf point;
        point.offset = 0.0;
        point.step = scale;
        point.probs = {1.0};
        return point;
    }

    // Atom of the n-fold convolution: n * offset + k * step.  With
    // offset/step = p/q the value is (np + kq) * (step/q) exactly, so an
    // integer key merges coinciding atoms across different n with no
    // floating-point comparisons.
    std::int64_t kp = 0, kq = 1;
    require(rational_approx(spec.offset / spec.step, 1024,
                            1e-12 * std::max(1.0,
                                             std::abs(spec.offset /
                                                      spec.step)),
                            &kp, &kq),
            "summand lattice offset/step admits no small rational refinement");

    std::int64_t horizon = index.truncation_horizon(tail_tol);
    if (index.has_finite_support())
        horizon = std::min(horizon, index.support_max());
    require(horizon * (width - 1) <= (std::int64_t{1} << 22),
            "index horizon pushes the convolution past the size cap");

    std::map<std::int64_t, double> atoms;
    if (index.pmf(0) > 0.0) atoms[0] += index.pmf(0);
    std::vector<double> conv = {1.0};  // law of the n-fold sum, in k steps
    for (std::int64_t n = 1; n <= horizon; ++n) {
        std::vector<double> next(conv.size() + spec.probs.size() - 1, 0.0);
        for (std::size_t i = 0; i < conv.size(); ++i) {
            if (conv[i] == 0.0) continue;
            for (std::size_t j = 0; j < spec.probs.size(); ++j)
                next[i + j] += conv[i] * spec.probs[j];
        }
        conv.swap(next);
        const double wn = index.pmf(n);
        if (wn == 0.0) continue;
        for (std::size_t k = 0; k < conv.size(); ++k)
            if (conv[k] > 0.0)
                atoms[n * kp + static_cast<std::int64_t>(k) * kq] +=
                    wn * conv[k];
    }

    const std::int64_t key_lo = atoms.begin()->first;
    const std::int64_t key_hi = atoms.rbegin()->first;
    require(key_hi - key_lo < (std::int64_t{1} << 23),
            "merged lattice span exceeds the size cap");
    const double fine_step = spec.step / static_cast<double>(kq);
    LatticePmf out;
    out.offset = scale * fine_step * static_cast<double>(key_lo);
    out.step = scale * fine_step;
    out.probs.assign(static_cast<std::size_t>(key_hi - key_lo + 1), 0.0);
    for (const auto& [key, mass] : atoms)
        out.probs[static_cast<std::size_t>(key - key_lo)] = mass;
    out.deficiency = index.has_finite_support() && horizon >= index.support_max()
                         ? 0.0
                         : index.tail_prob(horizon);
    return out;
}

DistanceEstimate gaussian_pair_exact(double sigma, double tau, Metric metric) {
    require(sigma > 0.0 && tau > 0.0, "pair distance needs sigma, tau > 0");
    DistanceEstimate out;
    out.metric = metric;
    out.method = DistanceMethod::numeric_cdf;
    if (sigma == tau) return out;
    if (metric == Metric::wasserstein) {
        out.value = sqrt_two_over_pi * std::abs(sigma - tau);
        return out;
    }
    // The densities cross where phi(t/s)/s = phi(t/t')/t'.
    const double s2 = sigma * sigma, t2 = tau * tau;
    const double tstar =
        std::sqrt(2.0 * s2 * t2 * std::log(tau / sigma) / (t2 - s2));
    out.value = std::abs(normal_cdf(tstar / sigma) - normal_cdf(tstar / tau));
    return out;
}

}  // namespace randsum
