#include "randsum/summands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace randsum {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("randsum: ") + msg);
}

struct CompensatedSum {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// E|Z|^3 for a standard normal.
constexpr double abs_third_moment_std_normal = 2.0 * sqrt_two_over_pi;

}  // namespace

SummandDist SummandDist::rademacher() {
    SummandDist d;
    d.kind_ = Kind::rademacher;
    d.variance_ = 1.0;
    d.xi_ = 1.0;
    d.lattice_ = LatticeSpec{-1.0, 2.0, {0.5, 0.5}};
    return d;
}

SummandDist SummandDist::two_point(double a, double b) {
    require(a < 0.0 && 0.0 < b && std::isfinite(a) && std::isfinite(b),
            "two_point summand requires a < 0 < b");
    SummandDist d;
    d.kind_ = Kind::two_point;
    d.a_ = a;
    d.b_ = b;
    const double pa = b / (b - a);
    const double pb = -a / (b - a);
    d.variance_ = pa * a * a + pb * b * b;
    d.xi_ = pa * (-a) * a * a + pb * b * b * b;
    d.lattice_ = LatticeSpec{a, b - a, {pa, pb}};
    return d;
}

SummandDist SummandDist::centered_uniform(double half_width) {
    require(half_width > 0.0 && std::isfinite(half_width),
            "centered_uniform summand requires half_width > 0");
    SummandDist d;
    d.kind_ = Kind::centered_uniform;
    d.a_ = half_width;
    d.variance_ = half_width * half_width / 3.0;
    d.xi_ = half_width * half_width * half_width / 4.0;
    return d;
}

SummandDist SummandDist::centered_exponential() {
    SummandDist d;
    d.kind_ = Kind::centered_exponential;
    d.variance_ = 1.0;
    // E|E - 1|^3 = 12/e - 2 for E ~ Exp(1).
    d.xi_ = 12.0 / 2.71828182845904523536 - 2.0;
    return d;
}

SummandDist SummandDist::gaussian(double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma),
            "gaussian summand requires sigma > 0");
    SummandDist d;
    d.kind_ = Kind::gaussian;
    d.a_ = sigma;
    d.variance_ = sigma * sigma;
    d.xi_ = sigma * sigma * sigma * abs_third_moment_std_normal;
    return d;
}

SummandDist SummandDist::lattice(double offset, double step,
                                 std::vector<double> probs) {
    require(!probs.empty(), "lattice summand needs at least one atom");
    require(probs.size() == 1 || step > 0.0,
            "lattice summand requires step > 0");
    double total = 0.0;
    for (double q : probs) {
        require(q >= 0.0 && std::isfinite(q),
                "lattice summand weights must be finite and nonnegative");
        total += q;
    }
    require(std::abs(total - 1.0) <= 1e-12,
            "lattice summand weights must sum to 1");

    double mean = 0.0, second = 0.0, third_abs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double v = offset + step * static_cast<double>(i);
        mean += probs[i] * v;
        second += probs[i] * v * v;
        third_abs += probs[i] * std::abs(v) * v * v;
        scale = std::max(scale, std::abs(v));
    }
    require(std::abs(mean) <= 1e-9 * std::max(1.0, scale),
            "lattice summand must be centered");

    SummandDist d;
    d.kind_ = Kind::lattice;
    d.variance_ = second;
    d.xi_ = third_abs;
    d.lattice_ = LatticeSpec{offset, probs.size() == 1 ? 1.0 : step,
                             std::move(probs)};
    d.lattice_cumulative_.resize(d.lattice_->probs.size());
    CompensatedSum cum;
    for (std::size_t i = 0; i < d.lattice_->probs.size(); ++i) {
        cum.add(d.lattice_->probs[i]);
        d.lattice_cumulative_[i] = std::min(cum.sum, 1.0);
    }
    return d;
}

const LatticeSpec& SummandDist::lattice_spec() const {
    if (!lattice_)
        throw std::logic_error("randsum: summand distribution has no lattice");
    return *lattice_;
}

double SummandDist::sample(RandomStream& stream) const {
    switch (kind_) {
        case Kind::rademacher:
            return stream.uniform01() < 0.5 ? -1.0 : 1.0;
        case Kind::two_point:
            return stream.uniform01() < b_ / (b_ - a_) ? a_ : b_;
        case Kind::centered_uniform:
            return (2.0 * stream.uniform01() - 1.0) * a_;
        case Kind::centered_exponential:
            return stream.exponential() - 1.0;
        case Kind::gaussian:
            return a_ * stream.normal();
        case Kind::lattice: {
            const double u = stream.uniform01();
            const auto it = std::lower_bound(lattice_cumulative_.begin(),
                                             lattice_cumulative_.end(), u);
            const std::size_t i =
                it == lattice_cumulative_.end()
                    ? lattice_cumulative_.size() - 1
                    : static_cast<std::size_t>(it -
                                               lattice_cumulative_.begin());
            return lattice_->offset + lattice_->step * static_cast<double>(i);
        }
    }
    return 0.0;
}

SummandModel SummandModel::iid(SummandDist dist) {
    return SummandModel(std::move(dist));
}

SummandModel SummandModel::schedule(SummandDist base,
                                    std::function<double(std::size_t)> rule,
                                    ScheduleEnvelope envelope,
                                    double rule_limit) {
    require(static_cast<bool>(rule), "schedule needs a variance rule");
    require(envelope.rule_lo > 0.0 && envelope.rule_hi >= envelope.rule_lo,
            "schedule envelope requires 0 < rule_lo <= rule_hi");
    require(rule_limit >= envelope.rule_lo && rule_limit <= envelope.rule_hi,
            "schedule rule limit must lie inside its envelope");
    SummandModel model(std::move(base));
    model.rule_ = std::move(rule);
    model.envelope_ = envelope;
    model.rule_limit_ = rule_limit;
    return model;
}

SummandModel SummandModel::schedule_one_plus_inv_j(SummandDist base) {
    return schedule(
        std::move(base),
        [](std::size_t j) { return 1.0 + 1.0 / static_cast<double>(j); },
        ScheduleEnvelope{1.0, 2.0}, 1.0);
}

double SummandModel::variance_rule(std::size_t j) const {
    if (!rule_) return 1.0;
    require(j >= 1, "variance rule is defined for j >= 1");
    const double r = rule_(j);
    if (!(r >= envelope_.rule_lo && r <= envelope_.rule_hi))
        throw std::domain_error(
            "randsum: schedule rule value escaped its declared envelope");
    return r;
}

std::pair<double, double> SummandModel::moments_at(std::size_t j) const {
    const double r = variance_rule(j);
    return {r * base_.variance(),
            r * std::sqrt(r) * base_.abs_third_moment()};
}

SummandModel::Accumulator::Accumulator(const SummandModel& model)
    : model_(&model) {
    state_.sigma_hat_sq_limit = model.sigma_hat_sq_limit();
}

void SummandModel::Accumulator::advance() {
    ++state_.n;
    const auto [s2, xi] = model_->moments_at(state_.n);
    sum_sigma_sq_ += s2;
    sum_xi_ += xi;
    const double dn = static_cast<double>(state_.n);
    state_.sigma_hat_sq = sum_sigma_sq_ / dn;
    state_.xi_hat = sum_xi_ / dn;
}

MomentAggregates SummandModel::aggregates(std::size_t n) const {
    Accumulator acc(*this);
    for (std::size_t j = 0; j < n; ++j) acc.advance();
    return acc.current();
}

std::optional<double> SummandModel::sigma_hat_sq_limit() const {
    if (!rule_) return base_.variance();
    return rule_limit_ * base_.variance();
}

double SummandModel::sigma_hat_sq_lo() const {
    return (rule_ ? envelope_.rule_lo : 1.0) * base_.variance();
}

double SummandModel::sigma_hat_sq_hi() const {
    return (rule_ ? envelope_.rule_hi : 1.0) * base_.variance();
}

double SummandModel::xi_hat_hi() const {
    const double hi = rule_ ? envelope_.rule_hi : 1.0;
    return hi * std::sqrt(hi) * base_.abs_third_moment();
}

double SummandModel::sup_sigma_sq() const {
    return (rule_ ? envelope_.rule_hi : 1.0) * base_.variance();
}

double SummandModel::sample_partial_sum(std::size_t n,
                                        RandomStream& stream) const {
    double s = 0.0;
    if (!rule_) {
        for (std::size_t j = 0; j < n; ++j) s += base_.sample(stream);
        return s;
    }
    for (std::size_t j = 1; j <= n; ++j)
        s += std::sqrt(variance_rule(j)) * base_.sample(stream);
    return s;
}

double LatticePmf::mass() const {
    CompensatedSum c;
    for (double q : probs) c.add(q);
    return c.sum;
}

double LatticePmf::mean() const {
    CompensatedSum c;
    for (std::size_t i = 0; i < probs.size(); ++i)
        c.add(probs[i] * value_at(i));
    return c.sum;
}

double LatticePmf::variance() const {
    const double m = mean();
    CompensatedSum c;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double d = value_at(i) - m;
        c.add(probs[i] * d * d);
    }
    return c.sum;
}

LatticePmf lattice_partial_pmf(const SummandModel& model, std::size_t n) {
    if (!model.is_iid())
        throw std::invalid_argument(
            "randsum: partial-sum lattice pmf needs an iid lattice summand; "
            "a variance schedule has no common lattice");
    if (!model.base().is_lattice())
        throw std::invalid_argument(
            "randsum: partial-sum lattice pmf needs a lattice summand");
    if (n > (std::size_t{1} << 20))
        throw std::invalid_argument(
            "randsum: partial-sum convolution size beyond the supported cap");

    const LatticeSpec& spec = model.base().lattice_spec();
    LatticePmf out;
    out.step = spec.step;
    if (n == 0) {
        out.offset = 0.0;
        out.probs = {1.0};
        return out;
    }
    out.offset = spec.offset * static_cast<double>(n);
    const std::size_t w = spec.probs.size();
    std::vector<double> cur{1.0};
    std::vector<double> next;
    for (std::size_t j = 1; j <= n; ++j) {
        next.assign(cur.size() + w - 1, 0.0);
        for (std::size_t k = 0; k < cur.size(); ++k) {
            if (cur[k] == 0.0) continue;
            for (std::size_t i = 0; i < w; ++i)
                next[k + i] += cur[k] * spec.probs[i];
        }
        cur.swap(next);
    }
    out.probs = std::move(cur);
    return out;
}

}  // namespace randsum
