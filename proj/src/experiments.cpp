#include "randsum/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "randsum/index_models.hpp"
#include "randsum/limits.hpp"
#include "randsum/rng.hpp"
#include "randsum/summands.hpp"
#include "randsum/version.hpp"

namespace randsum {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1])))
        --hi;
    return s.substr(lo, hi - lo);
}

// Everything a verification needs, resolved from the config once.
struct Prepared {
    IndexModel index;
    SummandModel summands;
    Metric metric = Metric::kolmogorov;
    BoundValue bound;
    LimitLaw target = LimitLaw::normal(1.0);
    double param = 0.0;
    double mix_sigma = 0.0;  // scale for the index-mixture comparison law
};

IndexModel build_index(const ExperimentConfig& cfg) {
    const std::string family = cfg.get("index.family");
    if (family == "geometric") return IndexModel::geometric(cfg.number("index.p"));
    if (family == "poisson") return IndexModel::poisson(cfg.number("index.lambda"));
    if (family == "binomial")
        return IndexModel::binomial(cfg.integer("index.m"),
                                    cfg.number("index.p"));
    if (family == "deterministic")
        return IndexModel::deterministic(cfg.integer("index.n"));
    throw ConfigError("unknown index.family '" + family + "'");
}

SummandModel build_summands(const ExperimentConfig& cfg) {
    const std::string preset = cfg.get_or("summands.preset", "rademacher");
    SummandDist base = [&] {
        if (preset == "rademacher") return SummandDist::rademacher();
        if (preset == "two_point")
            return SummandDist::two_point(cfg.number("summands.a"),
                                          cfg.number("summands.b"));
        if (preset == "centered_uniform")
            return SummandDist::centered_uniform(
                cfg.number("summands.half_width"));
        if (preset == "centered_exponential")
            return SummandDist::centered_exponential();
        if (preset == "gaussian")
            return SummandDist::gaussian(cfg.number("summands.sigma"));
        if (preset == "lattice")
            return SummandDist::lattice(cfg.number("summands.offset"),
                                        cfg.number("summands.step"),
                                        cfg.number_list("summands.probs"));
        throw ConfigError("unknown summands.preset '" + preset + "'");
    }();
    const std::string schedule = cfg.get_or("summands.schedule", "none");
    if (schedule == "none") return SummandModel::iid(std::move(base));
    if (schedule == "one_plus_inv_j")
        return SummandModel::schedule_one_plus_inv_j(std::move(base));
    throw ConfigError("unknown summands.schedule '" + schedule + "'");
}

ConstantsRegistry build_constants(const ExperimentConfig& cfg) {
    ConstantsRegistry constants;
    constants.c_k = cfg.number_or("constants.c_k", constants.c_k);
    constants.c_w = cfg.number_or("constants.c_w", constants.c_w);
    return constants;
}

Metric build_metric(const ExperimentConfig& cfg, const std::string& family) {
    const std::string fallback =
        (family == "poisson" || family == "binomial") ? "wasserstein"
                                                      : "kolmogorov";
    const std::string name = cfg.get_or("metric", fallback);
    if (name == "kolmogorov") return Metric::kolmogorov;
    if (name == "wasserstein") return Metric::wasserstein;
    throw ConfigError("unknown metric '" + name + "'");
}

BoundMode build_mode(const ExperimentConfig& cfg, bool iid_model) {
    const std::string name =
        cfg.get_or("theorem.mode", iid_model ? "iid" : "noniid");
    if (name == "iid") return BoundMode::iid;
    if (name == "noniid") return BoundMode::noniid;
    if (name == "noniid_alt") return BoundMode::noniid_alt;
    throw ConfigError("unknown theorem.mode '" + name + "'");
}

Prepared prepare(const ExperimentConfig& cfg) {
    const std::string family = cfg.get("index.family");
    Prepared out{build_index(cfg), build_summands(cfg)};
    out.metric = build_metric(cfg, family);
    const auto constants = build_constants(cfg);
    const double tol = cfg.number_or("theorem.tol", 1e-10);

    if (family == "deterministic") {
        // A sure index is the plain central limit theorem; the comparison is
        // against the normal law with the window's own variance.
        const auto n = cfg.integer("index.n");
        out.bound = conditional_be_bound(n, out.summands,
                                         static_cast<double>(n), out.metric,
                                         constants);
        out.mix_sigma = std::sqrt(
            out.summands.aggregates(static_cast<std::size_t>(n)).sigma_hat_sq);
        out.target = LimitLaw::normal(out.mix_sigma);
        out.param = static_cast<double>(n);
    } else if (family == "geometric") {
        if (out.metric != Metric::kolmogorov)
            throw ConfigError(
                "the geometric-to-Laplace theorems control the Kolmogorov "
                "metric only; metric=wasserstein has no bound to verify here");
        const double p = cfg.number("index.p");
        auto tb = geometric_laplace_bound(
            p, out.summands, build_mode(cfg, out.summands.is_iid()),
            constants, tol, cfg.flag_or("theorem.sharp", false));
        out.bound = tb.bound;
        out.target = tb.target;
        out.mix_sigma = tb.target.scale() * sqrt_two;  // sigma of the mixture
        out.param = p;
    } else {
        if (out.metric != Metric::wasserstein)
            throw ConfigError(
                "the " + family +
                "-to-normal theorems control the Wasserstein metric only; "
                "metric=kolmogorov has no bound to verify here");
        auto tb = normal_limit_bound(out.index, out.summands,
                                     build_mode(cfg, out.summands.is_iid()),
                                     constants, tol);
        out.bound = tb.bound;
        out.target = tb.target;
        out.mix_sigma = tb.target.scale();
        out.param = family == "poisson" ? cfg.number("index.lambda")
                                        : cfg.number("index.p");
    }

    // An explicit target overrides the theorem's own.
    const std::string target_kind = cfg.get_or("target.kind", "auto");
    if (target_kind == "normal")
        out.target = LimitLaw::normal(cfg.number("target.sigma"));
    else if (target_kind == "laplace")
        out.target = LimitLaw::laplace(cfg.number_or("target.location", 0.0),
                                       cfg.number("target.scale"));
    else if (target_kind != "auto")
        throw ConfigError("unknown target.kind '" + target_kind + "'");
    return out;
}

// Antiderivatives of the CDF and survival function via the law's certified
// tail integrals (same identities the distance module uses).
double cdf_antideriv(const LimitLaw& law, double z) {
    if (z <= 0.0) return law.lower_tail_integral(-z);
    return z - law.location() + law.upper_tail_integral(z);
}

double survival_antideriv(const LimitLaw& law, double z) {
    if (z >= 0.0) return law.upper_tail_integral(z);
    return law.location() - z + law.lower_tail_integral(-z);
}

// Exact W1 between a lattice law and a limit law, interval by interval.  The
// pmf's missing mass is folded onto the atom nearest zero so the CDF gap
// closes; the relocation is covered in the band by deficiency * span.
DistanceEstimate w1_lattice_vs_law(const LatticePmf& pmf,
                                   const LimitLaw& law) {
    if (pmf.probs.empty())
        throw std::invalid_argument("randsum: lattice pmf is empty");
    std::vector<double> probs = pmf.probs;
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        if (std::abs(pmf.value_at(i)) < std::abs(pmf.value_at(nearest)))
            nearest = i;
    probs[nearest] += pmf.deficiency;

    double total = cdf_antideriv(law, pmf.value_at(0));
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cum += probs[i];
        const double a = pmf.value_at(i), b = pmf.value_at(i + 1);
        if (cum <= 0.0) {
            total += cdf_antideriv(law, b) - cdf_antideriv(law, a);
            continue;
        }
        const double c =
            cum >= 1.0 ? b : std::clamp(law.quantile(cum), a, b);
        const double ia = cdf_antideriv(law, a);
        const double ib = cdf_antideriv(law, b);
        const double ic = cdf_antideriv(law, c);
        total += std::max(
            cum * (c - a) - (ic - ia) + (ib - ic) - cum * (b - c), 0.0);
    }
    total += survival_antideriv(law, pmf.value_at(probs.size() - 1));

    DistanceEstimate out;
    out.value = total;
    out.metric = Metric::wasserstein;
    out.method = DistanceMethod::exact_lattice;
    const double span =
        pmf.value_at(probs.size() - 1) - pmf.value_at(0);
    out.band = pmf.deficiency * span +
               4.0 * static_cast<double>(probs.size() + 1) *
                   law.cdf_tolerance() * (1.0 + law.scale());
    return out;
}

std::vector<double> sample_w(const IndexModel& index,
                             const SummandModel& summands,
                             RandomStream& stream, std::size_t count) {
    const double root_mu = std::sqrt(index.mean());
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = index.sample(stream);
        out.push_back(
            summands.sample_partial_sum(static_cast<std::size_t>(n), stream) /
            root_mu);
    }
    return out;
}

DistanceEstimate estimate_distance(const ExperimentConfig& cfg,
                                   const Prepared& prep,
                                   std::uint64_t row_index,
                                   std::optional<std::uint64_t>* seed_out) {
    const std::string method = cfg.get_or("method.kind", "exact");
    if (method == "exact") {
        const double tail_tol = cfg.number_or("method.tail_tol", 1e-10);
        auto pmf = random_sum_exact_pmf(prep.index, prep.summands, tail_tol);
        return prep.metric == Metric::kolmogorov
                   ? exact_dk_lattice(pmf, prep.target)
                   : w1_lattice_vs_law(pmf, prep.target);
    }
    if (method == "numeric") {
        if (prep.metric != Metric::wasserstein)
            throw ConfigError(
                "method.kind=numeric integrates |F_a - F_b|, which is the "
                "Wasserstein comparison; use exact or empirical for "
                "Kolmogorov");
        // 1e-7 leaves room for the mixture CDF's own series truncation in
        // the quadrature error budget; the 2e-7 band is negligible next to
        // the bounds being verified.
        const double tail_tol = cfg.number_or("method.tail_tol", 1e-7);
        const auto mixture =
            LimitLaw::index_mixture(prep.mix_sigma, prep.index);
        return numeric_w1_between_cdfs(mixture, prep.target, tail_tol);
    }
    if (method != "empirical")
        throw ConfigError("unknown method.kind '" + method + "'");

    const auto n_samples =
        static_cast<std::size_t>(cfg.integer_or("method.n_samples", 100000));
    const auto master =
        static_cast<std::uint64_t>(cfg.integer_or("method.master_seed", 12345));
    *seed_out = master;
    if (prep.metric == Metric::kolmogorov) {
        const auto n_seeds = cfg.integer_or("method.n_seeds", 1);
        if (n_seeds < 1) throw ConfigError("method.n_seeds must be >= 1");
        const double delta = cfg.number_or("method.delta", 0.01);
        DistanceEstimate worst;
        for (std::int64_t r = 0; r < n_seeds; ++r) {
            auto stream = RandomStream::derive(master, row_index,
                                               static_cast<std::uint64_t>(r));
            auto est = empirical_dk(
                sample_w(prep.index, prep.summands, stream, n_samples),
                prep.target, delta);
            if (r == 0 || est.value > worst.value) worst = est;
        }
        worst.seed = master;
        return worst;
    }
    // Wasserstein: the statistical band comes from seed replication, so a
    // single replicate is not enough to state one.
    const auto n_seeds = cfg.integer_or("method.n_seeds", 10);
    if (n_seeds < 10)
        throw ConfigError(
            "empirical Wasserstein runs need method.n_seeds >= 10 for the "
            "replication band");
    double sum = 0.0, sum_sq = 0.0, band_sum = 0.0;
    for (std::int64_t r = 0; r < n_seeds; ++r) {
        auto stream = RandomStream::derive(master, row_index,
                                           static_cast<std::uint64_t>(r));
        auto est = empirical_w1(
            sample_w(prep.index, prep.summands, stream, n_samples),
            prep.target);
        sum += est.value;
        sum_sq += est.value * est.value;
        band_sum += est.band;
    }
    const double n = static_cast<double>(n_seeds);
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
    DistanceEstimate out;
    out.value = mean;
    out.metric = Metric::wasserstein;
    out.method = DistanceMethod::empirical;
    out.band = 3.0 * std::sqrt(var / n) + band_sum / n;
    out.n_samples = n_samples;
    out.seed = master;
    return out;
}

VerificationReport run_verify_row(const ExperimentConfig& cfg,
                                  std::uint64_t row_index) {
    const auto prep = prepare(cfg);
    VerificationReport report;
    report.param = prep.param;
    report.bound = prep.bound;
    report.estimate = estimate_distance(cfg, prep, row_index, &report.seed);

    // Conservative on both sides: pass compares against the series value
    // (a lower bound on the theorem bound), fail against the certified top.
    const double est = report.estimate->value;
    const double band = report.estimate->band;
    report.margin = report.bound.value - est - band;
    if (*report.margin >= 0.0)
        report.verdict = Verdict::pass;
    else if (est - band > report.bound.certified())
        report.verdict = Verdict::fail;
    else
        report.verdict = Verdict::inconclusive;
    return report;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " has no '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              " has an empty key");
        cfg.kv_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

void ExperimentConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
        throw ConfigError("override '" + assignment +
                          "' is not of the form key=value");
    kv_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

bool ExperimentConfig::has(const std::string& key) const {
    return kv_.count(key) != 0;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string ExperimentConfig::get_or(const std::string& key,
                                     const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double ExperimentConfig::number(const std::string& key) const {
    const std::string& text = get(key);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError("config key '" + key + "' is not a number: " + text);
    return v;
}

double ExperimentConfig::number_or(const std::string& key,
                                   double fallback) const {
    return has(key) ? number(key) : fallback;
}

std::int64_t ExperimentConfig::integer(const std::string& key) const {
    const std::string& text = get(key);
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError("config key '" + key +
                          "' is not an integer: " + text);
    return v;
}

std::int64_t ExperimentConfig::integer_or(const std::string& key,
                                          std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool ExperimentConfig::flag_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& text = get(key);
    if (text == "true" || text == "1" || text == "yes" || text == "on")
        return true;
    if (text == "false" || text == "0" || text == "no" || text == "off")
        return false;
    throw ConfigError("config key '" + key + "' is not a flag: " + text);
}

std::vector<double> ExperimentConfig::number_list(
    const std::string& key) const {
    const std::string& text = get(key);
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string piece = trim(text.substr(start, comma - start));
        if (piece.empty())
            throw ConfigError("config key '" + key +
                              "' has an empty list entry");
        char* end = nullptr;
        const double v = std::strtod(piece.c_str(), &end);
        if (end == piece.c_str() || *end != '\0')
            throw ConfigError("config key '" + key +
                              "' has a non-numeric entry: " + piece);
        out.push_back(v);
        start = comma + 1;
    }
    return out;
}

const char* verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::bound_only: return "bound_only";
    }
    return "?";
}

SlopeFit fit_loglog_slope(
    const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("randsum: slope fit needs >= 2 points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        if (x <= 0.0 || y <= 0.0)
            throw std::invalid_argument(
                "randsum: slope fit needs positive coordinates");
        mx += std::log(x);
        my += std::log(y);
    }
    const double n = static_cast<double>(points.size());
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("randsum: slope fit needs distinct x");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

VerificationReport run_bound(const ExperimentConfig& cfg) {
    const auto prep = prepare(cfg);
    VerificationReport report;
    report.param = prep.param;
    report.bound = prep.bound;
    report.verdict = Verdict::bound_only;
    return report;
}

VerificationReport run_verify(const ExperimentConfig& cfg) {
    return run_verify_row(cfg, 0);
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    const std::string key = cfg.get("sweep.param");
    const auto values = cfg.number_list("sweep.values");
    if (values.size() < 4)
        throw ConfigError("sweep.values needs at least 4 grid points");
    bool increasing = true, decreasing = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        increasing = increasing && values[i] > values[i - 1];
        decreasing = decreasing && values[i] < values[i - 1];
    }
    if (!increasing && !decreasing)
        throw ConfigError("sweep.values must be strictly monotone");
    const bool bound_only = cfg.flag_or("sweep.bound_only", false);

    SweepResult result;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig point = cfg;
        point.apply_override(key + "=" + fmt17(values[i]));
        try {
            auto row = bound_only ? run_bound(point)
                                  : run_verify_row(point, i);
            row.param = values[i];
            result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            result.abort_reason = key + "=" + fmt17(values[i]) + ": " +
                                  e.what();
            return result;
        }
    }

    std::vector<std::pair<double, double>> bound_pts, est_pts;
    bool est_fittable = !bound_only;
    for (const auto& row : result.rows) {
        bound_pts.emplace_back(row.param, row.bound.value);
        if (row.estimate && row.estimate->value > 0.0)
            est_pts.emplace_back(row.param, row.estimate->value);
        else
            est_fittable = false;
    }
    auto fittable = [](const std::vector<std::pair<double, double>>& pts) {
        for (const auto& [x, y] : pts)
            if (x <= 0.0 || y <= 0.0) return false;
        return pts.size() >= 2;
    };
    if (fittable(bound_pts)) result.bound_slope = fit_loglog_slope(bound_pts);
    if (est_fittable && fittable(est_pts))
        result.estimate_slope = fit_loglog_slope(est_pts);
    return result;
}

ReportDocument make_document(const ExperimentConfig& cfg,
                             std::vector<VerificationReport> rows) {
    ReportDocument doc;
    doc.rows = std::move(rows);
    doc.provenance = cfg.entries();
    doc.provenance["library"] = library_name;
    doc.provenance["version"] = library_version;
    return doc;
}

ReportDocument make_document(const ExperimentConfig& cfg, SweepResult sweep) {
    auto doc = make_document(cfg, std::move(sweep.rows));
    doc.bound_slope = sweep.bound_slope;
    doc.estimate_slope = sweep.estimate_slope;
    doc.abort_reason = sweep.abort_reason;
    return doc;
}

namespace {

std::string render_csv(const ReportDocument& doc) {
    std::string out =
        "param,metric,theorem_tag,bound,truncation_error,estimate,band,"
        "margin,verdict,seed\n";
    for (const auto& row : doc.rows) {
        out += fmt17(row.param);
        out += ',';
        out += metric_name(row.bound.metric);
        out += ',';
        out += row.bound.theorem_tag;
        out += ',';
        out += fmt17(row.bound.value);
        out += ',';
        out += fmt17(row.bound.truncation_error);
        out += ',';
        if (row.estimate) out += fmt17(row.estimate->value);
        out += ',';
        if (row.estimate) out += fmt17(row.estimate->band);
        out += ',';
        if (row.margin) out += fmt17(*row.margin);
        out += ',';
        out += verdict_name(row.verdict);
        out += ',';
        if (row.seed) out += std::to_string(*row.seed);
        out += '\n';
    }
    auto slope_line = [](const char* label, const SlopeFit& fit) {
        return std::string("# slope_") + label + " slope=" + fmt17(fit.slope) +
               " intercept=" + fmt17(fit.intercept) +
               " residual=" + fmt17(fit.residual) + "\n";
    };
    if (doc.bound_slope) out += slope_line("bound", *doc.bound_slope);
    if (doc.estimate_slope) out += slope_line("estimate", *doc.estimate_slope);
    if (doc.abort_reason) out += "# aborted: " + *doc.abort_reason + "\n";
    return out;
}

std::string render_json(const ReportDocument& doc) {
    nlohmann::json j;
    j["provenance"] = doc.provenance;
    auto& rows = j["rows"];
    rows = nlohmann::json::array();
    for (const auto& row : doc.rows) {
        nlohmann::json r;
        r["param"] = row.param;
        r["metric"] = metric_name(row.bound.metric);
        r["theorem_tag"] = row.bound.theorem_tag;
        r["bound"] = row.bound.value;
        r["truncation_error"] = row.bound.truncation_error;
        if (row.estimate) {
            r["estimate"] = row.estimate->value;
            r["band"] = row.estimate->band;
        }
        if (row.margin) r["margin"] = *row.margin;
        r["verdict"] = verdict_name(row.verdict);
        if (row.seed) r["seed"] = *row.seed;
        rows.push_back(std::move(r));
    }
    auto slope_json = [](const SlopeFit& fit) {
        nlohmann::json s;
        s["slope"] = fit.slope;
        s["intercept"] = fit.intercept;
        s["residual"] = fit.residual;
        return s;
    };
    if (doc.bound_slope) j["slope_bound"] = slope_json(*doc.bound_slope);
    if (doc.estimate_slope)
        j["slope_estimate"] = slope_json(*doc.estimate_slope);
    if (doc.abort_reason) j["aborted"] = *doc.abort_reason;
    return j.dump(2) + "\n";
}

}  // namespace

std::string render_report(const ReportDocument& doc,
                          const std::string& format) {
    if (format == "csv") return render_csv(doc);
    if (format == "json") return render_json(doc);
    throw ConfigError("unknown output.format '" + format + "'");
}

void emit_report(const ReportDocument& doc, const std::string& format,
                 const std::string& path) {
    const std::string rendered = render_report(doc, format);
    if (path == "-") {
        std::cout << rendered;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("randsum: cannot open report path '" + path +
                                 "'");
    out << rendered;
    if (!out)
        throw std::runtime_error("randsum: failed writing report to '" + path +
                                 "'");
}

}  // namespace randsum
