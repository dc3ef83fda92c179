#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "randsum/bounds.hpp"
#include "randsum/distances.hpp"

// Orchestration: config parsing, bound-vs-estimate verification, parameter
// sweeps with rate fitting, and byte-stable CSV/JSON reports.  Everything a
// run does is pinned by (config, master seed).

namespace randsum {

// Raised for anything wrong with a configuration (missing keys, bad values,
// metric/theorem mismatches).  The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat "key = value" document with # comments and dotted keys.  Later
// assignments win, which is also how command-line overrides are applied.
class ExperimentConfig {
  public:
    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text);

    void apply_override(const std::string& assignment);  // "key=value"

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::int64_t integer(const std::string& key) const;
    std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;
    std::vector<double> number_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

enum class Verdict { pass, fail, inconclusive, bound_only };
const char* verdict_name(Verdict verdict);

// One bound-vs-estimate comparison.  The verdict is conservative: pass needs
// the estimate plus its band below the series value (the certified lower end
// of the theorem bound); fail needs the estimate minus its band above the
// certified upper end; anything between is inconclusive.
struct VerificationReport {
    double param = 0.0;
    BoundValue bound;
    std::optional<DistanceEstimate> estimate;
    std::optional<double> margin;  // bound.value - estimate - band
    Verdict verdict = Verdict::bound_only;
    std::optional<std::uint64_t> seed;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root-mean-square log residual
};

// Ordinary least squares on (log x, log y).  Needs two distinct x > 0 and
// every y > 0.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

VerificationReport run_bound(const ExperimentConfig& config);
VerificationReport run_verify(const ExperimentConfig& config);

struct SweepResult {
    std::vector<VerificationReport> rows;
    std::optional<SlopeFit> bound_slope;
    std::optional<SlopeFit> estimate_slope;
    // Set when a grid point failed its preconditions; rows hold the prefix
    // that completed before the abort.
    std::optional<std::string> abort_reason;
};

SweepResult run_sweep(const ExperimentConfig& config);

// A full report document: rows plus the provenance echo that pins them.
struct ReportDocument {
    std::vector<VerificationReport> rows;
    std::map<std::string, std::string> provenance;
    std::optional<SlopeFit> bound_slope;
    std::optional<SlopeFit> estimate_slope;
    std::optional<std::string> abort_reason;
};

ReportDocument make_document(const ExperimentConfig& config,
                             std::vector<VerificationReport> rows);
ReportDocument make_document(const ExperimentConfig& config,
                             SweepResult sweep);

// Byte-stable rendering: CSV with the fixed column order (param, metric,
// theorem_tag, bound, truncation_error, estimate, band, margin, verdict,
// seed) and 17-significant-digit decimals; JSON with the same fields beside
// the provenance block.
std::string render_report(const ReportDocument& doc, const std::string& format);

// Writes render_report's output to the path ("-" is stdout).
void emit_report(const ReportDocument& doc, const std::string& format,
                 const std::string& path);

}  // namespace randsum
