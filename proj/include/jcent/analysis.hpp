#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "jcent/closed_form.hpp"
#include "jcent/model.hpp"
#include "jcent/oracle.hpp"

namespace jcent {

enum class Source { ClosedForm, Oracle };

std::string_view to_string(Source source);

struct TraceOptions {
    ConcurrenceOptions concurrence;
    double dT = kDefaultStep;  // oracle only
    Frame frame = Frame::Symmetric;
};

// n uniformly spaced points on [lo, hi], endpoints included.
std::vector<double> uniform_grid(double lo, double hi, int n);

struct ConcurrenceTrace {
    ModelParams params;
    InitialState initial;
    Source source = Source::ClosedForm;
    TraceOptions options;
    std::vector<ConcurrenceSample> samples;
    std::vector<double> norms;  // tr(rho_AB) at each sample

    double spacing() const;
    double max_value() const;
};

// Throws std::invalid_argument unless T_max > 0 and n_samples >= 2.
ConcurrenceTrace trace(const ModelParams& params, const InitialState& initial, double T_max, int n_samples,
                       Source source, const TraceOptions& opts = {});

// Unclamped concurrence as a function of T for bisection. The oracle variant
// integrates from T = 0 on each call.
std::function<double(double)> raw_evaluator(const ModelParams& params, const InitialState& initial, Source source,
                                            const TraceOptions& opts = {});

inline constexpr double kOpenEnded = std::numeric_limits<double>::infinity();

struct SdeInterval {
    double death_T = 0.0;
    double revival_T = kOpenEnded;
    // Bisection brackets. death_lo and revival_hi lie outside the dark period
    // (raw >= -tol), death_hi and revival_lo inside (raw < -tol).
    double death_lo = 0.0, death_hi = 0.0;
    double revival_lo = kOpenEnded, revival_hi = kOpenEnded;

    bool open_ended() const { return revival_T == kOpenEnded; }
    double length() const { return revival_T - death_T; }
};

struct SdeReport {
    std::vector<SdeInterval> intervals;
    double min_raw = 0.0;
    double tolerance = 0.0;

    // Sum of interval lengths, open-ended intervals clipped at window_end.
    double total_dark_time(double window_end) const;
};

inline constexpr double kDefaultSdeTolerance = 1e-9;
inline constexpr double kRefineResolution = 1e-4;

// Sudden death = contiguous runs with raw < -tol. Boundaries are refined by
// bisection to min(spacing / 100, 1e-4). Isolated zeros never qualify.
SdeReport detect_sde(const ConcurrenceTrace& trace, double tol = kDefaultSdeTolerance);

struct DarkTimeOptions {
    double window = 2.0 * kPi;
    int samples_per_2pi = 2000;
    double tol = kDefaultSdeTolerance;
    Source source = Source::ClosedForm;
    TraceOptions trace;
};

// Total SDE duration for Phi-family initial states over T in [0, window].
std::vector<double> sde_interval_vs_alpha(const ModelParams& params, const std::vector<double>& alphas,
                                          const DarkTimeOptions& opts = {});

// Trapezoidal mean of the clamped concurrence over [T_from, T_end]. T_from
// need not be a sample point.
double time_average(const ConcurrenceTrace& trace, double T_from);

inline constexpr double kDefaultAverageFrom = 5.0;
inline constexpr double kDefaultAverageTo = 20.0;

enum class Axis { Delta, Gamma, Alpha, T };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view name);

struct AxisSpec {
    Axis axis = Axis::T;
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    std::vector<double> values() const { return uniform_grid(lo, hi, n); }
};

// Parses "name:lo:hi:n", e.g. "delta:-5:5:201".
AxisSpec parse_axis_spec(std::string_view text);

// Parameters not swept (gamma and delta in units of g).
struct SweepFixed {
    double gamma = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double T = 0.0;
};

struct SweepOptions {
    TraceOptions trace;
    unsigned threads = 0;                     // 0 = hardware concurrency
    std::optional<std::uint64_t> shuffle_seed;  // randomize evaluation order
};

struct SweepGrid {
    AxisSpec axis1;
    AxisSpec axis2;
    std::vector<double> axis1_values;
    std::vector<double> axis2_values;
    std::vector<double> values;  // row-major over (axis1, axis2)
    SweepFixed fixed;
    Family family = Family::Psi;
    Source source = Source::ClosedForm;

    double at(size_t i, size_t j) const { return values[i * axis2_values.size() + j]; }
    double max_value() const;
};

SweepGrid sweep(const AxisSpec& axis1, const AxisSpec& axis2, const SweepFixed& fixed, Family family, Source source,
                const SweepOptions& opts = {});

}  // namespace jcent
