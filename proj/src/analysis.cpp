#include "jcent/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace jcent {

std::string_view to_string(Source source) {
    switch (source) {
        case Source::ClosedForm: return "closed_form";
        case Source::Oracle: return "oracle";
    }
    throw std::invalid_argument("unknown source");
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("a grid needs at least two points");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("grid bounds must be finite");
    std::vector<double> v(static_cast<size_t>(n));
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = lo + step * i;
    v.back() = hi;
    return v;
}

double ConcurrenceTrace::spacing() const {
    if (samples.size() < 2) return 0.0;
    return (samples.back().T - samples.front().T) / static_cast<double>(samples.size() - 1);
}

double ConcurrenceTrace::max_value() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.value);
    return m;
}

ConcurrenceTrace trace(const ModelParams& params, const InitialState& initial, double T_max, int n_samples,
                       Source source, const TraceOptions& opts) {
    if (!(T_max > 0.0) || !std::isfinite(T_max)) throw std::invalid_argument("T_max must be positive and finite");
    if (n_samples < 2) throw std::invalid_argument("a trace needs at least two samples");
    params.validate();

    ConcurrenceTrace tr;
    tr.params = params;
    tr.initial = initial;
    tr.source = source;
    tr.options = opts;
    const std::vector<double> times = uniform_grid(0.0, T_max, n_samples);
    tr.samples.reserve(times.size());
    tr.norms.reserve(times.size());

    switch (source) {
        case Source::ClosedForm: {
            const SpectralQuantities s = derive(params);
            for (double t : times) {
                const AmplitudeSet a = amplitudes(s, initial, t);
                tr.samples.push_back(concurrence_from_amplitudes(a, opts.concurrence));
                tr.norms.push_back(a.norm());
            }
            break;
        }
        case Source::Oracle: {
            const OracleOptions o{opts.dT, opts.frame, opts.concurrence};
            for (const StateVector& st : oracle_states(params, initial, times, o)) {
                tr.samples.push_back(oracle_concurrence(st, opts.concurrence));
                tr.norms.push_back(st.norm());
            }
            break;
        }
    }
    return tr;
}

std::function<double(double)> raw_evaluator(const ModelParams& params, const InitialState& initial, Source source,
                                            const TraceOptions& opts) {
    switch (source) {
        case Source::ClosedForm: {
            const SpectralQuantities s = derive(params);
            return [s, initial, c = opts.concurrence](double t) { return concurrence(s, initial, t, c).raw; };
        }
        case Source::Oracle: {
            const HamiltonianSector sector = build_sector(params, initial.family, opts.frame);
            return [sector, initial, opts](double t) {
                const StateVector st = integrate(sector, initial_state(initial), t, opts.dT);
                return oracle_concurrence(st, opts.concurrence).raw;
            };
        }
    }
    throw std::invalid_argument("unknown source");
}

double SdeReport::total_dark_time(double window_end) const {
    double total = 0.0;
    for (const auto& iv : intervals) total += std::min(iv.revival_T, window_end) - iv.death_T;
    return total;
}

namespace {

// Shrinks [outside, inside] (either order) around the boundary of the
// predicate raw < -tol.
std::pair<double, double> bisect(const std::function<double(double)>& raw, double tol, double outside, double inside,
                                 double resolution) {
    while (std::abs(inside - outside) > resolution) {
        const double mid = 0.5 * (inside + outside);
        if (raw(mid) < -tol)
            inside = mid;
        else
            outside = mid;
    }
    return {outside, inside};
}

}  // namespace

SdeReport detect_sde(const ConcurrenceTrace& tr, double tol) {
    if (tr.samples.empty()) throw std::invalid_argument("cannot scan an empty trace");
    if (!(tol > 0.0)) throw std::invalid_argument("negativity tolerance must be positive");

    SdeReport report;
    report.tolerance = tol;
    report.min_raw = std::numeric_limits<double>::infinity();
    for (const auto& s : tr.samples) report.min_raw = std::min(report.min_raw, s.raw);

    const auto& smp = tr.samples;
    const size_t n = smp.size();
    const double resolution = std::min(tr.spacing() / 100.0, kRefineResolution);
    std::function<double(double)> raw;

    size_t i = 0;
    while (i < n) {
        if (!(smp[i].raw < -tol)) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < n && smp[j + 1].raw < -tol) ++j;
        if (!raw) raw = raw_evaluator(tr.params, tr.initial, tr.source, tr.options);

        SdeInterval iv;
        if (i == 0) {
            iv.death_T = iv.death_lo = iv.death_hi = smp[0].T;
        } else {
            const auto [out, in] = bisect(raw, tol, smp[i - 1].T, smp[i].T, resolution);
            iv.death_lo = out;
            iv.death_hi = in;
            iv.death_T = 0.5 * (out + in);
        }
        if (j + 1 < n) {
            const auto [out, in] = bisect(raw, tol, smp[j + 1].T, smp[j].T, resolution);
            iv.revival_lo = in;
            iv.revival_hi = out;
            iv.revival_T = 0.5 * (out + in);
        }
        report.intervals.push_back(iv);
        i = j + 1;
    }
    return report;
}

std::vector<double> sde_interval_vs_alpha(const ModelParams& params, const std::vector<double>& alphas,
                                          const DarkTimeOptions& opts) {
    const int n = std::max(2, static_cast<int>(std::ceil(opts.samples_per_2pi * opts.window / (2.0 * kPi))) + 1);
    std::vector<double> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        const ConcurrenceTrace tr = trace(params, InitialState::phi(a), opts.window, n, opts.source, opts.trace);
        out.push_back(detect_sde(tr, opts.tol).total_dark_time(opts.window));
    }
    return out;
}

double time_average(const ConcurrenceTrace& tr, double T_from) {
    if (tr.samples.size() < 2) throw std::invalid_argument("time average needs at least two samples");
    const auto& s = tr.samples;
    const double T_end = s.back().T;
    if (!(T_from < T_end)) throw std::invalid_argument("averaging window must start before the last sample");
    T_from = std::max(T_from, s.front().T);

    double integral = 0.0;
    for (size_t k = 1; k < s.size(); ++k) {
        const double a = s[k - 1].T, b = s[k].T;
        if (b <= T_from) continue;
        double fa = s[k - 1].value;
        const double fb = s[k].value;
        double lo = a;
        if (a < T_from) {
            fa = fa + (fb - fa) * (T_from - a) / (b - a);
            lo = T_from;
        }
        integral += 0.5 * (fa + fb) * (b - lo);
    }
    return integral / (T_end - T_from);
}

std::string_view to_string(Axis axis) {
    switch (axis) {
        case Axis::Delta: return "delta";
        case Axis::Gamma: return "gamma";
        case Axis::Alpha: return "alpha";
        case Axis::T: return "T";
    }
    throw std::invalid_argument("unknown axis");
}

Axis parse_axis(std::string_view name) {
    if (name == "delta") return Axis::Delta;
    if (name == "gamma") return Axis::Gamma;
    if (name == "alpha") return Axis::Alpha;
    if (name == "T" || name == "t") return Axis::T;
    throw std::invalid_argument("unknown axis '" + std::string(name) + "' (expected delta, gamma, alpha or T)");
}

AxisSpec parse_axis_spec(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) throw std::invalid_argument("axis spec must look like name:lo:hi:n, got '" + std::string(text) + "'");

    const auto number = [&](const std::string& s) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v))
            throw std::invalid_argument("bad number '" + s + "' in axis spec");
        return v;
    };

    AxisSpec a;
    a.axis = parse_axis(parts[0]);
    a.lo = number(parts[1]);
    a.hi = number(parts[2]);
    const double n = number(parts[3]);
    if (n != std::floor(n) || n < 2 || n > 1e7) throw std::invalid_argument("axis length must be an integer >= 2");
    a.n = static_cast<int>(n);
    if (!(a.hi > a.lo)) throw std::invalid_argument("axis upper bound must exceed the lower bound");
    return a;
}

double SweepGrid::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

namespace {

void check_axis(const AxisSpec& a) {
    if (a.n < 2) throw std::invalid_argument("sweep axes need at least two points");
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.hi > a.lo))
        throw std::invalid_argument("sweep axis bounds must be finite with hi > lo");
    if ((a.axis == Axis::Gamma || a.axis == Axis::T) && a.lo < 0.0)
        throw std::invalid_argument(std::string(to_string(a.axis)) + " axis must be non-negative");
}

void set_axis(SweepFixed& p, Axis axis, double v) {
    switch (axis) {
        case Axis::Delta: p.delta = v; break;
        case Axis::Gamma: p.gamma = v; break;
        case Axis::Alpha: p.alpha = v; break;
        case Axis::T: p.T = v; break;
    }
}

}  // namespace

SweepGrid sweep(const AxisSpec& axis1, const AxisSpec& axis2, const SweepFixed& fixed, Family family, Source source,
                const SweepOptions& opts) {
    check_axis(axis1);
    check_axis(axis2);
    if (axis1.axis == axis2.axis) throw std::invalid_argument("sweep axes must be distinct");
    if (!std::isfinite(fixed.gamma) || !std::isfinite(fixed.delta) || !std::isfinite(fixed.alpha) ||
        !std::isfinite(fixed.T) || fixed.gamma < 0.0 || fixed.T < 0.0)
        throw std::invalid_argument("fixed sweep parameters must be finite with gamma, T >= 0");

    SweepGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    grid.axis1_values = axis1.values();
    grid.axis2_values = axis2.values();
    grid.fixed = fixed;
    grid.family = family;
    grid.source = source;
    const size_t n1 = grid.axis1_values.size(), n2 = grid.axis2_values.size();
    grid.values.assign(n1 * n2, 0.0);

    // One work item = one parameter point evaluated at a list of times. When T
    // is swept the whole T axis is one item, so the oracle integrates once.
    struct Item {
        SweepFixed point;
        std::vector<double> times;
        std::vector<size_t> slots;
    };
    std::vector<Item> items;
    if (axis1.axis == Axis::T || axis2.axis == Axis::T) {
        const bool t_first = axis1.axis == Axis::T;
        const auto& other = t_first ? grid.axis2_values : grid.axis1_values;
        const auto& tv = t_first ? grid.axis1_values : grid.axis2_values;
        const Axis other_axis = t_first ? axis2.axis : axis1.axis;
        for (size_t o = 0; o < other.size(); ++o) {
            Item it{fixed, tv, {}};
            set_axis(it.point, other_axis, other[o]);
            for (size_t k = 0; k < tv.size(); ++k) it.slots.push_back(t_first ? k * n2 + o : o * n2 + k);
            items.push_back(std::move(it));
        }
    } else {
        for (size_t i = 0; i < n1; ++i) {
            for (size_t j = 0; j < n2; ++j) {
                Item it{fixed, {fixed.T}, {i * n2 + j}};
                set_axis(it.point, axis1.axis, grid.axis1_values[i]);
                set_axis(it.point, axis2.axis, grid.axis2_values[j]);
                items.push_back(std::move(it));
            }
        }
    }

    const auto evaluate = [&](const Item& it) {
        const ModelParams p = ModelParams::dimensionless(it.point.gamma, it.point.delta);
        const InitialState init{family, it.point.alpha};
        if (source == Source::ClosedForm) {
            const SpectralQuantities s = derive(p);
            for (size_t k = 0; k < it.times.size(); ++k)
                grid.values[it.slots[k]] = concurrence(s, init, it.times[k], opts.trace.concurrence).value;
        } else {
            const OracleOptions o{opts.trace.dT, opts.trace.frame, opts.trace.concurrence};
            const auto c = oracle_concurrence(p, init, it.times, o);
            for (size_t k = 0; k < c.size(); ++k) grid.values[it.slots[k]] = c[k].value;
        }
    };

    std::vector<size_t> order(items.size());
    std::iota(order.begin(), order.end(), size_t{0});
    if (opts.shuffle_seed) std::shuffle(order.begin(), order.end(), std::mt19937_64(*opts.shuffle_seed));

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<size_t>(threads, items.size()));
    if (threads <= 1) {
        for (size_t k : order) evaluate(items[k]);
        return grid;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (size_t k; (k = next.fetch_add(1)) < order.size();) {
                    if (failed.load()) return;
                    try {
                        evaluate(items[order[k]]);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return grid;
}

}  // namespace jcent
