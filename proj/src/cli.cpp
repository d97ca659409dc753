#include "jcent/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "jcent/analysis.hpp"
#include "jcent/closed_form.hpp"
#include "jcent/oracle.hpp"

namespace jcent::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr double kValidateTolerance = 1e-6;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

const char* source_name(SourceChoice s) {
    switch (s) {
        case SourceChoice::Closed: return "closed";
        case SourceChoice::Oracle: return "oracle";
        case SourceChoice::Both: return "both";
    }
    return "?";
}

json parameters_json(const RunConfig& c) {
    json p;
    p["initial"] = std::string(to_string(c.family));
    p["alpha"] = c.alpha;
    p["gamma"] = c.gamma;
    p["delta"] = c.delta;
    p["g"] = 1.0;
    p["source"] = source_name(c.source);
    p["renormalize"] = c.renormalize;
    return p;
}

TraceOptions trace_options(const RunConfig& c) {
    TraceOptions o;
    o.concurrence.renormalize = c.renormalize;
    o.dT = c.dt;
    return o;
}

// Writes the payload to --output (exit 3 on failure) or to `out`.
int emit(const RunConfig& c, const std::string& payload, std::ostream& out, std::ostream& err) {
    if (!c.output) {
        out << payload;
        return out ? kSuccess : kIoFailure;
    }
    std::ofstream f(*c.output, std::ios::binary | std::ios::trunc);
    if (!f) {
        err << "error: cannot open '" << *c.output << "' for writing\n";
        return kIoFailure;
    }
    f << payload;
    f.flush();
    if (!f) {
        err << "error: failed writing '" << *c.output << "'\n";
        return kIoFailure;
    }
    return kSuccess;
}

int cmd_evolve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ModelParams p = ModelParams::dimensionless(c.gamma, c.delta);
    const InitialState init{c.family, c.alpha};
    const TraceOptions opts = trace_options(c);
    const double tmax = c.effective_tmax();
    const int n = c.effective_samples();

    const Source primary = c.source == SourceChoice::Oracle ? Source::Oracle : Source::ClosedForm;
    const ConcurrenceTrace main = trace(p, init, tmax, n, primary, opts);
    std::optional<ConcurrenceTrace> oracle;
    if (c.source == SourceChoice::Both) oracle = trace(p, init, tmax, n, Source::Oracle, opts);

    std::ostringstream os;
    if (c.effective_format() == Format::Csv) {
        os << "T,C,raw,norm" << (oracle ? ",C_oracle" : "") << '\n';
        for (size_t k = 0; k < main.samples.size(); ++k) {
            const auto& s = main.samples[k];
            os << fmt(s.T) << ',' << fmt(s.value) << ',' << fmt(s.raw) << ',' << fmt(main.norms[k]);
            if (oracle) os << ',' << fmt(oracle->samples[k].value);
            os << '\n';
        }
    } else {
        json j;
        j["command"] = "evolve";
        j["parameters"] = parameters_json(c);
        json cols = json::array({"T", "C", "raw", "norm"});
        if (oracle) cols.push_back("C_oracle");
        j["columns"] = cols;
        json T = json::array(), C = json::array(), raw = json::array(), norm = json::array(), co = json::array();
        for (size_t k = 0; k < main.samples.size(); ++k) {
            T.push_back(main.samples[k].T);
            C.push_back(main.samples[k].value);
            raw.push_back(main.samples[k].raw);
            norm.push_back(main.norms[k]);
            if (oracle) co.push_back(oracle->samples[k].value);
        }
        j["data"]["T"] = T;
        j["data"]["C"] = C;
        j["data"]["raw"] = raw;
        j["data"]["norm"] = norm;
        if (oracle) {
            j["data"]["C_oracle"] = co;
            double worst = 0.0;
            for (size_t k = 0; k < main.samples.size(); ++k)
                worst = std::max(worst, std::abs(main.samples[k].value - oracle->samples[k].value));
            j["max_abs_difference"] = worst;
        }
        os << j.dump(2) << '\n';
    }
    return emit(c, os.str(), out, err);
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.axes.size() != 2) throw std::invalid_argument("sweep needs exactly two --axes specs");
    const AxisSpec a1 = parse_axis_spec(c.axes[0]);
    const AxisSpec a2 = parse_axis_spec(c.axes[1]);
    if (a1.axis == a2.axis) throw std::invalid_argument("sweep axes must be distinct");

    const SweepFixed fixed{c.gamma, c.delta, c.alpha, c.fixed_T};
    SweepOptions opts;
    opts.trace = trace_options(c);
    opts.threads = c.threads;
    const Source primary = c.source == SourceChoice::Oracle ? Source::Oracle : Source::ClosedForm;
    const SweepGrid grid = sweep(a1, a2, fixed, c.family, primary, opts);
    std::optional<SweepGrid> oracle;
    if (c.source == SourceChoice::Both) oracle = sweep(a1, a2, fixed, c.family, Source::Oracle, opts);

    const size_t n1 = grid.axis1_values.size(), n2 = grid.axis2_values.size();
    std::ostringstream os;
    if (c.effective_format() == Format::Csv) {
        os << to_string(a1.axis) << ',' << to_string(a2.axis) << ",C" << (oracle ? ",C_oracle" : "") << '\n';
        for (size_t i = 0; i < n1; ++i) {
            for (size_t j = 0; j < n2; ++j) {
                os << fmt(grid.axis1_values[i]) << ',' << fmt(grid.axis2_values[j]) << ',' << fmt(grid.at(i, j));
                if (oracle) os << ',' << fmt(oracle->at(i, j));
                os << '\n';
            }
        }
    } else {
        json j;
        j["command"] = "sweep";
        json params = parameters_json(c);
        params["T"] = c.fixed_T;
        j["fixed"] = params;
        const auto axis_json = [](const AxisSpec& a, const std::vector<double>& v) {
            json x;
            x["name"] = std::string(to_string(a.axis));
            x["lo"] = a.lo;
            x["hi"] = a.hi;
            x["n"] = a.n;
            x["values"] = v;
            return x;
        };
        j["axes"] = json::array({axis_json(a1, grid.axis1_values), axis_json(a2, grid.axis2_values)});
        const auto matrix = [&](const SweepGrid& g) {
            json m = json::array();
            for (size_t i = 0; i < n1; ++i) {
                json row = json::array();
                for (size_t k = 0; k < n2; ++k) row.push_back(g.at(i, k));
                m.push_back(row);
            }
            return m;
        };
        j["matrix"] = matrix(grid);
        if (oracle) j["matrix_oracle"] = matrix(*oracle);
        j["max_value"] = grid.max_value();
        os << j.dump(2) << '\n';
    }
    return emit(c, os.str(), out, err);
}

int cmd_sde(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.source == SourceChoice::Both) throw std::invalid_argument("sde needs a single --source (closed or oracle)");
    if (c.effective_format() != Format::Json) throw std::invalid_argument("sde emits JSON only");
    const ModelParams p = ModelParams::dimensionless(c.gamma, c.delta);
    const Source src = c.source == SourceChoice::Oracle ? Source::Oracle : Source::ClosedForm;
    const double tmax = c.effective_tmax();
    const ConcurrenceTrace tr = trace(p, {c.family, c.alpha}, tmax, c.effective_samples(), src, trace_options(c));
    const SdeReport rep = detect_sde(tr, c.tol);

    json j;
    j["command"] = "sde";
    json params = parameters_json(c);
    params["tmax"] = tmax;
    params["samples"] = c.effective_samples();
    j["parameters"] = params;
    json iv = json::array();
    for (const auto& i : rep.intervals) {
        json x;
        x["death_T"] = i.death_T;
        if (i.open_ended()) {
            x["revival_T"] = nullptr;
            x["length"] = nullptr;
            x["open_ended"] = true;
        } else {
            x["revival_T"] = i.revival_T;
            x["length"] = i.length();
            x["open_ended"] = false;
        }
        iv.push_back(x);
    }
    j["intervals"] = iv;
    j["total_dark_time"] = rep.total_dark_time(tmax);
    j["min_raw"] = rep.min_raw;
    j["tolerance"] = rep.tolerance;
    return emit(c, j.dump(2) + "\n", out, err);
}

SpectralQuantities faulty_derive(const ModelParams& p, Fault fault) {
    SpectralQuantities s = derive(p);
    if (fault == Fault::EtaSign) {
        s.eta_plus = std::sqrt(s.xi_plus * s.xi_plus + 16.0);
        s.eta_minus = std::sqrt(s.xi_minus * s.xi_minus + 16.0);
    }
    return s;
}

struct CellResult {
    Family family;
    double kappa, delta, alpha;
    double max_dc = 0.0;
    double wootters_gap = 0.0;
    double norm_issue = 0.0;  // gamma = 0: max |norm - 1|; gamma > 0: max step increase
    double symmetry_gap = 0.0;
    double branch_gap = 0.0;
    double min_raw_psi = 0.0;
    std::vector<std::string> failures;
};

std::string cell_name(const CellResult& r) {
    std::ostringstream os;
    os << to_string(r.family) << " kappa=" << r.kappa << " delta=" << r.delta << " alpha=" << std::setprecision(6)
       << r.alpha;
    return os.str();
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const double tmax = c.tmax.value_or(5.0 * kPi);
    const int n = c.samples.value_or(2000);
    const std::vector<double> times = uniform_grid(0.0, tmax, n);
    const ConcurrenceOptions copts{c.renormalize};
    const OracleOptions oopts{c.dt, Frame::Symmetric, copts};

    std::vector<CellResult> cells;
    for (Family fam : {Family::Psi, Family::Phi}) {
        for (double kappa : {0.0, 0.5, 1.0}) {
            for (double delta : {0.0, 1.0, -1.0, 3.0, -3.0, 5.0, -5.0}) {
                for (double alpha : {kPi / 6.0, kPi / 4.0, kPi / 3.0}) {
                    CellResult r{fam, kappa, delta, alpha, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
                    const ModelParams p = ModelParams::dimensionless(kappa, delta);
                    const ModelParams mirror = ModelParams::dimensionless(kappa, -delta);
                    const InitialState init{fam, alpha};
                    const SpectralQuantities s = faulty_derive(p, c.fault);
                    const SpectralQuantities sm = faulty_derive(mirror, c.fault);
                    const auto states = oracle_states(p, init, times, oopts);
                    double prev_norm = states.front().norm();
                    r.min_raw_psi = std::numeric_limits<double>::infinity();
                    for (const StateVector& st : states) {
                        const ConcurrenceSample cf = concurrence(s, init, st.T, copts);
                        const ConcurrenceSample co = oracle_concurrence(st, copts);
                        r.max_dc = std::max(r.max_dc, std::abs(cf.value - co.value));

                        const ReducedDensityMatrix rho = partial_trace_fields(st);
                        const double xw = x_state_concurrence(rho, st.T).value;
                        const double ww = wootters_concurrence(rho, st.T).value;
                        r.wootters_gap = std::max(r.wootters_gap, std::abs(xw - ww));

                        const double nrm = st.norm();
                        if (kappa == 0.0)
                            r.norm_issue = std::max(r.norm_issue, std::abs(nrm - 1.0));
                        else
                            r.norm_issue = std::max(r.norm_issue, nrm - prev_norm);
                        prev_norm = nrm;

                        r.symmetry_gap =
                            std::max(r.symmetry_gap, std::abs(cf.value - concurrence(sm, init, st.T, copts).value));
                        for (auto [fp, fm] : {std::pair{true, false}, {false, true}, {true, true}}) {
                            const double v = concurrence(s.with_flipped_eta(fp, fm), init, st.T, copts).value;
                            r.branch_gap = std::max(r.branch_gap, std::abs(v - cf.value));
                        }
                        if (fam == Family::Psi) r.min_raw_psi = std::min(r.min_raw_psi, cf.raw);
                    }
                    if (!(r.max_dc < kValidateTolerance)) r.failures.push_back("closed-vs-oracle");
                    if (!(r.wootters_gap < 1e-10)) r.failures.push_back("wootters-vs-x-state");
                    if (!(r.norm_issue < (kappa == 0.0 ? 1e-9 : 1e-12))) r.failures.push_back("norm");
                    if (!(r.symmetry_gap < 1e-9)) r.failures.push_back("detuning-symmetry");
                    if (!(r.branch_gap < 1e-10)) r.failures.push_back("branch-invariance");
                    if (fam == Family::Psi && r.min_raw_psi < -1e-12) r.failures.push_back("psi-positivity");
                    cells.push_back(std::move(r));
                }
            }
        }
    }

    bool ok = true;
    double worst = 0.0;
    json jc = json::array();
    std::ostringstream human;
    human << std::setprecision(3);
    for (const auto& r : cells) {
        worst = std::max(worst, r.max_dc);
        ok = ok && r.failures.empty();
        human << (r.failures.empty() ? "ok   " : "FAIL ") << cell_name(r) << "  max|dC|=" << std::scientific
              << r.max_dc << " wootters=" << r.wootters_gap << std::defaultfloat;
        for (const auto& f : r.failures) human << " [" << f << "]";
        human << '\n';
        json x;
        x["family"] = std::string(to_string(r.family));
        x["kappa"] = r.kappa;
        x["delta"] = r.delta;
        x["alpha"] = r.alpha;
        x["max_abs_dC"] = r.max_dc;
        x["wootters_vs_x_state"] = r.wootters_gap;
        x["norm_check"] = r.norm_issue;
        x["detuning_symmetry"] = r.symmetry_gap;
        x["branch_invariance"] = r.branch_gap;
        x["failures"] = r.failures;
        jc.push_back(x);
    }
    human << (ok ? "PASSED" : "FAILED") << ": " << cells.size() << " cells, max |C_closed - C_oracle| = "
          << std::scientific << worst << " (tolerance " << kValidateTolerance << ")\n";
    if (!ok) {
        for (const auto& r : cells)
            if (!r.failures.empty()) {
                err << "validation failed in cell " << cell_name(r) << '\n';
                break;
            }
    }

    json j;
    j["command"] = "validate";
    j["passed"] = ok;
    j["tolerance"] = kValidateTolerance;
    j["dt"] = c.dt;
    j["tmax"] = tmax;
    j["samples"] = n;
    j["renormalize"] = c.renormalize;
    j["max_abs_dC"] = worst;
    j["cells"] = jc;

    out << human.str();
    int rc = kSuccess;
    if (c.output) {
        rc = emit(c, j.dump(2) + "\n", out, err);
    } else {
        out << j.dump(2) << '\n';
    }
    if (rc != kSuccess) return rc;
    return ok ? kSuccess : kValidationFailure;
}

}  // namespace

void RunConfig::validate() const {
    const auto finite = [](double v, const char* name) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
    };
    finite(alpha, "--alpha");
    finite(gamma, "--gamma");
    finite(delta, "--delta");
    finite(dt, "--dt");
    finite(tol, "--tol");
    finite(fixed_T, "--T");
    if (gamma < 0.0) throw std::invalid_argument("--gamma must be non-negative");
    if (tmax && (!std::isfinite(*tmax) || !(*tmax > 0.0))) throw std::invalid_argument("--tmax must be positive");
    if (samples && *samples < 2) throw std::invalid_argument("--samples must be at least 2");
    if (!(dt > 0.0) || dt > kMaxStep) throw std::invalid_argument("--dt must lie in (0, 0.01]");
    if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    if (fixed_T < 0.0) throw std::invalid_argument("--T must be non-negative");
}

double RunConfig::effective_tmax() const { return tmax.value_or(4.0 * kPi); }

int RunConfig::effective_samples() const {
    if (samples) return *samples;
    return static_cast<int>(std::ceil(2000.0 * effective_tmax() / (2.0 * kPi))) + 1;
}

Format RunConfig::effective_format() const {
    if (format) return *format;
    return (command == Command::Sde || command == Command::Validate) ? Format::Json : Format::Csv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-atom entanglement in independent damped Jaynes-Cummings cavities", "jcent"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string family = "psi", source = "closed", format;
    std::string fault = "none";
    std::optional<double> tmax;
    std::optional<int> samples;
    std::optional<std::string> output;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--initial", family, "Initial atomic state: psi (cos|eg>+sin|ge>) or phi (cos|ee>+sin|gg>)")
            ->check(CLI::IsMember({"psi", "phi"}));
        sub->add_option("--alpha", cfg.alpha, "Superposition angle in radians (pi/6 ~ 0.5236, pi/4 ~ 0.7854)");
        sub->add_option("--gamma", cfg.gamma, "Decay rate in units of g");
        sub->add_option("--delta", cfg.delta, "Detuning nu - omega in units of g");
        sub->add_option("--tmax", tmax, "Final dimensionless time T = g t");
        sub->add_option("--samples", samples, "Number of uniformly spaced samples (>= 2)");
        sub->add_option("--source", source, "closed | oracle | both")->check(CLI::IsMember({"closed", "oracle", "both"}));
        sub->add_flag("--renormalize", cfg.renormalize, "Report concurrence of rho_AB / tr(rho_AB)");
        sub->add_option("--output", output, "Output file (default: standard output)");
        sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--dt", cfg.dt, "Oracle RK4 step (<= 0.01)");
        sub->add_option("--tol", cfg.tol, "Negativity threshold for sudden-death detection");
        sub->add_option("--threads", cfg.threads, "Worker threads for sweeps (0 = all cores)");
    };

    CLI::App* evolve = app.add_subcommand("evolve", "Concurrence trajectory C(T)");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Concurrence over a two-parameter grid");
    CLI::App* sde = app.add_subcommand("sde", "Sudden-death interval report");
    CLI::App* validate = app.add_subcommand("validate", "Closed forms against the numerical oracle");
    for (CLI::App* s : {evolve, sweep_cmd, sde, validate}) common(s);
    sweep_cmd->add_option("--axes", cfg.axes, "Two axis specs name:lo:hi:n, names delta, gamma, alpha, T")
        ->expected(2);
    sweep_cmd->add_option("--T", cfg.fixed_T, "Fixed time when T is not a swept axis");
    validate->add_option("--inject-fault", fault, "Developer self-test: none | eta-sign")
        ->check(CLI::IsMember({"none", "eta-sign"}))
        ->group("Developer");

    std::vector<std::string> argv_store{"jcent"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kSuccess;
        }
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    }

    if (evolve->parsed()) cfg.command = Command::Evolve;
    else if (sweep_cmd->parsed()) cfg.command = Command::Sweep;
    else if (sde->parsed()) cfg.command = Command::Sde;
    else cfg.command = Command::Validate;

    try {
        cfg.family = parse_family(family);
        cfg.source = source == "oracle" ? SourceChoice::Oracle : source == "both" ? SourceChoice::Both : SourceChoice::Closed;
        if (!format.empty()) cfg.format = format == "json" ? Format::Json : Format::Csv;
        cfg.fault = fault == "eta-sign" ? Fault::EtaSign : Fault::None;
        cfg.tmax = tmax;
        cfg.samples = samples;
        cfg.output = output;
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    }

    try {
        switch (cfg.command) {
            case Command::Evolve: return cmd_evolve(cfg, out, err);
            case Command::Sweep: return cmd_sweep(cfg, out, err);
            case Command::Sde: return cmd_sde(cfg, out, err);
            case Command::Validate: return cmd_validate(cfg, out, err);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    return kBadConfig;
}

}  // namespace jcent::cli
