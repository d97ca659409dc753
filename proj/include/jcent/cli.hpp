#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jcent/model.hpp"

namespace jcent::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kBadConfig = 2,
    kIoFailure = 3,
};

enum class Command { Evolve, Sweep, Sde, Validate };
enum class SourceChoice { Closed, Oracle, Both };
enum class Format { Csv, Json };

// Developer-only mutation of the closed forms, used to prove that
// `validate` notices a broken formula.
enum class Fault { None, EtaSign };

struct RunConfig {
    Command command = Command::Evolve;
    Family family = Family::Psi;
    double alpha = kPi / 4.0;
    double gamma = 0.0;  // units of g
    double delta = 0.0;  // units of g
    std::optional<double> tmax;
    std::optional<int> samples;
    SourceChoice source = SourceChoice::Closed;
    bool renormalize = false;
    std::optional<std::string> output;
    std::optional<Format> format;
    double dt = 1e-3;
    double tol = 1e-9;
    std::vector<std::string> axes;
    double fixed_T = 0.0;
    unsigned threads = 0;
    Fault fault = Fault::None;

    // Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    double effective_tmax() const;
    int effective_samples() const;
    Format effective_format() const;
};

// Parses argv-style arguments (without the program name), runs the command
// and returns the process exit code. Data goes to --output or `out`;
// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jcent::cli
