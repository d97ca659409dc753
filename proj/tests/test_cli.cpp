#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jcent/cli.hpp"

using jcent::kPi;
using jcent::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const {
        size_t k = 0;
        while (k < header.size() && header[k] != name) ++k;
        REQUIRE(k < header.size());
        std::vector<double> c;
        for (const auto& r : rows) c.push_back(r[k]);
        return c;
    }
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::istringstream h(line);
    for (std::string f; std::getline(h, f, ',');) csv.header.push_back(f);
    while (std::getline(in, line)) {
        std::istringstream l(line);
        std::vector<double> row;
        for (std::string f; std::getline(l, f, ',');) row.push_back(std::stod(f));
        csv.rows.push_back(row);
    }
    return csv;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("jcent_test_" + name)).string();
}

}  // namespace

TEST_CASE("evolve: lossless resonant psi at pi/4 is cos^2 T") {
    const auto r = call({"evolve", "--initial", "psi", "--alpha", "0.7854", "--gamma", "0", "--delta", "0", "--tmax",
                         "6.2832", "--samples", "1001"});
    REQUIRE(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"T", "C", "raw", "norm"});
    REQUIRE(csv.rows.size() == 1001);
    const auto T = csv.column("T");
    const auto C = csv.column("C");
    // alpha = 0.7854 is not exactly pi/4: C = sin(2 alpha) cos^2 T
    for (size_t i = 0; i < T.size(); ++i) CHECK(std::abs(C[i] - std::sin(2 * 0.7854) * std::pow(std::cos(T[i]), 2)) < 1e-9);
    for (size_t i = 0; i < T.size(); ++i) CHECK(std::abs(C[i] - std::pow(std::cos(T[i]), 2)) < 1e-7);
}

TEST_CASE("evolve: too few samples is a config error") {
    const auto r = call({"evolve", "--samples", "1"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(!r.err.empty());
}

TEST_CASE("evolve: closed form and oracle columns agree") {
    const auto r = call({"evolve", "--initial", "phi", "--alpha", "0.5236", "--gamma", "1", "--delta", "0", "--source",
                         "both"});
    REQUIRE(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"T", "C", "raw", "norm", "C_oracle"});
    const auto C = csv.column("C");
    const auto O = csv.column("C_oracle");
    double worst = 0.0;
    for (size_t i = 0; i < C.size(); ++i) worst = std::max(worst, std::abs(C[i] - O[i]));
    CHECK(worst < 1e-6);
    // Default window is [0, 4 pi] at 2000 samples per 2 pi.
    CHECK(csv.rows.size() == 4001);
    CHECK(csv.column("T").back() == doctest::Approx(4.0 * kPi).epsilon(1e-15));
}

TEST_CASE("evolve: json output carries the same data") {
    const auto r = call({"evolve", "--initial", "phi", "--alpha", "0.3", "--gamma", "0.5", "--tmax", "3", "--samples",
                         "31", "--format", "json", "--source", "both"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["data"]["T"].size() == 31);
    CHECK(j["data"]["C_oracle"].size() == 31);
    CHECK(j["max_abs_difference"].get<double>() < 1e-6);
}

TEST_CASE("evolve: full-precision fields and byte-identical reruns") {
    const std::vector<std::string> args{"evolve", "--initial", "phi", "--alpha", "0.5", "--gamma", "0.3", "--delta",
                                        "2", "--tmax", "5", "--samples", "51", "--source", "oracle"};
    const auto a = call(args), b = call(args);
    CHECK(a.out == b.out);
    std::istringstream in(a.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::getline(in, line);  // T = 0.1
    CHECK(line.substr(0, 19) == "0.10000000000000001");
}

TEST_CASE("evolve: renormalize divides by the trace") {
    const std::vector<std::string> base{"evolve", "--initial", "phi", "--alpha", "0.3", "--gamma", "1", "--tmax", "4",
                                        "--samples", "9"};
    auto with = base;
    with.push_back("--renormalize");
    const auto plain = parse_csv(call(base).out), renorm = parse_csv(call(with).out);
    const auto rp = plain.column("raw"), rr = renorm.column("raw"), n = plain.column("norm");
    for (size_t i = 0; i < rp.size(); ++i) CHECK(rr[i] == doctest::Approx(rp[i] / n[i]).epsilon(1e-12));
}

TEST_CASE("evolve: writes to --output and reports unwritable paths") {
    const auto path = temp_path("evolve.csv");
    const auto r = call({"evolve", "--tmax", "1", "--samples", "3", "--output", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "T,C,raw,norm");
    std::filesystem::remove(path);

    const auto bad = call({"evolve", "--tmax", "1", "--samples", "3", "--output", "/nonexistent-dir/x.csv"});
    CHECK(bad.code == 3);
}

TEST_CASE("invalid physics and unknown options are config errors") {
    CHECK(call({"evolve", "--gamma", "-1"}).code == 2);
    CHECK(call({"evolve", "--alpha", "nan"}).code == 2);
    CHECK(call({"evolve", "--initial", "chi"}).code == 2);
    CHECK(call({"evolve", "--bogus"}).code == 2);
    CHECK(call({"evolve", "--source", "oracle", "--dt", "0.05"}).code == 2);
    CHECK(call({}).code == 2);
}

TEST_CASE("sweep: detuning symmetry of the psi contour") {
    const auto r = call({"sweep", "--initial", "psi", "--alpha", "0.5236", "--gamma", "0", "--axes", "delta:-5:5:201",
                         "T:0:6.2832:201"});
    REQUIRE(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"delta", "T", "C"});
    REQUIRE(csv.rows.size() == 201u * 201u);
    std::map<std::pair<long, size_t>, double> by_cell;
    for (size_t k = 0; k < csv.rows.size(); ++k) by_cell[{std::lround(csv.rows[k][0] * 1000), k % 201}] = csv.rows[k][2];
    double worst = 0.0;
    for (const auto& [key, c] : by_cell) worst = std::max(worst, std::abs(c - by_cell.at({-key.first, key.second})));
    CHECK(worst < 1e-9);
}

TEST_CASE("sweep: duplicate or malformed axes") {
    CHECK(call({"sweep", "--axes", "T:0:1:2", "T:0:1:2"}).code == 2);
    CHECK(call({"sweep", "--axes", "T:0:1", "delta:0:1:2"}).code == 2);
    CHECK(call({"sweep", "--axes", "T:0:1:2"}).code == 2);
}

TEST_CASE("sweep: decay lowers the global maximum") {
    auto max_of = [](const std::string& gamma) {
        const auto r = call({"sweep", "--initial", "psi", "--alpha", "0.5236", "--gamma", gamma, "--axes",
                             "delta:-5:5:41", "T:0.1:6.2832:41", "--format", "json"});
        REQUIRE(r.code == 0);
        return nlohmann::json::parse(r.out)["max_value"].get<double>();
    };
    CHECK(max_of("0.8") < max_of("0"));
}

TEST_CASE("sweep: output is independent of thread count") {
    const std::vector<std::string> base{"sweep", "--initial", "phi", "--alpha", "0.4", "--gamma", "0.2", "--axes",
                                        "delta:-2:2:11", "T:0:5:17"};
    auto one = base, many = base;
    one.insert(one.end(), {"--threads", "1"});
    many.insert(many.end(), {"--threads", "4"});
    CHECK(call(one).out == call(many).out);
}

TEST_CASE("sde: lossless phi dies, gamma = g does not, psi never does") {
    auto intervals = [](const std::vector<std::string>& args) {
        const auto r = call(args);
        REQUIRE(r.code == 0);
        return nlohmann::json::parse(r.out)["intervals"];
    };
    const auto dead =
        intervals({"sde", "--initial", "phi", "--alpha", "0.5236", "--gamma", "0", "--delta", "0", "--tmax", "6.2832"});
    CHECK(dead.size() >= 1);
    for (const auto& iv : dead) {
        CHECK(iv["length"].get<double>() > 0.0);
        CHECK(iv.contains("death_T"));
        CHECK(iv.contains("revival_T"));
    }
    CHECK(intervals({"sde", "--initial", "phi", "--alpha", "0.5236", "--gamma", "1", "--delta", "0"}).empty());
    for (const char* g : {"0", "0.5", "2"})
        for (const char* d : {"0", "3"})
            CHECK(intervals({"sde", "--initial", "psi", "--alpha", "0.3", "--gamma", g, "--delta", d}).empty());
}

TEST_CASE("sde: reports echo parameters and rejects source both") {
    const auto r = call({"sde", "--initial", "phi", "--alpha", "0.5236", "--tmax", "6.2832"});
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["tolerance"].get<double>() == 1e-9);
    CHECK(j["min_raw"].get<double>() < 0.0);
    CHECK(j.contains("parameters"));
    CHECK(call({"sde", "--source", "both"}).code == 2);
}

TEST_CASE("validate: default grid passes") {
    const auto path = temp_path("validate.json");
    const auto r = call({"validate", "--output", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASSED") != std::string::npos);
    std::ifstream f(path);
    const auto j = nlohmann::json::parse(f);
    CHECK(j["passed"].get<bool>());
    CHECK(j["max_abs_dC"].get<double>() < 1e-6);
    std::filesystem::remove(path);
}

TEST_CASE("validate: step guard") {
    CHECK(call({"validate", "--dt", "0.05"}).code == 2);
}

TEST_CASE("validate: a sign error in eta is caught and the cell is named") {
    const auto path = temp_path("validate_fault.json");
    const auto r = call({"validate", "--inject-fault", "eta-sign", "--output", path});
    CHECK(r.code == 1);
    CHECK(r.err.find("validation failed in cell") != std::string::npos);
    CHECK(r.err.find("kappa") != std::string::npos);
    std::filesystem::remove(path);
}
