#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "vvc/io.hpp"

#ifndef VOLTVAR_CLI
#error "VOLTVAR_CLI must point at the built binary"
#endif
#ifndef VOLTVAR_DATA_DIR
#error "VOLTVAR_DATA_DIR must point at the bundled data"
#endif

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(VOLTVAR_CLI) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) res.output.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string data(const std::string& name) { return std::string(VOLTVAR_DATA_DIR) + "/" + name; }

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "vvc_cli_test";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("matrices summarizes the two-bus sample") {
    const CliResult res = run_cli("matrices " + data("feeder2.json"));
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    CHECK(doc["n"] == 1);
    CHECK(doc["l"] == 1);
    CHECK(doc["meshed"] == false);
    CHECK(doc["lambda_max_X"].get<double>() == doctest::Approx(0.00509).epsilon(1e-3));
}

TEST_CASE("matrices is deterministic across runs") {
    const CliResult a = run_cli("matrices " + data("feeder16.json"));
    const CliResult b = run_cli("matrices " + data("feeder16.json"));
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("conditioning worsens as the feeder grows") {
    // 8-bus truncation of the bundled feeder, written on the fly
    json doc = json::parse(vvc::read_text(data("feeder16.json")));
    json trunc = doc;
    trunc["buses"] = json::array();
    trunc["lines"] = json::array();
    for (const auto& b : doc["buses"])
        if (b["id"].get<int>() <= 7) trunc["buses"].push_back(b);
    for (const auto& l : doc["lines"])
        if (l["from"].get<int>() <= 6 && l["to"].get<int>() <= 7) trunc["lines"].push_back(l);
    const fs::path path = scratch_dir() / "feeder8.json";
    vvc::write_text_atomic(path.string(), trunc.dump());

    const json full = json::parse(run_cli("matrices " + data("feeder16.json")).output);
    const json small = json::parse(run_cli("matrices " + path.string()).output);
    CHECK(small["n"] == 7);
    CHECK(full["cond_X"].get<double>() > small["cond_X"].get<double>());
}

TEST_CASE("missing and malformed inputs exit with code 2") {
    CHECK(run_cli("matrices /nonexistent/net.json").exit_code == 2);

    const fs::path bad = scratch_dir() / "bad.json";
    vvc::write_text_atomic(bad.string(),
                           R"({"buses": [{"id": 0}, {"id": 1}],
                               "lines": [{"from": 0, "to": 1, "r_ohm": 0.1}]})");
    const CliResult res = run_cli("matrices " + bad.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("x_ohm") != std::string::npos);
}

TEST_CASE("stability-report exit codes follow the certificate") {
    const CliResult droop =
        run_cli("stability-report " + data("feeder16.json") + " --scheme droop --c 0.5");
    CHECK(droop.exit_code == 3);
    const json droop_doc = json::parse(droop.output);
    CHECK(droop_doc["stable"] == false);
    CHECK(droop_doc["droop_pd_ok"] == false);

    const CliResult scaled = run_cli("stability-report " + data("feeder16.json") +
                                     " --scheme scaled --epsilon 0.3 --c 0.2");
    CHECK(scaled.exit_code == 0);
    const json scaled_doc = json::parse(scaled.output);
    CHECK(scaled_doc["stable"] == true);
    CHECK(scaled_doc["epsilon_bound"].get<double>() == doctest::Approx(0.63).epsilon(0.05));
}

TEST_CASE("run-static final mismatch matches solve-centralized") {
    const fs::path out = scratch_dir() / "static_scaled";
    const CliResult run = run_cli("run-static " + data("feeder16.json") +
                                  " --scheme scaled --epsilon 0.3 --out " + out.string());
    REQUIRE(run.exit_code == 0);
    const json run_doc = json::parse(run.output);
    REQUIRE(run_doc["converged"] == true);

    const CliResult cen = run_cli("solve-centralized " + data("feeder16.json"));
    REQUIRE(cen.exit_code == 0);
    const json cen_doc = json::parse(cen.output);
    const double loop_mis = run_doc["final_mismatch"].get<double>();
    const double qp_mis = cen_doc["weighted"]["mismatch_norm"].get<double>();
    CHECK(loop_mis == doctest::Approx(qp_mis).epsilon(1e-4));

    CHECK(fs::exists(out / "trace.csv"));
    std::ifstream trace(out / "trace.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header == "tick,minute,mismatch_norm,limits_hit");
}

TEST_CASE("benchmark variant reports the smaller mismatch") {
    const CliResult res =
        run_cli("solve-centralized " + data("feeder16.json") + " --benchmark-variant");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    const double weighted = doc["weighted"]["mismatch_norm"].get<double>();
    const double benchmark = doc["benchmark"]["mismatch_norm"].get<double>();
    CHECK(benchmark < weighted);
    CHECK(doc.contains("benchmark_no_penalty"));
}

TEST_CASE("oscillating droop run exits with code 4 and keeps its trace") {
    const fs::path out = scratch_dir() / "static_droop";
    const CliResult res = run_cli("run-static " + data("feeder16.json") +
                                  " --scheme droop --c 0.5 --max-iter 200 --out " + out.string());
    CHECK(res.exit_code == 4);
    const json doc = json::parse(res.output);
    CHECK(doc["oscillating"] == true);
    CHECK(fs::exists(out / "trace.csv"));
}

TEST_CASE("run-dynamic writes the summary with evening undervoltage in no-VAR mode") {
    const fs::path out = scratch_dir() / "dyn_none";
    const CliResult res =
        run_cli("run-dynamic " + data("feeder16.json") + " --profile " +
                data("profile_synthetic.csv") + " --scheme none --out " + out.string());
    REQUIRE(res.exit_code == 0);
    const json summary = json::parse(vvc::read_text((out / "summary.json").string()));
    CHECK(summary["undervoltage_minutes"].get<int>() > 0);
    bool evening_low = false;
    for (const auto& row : summary["minutes"]) {
        const int minute = row["minute"].get<int>();
        if (minute >= 18 * 60 && minute < 22 * 60 && row["v_min"].get<double>() < 0.95)
            evening_low = true;
    }
    CHECK(evening_low);
}
