// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "quickrest/cli.hpp"
#include "quickrest/fixture_service.hpp"
#include "quickrest/reporter.hpp"

using namespace quickrest;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/quickrest-test-") + std::to_string(::getpid()) + "-" + name;
}

}  // namespace

TEST_CASE("--help lists the flags with their defaults and exits 0") {
    CliResult r = run({"--help"});
    CHECK(r.code == 0);
    for (const char* flag :
         {"--spec", "--base-url", "--mode", "--tests", "--iterations", "--seed", "--string-mix",
          "--charset-max", "--int-mode", "--omit-required-prob", "--out-of-range-prob",
          "--max-size", "--tier-growth", "--tiers", "--properties", "--param-strategy",
          "--shrink-budget", "--keep-going", "--workers", "--sequences", "--seq-min", "--seq-max",
          "--identity-attr", "--identity-map", "--reset-hook", "--endpoint", "--report-json",
          "--report-canonical", "--auth-header", "--timeout", "--config", "--strict-extra-keys"}) {
        CHECK_MESSAGE(r.out.find(flag) != std::string::npos, "help misses ", flag);
    }
    CHECK(r.out.find("[10]") != std::string::npos);   // --tests default
    CHECK(r.out.find("[30]") != std::string::npos);   // --iterations default
    CHECK(r.out.find("[255]") != std::string::npos);  // --charset-max default
}

TEST_CASE("configuration errors exit 2") {
    CHECK(run({}).code == 2);                                     // --spec required
    CHECK(run({"--spec", "missing.json"}).code == 2);             // unreadable document
    CHECK(run({"--spec", "x", "--definitely-not-a-flag"}).code == 2);
    CHECK(run({"--spec", "x", "--mode", "sideways"}).code == 2);
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    CHECK(run({"--spec", url, "--string-mix", "1.5"}).code == 2);  // probability out of range
    CHECK(run({"--spec", url, "--properties", "telepathy"}).code == 2);
    CHECK(run({"--spec", url, "--auth-header", "no-colon"}).code == 2);
}

TEST_CASE("a clean endpoint run exits 0; a buggy one exits 1") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";

    CliResult clean = run({"--spec", url, "--endpoint", "POST /reset", "--tests", "3",
                           "--iterations", "2", "--seed", "7"});
    CHECK(clean.code == 0);
    CHECK(clean.out.find("PASS ") != std::string::npos);

    CliResult teapot = run({"--spec", url, "--endpoint", "GET /teapot", "--tests", "2",
                            "--iterations", "1", "--seed", "7"});
    CHECK(teapot.code == 1);
    CHECK(teapot.out.find("status-documented") != std::string::npos);
}

TEST_CASE("the JSON report lands on disk and parses back") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    std::string path = temp_path("report.json");

    CliResult r = run({"--spec", url, "--endpoint", "GET /items/*", "--tests", "5",
                       "--iterations", "1", "--seed", "3", "--report-json", path});
    CHECK(r.code == 1);  // the integer bug fires at n=0

    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    TestReport report = parse_report(buf.str());
    REQUIRE(report.outcomes.size() == 1);
    CHECK(report.outcomes[0].verdict == CheckOutcome::Verdict::Fail);
    CHECK(report.meta.config["tests"] == 5);
    std::remove(path.c_str());
}

TEST_CASE("identical argument vectors produce identical canonical reports") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    std::string path1 = temp_path("det1.json");
    std::string path2 = temp_path("det2.json");

    std::vector<std::string> base_args = {"--spec",    url,  "--tests",  "6", "--iterations",
                                          "2",         "--seed", "99", "--report-canonical",
                                          "--report-json"};
    auto args1 = base_args;
    args1.push_back(path1);
    auto args2 = base_args;
    args2.push_back(path2);

    service.reset();
    CliResult r1 = run(args1);
    service.reset();
    CliResult r2 = run(args2);
    CHECK(r1.code == r2.code);

    std::ifstream f1(path1), f2(path2);
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    REQUIRE(b1.str().size() > 0);
    CHECK(b1.str() == b2.str());
    std::remove(path1.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("config file supplies values; explicit flags override it") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    std::string cfg_path = temp_path("cfg.json");
    std::string report_path = temp_path("cfg-report.json");
    {
        std::ofstream cfg(cfg_path);
        cfg << Json{{"spec", url},
                    {"endpoint", "POST /reset"},
                    {"tests", 4},
                    {"iterations", 2},
                    {"seed", 5}}
                   .dump();
    }

    CliResult r = run({"--config", cfg_path, "--tests", "2", "--report-json", report_path});
    CHECK(r.code == 0);
    std::ifstream in(report_path);
    std::stringstream buf;
    buf << in.rdbuf();
    TestReport report = parse_report(buf.str());
    CHECK(report.meta.config["tests"] == 2);       // flag wins
    CHECK(report.meta.config["iterations"] == 2);  // file value
    CHECK(report.meta.seed == 5);
    std::remove(cfg_path.c_str());
    std::remove(report_path.c_str());
}

TEST_CASE("QUICKREST_AUTH_HEADER is the fallback for --auth-header") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";

    ::setenv("QUICKREST_AUTH_HEADER", "broken header without colon", 1);
    CliResult r = run({"--spec", url, "--endpoint", "POST /reset", "--tests", "1",
                       "--iterations", "1"});
    CHECK(r.code == 2);  // the env value is parsed exactly like the flag

    ::setenv("QUICKREST_AUTH_HEADER", "Private-Token: tok", 1);
    CliResult ok = run({"--spec", url, "--endpoint", "POST /reset", "--tests", "1",
                        "--iterations", "1"});
    CHECK(ok.code == 0);
    ::unsetenv("QUICKREST_AUTH_HEADER");
}

TEST_CASE("stateful mode over the CLI finds the seeded sequence bug") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    CliResult r = run({"--spec", url, "--mode", "stateful", "--endpoint", "/resources*",
                       "--seq-min", "2", "--seq-max", "5", "--sequences", "300", "--seed", "12",
                       "--reset-hook", "POST " + service.base_url() + "/reset"});
    CHECK(r.code == 1);
    CHECK(r.out.find("shrunk sequence (3 steps)") != std::string::npos);
    CHECK(r.out.find("POST /resources") != std::string::npos);
    CHECK(r.out.find("DELETE /resources/{id}") != std::string::npos);
    CHECK(r.out.find("PUT /resources/{id}") != std::string::npos);
}

TEST_CASE("mutation mode over the CLI: omitted required parameter hits the 400 path") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    std::string path = temp_path("mutation.json");
    CliResult r = run({"--spec", url, "--endpoint", "GET /objects", "--tests", "10",
                       "--iterations", "1", "--seed", "2", "--omit-required-prob", "1",
                       "--properties", "none", "--report-json", path});
    CHECK(r.code == 0);  // no properties enabled: a pure coverage run
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    TestReport report = parse_report(buf.str());
    bool saw_400 = false;
    for (const auto& row : report.frequency_table)
        if (row.path_template == "/objects" && row.status == 400) saw_400 = true;
    CHECK(saw_400);
    for (const auto& record : report.records) {
        CHECK(record.plan.url.find("q=") == std::string::npos);
        // The applied mutation is recorded on the call for reporting.
        REQUIRE(record.mutations.size() == 1);
        CHECK(record.mutations[0].param == "q");
        CHECK(record.mutations[0].kind == "omitted-required");
    }
    std::remove(path.c_str());
}

TEST_CASE("the embedded repro command reproduces the same shrunk input") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";
    std::string path1 = temp_path("repro1.json");
    std::string path2 = temp_path("repro2.json");

    CliResult first = run({"--spec", url, "--endpoint", "GET /objects", "--string-mix", "1",
                           "--tests", "50", "--iterations", "1", "--seed", "31",
                           "--report-json", path1});
    REQUIRE(first.code == 1);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    TestReport report1 = parse_report(slurp(path1));
    REQUIRE(report1.outcomes.size() == 1);
    REQUIRE(report1.outcomes[0].fail.has_value());
    std::string command = report1.outcomes[0].fail->repro_command;

    // Tokenize the command (the endpoint argument is double-quoted).
    std::vector<std::string> args;
    std::string token;
    bool quoted = false;
    for (char c : command) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ' ' && !quoted) {
            if (!token.empty()) args.push_back(token);
            token.clear();
        } else {
            token += c;
        }
    }
    if (!token.empty()) args.push_back(token);
    REQUIRE(args.front() == "quickrest");
    args.erase(args.begin());
    args.push_back("--report-json");
    args.push_back(path2);

    CliResult second = run(args);
    CHECK(second.code == 1);
    TestReport report2 = parse_report(slurp(path2));
    REQUIRE(report2.outcomes.size() == 1);
    REQUIRE(report2.outcomes[0].fail.has_value());
    CHECK(report2.outcomes[0].fail->shrunk_input == report1.outcomes[0].fail->shrunk_input);
    CHECK(report2.outcomes[0].fail->original_input == report1.outcomes[0].fail->original_input);
    std::remove(path1.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("stateful flag validation and parallel workers") {
    FixtureService service;
    service.start(0);
    std::string url = service.base_url() + "/swagger.json";

    CliResult bad_map = run({"--spec", url, "--mode", "stateful", "--identity-map", "no-equals"});
    CHECK(bad_map.code == 2);
    CHECK(bad_map.err.find("identity-map") != std::string::npos);

    CliResult workers = run({"--spec", url, "--endpoint", "/resources*", "--tests", "4",
                             "--iterations", "1", "--seed", "1", "--workers", "3"});
    CHECK(workers.code == 0);
}
