// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "quickrest/checker.hpp"
#include "quickrest/fixture_service.hpp"

using namespace quickrest;

namespace {

const std::set<Property> kAll{Property::Non500, Property::BodyConforms,
                              Property::StatusDocumented};

struct CheckerFixture {
    FixtureService service;
    ApiDescription api;
    SpecRegistry registry;
    ApiSpecs specs;
    std::unique_ptr<HttpClient> client;

    CheckerFixture() {
        service.start(0);
        api = parse_document(service.document_text());
        specs = compile_api(api, registry);
        client = std::make_unique<HttpClient>(BaseUrl::parse(service.base_url()), ClientConfig{});
    }

    OperationSpec op(const std::string& key) const {
        for (const auto& candidate : list_operations(api)) {
            if (candidate.key() == key) return candidate;
        }
        throw Error("no such op in fixture document: " + key);
    }

    CallRecord fake_record(const std::string& key, int status, const Json& body) const {
        CallRecord record;
        OperationSpec o = op(key);
        record.op = {o.path_template, o.verb};
        record.status = status;
        record.response_json = body;
        record.response_body = body.dump();
        return record;
    }

    std::vector<PropertyVerdict> evaluate(const std::string& key, const CallRecord& record,
                                          const std::set<Property>& enabled = kAll) const {
        OperationSpec o = op(key);
        return evaluate_properties(o, record, registry, specs.for_operation(o), enabled);
    }
};

PropertyStatus status_of(const std::vector<PropertyVerdict>& verdicts, Property p) {
    for (const auto& v : verdicts)
        if (v.property == p) return v.status;
    throw Error("property not evaluated");
}

}  // namespace

TEST_CASE("evaluate_properties") {
    CheckerFixture f;

    SUBCASE("status 500 fails Non500") {
        auto verdicts =
            f.evaluate("GET /objects", f.fake_record("GET /objects", 500, Json::object()));
        CHECK(status_of(verdicts, Property::Non500) == PropertyStatus::Fail);
    }
    SUBCASE("documented 200 with a conforming body passes all three") {
        Json body = Json::array({Json{{"name", "alpha"}}});
        auto verdicts = f.evaluate("GET /objects", f.fake_record("GET /objects", 200, body));
        CHECK(status_of(verdicts, Property::Non500) == PropertyStatus::Pass);
        CHECK(status_of(verdicts, Property::BodyConforms) == PropertyStatus::Pass);
        CHECK(status_of(verdicts, Property::StatusDocumented) == PropertyStatus::Pass);
    }
    SUBCASE("undocumented 418: StatusDocumented fails, BodyConforms skips") {
        auto verdicts =
            f.evaluate("GET /teapot", f.fake_record("GET /teapot", 418, Json::object()));
        CHECK(status_of(verdicts, Property::StatusDocumented) == PropertyStatus::Fail);
        CHECK(status_of(verdicts, Property::BodyConforms) == PropertyStatus::Skip);
        CHECK(status_of(verdicts, Property::Non500) == PropertyStatus::Pass);
    }
    SUBCASE("nonconforming body fails BodyConforms with a path") {
        Json body = Json::array({Json{{"id", "not-a-uuid"}, {"name", "x"}}});
        auto verdicts = f.evaluate("GET /objects", f.fake_record("GET /objects", 200, body));
        CHECK(status_of(verdicts, Property::BodyConforms) == PropertyStatus::Fail);
        for (const auto& v : verdicts) {
            if (v.property == Property::BodyConforms) {
                REQUIRE_FALSE(v.violations.empty());
                CHECK(v.violations[0].json_path == "$[0].id");
            }
        }
    }
    SUBCASE("4xx responses are never failures by themselves") {
        auto verdicts =
            f.evaluate("GET /objects", f.fake_record("GET /objects", 400, Json::object()));
        CHECK(status_of(verdicts, Property::Non500) == PropertyStatus::Pass);
        CHECK(status_of(verdicts, Property::StatusDocumented) == PropertyStatus::Pass);
    }
    SUBCASE("schema documented but body is not JSON fails BodyConforms") {
        CallRecord record = f.fake_record("GET /objects", 200, Json::object());
        record.response_json.reset();
        record.response_body = "<html>";
        auto verdicts = f.evaluate("GET /objects", record);
        CHECK(status_of(verdicts, Property::BodyConforms) == PropertyStatus::Fail);
    }
    SUBCASE("property independence: disabling one never changes the others") {
        std::vector<CallRecord> records = {
            f.fake_record("GET /objects", 500, Json::object()),
            f.fake_record("GET /objects", 200, Json::array({Json{{"name", "a"}}})),
            f.fake_record("GET /teapot", 418, Json::object()),
            f.fake_record("GET /badbody", 200, Json{{"id", "x"}}),
        };
        std::vector<std::string> keys = {"GET /objects", "GET /objects", "GET /teapot",
                                         "GET /badbody"};
        for (size_t i = 0; i < records.size(); ++i) {
            auto full = f.evaluate(keys[i], records[i]);
            for (Property dropped : kAll) {
                std::set<Property> subset = kAll;
                subset.erase(dropped);
                auto partial = f.evaluate(keys[i], records[i], subset);
                for (const auto& v : partial)
                    CHECK(v.status == status_of(full, v.property));
            }
        }
    }
}

TEST_CASE("check_operation: the string bug is found and shrunk to <= 2 characters") {
    CheckerFixture f;
    GeneratorConfig cfg;
    cfg.string_mix = 1.0;
    RunPlan plan;
    plan.seed = 11;
    plan.tests_per_iteration = 100;
    plan.iterations = 1;

    CheckOutcome outcome = check_operation(f.op("GET /objects"), cfg, plan, f.registry,
                                           f.specs.for_operation(f.op("GET /objects")),
                                           *f.client);
    REQUIRE(outcome.verdict == CheckOutcome::Verdict::Fail);
    REQUIRE(outcome.fail.has_value());
    CHECK(outcome.fail->failed_property == Property::Non500);
    CHECK(outcome.fail->reproduced);
    const Json& shrunk = outcome.fail->shrunk_input;
    REQUIRE(shrunk.contains("q"));
    CHECK(utf8_decode(shrunk["q"].get<std::string>()).size() <= 2);
    CHECK(outcome.fail->repro_command.find("--seed 11") != std::string::npos);

    // Shrunk-input validity: replaying it once fails the same property.
    ParamAssignment replay;
    for (auto it = shrunk.begin(); it != shrunk.end(); ++it) replay.values[it.key()] = it.value();
    RequestPlan request = build_request(f.op("GET /objects"), replay, f.client->base());
    CallRecord record = f.client->execute(request);
    CHECK(record.status == 500);
}

TEST_CASE("check_operation: a clean endpoint passes every test") {
    CheckerFixture f;
    GeneratorConfig cfg;
    RunPlan plan;
    plan.seed = 3;
    plan.tests_per_iteration = 10;
    plan.iterations = 3;
    CheckOutcome outcome =
        check_operation(f.op("POST /reset"), cfg, plan, f.registry,
                        f.specs.for_operation(f.op("POST /reset")), *f.client);
    CHECK(outcome.verdict == CheckOutcome::Verdict::Pass);
    CHECK(outcome.tests_executed == 30);
    CHECK(outcome.records.size() == 30);
}

TEST_CASE("check_operation: under-documented endpoint fails StatusDocumented by name") {
    CheckerFixture f;
    GeneratorConfig cfg;
    RunPlan plan;
    plan.seed = 5;
    CheckOutcome outcome =
        check_operation(f.op("GET /teapot"), cfg, plan, f.registry,
                        f.specs.for_operation(f.op("GET /teapot")), *f.client);
    REQUIRE(outcome.verdict == CheckOutcome::Verdict::Fail);
    CHECK(outcome.fail->failed_property == Property::StatusDocumented);
    CHECK(outcome.fail->detail.find("418") != std::string::npos);
}

TEST_CASE("check_operation: reproducibility of verdict and shrunk input") {
    CheckerFixture f;
    GeneratorConfig cfg;
    cfg.string_mix = 1.0;
    RunPlan plan;
    plan.seed = 1234;
    plan.tests_per_iteration = 50;
    plan.iterations = 1;
    auto run = [&] {
        return check_operation(f.op("GET /objects"), cfg, plan, f.registry,
                               f.specs.for_operation(f.op("GET /objects")), *f.client);
    };
    CheckOutcome first = run();
    CheckOutcome second = run();
    CHECK(first.verdict == second.verdict);
    REQUIRE(first.fail.has_value());
    REQUIRE(second.fail.has_value());
    CHECK(first.fail->shrunk_input == second.fail->shrunk_input);
    CHECK(first.fail->original_input == second.fail->original_input);
    CHECK(first.tests_executed == second.tests_executed);
}

TEST_CASE("check_operation: budget invariant") {
    CheckerFixture f;
    GeneratorConfig cfg;
    cfg.string_mix = 1.0;
    RunPlan plan;
    plan.seed = 9;
    plan.tests_per_iteration = 20;
    plan.iterations = 2;
    plan.shrink_budget = 50;
    CheckOutcome outcome = check_operation(f.op("GET /objects"), cfg, plan, f.registry,
                                           f.specs.for_operation(f.op("GET /objects")),
                                           *f.client);
    CHECK(outcome.records.size() <= plan.total_tests() + plan.shrink_budget);
    CHECK(outcome.shrink_executions <= plan.shrink_budget);

    plan.keep_going = true;  // offending-parameter probes share the budget
    CheckOutcome kept = check_operation(f.op("GET /objects"), cfg, plan, f.registry,
                                        f.specs.for_operation(f.op("GET /objects")), *f.client);
    CHECK(kept.records.size() <= plan.total_tests() + plan.shrink_budget);
    CHECK(kept.shrink_executions <= plan.shrink_budget);
}

TEST_CASE("check_operation: persistent transport failure aborts") {
    CheckerFixture f;
    HttpClient dead(BaseUrl::parse("http://127.0.0.1:9"), ClientConfig{0.2, {}, 1024});
    GeneratorConfig cfg;
    RunPlan plan;
    plan.tests_per_iteration = 10;
    plan.iterations = 5;
    plan.max_consecutive_transport_errors = 3;
    CheckOutcome outcome = check_operation(f.op("GET /teapot"), cfg, plan, f.registry,
                                           f.specs.for_operation(f.op("GET /teapot")), dead);
    CHECK(outcome.verdict == CheckOutcome::Verdict::Aborted);
    CHECK(outcome.transport_errors == 3);
    CHECK(outcome.tests_executed == 3);
}

TEST_CASE("check_operation: keep-going excludes the offending parameter and continues") {
    CheckerFixture f;
    GeneratorConfig cfg;
    cfg.string_mix = 1.0;
    RunPlan plan;
    plan.seed = 21;
    plan.tests_per_iteration = 40;
    plan.iterations = 1;
    plan.keep_going = true;
    CheckOutcome outcome = check_operation(f.op("GET /objects"), cfg, plan, f.registry,
                                           f.specs.for_operation(f.op("GET /objects")),
                                           *f.client);
    CHECK(outcome.verdict == CheckOutcome::Verdict::Fail);  // the first failure is still reported
    CHECK(outcome.tests_executed == 40);                    // but the run kept going
    // After exclusion the parameter is held at its minimal value, so the tail
    // of the run is all 200s.
    bool saw_500_after_exclusion = false;
    size_t fail_index = outcome.fail->test_index;
    for (const auto& record : outcome.records) {
        if (record.test_index > fail_index && record.status == 500)
            saw_500_after_exclusion = true;
    }
    CHECK_FALSE(saw_500_after_exclusion);
}

TEST_CASE("check_all: one outcome per operation, deterministic order") {
    CheckerFixture f;
    GeneratorConfig cfg;
    cfg.string_mix = 0.0;  // keep /objects quiet so more endpoints run their full budget
    RunPlan plan;
    plan.seed = 2;
    plan.tests_per_iteration = 5;
    plan.iterations = 1;
    auto factory = [&] {
        return HttpClient(BaseUrl::parse(f.service.base_url()), ClientConfig{});
    };
    CheckAllResult result = check_all(f.api, cfg, plan, f.registry, f.specs, factory);
    auto ops = list_operations(f.api);
    REQUIRE(result.outcomes.size() == ops.size());
    for (size_t i = 0; i < ops.size(); ++i)
        CHECK(result.outcomes[i].op.key() == ops[i].key());
}

TEST_CASE("check_all: endpoint filter and parallel workers agree with sequential") {
    CheckerFixture f;
    GeneratorConfig cfg;
    RunPlan plan;
    plan.seed = 6;
    plan.tests_per_iteration = 5;
    plan.iterations = 1;
    auto factory = [&] {
        return HttpClient(BaseUrl::parse(f.service.base_url()), ClientConfig{});
    };
    auto filter = [](const OperationSpec& op) {
        return endpoint_glob_match("* /resources*", op.key());
    };

    CheckAllResult sequential =
        check_all(f.api, cfg, plan, f.registry, f.specs, factory, {}, {}, filter);
    REQUIRE(sequential.outcomes.size() == 3);

    RunPlan parallel_plan = plan;
    parallel_plan.workers = 3;
    CheckAllResult parallel =
        check_all(f.api, cfg, parallel_plan, f.registry, f.specs, factory, {}, {}, filter);
    REQUIRE(parallel.outcomes.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(parallel.outcomes[i].op.key() == sequential.outcomes[i].op.key());
        CHECK(parallel.outcomes[i].verdict == sequential.outcomes[i].verdict);
    }
}

TEST_CASE("check_all: empty document gives an empty result") {
    ApiDescription empty = parse_document(R"({"swagger":"2.0","paths":{}})");
    SpecRegistry registry;
    ApiSpecs specs = compile_api(empty, registry);
    GeneratorConfig cfg;
    RunPlan plan;
    auto factory = [] { return HttpClient(BaseUrl::parse("http://127.0.0.1:9"), ClientConfig{}); };
    CHECK(check_all(empty, cfg, plan, registry, specs, factory).outcomes.empty());
}

TEST_CASE("per-param-first strategy holds other parameters at minimal values") {
    CheckerFixture f;
    GeneratorConfig cfg;
    cfg.string_mix = 0.0;
    RunPlan plan;
    plan.seed = 17;
    plan.tests_per_iteration = 30;
    plan.iterations = 1;
    plan.param_strategy = RunPlan::ParamStrategy::PerParamFirst;
    // PUT /resources/{id} has two parameters (path id + optional body).
    CheckOutcome outcome = check_operation(f.op("PUT /resources/{id}"), cfg, plan, f.registry,
                                           f.specs.for_operation(f.op("PUT /resources/{id}")),
                                           *f.client);
    CHECK(outcome.verdict == CheckOutcome::Verdict::Pass);
    CHECK(outcome.tests_executed == 30);
    // Campaign 1 (tests 0..9) focuses the id parameter; the optional body is
    // held at its minimal assignment, which omits it entirely.
    const CallRecord& first = outcome.records.front();
    CHECK_FALSE(first.plan.body.has_value());
    // Campaign 2 (tests 10..19) focuses the body; the id is pinned to the
    // minimal uuid, so the URL is constant there.
    const CallRecord& middle = outcome.records[10];
    CHECK(middle.plan.url.find("/resources/00000000-0000-4000-8000-000000000000") !=
          std::string::npos);
    // Campaign 3 (tests 20..29) randomizes all parameters.
}

TEST_CASE("endpoint_glob_match") {
    CHECK(endpoint_glob_match("GET /objects", "GET /objects"));
    CHECK(endpoint_glob_match("* /objects", "POST /objects"));
    CHECK(endpoint_glob_match("/objects", "POST /objects"));  // no-verb pattern
    CHECK(endpoint_glob_match("* /resources*", "DELETE /resources/{id}"));
    CHECK(endpoint_glob_match("GET *", "GET /anything/at/all"));
    CHECK_FALSE(endpoint_glob_match("GET /objects", "POST /objects"));
    CHECK_FALSE(endpoint_glob_match("* /objects", "GET /objects/{objectid}"));
}
