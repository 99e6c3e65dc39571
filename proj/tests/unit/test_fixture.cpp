// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "quickrest/fixture_service.hpp"
#include "quickrest/request_exec.hpp"
#include "quickrest/spec_engine.hpp"

using namespace quickrest;

namespace {

struct Fixture {
    FixtureService service;
    std::unique_ptr<HttpClient> client;

    Fixture() {
        service.start(0);
        client = std::make_unique<HttpClient>(BaseUrl::parse(service.base_url()), ClientConfig{});
    }

    CallRecord call(const std::string& verb, const std::string& path_and_query,
                    const std::optional<std::string>& body = std::nullopt) {
        RequestPlan plan;
        plan.verb = verb;
        plan.path_and_query = path_and_query;
        plan.url = service.base_url() + path_and_query;
        plan.body = body;
        plan.content_type = "application/json";
        return client->execute(plan);
    }
};

}  // namespace

TEST_CASE("fixture: string validation bug on GET /objects") {
    Fixture f;
    CHECK(f.call("GET", "/objects?q=abc").status == 200);
    CHECK(f.call("GET", "/objects?q=").status == 200);
    CHECK(f.call("GET", "/objects?q=a%21").status == 500);   // '!'
    CHECK(f.call("GET", "/objects?q=%07").status == 500);    // control byte
    CHECK(f.call("GET", "/objects?q=%C3%A9").status == 500); // high byte
    CHECK(f.call("GET", "/objects").status == 400);          // q required
}

TEST_CASE("fixture: GET /objects returns matching built-in objects") {
    Fixture f;
    CallRecord all = f.call("GET", "/objects?q=");
    REQUIRE(all.response_json.has_value());
    CHECK(all.response_json->size() == 3);
    CallRecord one = f.call("GET", "/objects?q=alp");
    REQUIRE(one.response_json.has_value());
    REQUIRE(one.response_json->size() == 1);
    CHECK((*one.response_json)[0]["name"] == "alpha");
}

TEST_CASE("fixture: integer validation bug on GET /items") {
    Fixture f;
    CHECK(f.call("GET", "/items/1").status == 200);
    CHECK(f.call("GET", "/items/42").status == 200);
    CHECK(f.call("GET", "/items/0").status == 500);
    CHECK(f.call("GET", "/items/-3").status == 500);
    CHECK(f.call("GET", "/items/abc").status == 404);
}

TEST_CASE("fixture: POST /objects covers 201, 400 and 500") {
    Fixture f;
    CHECK(f.call("POST", "/objects", R"({"name":"abcd"})").status == 201);
    CHECK(f.call("POST", "/objects", R"({"name":"abc"})").status == 400);   // too short
    CHECK(f.call("POST", "/objects", R"({"name":"Abcd"})").status == 400);  // uppercase
    CHECK(f.call("POST", "/objects", R"({"name":"ab1d"})").status == 400);  // digit
    CHECK(f.call("POST", "/objects", "{\"name\":\"ab\xC3\xA9\"}").status == 500);  // >127
    CHECK(f.call("POST", "/objects", R"({"nope":1})").status == 400);
    CHECK(f.call("POST", "/objects", "not json").status == 400);

    // The created echo conforms to the documented schema.
    CallRecord created = f.call("POST", "/objects", R"({"name":"gooseberry"})");
    SpecRegistry registry;
    ApiSpecs specs = compile_api(parse_document(f.service.document_text()), registry);
    REQUIRE(created.response_json.has_value());
    CHECK(validate(registry, SpecRef{"definitions/ObjectInfo"}, *created.response_json).conforms);
}

TEST_CASE("fixture: create/delete/edit stateful bug on /resources") {
    Fixture f;
    CallRecord created = f.call("POST", "/resources", R"({"name":"r1"})");
    REQUIRE(created.status == 201);
    REQUIRE(created.response_json.has_value());
    std::string id = (*created.response_json)["id"].get<std::string>();

    CHECK(f.call("PUT", "/resources/" + id, R"({"name":"r2"})").status == 200);
    CHECK(f.call("DELETE", "/resources/" + id).status == 204);
    CHECK(f.call("PUT", "/resources/" + id, R"({"name":"r3"})").status == 500);  // seeded bug

    CHECK(f.call("DELETE", "/resources/00000000-0000-4000-8000-00000000ffff").status == 404);
    CHECK(f.call("PUT", "/resources/00000000-0000-4000-8000-00000000ffff").status == 404);
}

TEST_CASE("fixture: reset clears the stateful window") {
    Fixture f;
    CallRecord created = f.call("POST", "/resources", R"({"name":"r"})");
    std::string id = (*created.response_json)["id"].get<std::string>();
    CHECK(f.call("DELETE", "/resources/" + id).status == 204);
    CHECK(f.call("POST", "/reset", "").status == 204);
    CHECK(f.call("PUT", "/resources/" + id).status == 404);  // no longer "deleted"

    // Counter restarts: ids repeat after reset, keeping runs deterministic.
    CallRecord again = f.call("POST", "/resources", R"({"name":"r"})");
    CHECK((*again.response_json)["id"] == id);
}

TEST_CASE("fixture: the two deliberate oracle targets") {
    Fixture f;
    CHECK(f.call("GET", "/teapot").status == 418);
    CallRecord bad = f.call("GET", "/badbody");
    CHECK(bad.status == 200);
    REQUIRE(bad.response_json.has_value());
    CHECK_FALSE(bad.response_json->contains("name"));
}

TEST_CASE("fixture: its own document parses cleanly and compiles") {
    Fixture f;
    std::string text = load_document_text(f.service.base_url() + "/swagger.json");
    ApiDescription api = parse_document(text);
    CHECK(api.base_url() == f.service.base_url());
    CHECK(list_operations(api).size() == 9);

    SpecRegistry registry;
    ApiSpecs specs = compile_api(api, registry);
    CHECK(registry.warnings().empty());  // only supported formats in the document
    CHECK(specs.by_operation.size() == 9);
}

TEST_CASE("fixture: responses are deterministic given request content and state") {
    Fixture f;
    CallRecord a = f.call("GET", "/objects?q=a");
    CallRecord b = f.call("GET", "/objects?q=a");
    CHECK(a.response_body == b.response_body);
    CHECK(a.status == b.status);
}
