// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "quickrest/gen_core.hpp"
#include "quickrest/spec_engine.hpp"

using namespace quickrest;

namespace {

std::map<std::string, DataSchema> object_info_definitions() {
    // {ObjectInfo: {name: string, id: string/uuid}, required [name]} in
    // document order name, id.
    DataSchema info = DataSchema::object(
        {{"name", DataSchema::primitive(JsonType::String)},
         {"id", DataSchema::primitive(JsonType::String, "uuid")}},
        {"name"});
    return {{"ObjectInfo", info}};
}

}  // namespace

TEST_CASE("definitions_to_specs: one spec per property plus the object spec") {
    SpecRegistry registry;
    auto refs = definitions_to_specs("definitions", object_info_definitions(), registry);
    REQUIRE(refs.size() == 3);
    CHECK(refs[0].name == "definitions.ObjectInfo/name");
    CHECK(refs[1].name == "definitions.ObjectInfo/id");
    CHECK(refs[2].name == "definitions/ObjectInfo");
    CHECK(refs[2].kind == SpecKind::Object);
}

TEST_CASE("definitions_to_specs: empty input yields no specs") {
    SpecRegistry registry;
    CHECK(definitions_to_specs("definitions", {}, registry).empty());
}

TEST_CASE("array definition compiles to a list validator") {
    auto defs = object_info_definitions();
    defs.emplace("Wrap", DataSchema::array_of(DataSchema::reference("ObjectInfo")));

    SpecRegistry registry;
    auto refs = definitions_to_specs("definitions", defs, registry);

    const SpecRef* wrap = nullptr;
    for (const auto& ref : refs)
        if (ref.name.rfind("array/Wrap-items-", 0) == 0) wrap = &ref;
    REQUIRE(wrap != nullptr);

    // Five hand-built lists checked against hand-applied rules: arrays of
    // objects that carry the required name and, when present, a uuid id.
    Json ok_empty = Json::array();
    Json ok_one = Json::array({Json{{"name", "a"}}});
    Json ok_full = Json::array({Json{{"name", "a"},
                                     {"id", "077de3d9-3f50-4756-bb45-ee61be31e8a2"}},
                                Json{{"name", "b"}}});
    Json bad_missing_name = Json::array({Json{{"id", "077de3d9-3f50-4756-bb45-ee61be31e8a2"}}});
    Json bad_element_type = Json::array({Json{{"name", "a"}}, Json(7)});

    CHECK(validate(registry, *wrap, ok_empty).conforms);
    CHECK(validate(registry, *wrap, ok_one).conforms);
    CHECK(validate(registry, *wrap, ok_full).conforms);
    CHECK_FALSE(validate(registry, *wrap, bad_missing_name).conforms);
    CHECK_FALSE(validate(registry, *wrap, bad_element_type).conforms);
    CHECK_FALSE(validate(registry, *wrap, Json(7)).conforms);

    // The canonical definition name resolves to the same validator.
    CHECK(registry.contains("definitions/Wrap"));
    CHECK(validate(registry, SpecRef{"definitions/Wrap"}, ok_full).conforms);
}

TEST_CASE("primitive_spec") {
    SpecRegistry registry;

    SUBCASE("(string, uuid) accepts a canonical uuid") {
        SpecRef spec = primitive_spec(registry, "string", "uuid");
        CHECK(validate(registry, spec, Json("077de3d9-3f50-4756-bb45-ee61be31e8a2")).conforms);
        CHECK(validate(registry, spec, Json("EC9C007F-5278-45A7-8AA2-B4CB13CE9E11")).conforms);
    }
    SUBCASE("(string, uuid) rejects the empty string with a pattern violation") {
        SpecRef spec = primitive_spec(registry, "string", "uuid");
        ValidationResult result = validate(registry, spec, Json(""));
        REQUIRE_FALSE(result.conforms);
        CHECK(result.violations[0].expected.find("uuid pattern") != std::string::npos);
        CHECK(result.violations[0].json_path == "$");
    }
    SUBCASE("(integer) rejects a JSON number with a fractional part") {
        SpecRef spec = primitive_spec(registry, "integer");
        CHECK_FALSE(validate(registry, spec, Json(1.5)).conforms);
        CHECK(validate(registry, spec, Json(1.0)).conforms);  // no fractional part
        CHECK(validate(registry, spec, Json(7)).conforms);
    }
    SUBCASE("number accepts both integral and fractional values") {
        SpecRef spec = primitive_spec(registry, "number");
        CHECK(validate(registry, spec, Json(1.5)).conforms);
        CHECK(validate(registry, spec, Json(7)).conforms);
        CHECK_FALSE(validate(registry, spec, Json("7")).conforms);
    }
    SUBCASE("unknown format falls back to the bare type with a warning") {
        SpecRef spec = primitive_spec(registry, "string", "hostname");
        CHECK(validate(registry, spec, Json("anything")).conforms);
        REQUIRE_FALSE(registry.warnings().empty());
        CHECK(registry.warnings()[0].find("hostname") != std::string::npos);
    }
    SUBCASE("unsupported base type") {
        CHECK_THROWS_AS(primitive_spec(registry, "file"), UnsupportedTypeError);
    }
}

TEST_CASE("validate") {
    SpecRegistry registry;

    SUBCASE("nat-int below 150 accepts 15") {
        DataSchema age = DataSchema::primitive(JsonType::Integer);
        age.minimum = 0;
        age.maximum = 149;
        SpecRef spec = compile_schema("t", "age", age, {}, registry);
        CHECK(validate(registry, spec, Json(15)).conforms);
        CHECK(validate(registry, spec, Json(0)).conforms);
        CHECK_FALSE(validate(registry, spec, Json(150)).conforms);
        CHECK_FALSE(validate(registry, spec, Json(-1)).conforms);
    }
    SUBCASE("object required keys: violation names the missing path") {
        definitions_to_specs("definitions", object_info_definitions(), registry);
        ValidationResult result =
            validate(registry, SpecRef{"definitions/ObjectInfo"}, Json::object());
        REQUIRE_FALSE(result.conforms);
        CHECK(result.violations[0].json_path == "$.name");

        // Without required keys an empty object conforms.
        DataSchema loose = DataSchema::object(
            {{"name", DataSchema::primitive(JsonType::String)}}, {});
        SpecRef loose_spec = compile_schema("t", "Loose", loose, {}, registry);
        CHECK(validate(registry, loose_spec, Json::object()).conforms);
    }
    SUBCASE("wrong top-level type against an array spec") {
        DataSchema arr = DataSchema::array_of(DataSchema::primitive(JsonType::Integer));
        SpecRef spec = compile_schema("t", "ints", arr, {}, registry);
        ValidationResult result = validate(registry, spec, Json(7));
        REQUIRE_FALSE(result.conforms);
        CHECK(result.violations[0].json_path == "$");
        CHECK(result.violations[0].expected == "array");
    }
    SUBCASE("nested violations carry array indices") {
        DataSchema arr = DataSchema::array_of(DataSchema::primitive(JsonType::Integer));
        SpecRef spec = compile_schema("t", "ints2", arr, {}, registry);
        ValidationResult result = validate(registry, spec, Json::array({1, 2, "x", 4}));
        REQUIRE_FALSE(result.conforms);
        CHECK(result.violations[0].json_path == "$[2]");
    }
    SUBCASE("enum validates by deep structural equality") {
        DataSchema pick = DataSchema::primitive(JsonType::String);
        pick.enum_values = {Json("cat"), Json("dog")};
        SpecRef spec = compile_schema("t", "pick", pick, {}, registry);
        CHECK(validate(registry, spec, Json("cat")).conforms);
        CHECK_FALSE(validate(registry, spec, Json("cow")).conforms);
        CHECK_FALSE(validate(registry, spec, Json(3)).conforms);
    }
    SUBCASE("pattern uses unanchored search like JSON Schema") {
        DataSchema pat = DataSchema::primitive(JsonType::String);
        pat.pattern = "^[a-z]+$";
        SpecRef spec = compile_schema("t", "pat", pat, {}, registry);
        CHECK(validate(registry, spec, Json("abc")).conforms);
        CHECK_FALSE(validate(registry, spec, Json("a1")).conforms);
    }
    SUBCASE("extra keys are allowed by default, violations when strict") {
        definitions_to_specs("definitions", object_info_definitions(), registry);
        Json value{{"name", "a"}, {"color", "red"}};
        CHECK(validate(registry, SpecRef{"definitions/ObjectInfo"}, value).conforms);
        ValidationOptions strict;
        strict.allow_extra_keys = false;
        ValidationResult result =
            validate(registry, SpecRef{"definitions/ObjectInfo"}, value, strict);
        REQUIRE_FALSE(result.conforms);
        CHECK(result.violations[0].json_path == "$.color");
    }
    SUBCASE("unknown spec") {
        CHECK_THROWS_AS(validate(registry, SpecRef{"nope/Missing"}, Json(1)), UnknownSpecError);
    }
}

TEST_CASE("registration is idempotent; differing schemas collide") {
    SpecRegistry registry;
    auto defs = object_info_definitions();
    definitions_to_specs("definitions", defs, registry);
    size_t before = registry.size();
    definitions_to_specs("definitions", defs, registry);  // identical again
    CHECK(registry.size() == before);

    CompiledSpec clash;
    clash.name = "definitions/ObjectInfo";
    clash.kind = SpecKind::Primitive;
    clash.source = DataSchema::primitive(JsonType::Boolean);
    CHECK_THROWS_AS(registry.register_spec(clash), CollisionError);
}

TEST_CASE("recursive definition graphs are rejected at compile time") {
    std::map<std::string, DataSchema> defs;
    defs["Node"] = DataSchema::object(
        {{"next", DataSchema::reference("Node")}}, {});
    SpecRegistry registry;
    CHECK_THROWS_AS(definitions_to_specs("definitions", defs, registry), CyclicReferenceError);
}

TEST_CASE("compilation is structural: identical schemas accept the same language") {
    DataSchema schema = DataSchema::object(
        {{"tag", DataSchema::primitive(JsonType::String)},
         {"vals", DataSchema::array_of(DataSchema::primitive(JsonType::Integer))}},
        {"tag"});
    SpecRegistry registry;
    SpecRef a = compile_schema("a", "S", schema, {}, registry);
    SpecRef b = compile_schema("b", "S", schema, {}, registry);

    GeneratorConfig cfg;
    Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        Json v = gen_value(registry, a, cfg, rng, Size{10});
        CHECK(validate(registry, b, v).conforms == validate(registry, a, v).conforms);
    }
    // And a few non-conforming values get the same verdict from both.
    for (const Json& bad : {Json(1), Json::object(), Json{{"tag", 3}}}) {
        CHECK(validate(registry, a, bad).conforms == validate(registry, b, bad).conforms);
        CHECK_FALSE(validate(registry, a, bad).conforms);
    }
}

TEST_CASE("compile_api attaches parameter and response specs per operation") {
    std::string doc = R"({"swagger":"2.0","paths":{
        "/objects": {"get": {
            "parameters": [{"name":"q","in":"query","type":"string"}],
            "responses": {"200": {"description":"",
                "schema": {"type":"array","items":{"$ref":"#/definitions/ObjectInfo"}}}}
        }},
        "/objects/{objectid}": {"get": {
            "parameters": [{"name":"objectid","in":"path","required":true,
                            "type":"string","format":"uuid"}],
            "responses": {"200": {"description":"",
                "schema": {"$ref":"#/definitions/ObjectInfo"}}}
        }}},
        "definitions": {"ObjectInfo": {"type":"object","required":["name"],
            "properties":{"name":{"type":"string"},"id":{"type":"string","format":"uuid"}}}}
    })";
    ApiDescription api = parse_document(doc);
    SpecRegistry registry;
    ApiSpecs specs = compile_api(api, registry);

    const OperationSpecs& op = specs.by_operation.at("GET /objects");
    REQUIRE(op.parameter_specs.count("q"));
    REQUIRE(op.response_specs.count("200"));
    // Array-of-definition responses get the short array/<Name> spec.
    CHECK(op.response_specs.at("200")->name == "array/ObjectInfo");
    CHECK(registry.contains("definitions/ObjectInfo"));
    CHECK(registry.contains("definitions.ObjectInfo/name"));

    // A single-object reference attaches the definition spec itself.
    const OperationSpecs& by_id = specs.by_operation.at("GET /objects/{objectid}");
    CHECK(by_id.response_specs.at("200")->name == "definitions/ObjectInfo");
}
