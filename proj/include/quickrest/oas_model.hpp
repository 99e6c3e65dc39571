// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "quickrest/errors.hpp"

namespace quickrest {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

enum class JsonType { String, Integer, Number, Boolean };

std::string to_string(JsonType t);

struct ObjectProperty;

/// Recursive schema model covering the OpenAPI 2.0 subset: primitives with
/// format/enum/bounds/pattern, arrays, objects with required keys, and
/// `#/definitions/...` references.
struct DataSchema {
    enum class Kind { Primitive, Array, Object, Reference };

    Kind kind = Kind::Primitive;

    // Primitive
    JsonType type = JsonType::String;
    std::optional<std::string> format;
    std::vector<Json> enum_values;
    std::optional<double> minimum;
    std::optional<double> maximum;
    std::optional<std::string> pattern;

    // Array: exactly one element when kind == Kind::Array
    std::vector<DataSchema> items;

    // Object
    std::vector<ObjectProperty> properties;
    std::vector<std::string> required;

    // Reference
    std::string ref_name;

    bool operator==(const DataSchema& other) const;

    const DataSchema& item_schema() const { return items.front(); }

    static DataSchema primitive(JsonType t, std::optional<std::string> fmt = std::nullopt);
    static DataSchema reference(std::string name);
    static DataSchema array_of(DataSchema item);
    static DataSchema object(std::vector<ObjectProperty> props, std::vector<std::string> req = {});
};

struct ObjectProperty {
    std::string name;
    DataSchema schema;

    bool operator==(const ObjectProperty& other) const {
        return name == other.name && schema == other.schema;
    }
};

enum class ParamLocation { Path, Query, Header, Body, Form };

std::string to_string(ParamLocation loc);

struct ParameterSpec {
    std::string name;
    ParamLocation location = ParamLocation::Query;
    bool required = false;
    DataSchema schema;
    std::string collection_format = "csv";  // query/form arrays: "csv" or "multi"

    bool operator==(const ParameterSpec&) const;
};

struct ResponseSpec {
    std::string status_key;
    std::optional<DataSchema> schema;  // absent: any/no body documented

    bool operator==(const ResponseSpec&) const;
};

struct OperationSpec {
    std::string verb;  // upper-case: GET/POST/PUT/DELETE/PATCH/HEAD
    std::string path_template;
    std::vector<ParameterSpec> parameters;
    std::map<std::string, ResponseSpec> responses;  // "200", "default", ...
    std::vector<std::string> consumes{"application/json"};
    std::vector<std::string> produces{"application/json"};

    bool operator==(const OperationSpec&) const;

    std::string key() const { return verb + " " + path_template; }
    const ParameterSpec* find_parameter(const std::string& name, ParamLocation loc) const;
};

struct ApiDescription {
    std::string scheme = "http";
    std::string host;       // "example.com:8080"; may be empty
    std::string base_path = "/";
    std::map<std::string, std::map<std::string, OperationSpec>> paths;  // template -> verb -> op
    std::map<std::string, DataSchema> definitions;

    bool operator==(const ApiDescription&) const;

    /// scheme://host + basePath; empty when the document does not name a host.
    std::string base_url() const;
};

/// Parse an OpenAPI 2.0 JSON document.
/// Throws MalformedJsonError, UnsupportedVersionError or InvalidModelError.
/// Unknown and vendor fields are ignored.
ApiDescription parse_document(std::string_view json_text);

/// Chase a `#/definitions/<name>` reference to a concrete schema.
/// Throws UnknownReferenceError / CyclicReferenceError.
const DataSchema& resolve_reference(const ApiDescription& api, const std::string& ref_name);

/// All operations, ordered by path template then verb.
std::vector<OperationSpec> list_operations(const ApiDescription& api);

/// Serialize back to the OpenAPI 2.0 subset. Re-parsing yields an equal model.
OrderedJson to_json(const ApiDescription& api);
OrderedJson schema_to_json(const DataSchema& schema);

/// Placeholder names appearing as `{name}` in a path template.
std::set<std::string> path_placeholders(const std::string& path_template);

/// Read the document text from a local file path or fetch it via HTTP(S) GET.
/// Throws ConfigError when the source cannot be read.
std::string load_document_text(const std::string& source);

}  // namespace quickrest
