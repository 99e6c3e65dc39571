// SPDX-License-Identifier: Apache-2.0
#include "quickrest/oas_model.hpp"

#include <algorithm>

namespace quickrest {

std::string to_string(JsonType t) {
    switch (t) {
        case JsonType::String: return "string";
        case JsonType::Integer: return "integer";
        case JsonType::Number: return "number";
        case JsonType::Boolean: return "boolean";
    }
    return "unknown";
}

std::string to_string(ParamLocation loc) {
    switch (loc) {
        case ParamLocation::Path: return "path";
        case ParamLocation::Query: return "query";
        case ParamLocation::Header: return "header";
        case ParamLocation::Body: return "body";
        case ParamLocation::Form: return "formData";
    }
    return "unknown";
}

bool DataSchema::operator==(const DataSchema& other) const {
    return kind == other.kind && type == other.type && format == other.format &&
           enum_values == other.enum_values && minimum == other.minimum &&
           maximum == other.maximum && pattern == other.pattern && items == other.items &&
           properties == other.properties && required == other.required &&
           ref_name == other.ref_name;
}

bool ParameterSpec::operator==(const ParameterSpec&) const = default;
bool ResponseSpec::operator==(const ResponseSpec&) const = default;
bool OperationSpec::operator==(const OperationSpec&) const = default;
bool ApiDescription::operator==(const ApiDescription&) const = default;

DataSchema DataSchema::primitive(JsonType t, std::optional<std::string> fmt) {
    DataSchema s;
    s.kind = Kind::Primitive;
    s.type = t;
    s.format = std::move(fmt);
    return s;
}

DataSchema DataSchema::reference(std::string name) {
    DataSchema s;
    s.kind = Kind::Reference;
    s.ref_name = std::move(name);
    return s;
}

DataSchema DataSchema::array_of(DataSchema item) {
    DataSchema s;
    s.kind = Kind::Array;
    s.items.push_back(std::move(item));
    return s;
}

DataSchema DataSchema::object(std::vector<ObjectProperty> props, std::vector<std::string> req) {
    DataSchema s;
    s.kind = Kind::Object;
    s.properties = std::move(props);
    s.required = std::move(req);
    return s;
}

const ParameterSpec* OperationSpec::find_parameter(const std::string& name,
                                                   ParamLocation loc) const {
    for (const auto& p : parameters) {
        if (p.name == name && p.location == loc) return &p;
    }
    return nullptr;
}

std::string ApiDescription::base_url() const {
    if (host.empty()) return {};
    std::string url = scheme + "://" + host;
    if (!base_path.empty() && base_path != "/") url += base_path;
    return url;
}

std::set<std::string> path_placeholders(const std::string& path_template) {
    std::set<std::string> names;
    for (size_t i = 0; i < path_template.size(); ++i) {
        if (path_template[i] != '{') continue;
        auto close = path_template.find('}', i);
        if (close == std::string::npos) break;
        names.insert(path_template.substr(i + 1, close - i - 1));
        i = close;
    }
    return names;
}

namespace {

// JSON pointer token escaping per RFC 6901.
std::string escape_pointer_token(const std::string& token) {
    std::string out;
    for (char c : token) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

struct Parser {
    std::vector<ModelViolation> violations;

    void fail(const std::string& ptr, const std::string& msg) {
        violations.push_back({ptr, msg});
    }

    static std::optional<std::string> ref_target(const OrderedJson& j) {
        if (!j.is_object() || !j.contains("$ref")) return std::nullopt;
        return j["$ref"].is_string() ? std::optional<std::string>(j["$ref"].get<std::string>())
                                     : std::optional<std::string>("");
    }

    DataSchema parse_schema(const OrderedJson& j, const std::string& ptr) {
        DataSchema out;
        if (!j.is_object()) {
            fail(ptr, "schema must be a JSON object");
            return out;
        }
        if (auto ref = ref_target(j)) {
            constexpr std::string_view prefix = "#/definitions/";
            if (ref->rfind(prefix, 0) != 0 || ref->size() == prefix.size()) {
                fail(ptr + "/$ref", "only #/definitions/<name> references are supported: " + *ref);
                return out;
            }
            return DataSchema::reference(ref->substr(prefix.size()));
        }

        std::string type = j.value("type", std::string{});
        if (type.empty() && j.contains("properties")) type = "object";
        if (type.empty() && j.contains("items")) type = "array";

        if (type == "object" || (type.empty() && !j.contains("items"))) {
            out.kind = DataSchema::Kind::Object;
            if (j.contains("properties")) {
                if (!j["properties"].is_object()) {
                    fail(ptr + "/properties", "properties must be an object");
                } else {
                    for (auto it = j["properties"].begin(); it != j["properties"].end(); ++it) {
                        out.properties.push_back(
                            {it.key(), parse_schema(it.value(), ptr + "/properties/" +
                                                                    escape_pointer_token(it.key()))});
                    }
                }
            }
            if (j.contains("required")) {
                if (!j["required"].is_array()) {
                    fail(ptr + "/required", "required must be an array of names");
                } else {
                    for (const auto& r : j["required"]) {
                        if (r.is_string()) out.required.push_back(r.get<std::string>());
                    }
                }
            }
            for (const auto& r : out.required) {
                bool known = std::any_of(out.properties.begin(), out.properties.end(),
                                         [&](const auto& p) { return p.name == r; });
                if (!known) fail(ptr + "/required", "required name not in properties: " + r);
            }
            return out;
        }

        if (type == "array") {
            out.kind = DataSchema::Kind::Array;
            if (!j.contains("items") || !j["items"].is_object()) {
                fail(ptr, "array schema requires exactly one items schema");
                out.items.push_back(DataSchema::primitive(JsonType::String));
            } else {
                out.items.push_back(parse_schema(j["items"], ptr + "/items"));
            }
            return out;
        }

        out.kind = DataSchema::Kind::Primitive;
        if (type == "string") out.type = JsonType::String;
        else if (type == "integer") out.type = JsonType::Integer;
        else if (type == "number") out.type = JsonType::Number;
        else if (type == "boolean") out.type = JsonType::Boolean;
        else {
            fail(ptr + "/type", "unsupported type: " + (type.empty() ? "<missing>" : type));
            return out;
        }
        if (j.contains("format") && j["format"].is_string())
            out.format = j["format"].get<std::string>();
        if (j.contains("enum") && j["enum"].is_array()) {
            for (const auto& v : j["enum"]) out.enum_values.push_back(Json(v));
        }
        if (j.contains("minimum") && j["minimum"].is_number())
            out.minimum = j["minimum"].get<double>();
        if (j.contains("maximum") && j["maximum"].is_number())
            out.maximum = j["maximum"].get<double>();
        if (j.contains("pattern") && j["pattern"].is_string())
            out.pattern = j["pattern"].get<std::string>();
        return out;
    }

    ParameterSpec parse_parameter(const OrderedJson& j, const std::string& ptr) {
        ParameterSpec p;
        if (!j.is_object()) {
            fail(ptr, "parameter must be an object");
            return p;
        }
        p.name = j.value("name", std::string{});
        if (p.name.empty()) fail(ptr, "parameter requires a name");
        std::string in = j.value("in", std::string{});
        if (in == "path") p.location = ParamLocation::Path;
        else if (in == "query") p.location = ParamLocation::Query;
        else if (in == "header") p.location = ParamLocation::Header;
        else if (in == "body") p.location = ParamLocation::Body;
        else if (in == "formData") p.location = ParamLocation::Form;
        else fail(ptr + "/in", "unsupported parameter location: " + in);
        p.required = j.value("required", false);
        if (p.location == ParamLocation::Path && !p.required)
            fail(ptr, "path parameter must be required: " + p.name);
        if (p.location == ParamLocation::Body) {
            if (!j.contains("schema"))
                fail(ptr, "body parameter requires a schema");
            else
                p.schema = parse_schema(j["schema"], ptr + "/schema");
        } else {
            p.schema = parse_schema(j, ptr);
            if (p.schema.kind == DataSchema::Kind::Object)
                fail(ptr, "non-body parameter cannot be an object");
        }
        p.collection_format = j.value("collectionFormat", std::string{"csv"});
        if (p.collection_format != "csv" && p.collection_format != "multi")
            fail(ptr + "/collectionFormat",
                 "unsupported collectionFormat: " + p.collection_format);
        return p;
    }

    OperationSpec parse_operation(const OrderedJson& j, const std::string& verb,
                                  const std::string& path_template, const std::string& ptr,
                                  const std::vector<ParameterSpec>& shared_params) {
        OperationSpec op;
        op.verb = verb;
        op.path_template = path_template;
        if (j.contains("parameters")) {
            if (!j["parameters"].is_array()) {
                fail(ptr + "/parameters", "parameters must be an array");
            } else {
                size_t i = 0;
                for (const auto& pj : j["parameters"]) {
                    op.parameters.push_back(
                        parse_parameter(pj, ptr + "/parameters/" + std::to_string(i)));
                    ++i;
                }
            }
        }
        // Path-level parameters apply unless overridden by (name, location).
        for (const auto& shared : shared_params) {
            if (!op.find_parameter(shared.name, shared.location))
                op.parameters.push_back(shared);
        }
        if (j.contains("responses") && j["responses"].is_object()) {
            for (auto it = j["responses"].begin(); it != j["responses"].end(); ++it) {
                const std::string& key = it.key();
                std::string rptr = ptr + "/responses/" + escape_pointer_token(key);
                bool numeric = key.size() == 3 &&
                               std::all_of(key.begin(), key.end(),
                                           [](char c) { return c >= '0' && c <= '9'; });
                if (key != "default" && !numeric) {
                    fail(rptr, "status key must be 3-digit numeric or \"default\": " + key);
                    continue;
                }
                if (numeric) {
                    int code = std::stoi(key);
                    if (code < 100 || code > 599)
                        fail(rptr, "status key out of range 100-599: " + key);
                }
                ResponseSpec resp;
                resp.status_key = key;
                if (it.value().is_object() && it.value().contains("schema"))
                    resp.schema = parse_schema(it.value()["schema"], rptr + "/schema");
                op.responses.emplace(key, std::move(resp));
            }
        }
        auto read_media = [&](const char* field, std::vector<std::string>& out) {
            if (j.contains(field) && j[field].is_array()) {
                out.clear();
                for (const auto& m : j[field])
                    if (m.is_string()) out.push_back(m.get<std::string>());
            }
        };
        read_media("consumes", op.consumes);
        read_media("produces", op.produces);
        return op;
    }

    void check_operation_invariants(const OperationSpec& op, const std::string& ptr) {
        auto placeholders = path_placeholders(op.path_template);
        std::set<std::string> path_params;
        std::set<std::pair<std::string, ParamLocation>> seen;
        int body_count = 0;
        for (const auto& p : op.parameters) {
            if (!seen.insert({p.name, p.location}).second)
                fail(ptr, "duplicate parameter: " + p.name + " in " + to_string(p.location));
            if (p.location == ParamLocation::Path) path_params.insert(p.name);
            if (p.location == ParamLocation::Body) ++body_count;
        }
        if (body_count > 1) fail(ptr, "at most one body parameter is allowed");
        for (const auto& name : placeholders) {
            if (!path_params.count(name))
                fail(ptr, "path placeholder {" + name + "} has no path parameter");
        }
        for (const auto& name : path_params) {
            if (!placeholders.count(name))
                fail(ptr, "path parameter " + name + " has no {" + name + "} placeholder");
        }
    }

    void check_references(const DataSchema& s, const ApiDescription& api, const std::string& ptr) {
        switch (s.kind) {
            case DataSchema::Kind::Reference:
                if (!api.definitions.count(s.ref_name))
                    fail(ptr, "dangling reference: #/definitions/" + s.ref_name);
                break;
            case DataSchema::Kind::Array:
                check_references(s.item_schema(), api, ptr + "/items");
                break;
            case DataSchema::Kind::Object:
                for (const auto& p : s.properties)
                    check_references(p.schema, api,
                                     ptr + "/properties/" + escape_pointer_token(p.name));
                break;
            case DataSchema::Kind::Primitive:
                break;
        }
    }
};

const char* kVerbs[] = {"get", "post", "put", "delete", "patch", "head"};

}  // namespace

ApiDescription parse_document(std::string_view json_text) {
    OrderedJson doc = OrderedJson::parse(json_text, nullptr, false);
    if (doc.is_discarded()) throw MalformedJsonError("document is not valid JSON");
    if (!doc.is_object()) throw MalformedJsonError("document root must be a JSON object");
    if (doc.value("swagger", std::string{}) != "2.0")
        throw UnsupportedVersionError("only OpenAPI/Swagger 2.0 documents are supported");

    Parser parser;
    ApiDescription api;

    if (doc.contains("schemes") && doc["schemes"].is_array() && !doc["schemes"].empty() &&
        doc["schemes"][0].is_string())
        api.scheme = doc["schemes"][0].get<std::string>();
    api.host = doc.value("host", std::string{});
    api.base_path = doc.value("basePath", std::string{"/"});

    if (doc.contains("definitions")) {
        if (!doc["definitions"].is_object()) {
            parser.fail("/definitions", "definitions must be an object");
        } else {
            for (auto it = doc["definitions"].begin(); it != doc["definitions"].end(); ++it) {
                api.definitions.emplace(
                    it.key(), parser.parse_schema(it.value(), "/definitions/" +
                                                                  escape_pointer_token(it.key())));
            }
        }
    }

    if (doc.contains("paths")) {
        if (!doc["paths"].is_object()) {
            parser.fail("/paths", "paths must be an object");
        } else {
            for (auto it = doc["paths"].begin(); it != doc["paths"].end(); ++it) {
                const std::string& tmpl = it.key();
                std::string pptr = "/paths/" + escape_pointer_token(tmpl);
                if (tmpl.empty() || tmpl[0] != '/') {
                    parser.fail(pptr, "path template must start with '/'");
                    continue;
                }
                if (!it.value().is_object()) {
                    parser.fail(pptr, "path item must be an object");
                    continue;
                }
                std::vector<ParameterSpec> shared;
                if (it.value().contains("parameters") && it.value()["parameters"].is_array()) {
                    size_t i = 0;
                    for (const auto& pj : it.value()["parameters"]) {
                        shared.push_back(parser.parse_parameter(
                            pj, pptr + "/parameters/" + std::to_string(i)));
                        ++i;
                    }
                }
                std::map<std::string, OperationSpec> ops;
                for (const char* verb : kVerbs) {
                    if (!it.value().contains(verb)) continue;
                    std::string uverb = verb;
                    std::transform(uverb.begin(), uverb.end(), uverb.begin(), ::toupper);
                    OperationSpec op = parser.parse_operation(it.value()[verb], uverb, tmpl,
                                                              pptr + "/" + verb, shared);
                    parser.check_operation_invariants(op, pptr + "/" + verb);
                    ops.emplace(uverb, std::move(op));
                }
                api.paths.emplace(tmpl, std::move(ops));
            }
        }
    }

    // Reference resolution is checked across the whole model.
    for (const auto& [name, schema] : api.definitions)
        parser.check_references(schema, api, "/definitions/" + escape_pointer_token(name));
    for (const auto& [tmpl, ops] : api.paths) {
        for (const auto& [verb, op] : ops) {
            std::string optr = "/paths/" + escape_pointer_token(tmpl) + "/" + verb;
            for (size_t i = 0; i < op.parameters.size(); ++i)
                parser.check_references(op.parameters[i].schema, api,
                                        optr + "/parameters/" + std::to_string(i));
            for (const auto& [key, resp] : op.responses) {
                if (resp.schema)
                    parser.check_references(*resp.schema, api,
                                            optr + "/responses/" + escape_pointer_token(key));
            }
        }
    }

    if (!parser.violations.empty()) throw InvalidModelError(std::move(parser.violations));
    return api;
}

const DataSchema& resolve_reference(const ApiDescription& api, const std::string& ref_name) {
    std::vector<std::string> chain;
    std::set<std::string> visited;
    const std::string* current = &ref_name;
    for (;;) {
        auto it = api.definitions.find(*current);
        if (it == api.definitions.end()) throw UnknownReferenceError(*current);
        if (!visited.insert(*current).second) {
            chain.erase(chain.begin(),
                        std::find(chain.begin(), chain.end(), *current));
            throw CyclicReferenceError(std::move(chain));
        }
        chain.push_back(*current);
        if (it->second.kind != DataSchema::Kind::Reference) return it->second;
        current = &it->second.ref_name;
    }
}

std::vector<OperationSpec> list_operations(const ApiDescription& api) {
    std::vector<OperationSpec> out;
    for (const auto& [tmpl, ops] : api.paths)
        for (const auto& [verb, op] : ops) out.push_back(op);
    return out;
}

OrderedJson schema_to_json(const DataSchema& s) {
    OrderedJson j = OrderedJson::object();
    switch (s.kind) {
        case DataSchema::Kind::Reference:
            j["$ref"] = "#/definitions/" + s.ref_name;
            return j;
        case DataSchema::Kind::Array:
            j["type"] = "array";
            j["items"] = schema_to_json(s.item_schema());
            return j;
        case DataSchema::Kind::Object: {
            j["type"] = "object";
            if (!s.properties.empty()) {
                OrderedJson props = OrderedJson::object();
                for (const auto& p : s.properties) props[p.name] = schema_to_json(p.schema);
                j["properties"] = std::move(props);
            }
            if (!s.required.empty()) j["required"] = s.required;
            return j;
        }
        case DataSchema::Kind::Primitive:
            j["type"] = to_string(s.type);
            if (s.format) j["format"] = *s.format;
            if (!s.enum_values.empty()) {
                OrderedJson vals = OrderedJson::array();
                for (const auto& v : s.enum_values) vals.push_back(OrderedJson(v));
                j["enum"] = std::move(vals);
            }
            if (s.minimum) j["minimum"] = *s.minimum;
            if (s.maximum) j["maximum"] = *s.maximum;
            if (s.pattern) j["pattern"] = *s.pattern;
            return j;
    }
    return j;
}

namespace {

OrderedJson parameter_to_json(const ParameterSpec& p) {
    OrderedJson j = OrderedJson::object();
    j["name"] = p.name;
    j["in"] = to_string(p.location);
    if (p.required) j["required"] = true;
    if (p.location == ParamLocation::Body) {
        j["schema"] = schema_to_json(p.schema);
    } else {
        OrderedJson inline_schema = schema_to_json(p.schema);
        for (auto it = inline_schema.begin(); it != inline_schema.end(); ++it)
            j[it.key()] = it.value();
        if (p.collection_format != "csv") j["collectionFormat"] = p.collection_format;
    }
    return j;
}

}  // namespace

OrderedJson to_json(const ApiDescription& api) {
    OrderedJson doc = OrderedJson::object();
    doc["swagger"] = "2.0";
    doc["schemes"] = OrderedJson::array({api.scheme});
    if (!api.host.empty()) doc["host"] = api.host;
    doc["basePath"] = api.base_path;
    OrderedJson paths = OrderedJson::object();
    for (const auto& [tmpl, ops] : api.paths) {
        OrderedJson item = OrderedJson::object();
        for (const auto& [verb, op] : ops) {
            std::string lverb = verb;
            std::transform(lverb.begin(), lverb.end(), lverb.begin(), ::tolower);
            OrderedJson oj = OrderedJson::object();
            if (!op.parameters.empty()) {
                OrderedJson params = OrderedJson::array();
                for (const auto& p : op.parameters) params.push_back(parameter_to_json(p));
                oj["parameters"] = std::move(params);
            }
            OrderedJson responses = OrderedJson::object();
            for (const auto& [key, resp] : op.responses) {
                OrderedJson rj = OrderedJson::object();
                rj["description"] = "";
                if (resp.schema) rj["schema"] = schema_to_json(*resp.schema);
                responses[key] = std::move(rj);
            }
            oj["responses"] = std::move(responses);
            oj["consumes"] = op.consumes;
            oj["produces"] = op.produces;
            item[lverb] = std::move(oj);
        }
        paths[tmpl] = std::move(item);
    }
    doc["paths"] = std::move(paths);
    OrderedJson defs = OrderedJson::object();
    for (const auto& [name, schema] : api.definitions) defs[name] = schema_to_json(schema);
    doc["definitions"] = std::move(defs);
    return doc;
}

}  // namespace quickrest
