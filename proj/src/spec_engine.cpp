// SPDX-License-Identifier: Apache-2.0
#include "quickrest/spec_engine.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

namespace quickrest {

namespace {

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

constexpr const char* kSupportedStringFormats[] = {"uuid", "date-time"};

bool format_supported(const std::string& fmt) {
    return std::any_of(std::begin(kSupportedStringFormats), std::end(kSupportedStringFormats),
                       [&](const char* f) { return fmt == f; });
}

std::string render_value(const Json& v) {
    std::string s = v.dump(-1, ' ', false, Json::error_handler_t::replace);
    if (s.size() > 120) s = s.substr(0, 117) + "...";
    return s;
}

std::string join_path(const std::string& base, const std::string& key) {
    bool simple = !key.empty() && (std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_');
    for (char c : key)
        simple = simple && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    if (simple) return base + "." + key;
    std::string escaped;
    for (char c : key) {
        if (c == '"' || c == '\\') escaped += '\\';
        escaped += c;
    }
    return base + "[\"" + escaped + "\"]";
}

bool is_integral_number(const Json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    if (v.is_number_float()) {
        double d = v.get<double>();
        return std::trunc(d) == d && std::isfinite(d);
    }
    return false;
}

}  // namespace

bool is_uuid_string(const std::string& value) {
    // canonical 8-4-4-4-12 hex form
    static constexpr size_t kGroups[] = {8, 4, 4, 4, 12};
    size_t pos = 0;
    for (size_t g = 0; g < 5; ++g) {
        if (g > 0) {
            if (pos >= value.size() || value[pos] != '-') return false;
            ++pos;
        }
        for (size_t i = 0; i < kGroups[g]; ++i, ++pos) {
            if (pos >= value.size() || !is_hex(value[pos])) return false;
        }
    }
    return pos == value.size();
}

bool is_date_time_string(const std::string& value) {
    static const std::regex re(
        R"(^\d{4}-\d{2}-\d{2}[Tt]\d{2}:\d{2}:\d{2}(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$)");
    return std::regex_match(value, re);
}

SpecRef SpecRegistry::register_spec(CompiledSpec spec) {
    auto it = specs_.find(spec.name);
    if (it != specs_.end()) {
        if (!(it->second.source == spec.source))
            throw CollisionError("spec name registered with a different schema: " + spec.name);
        return {spec.name, it->second.kind};
    }
    SpecRef ref{spec.name, spec.kind};
    specs_.emplace(spec.name, std::move(spec));
    return ref;
}

const CompiledSpec& SpecRegistry::get(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end()) throw UnknownSpecError("unknown spec: " + name);
    return it->second;
}

std::vector<std::string> SpecRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& [name, _] : specs_) out.push_back(name);
    return out;
}

SpecRef primitive_spec(SpecRegistry& registry, const std::string& type,
                       const std::optional<std::string>& format) {
    DataSchema schema;
    if (type == "string") schema.type = JsonType::String;
    else if (type == "integer") schema.type = JsonType::Integer;
    else if (type == "number") schema.type = JsonType::Number;
    else if (type == "boolean") schema.type = JsonType::Boolean;
    else throw UnsupportedTypeError("unsupported primitive type: " + type);

    std::string name = "primitives/" + type;
    if (format) {
        if (type == "string" && format_supported(*format)) {
            schema.format = *format;
            name += "-" + *format;
        } else {
            registry.add_warning("unknown format \"" + *format + "\" on type " + type +
                                 "; treating as bare " + type);
        }
    }

    CompiledSpec spec;
    spec.name = name;
    spec.kind = SpecKind::Primitive;
    spec.source = schema;
    spec.type = schema.type;
    spec.format = schema.format;
    return registry.register_spec(std::move(spec));
}

namespace {

struct Compiler {
    const std::map<std::string, DataSchema>& definitions;
    SpecRegistry& registry;
    std::set<std::string> in_progress;  // cycle guard across definition compilation
    std::vector<SpecRef> created;       // every spec registered, in creation order

    static std::string short_name(const std::string& spec_name) {
        auto slash = spec_name.rfind('/');
        return slash == std::string::npos ? spec_name : spec_name.substr(slash + 1);
    }

    SpecRef compile_definition(const std::string& ns, const std::string& def_name) {
        std::string canonical = ns + "/" + def_name;
        if (registry.contains(canonical)) {
            return {canonical, registry.get(canonical).kind};
        }
        auto it = definitions.find(def_name);
        if (it == definitions.end()) throw UnknownReferenceError(def_name);
        if (!in_progress.insert(def_name).second) {
            std::vector<std::string> cycle(in_progress.begin(), in_progress.end());
            throw CyclicReferenceError(std::move(cycle));
        }
        SpecRef ref = compile_named(ns, def_name, it->second);
        in_progress.erase(def_name);
        return ref;
    }

    // Compile a definition under its canonical name.
    SpecRef compile_named(const std::string& ns, const std::string& def_name,
                          const DataSchema& schema) {
        std::string canonical = ns + "/" + def_name;
        switch (schema.kind) {
            case DataSchema::Kind::Reference: {
                SpecRef target = compile_definition(ns, schema.ref_name);
                CompiledSpec alias;
                alias.name = canonical;
                alias.kind = SpecKind::Alias;
                alias.source = schema;
                alias.target_spec = target.name;
                created.push_back(registry.register_spec(std::move(alias)));
                return created.back();
            }
            case DataSchema::Kind::Object: {
                std::vector<std::pair<std::string, std::string>> prop_specs;
                for (const auto& prop : schema.properties) {
                    SpecRef sub = compile_sub(ns + "." + def_name, prop.name, prop.schema);
                    created.push_back(sub);
                    prop_specs.emplace_back(prop.name, sub.name);
                }
                CompiledSpec obj;
                obj.name = canonical;
                obj.kind = SpecKind::Object;
                obj.source = schema;
                obj.object_properties = std::move(prop_specs);
                obj.required = schema.required;
                created.push_back(registry.register_spec(std::move(obj)));
                return created.back();
            }
            case DataSchema::Kind::Array: {
                SpecRef items = compile_items(ns + "." + def_name, schema.item_schema());
                CompiledSpec arr;
                arr.name = "array/" + def_name + "-items-" + short_name(items.name);
                arr.kind = SpecKind::Array;
                arr.source = schema;
                arr.items_spec = items.name;
                SpecRef arr_ref = registry.register_spec(std::move(arr));
                created.push_back(arr_ref);
                // Canonical alias so reference resolution by definition name works.
                CompiledSpec alias;
                alias.name = canonical;
                alias.kind = SpecKind::Alias;
                alias.source = schema;
                alias.target_spec = arr_ref.name;
                registry.register_spec(std::move(alias));
                return arr_ref;
            }
            case DataSchema::Kind::Primitive: {
                created.push_back(register_primitive(canonical, schema));
                return created.back();
            }
        }
        throw Error("unreachable schema kind");
    }

    SpecRef compile_sub(const std::string& ns, const std::string& name, const DataSchema& schema) {
        std::string full = ns + "/" + name;
        switch (schema.kind) {
            case DataSchema::Kind::Reference: {
                SpecRef target = compile_definition("definitions", schema.ref_name);
                CompiledSpec alias;
                alias.name = full;
                alias.kind = SpecKind::Alias;
                alias.source = schema;
                alias.target_spec = target.name;
                return registry.register_spec(std::move(alias));
            }
            case DataSchema::Kind::Object: {
                std::vector<std::pair<std::string, std::string>> prop_specs;
                for (const auto& prop : schema.properties) {
                    SpecRef sub = compile_sub(ns + "." + name, prop.name, prop.schema);
                    created.push_back(sub);
                    prop_specs.emplace_back(prop.name, sub.name);
                }
                CompiledSpec obj;
                obj.name = full;
                obj.kind = SpecKind::Object;
                obj.source = schema;
                obj.object_properties = std::move(prop_specs);
                obj.required = schema.required;
                return registry.register_spec(std::move(obj));
            }
            case DataSchema::Kind::Array: {
                SpecRef items = compile_items(ns + "." + name, schema.item_schema());
                CompiledSpec arr;
                arr.name = full;
                arr.kind = SpecKind::Array;
                arr.source = schema;
                arr.items_spec = items.name;
                return registry.register_spec(std::move(arr));
            }
            case DataSchema::Kind::Primitive:
                return register_primitive(full, schema);
        }
        throw Error("unreachable schema kind");
    }

    SpecRef compile_items(const std::string& ns, const DataSchema& items) {
        if (items.kind == DataSchema::Kind::Reference)
            return compile_definition("definitions", items.ref_name);
        return compile_sub(ns, "items", items);
    }

    SpecRef register_primitive(const std::string& name, const DataSchema& schema) {
        CompiledSpec spec;
        spec.name = name;
        spec.source = schema;
        spec.type = schema.type;
        spec.minimum = schema.minimum;
        spec.maximum = schema.maximum;
        spec.pattern = schema.pattern;
        if (!schema.enum_values.empty()) {
            spec.kind = SpecKind::Enum;
            spec.enum_values = schema.enum_values;
        } else {
            spec.kind = SpecKind::Primitive;
        }
        if (schema.format) {
            if (schema.type == JsonType::String && format_supported(*schema.format)) {
                spec.format = schema.format;
            } else {
                registry.add_warning("unknown format \"" + *schema.format + "\" on spec " + name +
                                     "; treating as bare " + to_string(schema.type));
            }
        }
        return registry.register_spec(std::move(spec));
    }
};

}  // namespace

std::vector<SpecRef> definitions_to_specs(const std::string& ns,
                                          const std::map<std::string, DataSchema>& definitions,
                                          SpecRegistry& registry) {
    Compiler compiler{definitions, registry, {}, {}};
    for (const auto& [name, schema] : definitions) {
        std::string canonical = ns + "/" + name;
        if (registry.contains(canonical)) continue;  // pulled in earlier via a reference
        compiler.in_progress.insert(name);
        compiler.compile_named(ns, name, schema);
        compiler.in_progress.erase(name);
    }
    return compiler.created;
}

SpecRef compile_schema(const std::string& ns, const std::string& name, const DataSchema& schema,
                       const std::map<std::string, DataSchema>& definitions,
                       SpecRegistry& registry) {
    Compiler compiler{definitions, registry, {}, {}};
    if (schema.kind == DataSchema::Kind::Reference)
        return compiler.compile_definition("definitions", schema.ref_name);
    if (schema.kind == DataSchema::Kind::Array &&
        schema.item_schema().kind == DataSchema::Kind::Reference) {
        // Arrays of a named definition get the short "array/<Name>" spec.
        SpecRef items = compiler.compile_definition("definitions", schema.item_schema().ref_name);
        CompiledSpec arr;
        arr.name = "array/" + schema.item_schema().ref_name;
        arr.kind = SpecKind::Array;
        arr.source = schema;
        arr.items_spec = items.name;
        return registry.register_spec(std::move(arr));
    }
    return compiler.compile_sub(ns, name, schema);
}

namespace {

void validate_into(const SpecRegistry& registry, const CompiledSpec& spec, const Json& value,
                   const std::string& path, const ValidationOptions& options,
                   std::vector<Violation>& out) {
    switch (spec.kind) {
        case SpecKind::Alias:
            validate_into(registry, registry.get(spec.target_spec), value, path, options, out);
            return;
        case SpecKind::Enum: {
            for (const auto& candidate : spec.enum_values) {
                if (candidate == value) return;
            }
            out.push_back({path, "one of the enum values of " + spec.name, render_value(value)});
            return;
        }
        case SpecKind::Array: {
            if (!value.is_array()) {
                out.push_back({path, "array", render_value(value)});
                return;
            }
            const CompiledSpec& items = registry.get(spec.items_spec);
            for (size_t i = 0; i < value.size(); ++i)
                validate_into(registry, items, value[i], path + "[" + std::to_string(i) + "]",
                              options, out);
            return;
        }
        case SpecKind::Object: {
            if (!value.is_object()) {
                out.push_back({path, "object", render_value(value)});
                return;
            }
            for (const auto& req : spec.required) {
                if (!value.contains(req))
                    out.push_back({join_path(path, req), "required property present", "missing"});
            }
            for (const auto& [prop, sub_name] : spec.object_properties) {
                if (!value.contains(prop)) continue;
                validate_into(registry, registry.get(sub_name), value[prop],
                              join_path(path, prop), options, out);
            }
            if (!options.allow_extra_keys) {
                std::set<std::string> declared;
                for (const auto& [prop, _] : spec.object_properties) declared.insert(prop);
                for (auto it = value.begin(); it != value.end(); ++it) {
                    if (!declared.count(it.key()))
                        out.push_back({join_path(path, it.key()), "no undeclared properties",
                                       render_value(it.value())});
                }
            }
            return;
        }
        case SpecKind::Primitive:
            break;
    }

    switch (spec.type) {
        case JsonType::String: {
            if (!value.is_string()) {
                out.push_back({path, "string", render_value(value)});
                return;
            }
            const std::string& s = value.get_ref<const std::string&>();
            if (spec.format == "uuid" && !is_uuid_string(s)) {
                out.push_back({path, "string matching the uuid pattern", render_value(value)});
                return;
            }
            if (spec.format == "date-time" && !is_date_time_string(s)) {
                out.push_back({path, "RFC 3339 date-time string", render_value(value)});
                return;
            }
            if (spec.pattern) {
                try {
                    std::regex re(*spec.pattern, std::regex::ECMAScript);
                    if (!std::regex_search(s, re)) {
                        out.push_back({path, "string matching /" + *spec.pattern + "/",
                                       render_value(value)});
                    }
                } catch (const std::regex_error&) {
                    out.push_back({path, "pattern /" + *spec.pattern + "/ is not supported",
                                   render_value(value)});
                }
            }
            return;
        }
        case JsonType::Integer: {
            if (!is_integral_number(value)) {
                out.push_back({path, "integer", render_value(value)});
                return;
            }
            double d = value.get<double>();
            if (spec.minimum && d < *spec.minimum)
                out.push_back({path, "integer >= " + std::to_string(*spec.minimum),
                               render_value(value)});
            if (spec.maximum && d > *spec.maximum)
                out.push_back({path, "integer <= " + std::to_string(*spec.maximum),
                               render_value(value)});
            return;
        }
        case JsonType::Number: {
            if (!value.is_number()) {
                out.push_back({path, "number", render_value(value)});
                return;
            }
            double d = value.get<double>();
            if (spec.minimum && d < *spec.minimum)
                out.push_back({path, "number >= " + std::to_string(*spec.minimum),
                               render_value(value)});
            if (spec.maximum && d > *spec.maximum)
                out.push_back({path, "number <= " + std::to_string(*spec.maximum),
                               render_value(value)});
            return;
        }
        case JsonType::Boolean:
            if (!value.is_boolean()) out.push_back({path, "boolean", render_value(value)});
            return;
    }
}

}  // namespace

ValidationResult validate(const SpecRegistry& registry, const SpecRef& spec, const Json& value,
                          const ValidationOptions& options) {
    ValidationResult result;
    validate_into(registry, registry.get(spec.name), value, "$", options, result.violations);
    result.conforms = result.violations.empty();
    return result;
}

const OperationSpecs& ApiSpecs::for_operation(const OperationSpec& op) const {
    auto it = by_operation.find(op.key());
    if (it == by_operation.end()) throw UnknownSpecError("operation not compiled: " + op.key());
    return it->second;
}

ApiSpecs compile_api(const ApiDescription& api, SpecRegistry& registry) {
    definitions_to_specs("definitions", api.definitions, registry);
    ApiSpecs specs;
    for (const auto& op : list_operations(api)) {
        OperationSpecs os;
        std::string lverb = op.verb;
        std::transform(lverb.begin(), lverb.end(), lverb.begin(), ::tolower);
        std::string ns = "op." + lverb + "." + op.path_template;
        for (const auto& param : op.parameters) {
            os.parameter_specs.emplace(
                param.name, compile_schema(ns, to_string(param.location) + "." + param.name,
                                           param.schema, api.definitions, registry));
        }
        for (const auto& [key, resp] : op.responses) {
            if (resp.schema) {
                os.response_specs.emplace(
                    key, compile_schema(ns, "response." + key, *resp.schema, api.definitions,
                                        registry));
            } else {
                os.response_specs.emplace(key, std::nullopt);
            }
        }
        specs.by_operation.emplace(op.key(), std::move(os));
    }
    return specs;
}

}  // namespace quickrest
