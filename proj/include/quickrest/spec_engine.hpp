// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quickrest/oas_model.hpp"

namespace quickrest {

enum class SpecKind { Primitive, Enum, Array, Object, Alias };

/// Name of a compiled spec in a registry, e.g. "definitions/ObjectInfo" or
/// "definitions.ObjectInfo/name".
struct SpecRef {
    std::string name;
    SpecKind kind = SpecKind::Primitive;

    bool operator==(const SpecRef& other) const { return name == other.name; }
    bool operator<(const SpecRef& other) const { return name < other.name; }
};

struct Violation {
    std::string json_path;  // "$", "$.name", "$[3].id"
    std::string expected;
    std::string actual;

    bool operator==(const Violation&) const = default;
};

struct ValidationResult {
    bool conforms = true;
    std::vector<Violation> violations;
};

struct ValidationOptions {
    bool allow_extra_keys = true;  // undocumented object keys are not violations by default
};

/// A schema compiled into one registry slot: validator parameters plus links
/// to sub-specs. Arrays point at their item spec, objects at one spec per
/// property, aliases at another spec.
struct CompiledSpec {
    std::string name;
    SpecKind kind = SpecKind::Primitive;
    DataSchema source;  // schema this spec was registered from (identity for collisions)

    // Primitive / Enum
    JsonType type = JsonType::String;
    std::optional<std::string> format;  // only supported formats survive compilation
    std::optional<double> minimum;
    std::optional<double> maximum;
    std::optional<std::string> pattern;
    std::vector<Json> enum_values;

    // Array
    std::string items_spec;

    // Object
    std::vector<std::pair<std::string, std::string>> object_properties;  // prop -> spec name
    std::vector<std::string> required;

    // Alias
    std::string target_spec;
};

class SpecRegistry {
  public:
    /// Idempotent for identical source schemas; differing schemas under the
    /// same name throw CollisionError.
    SpecRef register_spec(CompiledSpec spec);

    bool contains(const std::string& name) const { return specs_.count(name) != 0; }
    const CompiledSpec& get(const std::string& name) const;  // throws UnknownSpecError
    std::vector<std::string> names() const;
    size_t size() const { return specs_.size(); }

    void add_warning(std::string message) { warnings_.push_back(std::move(message)); }
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    std::map<std::string, CompiledSpec> specs_;
    std::vector<std::string> warnings_;
};

/// Predefined spec for a (type, format) pair, registered on first use under
/// "primitives/<type>[-<format>]". Unsupported base types throw
/// UnsupportedTypeError; unknown formats fall back to the bare type with a
/// registry warning.
SpecRef primitive_spec(SpecRegistry& registry, const std::string& type,
                       const std::optional<std::string>& format = std::nullopt);

/// Compile every definition into specs. Object definitions produce one spec
/// per property plus an object spec; array definitions produce an
/// "array/<Name>-items-..." spec. Returns the created refs in creation order.
std::vector<SpecRef> definitions_to_specs(const std::string& ns,
                                          const std::map<std::string, DataSchema>& definitions,
                                          SpecRegistry& registry);

/// Compile an inline (parameter/response) schema under the given namespace,
/// reusing definition specs for references and "array/<Name>" for arrays of
/// references.
SpecRef compile_schema(const std::string& ns, const std::string& name, const DataSchema& schema,
                       const std::map<std::string, DataSchema>& definitions,
                       SpecRegistry& registry);

ValidationResult validate(const SpecRegistry& registry, const SpecRef& spec, const Json& value,
                          const ValidationOptions& options = {});

/// Specs attached to one operation: parameter specs by parameter name and
/// response specs by status key (empty optional = response documented without
/// a schema).
struct OperationSpecs {
    std::map<std::string, SpecRef> parameter_specs;
    std::map<std::string, std::optional<SpecRef>> response_specs;
};

struct ApiSpecs {
    std::map<std::string, OperationSpecs> by_operation;  // key: "GET /objects"

    const OperationSpecs& for_operation(const OperationSpec& op) const;
};

/// Compile the whole document: definitions first, then parameter and response
/// schemas for every operation.
ApiSpecs compile_api(const ApiDescription& api, SpecRegistry& registry);

bool is_uuid_string(const std::string& value);
bool is_date_time_string(const std::string& value);

}  // namespace quickrest
