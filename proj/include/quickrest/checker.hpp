// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quickrest/gen_core.hpp"
#include "quickrest/request_exec.hpp"
#include "quickrest/spec_engine.hpp"

namespace quickrest {

enum class Property { Non500, BodyConforms, StatusDocumented };

std::string to_string(Property p);
std::optional<Property> property_from_string(const std::string& name);

enum class PropertyStatus { Pass, Fail, Skip };

struct PropertyVerdict {
    Property property;
    PropertyStatus status = PropertyStatus::Pass;
    std::string detail;
    std::vector<Violation> violations;  // BodyConforms failures
};

struct RunPlan {
    uint32_t tests_per_iteration = 10;
    uint32_t iterations = 30;
    uint32_t tier_growth = 10;
    uint32_t tiers = 1;
    uint64_t seed = 0;
    std::set<Property> enabled_properties{Property::Non500, Property::BodyConforms,
                                          Property::StatusDocumented};
    enum class ParamStrategy { AllParams, PerParamFirst };
    ParamStrategy param_strategy = ParamStrategy::AllParams;
    uint32_t shrink_budget = 1000;
    uint32_t max_consecutive_transport_errors = 10;
    bool keep_going = false;
    uint32_t workers = 1;

    void validate() const;  // throws ConfigError on zero counts
    uint64_t total_tests() const;
};

struct FailInfo {
    Property failed_property = Property::Non500;
    std::string detail;
    std::vector<Violation> violations;
    Json original_input;  // parameter assignment as a JSON object
    Json shrunk_input;
    size_t shrink_steps = 0;
    bool shrink_budget_exhausted = false;
    bool reproduced = false;  // the failure re-occurred during shrinking
    uint64_t test_index = 0;
    std::string repro_command;
};

struct CheckOutcome {
    OperationRef op;
    enum class Verdict { Pass, Fail, Aborted };
    Verdict verdict = Verdict::Pass;
    std::optional<FailInfo> fail;
    size_t transport_errors = 0;
    size_t tests_executed = 0;
    size_t shrink_executions = 0;
    size_t skipped_mutations = 0;
    std::vector<CallRecord> records;
};

std::string to_string(CheckOutcome::Verdict v);

/// Context carried into checks so repro commands can name the exact
/// invocation.
struct RunContext {
    std::string spec_source;
    std::string base_url;
};

/// Evaluate the enabled properties against one completed HTTP exchange.
/// Requires record.status (transport errors are tallied by the caller, not
/// evaluated). 4xx responses are never failures by themselves.
std::vector<PropertyVerdict> evaluate_properties(const OperationSpec& op,
                                                 const CallRecord& record,
                                                 const SpecRegistry& registry,
                                                 const OperationSpecs& op_specs,
                                                 const std::set<Property>& enabled,
                                                 const ValidationOptions& options = {});

/// Run the property-based campaign for one operation: generate, mutate,
/// execute, evaluate; on the first failing property, shrink against live
/// re-execution and stop (unless plan.keep_going).
CheckOutcome check_operation(const OperationSpec& op, const GeneratorConfig& cfg,
                             const RunPlan& plan, const SpecRegistry& registry,
                             const OperationSpecs& op_specs, HttpClient& client,
                             const RunContext& ctx = {},
                             const ValidationOptions& options = {});

struct CheckAllResult {
    std::vector<CheckOutcome> outcomes;  // deterministic operation order
};

/// Check every operation of the document (optionally filtered), in
/// list_operations order, with plan.workers parallel workers.
CheckAllResult check_all(const ApiDescription& api, const GeneratorConfig& cfg,
                         const RunPlan& plan, const SpecRegistry& registry,
                         const ApiSpecs& api_specs,
                         const std::function<HttpClient()>& client_factory,
                         const RunContext& ctx = {}, const ValidationOptions& options = {},
                         const std::function<bool(const OperationSpec&)>& filter = {});

/// "VERB /path" glob with '*' wildcards, for --endpoint filters.
bool endpoint_glob_match(const std::string& pattern, const std::string& op_key);

}  // namespace quickrest
