// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quickrest/checker.hpp"

namespace quickrest {

struct PoolDraw {
    Json value;
    size_t entry_index;
};

/// In-memory store of objects harvested from response bodies. Harvesting
/// recurses into arrays and nested objects; every scalar attribute is indexed
/// by name for stateful input selection.
class ResponsePool {
  public:
    void record_response(const Json& body);

    /// Uniformly random indexed value for the attribute, or nullopt when the
    /// pool has none — the caller falls back to random generation.
    std::optional<PoolDraw> draw(const std::string& attribute, Rng& rng) const;

    void clear();
    size_t entry_count() const { return entries_.size(); }
    const std::vector<Json>& entries() const { return entries_; }
    std::vector<Json> indexed_values(const std::string& attribute) const;

  private:
    void harvest(const Json& node);

    std::vector<Json> entries_;
    std::map<std::string, std::vector<std::pair<size_t, Json>>> index_;
};

struct Provenance {
    enum class Kind { Random, Pool };
    Kind kind = Kind::Random;
    size_t pool_entry = 0;  // meaningful when kind == Pool

    bool operator==(const Provenance&) const = default;
};

struct CallStep {
    OperationRef op;
    ParamAssignment assignment;                    // resolved values after execution
    std::map<std::string, Provenance> provenance;  // per parameter
};

struct StepOutcome {
    CallStep step;
    CallRecord record;
    std::vector<PropertyVerdict> verdicts;
};

struct SequenceOutcome {
    uint64_t sequence_index = 0;
    std::vector<StepOutcome> steps;
    CheckOutcome::Verdict verdict = CheckOutcome::Verdict::Pass;
    std::optional<FailInfo> fail;
    std::vector<CallStep> shrunk_sequence;  // set on failure
    bool shrink_best_effort = false;        // no reset hook was configured
    size_t shrink_executions = 0;           // candidate sequence replays
    std::vector<CallRecord> replay_records;
    size_t transport_errors = 0;
};

struct ResetHook {
    std::string verb = "POST";
    std::string url;
};

struct StatefulOptions {
    uint32_t length_min = 1;
    uint32_t length_max = 5;
    uint32_t sequences = 100;
    std::set<std::string> identity_attributes{"id"};
    std::map<std::string, std::string> identity_map;  // parameter name -> pool attribute
    std::optional<ResetHook> reset_hook;
    uint32_t step_size = 10;  // generation size for random step inputs

    void validate() const;
};

/// Random operation choices for one sequence; assignments are resolved at
/// execution time so later steps can draw from earlier responses.
std::vector<CallStep> gen_sequence(const std::vector<OperationSpec>& ops,
                                   std::pair<uint32_t, uint32_t> length_range, Rng& rng);

struct StatefulRunResult {
    std::vector<SequenceOutcome> outcomes;
};

/// Execute randomized call sequences against ops from the document. Stops at
/// the first failing sequence (after shrinking it), mirroring the stateless
/// checker. Always single-worker: the pool is confined to one run.
StatefulRunResult run_stateful(const ApiDescription& api, const GeneratorConfig& cfg,
                               const RunPlan& plan, const StatefulOptions& options,
                               const SpecRegistry& registry, const ApiSpecs& api_specs,
                               HttpClient& client, const RunContext& ctx = {},
                               const ValidationOptions& validation = {},
                               const std::function<bool(const OperationSpec&)>& filter = {});

Json sequence_to_json(const std::vector<CallStep>& steps);

}  // namespace quickrest
