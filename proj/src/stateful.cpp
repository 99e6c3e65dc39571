// SPDX-License-Identifier: Apache-2.0
#include "quickrest/stateful.hpp"

#include <algorithm>

namespace quickrest {

void ResponsePool::record_response(const Json& body) { harvest(body); }

void ResponsePool::harvest(const Json& node) {
    if (node.is_array()) {
        for (const auto& element : node) harvest(element);
        return;
    }
    if (!node.is_object()) return;  // bare scalars carry nothing to store

    size_t entry_index = entries_.size();
    entries_.push_back(node);
    for (auto it = node.begin(); it != node.end(); ++it) {
        const Json& value = it.value();
        if (value.is_string() || value.is_number() || value.is_boolean()) {
            index_[it.key()].emplace_back(entry_index, value);
        } else if (value.is_object() || value.is_array()) {
            harvest(value);
        }
    }
}

std::optional<PoolDraw> ResponsePool::draw(const std::string& attribute, Rng& rng) const {
    auto it = index_.find(attribute);
    if (it == index_.end() || it->second.empty()) return std::nullopt;
    const auto& [entry_index, value] = it->second[rng.below(it->second.size())];
    return PoolDraw{value, entry_index};
}

void ResponsePool::clear() {
    entries_.clear();
    index_.clear();
}

std::vector<Json> ResponsePool::indexed_values(const std::string& attribute) const {
    std::vector<Json> out;
    auto it = index_.find(attribute);
    if (it == index_.end()) return out;
    for (const auto& [_, value] : it->second) out.push_back(value);
    return out;
}

void StatefulOptions::validate() const {
    if (length_min < 1) throw ConfigError("sequence length minimum must be >= 1");
    if (length_max < length_min) throw ConfigError("sequence length range is inverted");
    if (sequences < 1) throw ConfigError("sequence count must be >= 1");
}

std::vector<CallStep> gen_sequence(const std::vector<OperationSpec>& ops,
                                   std::pair<uint32_t, uint32_t> length_range, Rng& rng) {
    uint32_t length = static_cast<uint32_t>(
        rng.in_range(length_range.first, length_range.second));
    std::vector<CallStep> steps;
    steps.reserve(length);
    for (uint32_t i = 0; i < length; ++i) {
        const OperationSpec& op = ops[rng.below(ops.size())];
        CallStep step;
        step.op = {op.path_template, op.verb};
        steps.push_back(std::move(step));
    }
    return steps;
}

Json sequence_to_json(const std::vector<CallStep>& steps) {
    Json out = Json::array();
    for (const auto& step : steps) {
        Json values = Json::object();
        for (const auto& [name, value] : step.assignment.values) values[name] = value;
        Json provenance = Json::object();
        for (const auto& [name, p] : step.provenance)
            provenance[name] = p.kind == Provenance::Kind::Pool ? "pool" : "random";
        out.push_back(Json{{"op", step.op.key()}, {"values", values}, {"provenance", provenance}});
    }
    return out;
}

namespace {

constexpr uint64_t kSequenceStream = 0x5e9'5e9'5e9ull;

struct StatefulRunner {
    const std::vector<OperationSpec>& ops;
    const GeneratorConfig& cfg;
    const RunPlan& plan;
    const StatefulOptions& options;
    const SpecRegistry& registry;
    const ApiSpecs& api_specs;
    HttpClient& client;
    const ValidationOptions& validation;

    ResponsePool pool;
    uint64_t replay_counter = 0;

    const OperationSpec& find_op(const OperationRef& ref) const {
        for (const auto& op : ops)
            if (op.path_template == ref.path_template && op.verb == ref.verb) return op;
        throw Error("sequence step references an unknown operation: " + ref.key());
    }

    std::string pool_attribute_for(const ParameterSpec& param) const {
        auto mapped = options.identity_map.find(param.name);
        if (mapped != options.identity_map.end()) return mapped->second;
        if (options.identity_attributes.count(param.name)) return param.name;
        return {};
    }

    void fire_reset_hook() {
        if (!options.reset_hook) return;
        BaseUrl base = BaseUrl::parse(options.reset_hook->url);
        RequestPlan reset_plan;
        reset_plan.verb = options.reset_hook->verb;
        reset_plan.path_and_query = base.base_path.empty() ? "/" : base.base_path;
        reset_plan.url = base.origin() + reset_plan.path_and_query;
        HttpClient hook_client(base, client.config());
        hook_client.execute(reset_plan);
    }

    void reset_target_state() {
        fire_reset_hook();
        pool.clear();
    }

    /// Resolve one step: pool-eligible parameters draw from the live pool,
    /// everything else reuses the recorded value (replays) or generates fresh.
    void resolve_step(const OperationSpec& op, CallStep& step, Rng& rng, bool replay) {
        ParamAssignment resolved;
        std::map<std::string, Provenance> provenance;
        for (const auto& param : op.parameters) {
            std::string attr = pool_attribute_for(param);
            if (!attr.empty()) {
                if (auto draw = pool.draw(attr, rng)) {
                    resolved.values[param.name] = draw->value;
                    provenance[param.name] = {Provenance::Kind::Pool, draw->entry_index};
                    continue;
                }
            }
            if (replay) {
                auto it = step.assignment.values.find(param.name);
                if (it != step.assignment.values.end()) {
                    resolved.values[param.name] = it->second;
                    provenance[param.name] = {Provenance::Kind::Random, 0};
                }
                continue;
            }
            if (!param.required && !rng.bernoulli(0.5)) continue;
            resolved.values[param.name] =
                gen_value(registry, api_specs.for_operation(op).parameter_specs.at(param.name),
                          cfg, rng, Size{options.step_size});
            provenance[param.name] = {Provenance::Kind::Random, 0};
        }
        step.assignment = std::move(resolved);
        step.provenance = std::move(provenance);
    }

    struct ExecutedStep {
        CallStep step;
        CallRecord record;
        std::vector<PropertyVerdict> verdicts;
        std::optional<Property> failed;
    };

    ExecutedStep execute_step(CallStep step, uint64_t seq_index, size_t step_index, bool replay) {
        const OperationSpec& op = find_op(step.op);
        Rng rng = Rng::derive(plan.seed, {kSequenceStream, seq_index, step_index, replay_counter});
        resolve_step(op, step, rng, replay);

        ExecutedStep out;
        RequestPlan request;
        try {
            request = build_request(op, step.assignment, client.base());
        } catch (const MissingPathParameterError&) {
            out.step = std::move(step);
            CallRecord record;
            record.op = out.step.op;
            record.transport_error = "request not sent: missing path parameter";
            out.record = std::move(record);
            return out;
        }
        CallRecord record = client.execute(request);
        record.op = step.op;
        record.seed = plan.seed;
        record.test_index = seq_index;

        if (!record.transport_error) {
            out.verdicts = evaluate_properties(op, record, registry, api_specs.for_operation(op),
                                               plan.enabled_properties, validation);
            for (const auto& v : out.verdicts) {
                if (v.status == PropertyStatus::Fail) {
                    out.failed = v.property;
                    break;
                }
            }
            if (record.status && *record.status >= 200 && *record.status < 300 &&
                record.response_json) {
                pool.record_response(*record.response_json);
            }
        }
        out.step = std::move(step);
        out.record = std::move(record);
        return out;
    }

    /// Replay a whole candidate sequence from reset state. Fails when any
    /// step fails the given property.
    bool replay_fails(std::vector<CallStep> steps, uint64_t seq_index, Property property,
                      std::vector<CallRecord>& sink) {
        ++replay_counter;
        reset_target_state();
        for (size_t i = 0; i < steps.size(); ++i) {
            ExecutedStep executed = execute_step(steps[i], seq_index, i, true);
            sink.push_back(executed.record);
            if (executed.failed && *executed.failed == property) return true;
        }
        return false;
    }
};

}  // namespace

StatefulRunResult run_stateful(const ApiDescription& api, const GeneratorConfig& cfg,
                               const RunPlan& plan, const StatefulOptions& options,
                               const SpecRegistry& registry, const ApiSpecs& api_specs,
                               HttpClient& client, const RunContext& ctx,
                               const ValidationOptions& validation,
                               const std::function<bool(const OperationSpec&)>& filter) {
    plan.validate();
    cfg.validate();
    options.validate();

    std::vector<OperationSpec> ops;
    for (auto& op : list_operations(api))
        if (!filter || filter(op)) ops.push_back(std::move(op));
    if (ops.empty()) return {};

    StatefulRunner runner{ops, cfg, plan, options, registry, api_specs, client, validation, {}, 0};
    StatefulRunResult result;

    for (uint64_t seq_index = 0; seq_index < options.sequences; ++seq_index) {
        runner.reset_target_state();
        Rng seq_rng = Rng::derive(plan.seed, {kSequenceStream, seq_index});
        std::vector<CallStep> steps =
            gen_sequence(ops, {options.length_min, options.length_max}, seq_rng);

        SequenceOutcome outcome;
        outcome.sequence_index = seq_index;
        std::optional<Property> failed;
        size_t failed_step = 0;
        for (size_t i = 0; i < steps.size(); ++i) {
            StatefulRunner::ExecutedStep executed =
                runner.execute_step(std::move(steps[i]), seq_index, i, false);
            steps[i] = executed.step;
            if (executed.record.transport_error) ++outcome.transport_errors;
            outcome.steps.push_back({executed.step, std::move(executed.record),
                                     std::move(executed.verdicts)});
            if (executed.failed) {
                failed = executed.failed;
                failed_step = i;
                break;
            }
        }

        if (!failed) {
            outcome.verdict = CheckOutcome::Verdict::Pass;
            result.outcomes.push_back(std::move(outcome));
            continue;
        }

        // First failing sequence: shrink it (steps that already ran form the
        // failing prefix) and stop the run.
        std::vector<CallStep> failing(steps.begin(),
                                      steps.begin() + static_cast<ptrdiff_t>(failed_step) + 1);

        FailInfo info;
        info.failed_property = *failed;
        for (const auto& v : outcome.steps.back().verdicts) {
            if (v.status == PropertyStatus::Fail) {
                info.detail = v.detail;
                info.violations = v.violations;
                break;
            }
        }
        info.original_input = sequence_to_json(failing);
        info.test_index = seq_index;

        size_t budget = plan.shrink_budget;
        size_t executions = 0;
        bool exhausted = false;
        auto still_fails = [&](const std::vector<CallStep>& candidate) -> bool {
            if (executions >= budget) {
                exhausted = true;
                return false;
            }
            ++executions;
            return runner.replay_fails(candidate, seq_index, *failed, outcome.replay_records);
        };

        info.reproduced = still_fails(failing);
        std::vector<CallStep> current = failing;
        bool improved = true;
        while (improved && !exhausted) {
            improved = false;
            // Subsequence removal first: drop one step at a time.
            for (size_t i = 0; i < current.size() && current.size() > 1; ++i) {
                std::vector<CallStep> candidate = current;
                candidate.erase(candidate.begin() + static_cast<ptrdiff_t>(i));
                if (still_fails(candidate)) {
                    current = std::move(candidate);
                    ++info.shrink_steps;
                    improved = true;
                    break;
                }
                if (exhausted) break;
            }
            if (improved || exhausted) continue;
            // Then per-step value shrinking of random-provenance inputs.
            for (size_t i = 0; i < current.size() && !improved && !exhausted; ++i) {
                const OperationSpec& op = runner.find_op(current[i].op);
                for (const auto& param : op.parameters) {
                    auto prov = current[i].provenance.find(param.name);
                    if (prov == current[i].provenance.end() ||
                        prov->second.kind != Provenance::Kind::Random)
                        continue;
                    auto value_it = current[i].assignment.values.find(param.name);
                    if (value_it == current[i].assignment.values.end()) continue;
                    ShrinkGuide guide = ShrinkGuide::from_spec(
                        registry, api_specs.for_operation(op).parameter_specs.at(param.name));
                    for (Json& cand : shrink_candidates(guide, value_it->second)) {
                        std::vector<CallStep> candidate = current;
                        candidate[i].assignment.values[param.name] = std::move(cand);
                        if (still_fails(candidate)) {
                            current = std::move(candidate);
                            ++info.shrink_steps;
                            improved = true;
                            break;
                        }
                        if (exhausted) break;
                    }
                    if (improved || exhausted) break;
                }
            }
        }

        info.shrunk_input = sequence_to_json(current);
        info.shrink_budget_exhausted = exhausted;
        info.repro_command = "quickrest --mode stateful" +
                             (ctx.spec_source.empty() ? std::string{}
                                                      : " --spec " + ctx.spec_source) +
                             (ctx.base_url.empty() ? std::string{}
                                                   : " --base-url " + ctx.base_url) +
                             " --seed " + std::to_string(plan.seed) + " --sequences " +
                             std::to_string(options.sequences) + " --seq-min " +
                             std::to_string(options.length_min) + " --seq-max " +
                             std::to_string(options.length_max);

        outcome.verdict = CheckOutcome::Verdict::Fail;
        outcome.shrunk_sequence = std::move(current);
        outcome.shrink_executions = executions;
        outcome.shrink_best_effort = !options.reset_hook.has_value();
        outcome.fail = std::move(info);
        result.outcomes.push_back(std::move(outcome));
        return result;
    }

    return result;
}

}  // namespace quickrest
