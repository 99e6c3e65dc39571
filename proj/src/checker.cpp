// SPDX-License-Identifier: Apache-2.0
#include "quickrest/checker.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

namespace quickrest {

std::string to_string(Property p) {
    switch (p) {
        case Property::Non500: return "non500";
        case Property::BodyConforms: return "body-conforms";
        case Property::StatusDocumented: return "status-documented";
    }
    return "unknown";
}

std::optional<Property> property_from_string(const std::string& name) {
    if (name == "non500") return Property::Non500;
    if (name == "body-conforms" || name == "body") return Property::BodyConforms;
    if (name == "status-documented" || name == "status") return Property::StatusDocumented;
    return std::nullopt;
}

std::string to_string(CheckOutcome::Verdict v) {
    switch (v) {
        case CheckOutcome::Verdict::Pass: return "pass";
        case CheckOutcome::Verdict::Fail: return "fail";
        case CheckOutcome::Verdict::Aborted: return "aborted";
    }
    return "unknown";
}

void RunPlan::validate() const {
    if (tests_per_iteration < 1) throw ConfigError("tests-per-iteration must be >= 1");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (tier_growth < 1) throw ConfigError("tier-growth must be >= 1");
    if (tiers < 1) throw ConfigError("tiers must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

uint64_t RunPlan::total_tests() const {
    uint64_t total = 0;
    uint64_t per_iteration = tests_per_iteration;
    for (uint32_t t = 0; t < tiers; ++t) {
        total += per_iteration * iterations;
        per_iteration *= tier_growth;
    }
    return total;
}

std::vector<PropertyVerdict> evaluate_properties(const OperationSpec& op,
                                                 const CallRecord& record,
                                                 const SpecRegistry& registry,
                                                 const OperationSpecs& op_specs,
                                                 const std::set<Property>& enabled,
                                                 const ValidationOptions& options) {
    std::vector<PropertyVerdict> out;
    int status = record.status.value();
    std::string status_key = std::to_string(status);
    bool exact_documented = op.responses.count(status_key) != 0;
    bool default_documented = op.responses.count("default") != 0;

    if (enabled.count(Property::Non500)) {
        PropertyVerdict v;
        v.property = Property::Non500;
        if (status >= 500 && status <= 599) {
            v.status = PropertyStatus::Fail;
            v.detail = "status " + status_key;
        }
        out.push_back(std::move(v));
    }

    if (enabled.count(Property::BodyConforms)) {
        PropertyVerdict v;
        v.property = Property::BodyConforms;
        const std::optional<SpecRef>* response_spec = nullptr;
        if (exact_documented) {
            auto it = op_specs.response_specs.find(status_key);
            if (it != op_specs.response_specs.end()) response_spec = &it->second;
        } else if (default_documented) {
            auto it = op_specs.response_specs.find("default");
            if (it != op_specs.response_specs.end()) response_spec = &it->second;
        }
        if (response_spec == nullptr) {
            v.status = PropertyStatus::Skip;  // status itself is undocumented
            v.detail = "status " + status_key + " undocumented";
        } else if (!response_spec->has_value()) {
            if (record.response_json) {
                v.status = PropertyStatus::Pass;  // nothing to validate against
            } else {
                v.status = PropertyStatus::Skip;
                v.detail = "no schema documented and body is not JSON";
            }
        } else if (!record.response_json) {
            v.status = PropertyStatus::Fail;
            v.detail = "schema documented for status " + status_key + " but body is not JSON";
        } else {
            ValidationResult result =
                validate(registry, **response_spec, *record.response_json, options);
            if (!result.conforms) {
                v.status = PropertyStatus::Fail;
                v.detail = "body does not conform to the schema for status " + status_key;
                v.violations = std::move(result.violations);
            }
        }
        out.push_back(std::move(v));
    }

    if (enabled.count(Property::StatusDocumented)) {
        PropertyVerdict v;
        v.property = Property::StatusDocumented;
        if (!exact_documented && !default_documented) {
            v.status = PropertyStatus::Fail;
            v.detail = "status " + status_key + " is not documented";
        }
        out.push_back(std::move(v));
    }

    return out;
}

namespace {

ParamAssignment generate_assignment(const OperationSpec& op, const SpecRegistry& registry,
                                    const OperationSpecs& op_specs, const GeneratorConfig& cfg,
                                    Rng& rng, Size size,
                                    const std::optional<std::string>& focus_param,
                                    const std::set<std::string>& excluded) {
    ParamAssignment assignment;
    for (const auto& param : op.parameters) {
        const SpecRef& spec = op_specs.parameter_specs.at(param.name);
        bool held_fixed = excluded.count(param.name) != 0 ||
                          (focus_param && *focus_param != param.name);
        if (held_fixed) {
            if (param.required) assignment.values[param.name] = minimal_value(registry, spec);
            continue;
        }
        if (!param.required && !rng.bernoulli(0.5)) continue;
        assignment.values[param.name] = gen_value(registry, spec, cfg, rng, size);
    }
    return assignment;
}

Json assignment_to_json(const ParamAssignment& assignment) {
    Json out = Json::object();
    for (const auto& [name, value] : assignment.values) out[name] = value;
    return out;
}

ParamAssignment assignment_from_json(const Json& j) {
    ParamAssignment out;
    for (auto it = j.begin(); it != j.end(); ++it) out.values[it.key()] = it.value();
    return out;
}

ShrinkGuide assignment_guide(const OperationSpec& op, const SpecRegistry& registry,
                             const OperationSpecs& op_specs) {
    ShrinkGuide guide;
    for (const auto& param : op.parameters) {
        if (param.required) guide.required.push_back(param.name);
        guide.properties.emplace(param.name,
                                 ShrinkGuide::from_spec(registry,
                                                        op_specs.parameter_specs.at(param.name)));
    }
    return guide;
}

std::string render_repro_command(const RunContext& ctx, const OperationSpec& op,
                                 const GeneratorConfig& cfg, const RunPlan& plan) {
    std::ostringstream cmd;
    cmd << "quickrest --spec " << (ctx.spec_source.empty() ? "<document>" : ctx.spec_source);
    if (!ctx.base_url.empty()) cmd << " --base-url " << ctx.base_url;
    cmd << " --endpoint \"" << op.key() << "\"";
    cmd << " --seed " << plan.seed << " --tests " << plan.tests_per_iteration << " --iterations "
        << plan.iterations;
    if (plan.tiers != 1) cmd << " --tiers " << plan.tiers << " --tier-growth " << plan.tier_growth;
    cmd << " --string-mix " << cfg.string_mix << " --charset-max " << cfg.charset_max
        << " --int-mode " << cfg.int_mode;
    if (cfg.omit_required_prob != 0)
        cmd << " --omit-required-prob " << cfg.omit_required_prob;
    if (cfg.out_of_range_prob != 0)
        cmd << " --out-of-range-prob " << cfg.out_of_range_prob;
    cmd << " --max-size " << cfg.max_size;
    if (plan.param_strategy == RunPlan::ParamStrategy::PerParamFirst)
        cmd << " --param-strategy per-param-first";
    if (plan.keep_going) cmd << " --keep-going";
    return cmd.str();
}

}  // namespace

CheckOutcome check_operation(const OperationSpec& op, const GeneratorConfig& cfg,
                             const RunPlan& plan, const SpecRegistry& registry,
                             const OperationSpecs& op_specs, HttpClient& client,
                             const RunContext& ctx, const ValidationOptions& options) {
    plan.validate();
    cfg.validate();

    CheckOutcome outcome;
    outcome.op = {op.path_template, op.verb};

    struct Campaign {
        std::optional<std::string> focus_param;
        uint64_t count;
    };
    std::vector<Campaign> campaigns;
    uint64_t total = plan.total_tests();
    if (plan.param_strategy == RunPlan::ParamStrategy::PerParamFirst &&
        op.parameters.size() > 1) {
        uint64_t share = total / (op.parameters.size() + 1);
        uint64_t used = 0;
        for (const auto& param : op.parameters) {
            campaigns.push_back({param.name, share});
            used += share;
        }
        campaigns.push_back({std::nullopt, total - used});
    } else {
        campaigns.push_back({std::nullopt, total});
    }

    uint64_t op_stream = Rng::hash_string(op.key());
    uint64_t global_index = 0;
    uint32_t consecutive_transport = 0;
    std::set<std::string> excluded;

    for (const auto& campaign : campaigns) {
        for (uint64_t i = 0; i < campaign.count; ++i, ++global_index) {
            Size size = size_schedule(global_index, plan, cfg.max_size);
            Rng rng = Rng::derive(plan.seed, {op_stream, global_index});
            ParamAssignment assignment = generate_assignment(op, registry, op_specs, cfg, rng,
                                                             size, campaign.focus_param, excluded);
            assignment = mutate_assignment(op.parameters, std::move(assignment), cfg, rng);

            RequestPlan request;
            try {
                request = build_request(op, assignment, client.base());
            } catch (const MissingPathParameterError&) {
                ++outcome.skipped_mutations;
                continue;
            }

            CallRecord record = client.execute(request);
            record.op = outcome.op;
            record.mutations = assignment.mutations;
            record.seed = plan.seed;
            record.test_index = global_index;
            ++outcome.tests_executed;

            if (record.transport_error) {
                ++outcome.transport_errors;
                outcome.records.push_back(std::move(record));
                if (++consecutive_transport >= plan.max_consecutive_transport_errors) {
                    outcome.verdict = CheckOutcome::Verdict::Aborted;
                    return outcome;
                }
                continue;
            }
            consecutive_transport = 0;

            std::vector<PropertyVerdict> verdicts = evaluate_properties(
                op, record, registry, op_specs, plan.enabled_properties, options);
            outcome.records.push_back(std::move(record));

            const PropertyVerdict* failed = nullptr;
            for (const auto& v : verdicts) {
                if (v.status == PropertyStatus::Fail) {
                    failed = &v;
                    break;
                }
            }
            if (!failed) continue;

            // First failure: shrink against live re-execution, then stop the
            // operation (or exclude the offending parameters with keep_going).
            if (!outcome.fail) {
                FailInfo info;
                info.failed_property = failed->property;
                info.detail = failed->detail;
                info.violations = failed->violations;
                info.original_input = assignment_to_json(assignment);
                info.test_index = global_index;
                info.repro_command = render_repro_command(ctx, op, cfg, plan);

                auto still_fails = [&](const Json& candidate) -> bool {
                    ParamAssignment cand = assignment_from_json(candidate);
                    RequestPlan cand_request;
                    try {
                        cand_request = build_request(op, cand, client.base());
                    } catch (const MissingPathParameterError&) {
                        return false;
                    }
                    CallRecord cand_record = client.execute(cand_request);
                    cand_record.op = outcome.op;
                    cand_record.seed = plan.seed;
                    cand_record.test_index = global_index;
                    bool fails = false;
                    if (!cand_record.transport_error) {
                        auto cand_verdicts = evaluate_properties(op, cand_record, registry,
                                                                 op_specs, {info.failed_property},
                                                                 options);
                        fails = !cand_verdicts.empty() &&
                                cand_verdicts.front().status == PropertyStatus::Fail;
                    }
                    outcome.records.push_back(std::move(cand_record));
                    ++outcome.shrink_executions;
                    return fails;
                };

                ShrinkGuide guide = assignment_guide(op, registry, op_specs);
                info.reproduced = still_fails(info.original_input);
                size_t remaining_budget =
                    plan.shrink_budget > 0 ? plan.shrink_budget - 1 : 0;
                ShrinkResult shrunk =
                    shrink_value(guide, info.original_input, still_fails, remaining_budget);
                info.shrunk_input = shrunk.value;
                info.shrink_steps = shrunk.steps_taken;
                info.shrink_budget_exhausted = shrunk.budget_exhausted;

                if (plan.keep_going) {
                    // A parameter is offending when resetting it to its
                    // minimal value rescues the shrunk reproducer. Probes
                    // share the shrink budget.
                    for (const auto& param : op.parameters) {
                        if (outcome.shrink_executions >= plan.shrink_budget) break;
                        if (!info.shrunk_input.contains(param.name)) continue;
                        Json probe = info.shrunk_input;
                        probe[param.name] =
                            minimal_value(registry, op_specs.parameter_specs.at(param.name));
                        if (!still_fails(probe)) excluded.insert(param.name);
                    }
                    if (excluded.empty()) {
                        for (const auto& [name, _] : info.shrunk_input.items())
                            excluded.insert(name);
                    }
                }

                outcome.fail = std::move(info);
            }
            if (!plan.keep_going) {
                outcome.verdict = CheckOutcome::Verdict::Fail;
                return outcome;
            }
        }
    }

    outcome.verdict =
        outcome.fail ? CheckOutcome::Verdict::Fail : CheckOutcome::Verdict::Pass;
    return outcome;
}

bool endpoint_glob_match(const std::string& pattern, const std::string& op_key) {
    std::string pat = pattern.find(' ') == std::string::npos ? "* " + pattern : pattern;
    // iterative glob with '*'
    size_t p = 0, s = 0, star = std::string::npos, star_s = 0;
    while (s < op_key.size()) {
        if (p < pat.size() && (pat[p] == op_key[s])) {
            ++p;
            ++s;
        } else if (p < pat.size() && pat[p] == '*') {
            star = p++;
            star_s = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++star_s;
        } else {
            return false;
        }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
}

CheckAllResult check_all(const ApiDescription& api, const GeneratorConfig& cfg,
                         const RunPlan& plan, const SpecRegistry& registry,
                         const ApiSpecs& api_specs,
                         const std::function<HttpClient()>& client_factory,
                         const RunContext& ctx, const ValidationOptions& options,
                         const std::function<bool(const OperationSpec&)>& filter) {
    plan.validate();
    std::vector<OperationSpec> ops;
    for (auto& op : list_operations(api)) {
        if (!filter || filter(op)) ops.push_back(std::move(op));
    }

    CheckAllResult result;
    result.outcomes.resize(ops.size());

    auto run_one = [&](size_t idx, HttpClient& client) {
        result.outcomes[idx] = check_operation(ops[idx], cfg, plan, registry,
                                               api_specs.for_operation(ops[idx]), client, ctx,
                                               options);
    };

    if (plan.workers <= 1 || ops.size() <= 1) {
        HttpClient client = client_factory();
        for (size_t i = 0; i < ops.size(); ++i) run_one(i, client);
        return result;
    }

    std::atomic<size_t> next{0};
    size_t worker_count = std::min<size_t>(plan.workers, ops.size());
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (size_t w = 0; w < worker_count; ++w) {
        workers.emplace_back([&] {
            HttpClient client = client_factory();
            for (size_t idx = next.fetch_add(1); idx < ops.size(); idx = next.fetch_add(1))
                run_one(idx, client);
        });
    }
    for (auto& t : workers) t.join();
    return result;
}

}  // namespace quickrest
