// SPDX-License-Identifier: Apache-2.0
#include "quickrest/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include "CLI11.hpp"

#include "quickrest/checker.hpp"
#include "quickrest/reporter.hpp"
#include "quickrest/stateful.hpp"

namespace quickrest {

namespace {

int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::set<Property> parse_properties(const std::string& csv) {
    std::set<Property> out;
    if (csv == "none") return out;
    if (csv == "all" || csv.empty()) {
        return {Property::Non500, Property::BodyConforms, Property::StatusDocumented};
    }
    size_t start = 0;
    while (start <= csv.size()) {
        size_t comma = csv.find(',', start);
        std::string token = trim(csv.substr(start, comma - start));
        if (!token.empty()) {
            auto p = property_from_string(token);
            if (!p) throw ConfigError("unknown property: " + token);
            out.insert(*p);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct CliConfig {
    std::string spec_source;
    std::string base_url;
    std::string mode = "stateless";
    std::string config_file;

    // generator knobs
    double string_mix = 0.5;
    uint32_t charset_max = 255;
    double int_mode = 0.5;
    double omit_required_prob = 0.0;
    double out_of_range_prob = 0.0;
    uint32_t max_size = 200;

    // plan knobs
    uint32_t tests = 10;
    uint32_t iterations = 30;
    uint32_t tier_growth = 10;
    uint32_t tiers = 1;
    uint64_t seed = 0;
    std::string properties = "all";
    std::string param_strategy = "all-params";
    uint32_t shrink_budget = 1000;
    bool keep_going = false;
    uint32_t workers = 1;

    // stateful knobs
    uint32_t sequences = 100;
    uint32_t seq_min = 1;
    uint32_t seq_max = 5;
    uint32_t step_size = 10;
    std::vector<std::string> identity_attrs;
    std::vector<std::string> identity_map;
    std::string reset_hook;

    // io knobs
    std::string endpoint_filter;
    std::string report_json_path;
    bool report_canonical = false;
    std::string auth_header;
    double timeout_seconds = 10.0;
    uint64_t max_body_bytes = 64 * 1024;
    bool strict_extra_keys = false;

    Json snapshot() const {
        return Json{{"mode", mode},
                    {"stringMix", string_mix},
                    {"charsetMax", charset_max},
                    {"intMode", int_mode},
                    {"omitRequiredProb", omit_required_prob},
                    {"outOfRangeProb", out_of_range_prob},
                    {"maxSize", max_size},
                    {"tests", tests},
                    {"iterations", iterations},
                    {"tierGrowth", tier_growth},
                    {"tiers", tiers},
                    {"properties", properties},
                    {"paramStrategy", param_strategy},
                    {"shrinkBudget", shrink_budget},
                    {"keepGoing", keep_going},
                    {"workers", workers},
                    {"sequences", sequences},
                    {"seqMin", seq_min},
                    {"seqMax", seq_max},
                    {"stepSize", step_size},
                    {"endpointFilter", endpoint_filter},
                    {"strictExtraKeys", strict_extra_keys}};
    }
};

int run_pipeline(const CliConfig& cli, std::ostream& out, std::ostream& err) {
    std::string document_text = load_document_text(cli.spec_source);
    ApiDescription api = parse_document(document_text);

    SpecRegistry registry;
    ApiSpecs api_specs = compile_api(api, registry);

    std::string base = cli.base_url.empty() ? api.base_url() : cli.base_url;
    if (base.empty())
        throw ConfigError("the document names no host; pass --base-url");
    BaseUrl base_url = BaseUrl::parse(base);

    GeneratorConfig cfg;
    cfg.string_mix = cli.string_mix;
    cfg.charset_max = cli.charset_max;
    cfg.int_mode = cli.int_mode;
    cfg.omit_required_prob = cli.omit_required_prob;
    cfg.out_of_range_prob = cli.out_of_range_prob;
    cfg.max_size = cli.max_size;
    cfg.validate();

    RunPlan plan;
    plan.tests_per_iteration = cli.tests;
    plan.iterations = cli.iterations;
    plan.tier_growth = cli.tier_growth;
    plan.tiers = cli.tiers;
    plan.seed = cli.seed;
    plan.enabled_properties = parse_properties(cli.properties);
    if (cli.param_strategy == "per-param-first")
        plan.param_strategy = RunPlan::ParamStrategy::PerParamFirst;
    else if (cli.param_strategy != "all-params")
        throw ConfigError("unknown --param-strategy: " + cli.param_strategy);
    plan.shrink_budget = cli.shrink_budget;
    plan.keep_going = cli.keep_going;
    plan.workers = cli.workers;
    plan.validate();

    ClientConfig client_cfg;
    client_cfg.timeout_seconds = cli.timeout_seconds;
    client_cfg.body_cap_bytes = cli.max_body_bytes;
    std::string auth = cli.auth_header;
    if (auth.empty()) {
        if (const char* env = std::getenv("QUICKREST_AUTH_HEADER")) auth = env;
    }
    if (!auth.empty()) {
        auto colon = auth.find(':');
        if (colon == std::string::npos)
            throw ConfigError("--auth-header must look like \"Name: value\"");
        client_cfg.auth_header = {trim(auth.substr(0, colon)), trim(auth.substr(colon + 1))};
    }

    ValidationOptions validation;
    validation.allow_extra_keys = !cli.strict_extra_keys;

    std::function<bool(const OperationSpec&)> filter;
    if (!cli.endpoint_filter.empty()) {
        std::string pattern = cli.endpoint_filter;
        filter = [pattern](const OperationSpec& op) {
            return endpoint_glob_match(pattern, op.key());
        };
    }

    RunContext ctx{cli.spec_source, base};

    RunMeta meta;
    meta.seed = plan.seed;
    meta.mode = cli.mode;
    meta.spec_source = cli.spec_source;
    meta.base_url = base;
    meta.document_hash = document_hash(document_text);
    meta.config = cli.snapshot();
    meta.started_at_ms = now_ms();

    std::vector<CheckOutcome> outcomes;
    std::vector<SequenceOutcome> sequences;

    if (cli.mode == "stateless") {
        auto factory = [&] { return HttpClient(base_url, client_cfg); };
        CheckAllResult result =
            check_all(api, cfg, plan, registry, api_specs, factory, ctx, validation, filter);
        outcomes = std::move(result.outcomes);
    } else if (cli.mode == "stateful") {
        StatefulOptions options;
        options.sequences = cli.sequences;
        options.length_min = cli.seq_min;
        options.length_max = cli.seq_max;
        options.step_size = cli.step_size;
        if (!cli.identity_attrs.empty())
            options.identity_attributes =
                std::set<std::string>(cli.identity_attrs.begin(), cli.identity_attrs.end());
        for (const auto& entry : cli.identity_map) {
            auto eq = entry.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--identity-map entries look like param=attribute: " + entry);
            options.identity_map[trim(entry.substr(0, eq))] = trim(entry.substr(eq + 1));
        }
        if (!cli.reset_hook.empty()) {
            ResetHook hook;
            auto space = cli.reset_hook.find(' ');
            if (space == std::string::npos) {
                hook.url = cli.reset_hook;
            } else {
                hook.verb = cli.reset_hook.substr(0, space);
                hook.url = trim(cli.reset_hook.substr(space + 1));
            }
            options.reset_hook = hook;
        }
        HttpClient client(base_url, client_cfg);
        StatefulRunResult result = run_stateful(api, cfg, plan, options, registry, api_specs,
                                                client, ctx, validation, filter);
        sequences = std::move(result.outcomes);
    } else {
        throw ConfigError("unknown --mode: " + cli.mode);
    }

    meta.ended_at_ms = now_ms();

    std::vector<std::string> warnings = registry.warnings();
    TestReport report =
        build_report(api, std::move(meta), std::move(outcomes), std::move(sequences),
                     std::move(warnings));

    out << render_text(report);

    if (!cli.report_json_path.empty()) {
        RenderOptions render_options;
        render_options.canonical = cli.report_canonical;
        std::ofstream file(cli.report_json_path, std::ios::binary);
        if (!file) throw ConfigError("cannot write report to " + cli.report_json_path);
        file << render_json(report, render_options);
    }

    bool any_failure = false;
    for (const auto& o : report.outcomes)
        if (o.verdict != CheckOutcome::Verdict::Pass) any_failure = true;
    for (const auto& s : report.sequences)
        if (s.verdict != CheckOutcome::Verdict::Pass) any_failure = true;
    (void)err;
    return any_failure ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Property-based black-box testing of OpenAPI 2.0 described REST APIs"};
    app.name("quickrest");

    CliConfig cli;
    std::vector<std::pair<CLI::Option*, std::function<void(const Json&)>>> file_appliers;

    auto add = [&](const std::string& flag, auto& target, const std::string& help) {
        CLI::Option* opt = app.add_option(flag, target, help)->capture_default_str();
        std::string key = opt->get_single_name();
        file_appliers.emplace_back(opt, [&target, key](const Json& doc) {
            if (doc.contains(key)) target = doc.at(key).get<std::decay_t<decltype(target)>>();
        });
        return opt;
    };
    auto add_flag = [&](const std::string& flag, bool& target, const std::string& help) {
        CLI::Option* opt = app.add_flag(flag, target, help);
        std::string key = opt->get_single_name();
        file_appliers.emplace_back(opt, [&target, key](const Json& doc) {
            if (doc.contains(key)) target = doc.at(key).get<bool>();
        });
        return opt;
    };

    add("--spec", cli.spec_source, "OpenAPI 2.0 document: file path or http(s) URL");
    add("--base-url", cli.base_url, "target base URL (default: the document's host/basePath)");
    add("--mode", cli.mode, "stateless | stateful");
    app.add_option("--config", cli.config_file, "JSON config file; explicit flags win");

    add("--string-mix", cli.string_mix, "P(any-string) vs alphanumeric string per value");
    add("--charset-max", cli.charset_max, "code point cap for any-string generation");
    add("--int-mode", cli.int_mode, "P(nat-int, >=0) vs any signed int");
    add("--omit-required-prob", cli.omit_required_prob,
        "probability of dropping each required parameter");
    add("--out-of-range-prob", cli.out_of_range_prob,
        "probability of pushing a value out of its documented range");
    add("--max-size", cli.max_size, "cap on generated sizes (string/array lengths, magnitudes)");

    add("--tests", cli.tests, "tests per iteration");
    add("--iterations", cli.iterations, "iterations per tier");
    add("--tier-growth", cli.tier_growth, "test count multiplier per tier");
    add("--tiers", cli.tiers, "number of tiers to run");
    add("--seed", cli.seed, "random seed");
    add("--properties", cli.properties,
        "comma list of non500,body,status (or all / none)");
    add("--param-strategy", cli.param_strategy, "all-params | per-param-first");
    add("--shrink-budget", cli.shrink_budget, "max re-executions while shrinking");
    add_flag("--keep-going", cli.keep_going,
             "after a failure, continue with the offending parameter excluded");
    add("--workers", cli.workers, "parallel workers over operations (stateless only)");

    add("--sequences", cli.sequences, "stateful: number of sequences");
    add("--seq-min", cli.seq_min, "stateful: minimum sequence length");
    add("--seq-max", cli.seq_max, "stateful: maximum sequence length");
    add("--step-size", cli.step_size, "stateful: generation size for step inputs");
    app.add_option("--identity-attr", cli.identity_attrs,
                   "pool attribute names drawn for same-named parameters (default: id)");
    app.add_option("--identity-map", cli.identity_map,
                   "parameter-to-pool-attribute mapping, e.g. objectid=id (repeatable)");
    add("--reset-hook", cli.reset_hook,
        "stateful: \"VERB URL\" executed to reset target state between sequences");

    add("--endpoint", cli.endpoint_filter, "only check operations matching \"VERB /path\" glob");
    add("--report-json", cli.report_json_path, "write the JSON report to this path");
    add_flag("--report-canonical", cli.report_canonical,
             "zero timestamps/latencies in the JSON report");
    add("--auth-header", cli.auth_header,
        "static auth header \"Name: value\" (env QUICKREST_AUTH_HEADER)");
    add("--timeout", cli.timeout_seconds, "per-request timeout in seconds");
    add("--max-body-bytes", cli.max_body_bytes, "response body cap in the call log");
    add_flag("--strict-extra-keys", cli.strict_extra_keys,
             "undocumented response object keys become conformance violations");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "quickrest: " << e.what() << "\n";
        return 2;
    }

    try {
        if (!cli.config_file.empty()) {
            std::ifstream in(cli.config_file, std::ios::binary);
            if (!in) throw ConfigError("cannot read config file: " + cli.config_file);
            Json doc = Json::parse(in, nullptr, false);
            if (doc.is_discarded() || !doc.is_object())
                throw ConfigError("config file is not a JSON object: " + cli.config_file);
            for (auto& [opt, apply] : file_appliers) {
                if (opt->count() == 0) apply(doc);
            }
        }
        if (cli.spec_source.empty()) throw ConfigError("--spec is required");
        return run_pipeline(cli, out, err);
    } catch (const Error& e) {
        err << "quickrest: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "quickrest: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace quickrest
