// SPDX-License-Identifier: Apache-2.0
#include "quickrest/reporter.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace quickrest {

std::string document_hash(std::string_view document_text) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : document_text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<FrequencyRow> frequency_table(const std::vector<CallRecord>& records,
                                          const ApiDescription& api) {
    std::map<std::tuple<std::string, std::string, int>, uint64_t> counts;
    for (const auto& record : records) {
        if (!record.status) continue;
        counts[{record.op.path_template, record.op.verb, *record.status}]++;
    }
    std::vector<FrequencyRow> rows;
    rows.reserve(counts.size());
    for (const auto& [key, count] : counts) {
        const auto& [tmpl, verb, status] = key;
        FrequencyRow row{tmpl, verb, status, count, false};
        auto path_it = api.paths.find(tmpl);
        if (path_it != api.paths.end()) {
            auto op_it = path_it->second.find(verb);
            if (op_it != path_it->second.end()) {
                const auto& responses = op_it->second.responses;
                row.documented = responses.count(std::to_string(status)) != 0 ||
                                 responses.count("default") != 0;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;  // map iteration is already sorted by (template, verb, status)
}

std::vector<OperationCoverage> coverage_table(const std::vector<FrequencyRow>& rows,
                                              const ApiDescription& api) {
    std::map<std::pair<std::string, std::string>, std::vector<int>> observed;
    for (const auto& row : rows) observed[{row.path_template, row.verb}].push_back(row.status);

    std::vector<OperationCoverage> out;
    for (const auto& [key, statuses] : observed) {
        OperationCoverage cov;
        cov.path_template = key.first;
        cov.verb = key.second;
        cov.observed = statuses;
        auto path_it = api.paths.find(key.first);
        if (path_it != api.paths.end()) {
            auto op_it = path_it->second.find(key.second);
            if (op_it != path_it->second.end()) {
                for (const auto& [status_key, _] : op_it->second.responses) {
                    if (status_key != "default") cov.documented_statuses.push_back(status_key);
                }
            }
        }
        cov.fully_covered = !cov.documented_statuses.empty();
        for (const auto& status_key : cov.documented_statuses) {
            int code = std::stoi(status_key);
            if (std::find(cov.observed.begin(), cov.observed.end(), code) == cov.observed.end())
                cov.fully_covered = false;
        }
        out.push_back(std::move(cov));
    }
    return out;
}

namespace {

std::vector<CallRecord> flatten_records(const std::vector<CheckOutcome>& outcomes,
                                        const std::vector<SequenceOutcome>& sequences) {
    std::vector<CallRecord> out;
    for (const auto& outcome : outcomes)
        out.insert(out.end(), outcome.records.begin(), outcome.records.end());
    for (const auto& seq : sequences) {
        for (const auto& step : seq.steps) out.push_back(step.record);
        out.insert(out.end(), seq.replay_records.begin(), seq.replay_records.end());
    }
    return out;
}

}  // namespace

TestReport build_report(const ApiDescription& api, RunMeta meta,
                        std::vector<CheckOutcome> outcomes,
                        std::vector<SequenceOutcome> sequences,
                        std::vector<std::string> warnings) {
    TestReport report;
    report.meta = std::move(meta);
    report.outcomes = std::move(outcomes);
    report.sequences = std::move(sequences);
    report.warnings = std::move(warnings);
    report.records = flatten_records(report.outcomes, report.sequences);
    report.frequency_table = frequency_table(report.records, api);
    report.coverage = coverage_table(report.frequency_table, api);
    return report;
}

namespace {

std::string safe_text(const std::string& raw) {
    // Arbitrary response bytes must survive JSON rendering.
    Json j = raw;
    std::string dumped = j.dump(-1, ' ', false, Json::error_handler_t::replace);
    Json back = Json::parse(dumped);
    return back.get<std::string>();
}

Json violations_to_json(const std::vector<Violation>& violations) {
    Json out = Json::array();
    for (const auto& v : violations)
        out.push_back(Json{{"path", v.json_path}, {"expected", v.expected}, {"actual", v.actual}});
    return out;
}

std::vector<Violation> violations_from_json(const Json& j) {
    std::vector<Violation> out;
    for (const auto& v : j)
        out.push_back({v.value("path", ""), v.value("expected", ""), v.value("actual", "")});
    return out;
}

Json record_to_json(const CallRecord& r, const RenderOptions& options) {
    Json j = Json::object();
    j["op"] = Json{{"path", r.op.path_template}, {"verb", r.op.verb}};
    Json req = Json::object();
    req["verb"] = r.plan.verb;
    req["url"] = safe_text(r.plan.url);
    req["pathAndQuery"] = safe_text(r.plan.path_and_query);
    Json headers = Json::array();
    for (const auto& [n, v] : r.plan.headers)
        headers.push_back(Json::array({safe_text(n), safe_text(v)}));
    req["headers"] = std::move(headers);
    if (r.plan.body) req["body"] = safe_text(*r.plan.body);
    if (!r.plan.content_type.empty()) req["contentType"] = r.plan.content_type;
    j["request"] = std::move(req);
    if (!r.mutations.empty()) {
        Json mutations = Json::array();
        for (const auto& m : r.mutations)
            mutations.push_back(Json{{"param", m.param}, {"kind", m.kind}});
        j["mutations"] = std::move(mutations);
    }
    if (r.status) j["status"] = *r.status;
    if (r.transport_error) j["transportError"] = *r.transport_error;
    Json resp_headers = Json::array();
    for (const auto& [n, v] : r.response_headers)
        resp_headers.push_back(Json::array({safe_text(n), safe_text(v)}));
    j["responseHeaders"] = std::move(resp_headers);
    j["responseBody"] = safe_text(r.response_body);
    if (r.body_truncated) j["bodyTruncated"] = true;
    if (r.response_json) j["responseJson"] = *r.response_json;
    j["latencyMs"] = options.canonical ? 0 : r.latency_ms;
    j["timestampMs"] = options.canonical ? 0 : r.timestamp_ms;
    j["seed"] = r.seed;
    j["testIndex"] = r.test_index;
    return j;
}

CallRecord record_from_json(const Json& j) {
    CallRecord r;
    r.op.path_template = j["op"].value("path", "");
    r.op.verb = j["op"].value("verb", "");
    const Json& req = j["request"];
    r.plan.verb = req.value("verb", "");
    r.plan.url = req.value("url", "");
    r.plan.path_and_query = req.value("pathAndQuery", "");
    for (const auto& h : req["headers"])
        r.plan.headers.emplace_back(h[0].get<std::string>(), h[1].get<std::string>());
    if (req.contains("body")) r.plan.body = req["body"].get<std::string>();
    r.plan.content_type = req.value("contentType", "");
    if (j.contains("mutations"))
        for (const auto& m : j["mutations"])
            r.mutations.push_back({m.value("param", ""), m.value("kind", "")});
    if (j.contains("status")) r.status = j["status"].get<int>();
    if (j.contains("transportError")) r.transport_error = j["transportError"].get<std::string>();
    for (const auto& h : j["responseHeaders"])
        r.response_headers.emplace_back(h[0].get<std::string>(), h[1].get<std::string>());
    r.response_body = j.value("responseBody", "");
    r.body_truncated = j.value("bodyTruncated", false);
    if (j.contains("responseJson")) r.response_json = j["responseJson"];
    r.latency_ms = j.value("latencyMs", static_cast<int64_t>(0));
    r.timestamp_ms = j.value("timestampMs", static_cast<int64_t>(0));
    r.seed = j.value("seed", static_cast<uint64_t>(0));
    r.test_index = j.value("testIndex", static_cast<uint64_t>(0));
    return r;
}

Json fail_to_json(const FailInfo& f) {
    Json j = Json::object();
    j["failedProperty"] = to_string(f.failed_property);
    j["detail"] = f.detail;
    if (!f.violations.empty()) j["violations"] = violations_to_json(f.violations);
    j["originalInput"] = f.original_input;
    j["shrunkInput"] = f.shrunk_input;
    j["shrinkSteps"] = f.shrink_steps;
    if (f.shrink_budget_exhausted) j["shrinkBudgetExhausted"] = true;
    j["reproduced"] = f.reproduced;
    j["testIndex"] = f.test_index;
    j["reproCommand"] = f.repro_command;
    return j;
}

FailInfo fail_from_json(const Json& j) {
    FailInfo f;
    f.failed_property = property_from_string(j.value("failedProperty", "non500"))
                            .value_or(Property::Non500);
    f.detail = j.value("detail", "");
    if (j.contains("violations")) f.violations = violations_from_json(j["violations"]);
    f.original_input = j.value("originalInput", Json());
    f.shrunk_input = j.value("shrunkInput", Json());
    f.shrink_steps = j.value("shrinkSteps", static_cast<size_t>(0));
    f.shrink_budget_exhausted = j.value("shrinkBudgetExhausted", false);
    f.reproduced = j.value("reproduced", false);
    f.test_index = j.value("testIndex", static_cast<uint64_t>(0));
    f.repro_command = j.value("reproCommand", "");
    return f;
}

Json outcome_to_json(const CheckOutcome& o, const RenderOptions& options) {
    Json j = Json::object();
    j["op"] = Json{{"path", o.op.path_template}, {"verb", o.op.verb}};
    j["verdict"] = to_string(o.verdict);
    if (o.fail) j["fail"] = fail_to_json(*o.fail);
    j["transportErrors"] = o.transport_errors;
    j["testsExecuted"] = o.tests_executed;
    j["shrinkExecutions"] = o.shrink_executions;
    j["skippedMutations"] = o.skipped_mutations;
    Json records = Json::array();
    for (const auto& r : o.records) records.push_back(record_to_json(r, options));
    j["records"] = std::move(records);
    return j;
}

CheckOutcome outcome_from_json(const Json& j) {
    CheckOutcome o;
    o.op.path_template = j["op"].value("path", "");
    o.op.verb = j["op"].value("verb", "");
    std::string verdict = j.value("verdict", "pass");
    o.verdict = verdict == "fail"      ? CheckOutcome::Verdict::Fail
                : verdict == "aborted" ? CheckOutcome::Verdict::Aborted
                                       : CheckOutcome::Verdict::Pass;
    if (j.contains("fail")) o.fail = fail_from_json(j["fail"]);
    o.transport_errors = j.value("transportErrors", static_cast<size_t>(0));
    o.tests_executed = j.value("testsExecuted", static_cast<size_t>(0));
    o.shrink_executions = j.value("shrinkExecutions", static_cast<size_t>(0));
    o.skipped_mutations = j.value("skippedMutations", static_cast<size_t>(0));
    for (const auto& r : j["records"]) o.records.push_back(record_from_json(r));
    return o;
}

Json step_to_json(const CallStep& s) {
    Json values = Json::object();
    for (const auto& [name, value] : s.assignment.values) values[name] = value;
    Json mutations = Json::array();
    for (const auto& m : s.assignment.mutations)
        mutations.push_back(Json{{"param", m.param}, {"kind", m.kind}});
    Json provenance = Json::object();
    for (const auto& [name, p] : s.provenance) {
        provenance[name] = Json{{"kind", p.kind == Provenance::Kind::Pool ? "pool" : "random"},
                                {"entry", p.pool_entry}};
    }
    return Json{{"op", Json{{"path", s.op.path_template}, {"verb", s.op.verb}}},
                {"values", std::move(values)},
                {"mutations", std::move(mutations)},
                {"provenance", std::move(provenance)}};
}

CallStep step_from_json(const Json& j) {
    CallStep s;
    s.op.path_template = j["op"].value("path", "");
    s.op.verb = j["op"].value("verb", "");
    for (auto it = j["values"].begin(); it != j["values"].end(); ++it)
        s.assignment.values[it.key()] = it.value();
    for (const auto& m : j["mutations"])
        s.assignment.mutations.push_back({m.value("param", ""), m.value("kind", "")});
    for (auto it = j["provenance"].begin(); it != j["provenance"].end(); ++it) {
        Provenance p;
        p.kind = it.value().value("kind", "random") == "pool" ? Provenance::Kind::Pool
                                                              : Provenance::Kind::Random;
        p.pool_entry = it.value().value("entry", static_cast<size_t>(0));
        s.provenance[it.key()] = p;
    }
    return s;
}

Json verdicts_to_json(const std::vector<PropertyVerdict>& verdicts) {
    Json out = Json::array();
    for (const auto& v : verdicts) {
        Json j{{"property", to_string(v.property)},
               {"status", v.status == PropertyStatus::Pass   ? "pass"
                          : v.status == PropertyStatus::Fail ? "fail"
                                                             : "skip"}};
        if (!v.detail.empty()) j["detail"] = v.detail;
        if (!v.violations.empty()) j["violations"] = violations_to_json(v.violations);
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<PropertyVerdict> verdicts_from_json(const Json& j) {
    std::vector<PropertyVerdict> out;
    for (const auto& vj : j) {
        PropertyVerdict v;
        v.property =
            property_from_string(vj.value("property", "non500")).value_or(Property::Non500);
        std::string status = vj.value("status", "pass");
        v.status = status == "fail"   ? PropertyStatus::Fail
                   : status == "skip" ? PropertyStatus::Skip
                                      : PropertyStatus::Pass;
        v.detail = vj.value("detail", "");
        if (vj.contains("violations")) v.violations = violations_from_json(vj["violations"]);
        out.push_back(std::move(v));
    }
    return out;
}

Json sequence_outcome_to_json(const SequenceOutcome& s, const RenderOptions& options) {
    Json j = Json::object();
    j["sequenceIndex"] = s.sequence_index;
    j["verdict"] = to_string(s.verdict);
    Json steps = Json::array();
    for (const auto& step : s.steps) {
        steps.push_back(Json{{"step", step_to_json(step.step)},
                             {"record", record_to_json(step.record, options)},
                             {"verdicts", verdicts_to_json(step.verdicts)}});
    }
    j["steps"] = std::move(steps);
    if (s.fail) j["fail"] = fail_to_json(*s.fail);
    if (!s.shrunk_sequence.empty()) {
        Json shrunk = Json::array();
        for (const auto& step : s.shrunk_sequence) shrunk.push_back(step_to_json(step));
        j["shrunkSequence"] = std::move(shrunk);
    }
    if (s.shrink_best_effort) j["shrinkBestEffort"] = true;
    j["shrinkExecutions"] = s.shrink_executions;
    j["transportErrors"] = s.transport_errors;
    Json replays = Json::array();
    for (const auto& r : s.replay_records) replays.push_back(record_to_json(r, options));
    j["replayRecords"] = std::move(replays);
    return j;
}

SequenceOutcome sequence_outcome_from_json(const Json& j) {
    SequenceOutcome s;
    s.sequence_index = j.value("sequenceIndex", static_cast<uint64_t>(0));
    std::string verdict = j.value("verdict", "pass");
    s.verdict = verdict == "fail"      ? CheckOutcome::Verdict::Fail
                : verdict == "aborted" ? CheckOutcome::Verdict::Aborted
                                       : CheckOutcome::Verdict::Pass;
    for (const auto& stepj : j["steps"]) {
        StepOutcome step;
        step.step = step_from_json(stepj["step"]);
        step.record = record_from_json(stepj["record"]);
        step.verdicts = verdicts_from_json(stepj["verdicts"]);
        s.steps.push_back(std::move(step));
    }
    if (j.contains("fail")) s.fail = fail_from_json(j["fail"]);
    if (j.contains("shrunkSequence"))
        for (const auto& stepj : j["shrunkSequence"]) s.shrunk_sequence.push_back(step_from_json(stepj));
    s.shrink_best_effort = j.value("shrinkBestEffort", false);
    s.shrink_executions = j.value("shrinkExecutions", static_cast<size_t>(0));
    s.transport_errors = j.value("transportErrors", static_cast<size_t>(0));
    for (const auto& r : j["replayRecords"]) s.replay_records.push_back(record_from_json(r));
    return s;
}

}  // namespace

std::string render_json(const TestReport& report, const RenderOptions& options) {
    Json j = Json::object();
    j["reportVersion"] = 1;
    Json meta = Json::object();
    meta["seed"] = report.meta.seed;
    meta["mode"] = report.meta.mode;
    meta["specSource"] = report.meta.spec_source;
    meta["baseUrl"] = report.meta.base_url;
    meta["documentHash"] = report.meta.document_hash;
    meta["config"] = report.meta.config;
    meta["startedAtMs"] = options.canonical ? 0 : report.meta.started_at_ms;
    meta["endedAtMs"] = options.canonical ? 0 : report.meta.ended_at_ms;
    meta["canonical"] = options.canonical;
    j["meta"] = std::move(meta);

    Json outcomes = Json::array();
    for (const auto& o : report.outcomes) outcomes.push_back(outcome_to_json(o, options));
    j["outcomes"] = std::move(outcomes);

    Json sequences = Json::array();
    for (const auto& s : report.sequences)
        sequences.push_back(sequence_outcome_to_json(s, options));
    j["sequences"] = std::move(sequences);

    Json rows = Json::array();
    for (const auto& row : report.frequency_table) {
        rows.push_back(Json{{"path", row.path_template},
                            {"verb", row.verb},
                            {"status", row.status},
                            {"count", row.count},
                            {"documented", row.documented}});
    }
    j["frequencyTable"] = std::move(rows);

    Json coverage = Json::array();
    for (const auto& cov : report.coverage) {
        coverage.push_back(Json{{"path", cov.path_template},
                                {"verb", cov.verb},
                                {"documentedStatuses", cov.documented_statuses},
                                {"observed", cov.observed},
                                {"fullyCovered", cov.fully_covered}});
    }
    j["coverage"] = std::move(coverage);

    j["warnings"] = report.warnings;

    return j.dump(options.indent) + "\n";
}

TestReport parse_report(const std::string& json_text) {
    Json j = Json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("reportVersion"))
        throw MalformedJsonError("not a quickrest report");

    TestReport report;
    const Json& meta = j["meta"];
    report.meta.seed = meta.value("seed", static_cast<uint64_t>(0));
    report.meta.mode = meta.value("mode", "stateless");
    report.meta.spec_source = meta.value("specSource", "");
    report.meta.base_url = meta.value("baseUrl", "");
    report.meta.document_hash = meta.value("documentHash", "");
    report.meta.config = meta.value("config", Json::object());
    report.meta.started_at_ms = meta.value("startedAtMs", static_cast<int64_t>(0));
    report.meta.ended_at_ms = meta.value("endedAtMs", static_cast<int64_t>(0));

    for (const auto& oj : j["outcomes"]) report.outcomes.push_back(outcome_from_json(oj));
    for (const auto& sj : j["sequences"])
        report.sequences.push_back(sequence_outcome_from_json(sj));
    for (const auto& rj : j["frequencyTable"]) {
        report.frequency_table.push_back({rj.value("path", ""), rj.value("verb", ""),
                                          rj.value("status", 0),
                                          rj.value("count", static_cast<uint64_t>(0)),
                                          rj.value("documented", false)});
    }
    for (const auto& cj : j["coverage"]) {
        OperationCoverage cov;
        cov.path_template = cj.value("path", "");
        cov.verb = cj.value("verb", "");
        for (const auto& s : cj["documentedStatuses"]) cov.documented_statuses.push_back(s);
        for (const auto& s : cj["observed"]) cov.observed.push_back(s);
        cov.fully_covered = cj.value("fullyCovered", false);
        report.coverage.push_back(std::move(cov));
    }
    for (const auto& w : j["warnings"]) report.warnings.push_back(w.get<std::string>());
    report.records = flatten_records(report.outcomes, report.sequences);
    return report;
}

std::string render_text(const TestReport& report) {
    std::ostringstream out;
    size_t failures = 0, aborted = 0;
    for (const auto& o : report.outcomes) {
        if (o.verdict == CheckOutcome::Verdict::Fail) ++failures;
        if (o.verdict == CheckOutcome::Verdict::Aborted) ++aborted;
    }
    for (const auto& s : report.sequences)
        if (s.verdict == CheckOutcome::Verdict::Fail) ++failures;

    out << "quickrest " << report.meta.mode << " run — seed " << report.meta.seed << " — "
        << report.outcomes.size() << " operation(s)";
    if (!report.sequences.empty()) out << ", " << report.sequences.size() << " sequence(s)";
    out << "\n";

    for (const auto& o : report.outcomes) {
        out << "  " << (o.verdict == CheckOutcome::Verdict::Pass      ? "PASS "
                        : o.verdict == CheckOutcome::Verdict::Aborted ? "ABORT"
                                                                      : "FAIL ")
            << " " << o.op.key() << "  (" << o.tests_executed << " tests";
        if (o.transport_errors) out << ", " << o.transport_errors << " transport errors";
        if (o.skipped_mutations) out << ", " << o.skipped_mutations << " unsendable mutations";
        out << ")\n";
        if (o.fail) {
            out << "        property: " << to_string(o.fail->failed_property) << " — "
                << o.fail->detail << "\n";
            for (const auto& v : o.fail->violations)
                out << "        violation at " << v.json_path << ": expected " << v.expected
                    << ", got " << v.actual << "\n";
            out << "        original input: " << o.fail->original_input.dump() << "\n";
            out << "        shrunk input  (" << o.fail->shrink_steps
                << " steps): " << o.fail->shrunk_input.dump() << "\n";
            out << "        repro: " << o.fail->repro_command << "\n";
        }
    }

    for (const auto& s : report.sequences) {
        if (s.verdict != CheckOutcome::Verdict::Fail) continue;
        out << "  FAIL  sequence #" << s.sequence_index << " (" << s.steps.size() << " steps)\n";
        if (s.fail) {
            out << "        property: " << to_string(s.fail->failed_property) << " — "
                << s.fail->detail << "\n";
            out << "        shrunk sequence (" << s.shrunk_sequence.size() << " steps):\n";
            for (const auto& step : s.shrunk_sequence) {
                Json values = Json::object();
                for (const auto& [name, value] : step.assignment.values) values[name] = value;
                out << "          " << step.op.key() << " " << values.dump() << "\n";
            }
            if (s.shrink_best_effort)
                out << "        note: no reset hook configured; shrunk values may differ from"
                       " the original failing run\n";
            out << "        repro: " << s.fail->repro_command << "\n";
        }
    }

    size_t passed_sequences = 0;
    for (const auto& s : report.sequences)
        if (s.verdict == CheckOutcome::Verdict::Pass) ++passed_sequences;
    if (!report.sequences.empty())
        out << "  sequences passed: " << passed_sequences << "/" << report.sequences.size()
            << "\n";

    out << "\nFrequency table (path, verb, status, count, documented):\n";
    for (const auto& row : report.frequency_table) {
        out << "  " << row.path_template << "  " << row.verb << "  " << row.status << "  "
            << row.count << "  " << (row.documented ? "documented" : "UNDOCUMENTED") << "\n";
    }

    out << "\nCoverage:\n";
    for (const auto& cov : report.coverage) {
        out << "  " << cov.verb << " " << cov.path_template << ": documented {";
        for (size_t i = 0; i < cov.documented_statuses.size(); ++i)
            out << (i ? "," : "") << cov.documented_statuses[i];
        out << "} observed {";
        for (size_t i = 0; i < cov.observed.size(); ++i) out << (i ? "," : "") << cov.observed[i];
        out << "} -> " << (cov.fully_covered ? "fully covered" : "not fully covered") << "\n";
    }

    if (!report.warnings.empty()) {
        out << "\nWarnings:\n";
        for (const auto& w : report.warnings) out << "  " << w << "\n";
    }

    out << "\nResult: " << failures << " failure(s), " << aborted << " aborted operation(s)\n";
    return out.str();
}

}  // namespace quickrest
