// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "quickrest/checker.hpp"
#include "quickrest/stateful.hpp"

namespace quickrest {

struct RunMeta {
    uint64_t seed = 0;
    std::string mode = "stateless";
    std::string spec_source;
    std::string base_url;
    std::string document_hash;  // FNV-1a 64 of the document bytes, hex
    Json config = Json::object();
    int64_t started_at_ms = 0;
    int64_t ended_at_ms = 0;
};

struct FrequencyRow {
    std::string path_template;
    std::string verb;
    int status = 0;
    uint64_t count = 0;
    bool documented = false;

    bool operator==(const FrequencyRow&) const = default;
};

struct OperationCoverage {
    std::string path_template;
    std::string verb;
    std::vector<std::string> documented_statuses;  // "default" excluded
    std::vector<int> observed;
    bool fully_covered = false;
};

struct TestReport {
    RunMeta meta;
    std::vector<CheckOutcome> outcomes;
    std::vector<SequenceOutcome> sequences;
    std::vector<CallRecord> records;  // every exchange of the run, in order
    std::vector<FrequencyRow> frequency_table;
    std::vector<OperationCoverage> coverage;
    std::vector<std::string> warnings;
};

/// Group records by (template, verb, status), sorted; the documented flag
/// comes from the document's response keys ("default" documents any status).
std::vector<FrequencyRow> frequency_table(const std::vector<CallRecord>& records,
                                          const ApiDescription& api);

/// Coverage per tested operation: fully covered iff every documented numeric
/// status key appears in the frequency rows.
std::vector<OperationCoverage> coverage_table(const std::vector<FrequencyRow>& rows,
                                              const ApiDescription& api);

/// Assemble the full report: flatten records out of the outcomes, build the
/// frequency and coverage tables.
TestReport build_report(const ApiDescription& api, RunMeta meta,
                        std::vector<CheckOutcome> outcomes,
                        std::vector<SequenceOutcome> sequences,
                        std::vector<std::string> warnings);

struct RenderOptions {
    bool canonical = false;  // zero out timestamps and latencies
    int indent = 2;
};

std::string render_text(const TestReport& report);
std::string render_json(const TestReport& report, const RenderOptions& options = {});
TestReport parse_report(const std::string& json_text);  // throws MalformedJsonError

std::string document_hash(std::string_view document_text);

}  // namespace quickrest
