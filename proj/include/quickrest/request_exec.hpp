// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quickrest/gen_core.hpp"
#include "quickrest/oas_model.hpp"

namespace quickrest {

struct BaseUrl {
    std::string scheme = "http";
    std::string host;
    int port = 80;
    std::string base_path;  // no trailing slash; may be empty

    static BaseUrl parse(const std::string& url);  // throws ConfigError
    std::string origin() const;                    // "http://host:port"
};

struct OperationRef {
    std::string path_template;
    std::string verb;

    bool operator==(const OperationRef&) const = default;
    std::string key() const { return verb + " " + path_template; }
};

struct RequestPlan {
    std::string verb;
    std::string url;             // absolute, for reporting
    std::string path_and_query;  // what goes on the wire
    std::vector<std::pair<std::string, std::string>> headers;
    std::optional<std::string> body;
    std::string content_type;
};

struct CallRecord {
    OperationRef op;
    RequestPlan plan;
    std::vector<MutationNote> mutations;  // specification mutations behind this request
    std::optional<int> status;
    std::optional<std::string> transport_error;  // exactly one of status/transport_error
    std::vector<std::pair<std::string, std::string>> response_headers;
    std::string response_body;
    bool body_truncated = false;
    std::optional<Json> response_json;  // best-effort parse
    int64_t latency_ms = 0;
    int64_t timestamp_ms = 0;
    uint64_t seed = 0;
    uint64_t test_index = 0;
};

/// Substitute path parameters, append percent-encoded query parameters, set
/// header parameters, serialize the body parameter as JSON (or form
/// parameters as application/x-www-form-urlencoded).
/// Throws MissingPathParameterError when a path parameter was omitted — a URL
/// with a hole cannot be sent; the caller records a skipped mutation.
RequestPlan build_request(const OperationSpec& op, const ParamAssignment& assignment,
                          const BaseUrl& base);

std::string percent_encode(const std::string& raw);
std::string percent_decode(const std::string& encoded);

/// Canonical scalar rendering for path/query/header values: strings bare,
/// everything else as compact JSON.
std::string render_scalar(const Json& value);

struct ClientConfig {
    double timeout_seconds = 10.0;
    std::optional<std::pair<std::string, std::string>> auth_header;
    size_t body_cap_bytes = 64 * 1024;  // response bodies beyond this are truncated
};

/// One HTTP exchange per execute() call. Transport failures become data on
/// the CallRecord, never exceptions.
class HttpClient {
  public:
    HttpClient(BaseUrl base, ClientConfig config);
    ~HttpClient();
    HttpClient(HttpClient&&) noexcept;
    HttpClient& operator=(HttpClient&&) noexcept;

    CallRecord execute(const RequestPlan& plan);

    const BaseUrl& base() const { return base_; }
    const ClientConfig& config() const { return config_; }

  private:
    BaseUrl base_;
    ClientConfig config_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace quickrest
