// SPDX-License-Identifier: Apache-2.0
#include "quickrest/request_exec.hpp"

#include <chrono>

#include "httplib.h"

namespace quickrest {

BaseUrl BaseUrl::parse(const std::string& url) {
    BaseUrl out;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base URL needs a scheme: " + url);
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http" && out.scheme != "https")
        throw ConfigError("unsupported scheme: " + out.scheme);
    out.port = out.scheme == "https" ? 443 : 80;
    size_t host_start = scheme_end + 3;
    size_t path_start = url.find('/', host_start);
    std::string authority = url.substr(host_start, path_start == std::string::npos
                                                       ? std::string::npos
                                                       : path_start - host_start);
    if (authority.empty()) throw ConfigError("base URL needs a host: " + url);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        out.host = authority.substr(0, colon);
        try {
            out.port = std::stoi(authority.substr(colon + 1));
        } catch (...) {
            throw ConfigError("bad port in base URL: " + url);
        }
    } else {
        out.host = authority;
    }
    if (path_start != std::string::npos) {
        out.base_path = url.substr(path_start);
        while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
    }
    return out;
}

std::string BaseUrl::origin() const {
    return scheme + "://" + host + ":" + std::to_string(port);
}

std::string percent_encode(const std::string& raw) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : raw) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

std::string percent_decode(const std::string& encoded) {
    auto hex_val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    for (size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i] == '%' && i + 2 < encoded.size() && hex_val(encoded[i + 1]) >= 0 &&
            hex_val(encoded[i + 2]) >= 0) {
            out += static_cast<char>(hex_val(encoded[i + 1]) * 16 + hex_val(encoded[i + 2]));
            i += 2;
        } else {
            out += encoded[i];
        }
    }
    return out;
}

std::string render_scalar(const Json& value) {
    if (value.is_string()) return value.get<std::string>();
    return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

RequestPlan build_request(const OperationSpec& op, const ParamAssignment& assignment,
                          const BaseUrl& base) {
    RequestPlan plan;
    plan.verb = op.verb;

    std::string path = op.path_template;
    std::vector<std::pair<std::string, std::string>> query;  // already encoded pairs
    std::vector<std::pair<std::string, std::string>> form;

    for (const auto& param : op.parameters) {
        auto it = assignment.values.find(param.name);
        switch (param.location) {
            case ParamLocation::Path: {
                if (it == assignment.values.end())
                    throw MissingPathParameterError(param.name);
                std::string rendered;
                if (it->second.is_array()) {
                    for (size_t i = 0; i < it->second.size(); ++i) {
                        if (i) rendered += ',';
                        rendered += render_scalar(it->second[i]);
                    }
                } else {
                    rendered = render_scalar(it->second);
                }
                std::string placeholder = "{" + param.name + "}";
                std::string encoded = percent_encode(rendered);
                for (size_t pos = path.find(placeholder); pos != std::string::npos;
                     pos = path.find(placeholder, pos + encoded.size()))
                    path.replace(pos, placeholder.size(), encoded);
                break;
            }
            case ParamLocation::Query:
            case ParamLocation::Form: {
                if (it == assignment.values.end()) break;
                auto& sink = param.location == ParamLocation::Query ? query : form;
                std::string key = percent_encode(param.name);
                if (it->second.is_array() && param.collection_format == "multi") {
                    for (const auto& v : it->second)
                        sink.emplace_back(key, percent_encode(render_scalar(v)));
                } else if (it->second.is_array()) {  // csv
                    std::string joined;
                    for (size_t i = 0; i < it->second.size(); ++i) {
                        if (i) joined += ',';
                        joined += render_scalar(it->second[i]);
                    }
                    sink.emplace_back(key, percent_encode(joined));
                } else {
                    sink.emplace_back(key, percent_encode(render_scalar(it->second)));
                }
                break;
            }
            case ParamLocation::Header: {
                if (it == assignment.values.end()) break;
                // Header values cannot carry CR/LF or other control bytes.
                std::string value = render_scalar(it->second);
                std::string cleaned;
                for (unsigned char c : value)
                    if (c >= 0x20 && c != 0x7F) cleaned += static_cast<char>(c);
                plan.headers.emplace_back(param.name, cleaned);
                break;
            }
            case ParamLocation::Body: {
                if (it == assignment.values.end()) break;
                plan.body = it->second.dump(-1, ' ', false, Json::error_handler_t::replace);
                plan.content_type = "application/json";
                break;
            }
        }
    }

    if (!form.empty()) {
        std::string encoded;
        for (size_t i = 0; i < form.size(); ++i) {
            if (i) encoded += '&';
            encoded += form[i].first + "=" + form[i].second;
        }
        plan.body = encoded;
        plan.content_type = "application/x-www-form-urlencoded";
    }

    std::string path_and_query = base.base_path + path;
    for (size_t i = 0; i < query.size(); ++i) {
        path_and_query += i == 0 ? '?' : '&';
        path_and_query += query[i].first + "=" + query[i].second;
    }
    plan.path_and_query = path_and_query;
    plan.url = base.origin() + path_and_query;
    return plan;
}

struct HttpClient::Impl {
    httplib::Client client;

    explicit Impl(const BaseUrl& base, const ClientConfig& cfg) : client(base.origin()) {
        auto seconds = static_cast<time_t>(cfg.timeout_seconds);
        auto usec = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(seconds)) * 1e6);
        client.set_connection_timeout(seconds, usec);
        client.set_read_timeout(seconds, usec);
        client.set_write_timeout(seconds, usec);
        client.set_keep_alive(true);
    }
};

HttpClient::HttpClient(BaseUrl base, ClientConfig config)
    : base_(std::move(base)), config_(std::move(config)),
      impl_(std::make_unique<Impl>(base_, config_)) {}

HttpClient::~HttpClient() = default;
HttpClient::HttpClient(HttpClient&&) noexcept = default;
HttpClient& HttpClient::operator=(HttpClient&&) noexcept = default;

CallRecord HttpClient::execute(const RequestPlan& plan) {
    CallRecord record;
    record.plan = plan;
    record.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();

    httplib::Headers headers;
    for (const auto& [name, value] : plan.headers) headers.emplace(name, value);
    if (config_.auth_header) headers.emplace(config_.auth_header->first,
                                             config_.auth_header->second);

    auto started = std::chrono::steady_clock::now();
    httplib::Result res;
    const std::string& target = plan.path_and_query;
    const std::string body = plan.body.value_or("");
    const char* content_type =
        plan.content_type.empty() ? "application/json" : plan.content_type.c_str();

    if (plan.verb == "GET") res = impl_->client.Get(target, headers);
    else if (plan.verb == "HEAD") res = impl_->client.Head(target, headers);
    else if (plan.verb == "DELETE") res = impl_->client.Delete(target, headers, body, content_type);
    else if (plan.verb == "POST") res = impl_->client.Post(target, headers, body, content_type);
    else if (plan.verb == "PUT") res = impl_->client.Put(target, headers, body, content_type);
    else if (plan.verb == "PATCH") res = impl_->client.Patch(target, headers, body, content_type);
    else {
        record.transport_error = "unsupported verb: " + plan.verb;
        return record;
    }

    record.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();

    if (!res) {
        record.transport_error = httplib::to_string(res.error());
        return record;
    }

    record.status = res->status;
    for (const auto& [name, value] : res->headers) record.response_headers.emplace_back(name, value);
    std::sort(record.response_headers.begin(), record.response_headers.end());
    if (res->body.size() > config_.body_cap_bytes) {
        record.response_body = res->body.substr(0, config_.body_cap_bytes);
        record.body_truncated = true;
    } else {
        record.response_body = res->body;
    }
    Json parsed = Json::parse(res->body, nullptr, false);
    if (!parsed.is_discarded()) record.response_json = std::move(parsed);
    return record;
}

}  // namespace quickrest
