// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>

#include "httplib.h"

#include "quickrest/oas_model.hpp"

namespace quickrest {

std::string load_document_text(const std::string& source) {
    bool is_http = source.rfind("http://", 0) == 0;
    bool is_https = source.rfind("https://", 0) == 0;
    if (is_http || is_https) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (is_https) throw ConfigError("https document sources require a TLS-enabled build");
#endif
        auto scheme_end = source.find("://") + 3;
        auto path_start = source.find('/', scheme_end);
        std::string origin = source.substr(0, path_start == std::string::npos ? source.size()
                                                                              : path_start);
        std::string path = path_start == std::string::npos ? "/" : source.substr(path_start);
        httplib::Client client(origin);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        auto res = client.Get(path);
        if (!res)
            throw ConfigError("failed to fetch document from " + source + ": " +
                              httplib::to_string(res.error()));
        if (res->status != 200)
            throw ConfigError("failed to fetch document from " + source + ": HTTP " +
                              std::to_string(res->status));
        return res->body;
    }

    std::ifstream in(source, std::ios::binary);
    if (!in) throw ConfigError("cannot read document file: " + source);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace quickrest
