// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "quickrest/oas_model.hpp"

namespace quickrest {

/// In-process HTTP service with deliberately seeded bugs, used by the
/// integration and acceptance suites. Ships its own OpenAPI 2.0 document at
/// GET /swagger.json and a POST /reset state hook.
///
/// Seeded behaviour:
///   GET  /objects?q=...       500 when q has a byte outside [a-zA-Z0-9]
///   GET  /items/{n}           500 when n <= 0
///   POST /objects             201/400/500 depending on the body's name
///   POST/DELETE/PUT /resources  edit-after-delete returns 500
///   GET  /teapot              418, which the document omits
///   GET  /badbody             200 with a body missing a required field
class FixtureService {
  public:
    FixtureService();
    ~FixtureService();
    FixtureService(const FixtureService&) = delete;
    FixtureService& operator=(const FixtureService&) = delete;

    /// Bind and serve on a background thread. port 0 picks a free port.
    /// Returns the bound port.
    int start(int port = 0);
    void stop();

    /// Ask the listener to exit without joining (safe from signal handlers).
    void request_stop();
    /// Block until the listener exits.
    void wait();

    int port() const;
    std::string base_url() const;       // http://127.0.0.1:<port>
    std::string document_text() const;  // OpenAPI document with the live host
    void reset();

    /// The document with an unset host, for tests that patch their own.
    static OrderedJson document_template();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace quickrest
