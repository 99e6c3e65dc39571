// SPDX-License-Identifier: Apache-2.0
#include <csignal>
#include <iostream>

#include "CLI11.hpp"

#include "quickrest/fixture_service.hpp"

namespace {
quickrest::FixtureService* g_service = nullptr;

void handle_signal(int) {
    if (g_service) g_service->request_stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixture REST service with seeded bugs, for quickrest testing"};
    int port = 8080;
    app.add_option("--port", port, "port to listen on (0 picks a free port)")
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    quickrest::FixtureService service;
    g_service = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    int bound = service.start(port);
    std::cout << "fixture service listening on http://127.0.0.1:" << bound << "\n"
              << "document at http://127.0.0.1:" << bound << "/swagger.json\n";
    service.wait();
    return 0;
}
