// SPDX-License-Identifier: Apache-2.0
#include "quickrest/fixture_service.hpp"

#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "httplib.h"

#include "quickrest/gen_core.hpp"

namespace quickrest {

namespace {

bool all_alnum(const std::string& s) {
    for (unsigned char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (!ok) return false;
    }
    return true;
}

// Valid object names: at least four lowercase letters. Narrow enough that a
// pure any-string generator essentially never produces one, while the
// alphanumeric generator still does.
bool valid_object_name(const std::string& s) {
    if (s.size() < 4) return false;
    for (char c : s)
        if (c < 'a' || c > 'z') return false;
    return true;
}

bool has_high_byte(const std::string& s) {
    for (unsigned char c : s)
        if (c >= 0x80) return true;
    return false;
}

std::string counter_uuid(uint64_t n) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "00000000-0000-4000-8000-%012llx",
                  static_cast<unsigned long long>(n));
    return buf;
}

std::string name_uuid(const std::string& name) {
    uint64_t h = Rng::hash_string(name);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%08llx-%04llx-4%03llx-8%03llx-%012llx",
                  static_cast<unsigned long long>(h >> 32),
                  static_cast<unsigned long long>((h >> 16) & 0xFFFF),
                  static_cast<unsigned long long>(h & 0xFFF),
                  static_cast<unsigned long long>((h >> 4) & 0xFFF),
                  static_cast<unsigned long long>(h & 0xFFFFFFFFFFFFull));
    return buf;
}

const Json& builtin_objects() {
    static const Json objects = Json::array({
        Json{{"name", "alpha"}, {"id", "9d2c6a31-52b8-4f6e-9d0a-3f6a1c2b4d5e"}},
        Json{{"name", "beta"}, {"id", "4e8b1a07-6c3d-4b2f-8a19-0d5e7f6c3b2a"}},
        Json{{"name", "gamma"}, {"id", "7a1f3c5e-9b2d-4c8a-b6e0-2d4f6a8c0e1b"}},
    });
    return objects;
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

struct FixtureService::Impl {
    httplib::Server server;
    std::thread serve_thread;
    int port = 0;

    std::mutex mu;
    std::map<std::string, Json> resources;
    std::set<std::string> deleted;
    uint64_t next_id = 1;

    void reset_state() {
        std::lock_guard<std::mutex> lock(mu);
        resources.clear();
        deleted.clear();
        next_id = 1;
    }

    void install_routes() {
        server.Get("/objects", [&](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("q")) {
                send_json(res, 400, Json{{"error", "missing required parameter q"}});
                return;
            }
            std::string q = req.get_param_value("q");
            if (!all_alnum(q)) {
                send_json(res, 500, Json{{"error", "internal error"}});
                return;
            }
            Json matches = Json::array();
            for (const auto& obj : builtin_objects()) {
                std::string name = obj["name"].get<std::string>();
                if (q.empty() || name.find(q) != std::string::npos) matches.push_back(obj);
            }
            send_json(res, 200, matches);
        });

        server.Get(R"(/items/(-?\d+))", [&](const httplib::Request& req, httplib::Response& res) {
            long long n;
            try {
                n = std::stoll(req.matches[1].str());
            } catch (...) {
                send_json(res, 404, Json{{"error", "invalid item reference"}});
                return;
            }
            if (n <= 0) {
                send_json(res, 500, Json{{"error", "internal error"}});
                return;
            }
            send_json(res, 200, Json{{"n", n}});
        });

        server.Post("/objects", [&](const httplib::Request& req, httplib::Response& res) {
            Json body = Json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object() || !body.contains("name") ||
                !body["name"].is_string()) {
                send_json(res, 400, Json{{"error", "object with a name is required"}});
                return;
            }
            std::string name = body["name"].get<std::string>();
            if (valid_object_name(name)) {
                send_json(res, 201, Json{{"name", name}, {"id", name_uuid(name)}});
                return;
            }
            if (has_high_byte(name)) {
                send_json(res, 500, Json{{"error", "internal error"}});
                return;
            }
            send_json(res, 400, Json{{"error", "invalid name"}});
        });

        server.Post("/resources", [&](const httplib::Request& req, httplib::Response& res) {
            Json body = Json::parse(req.body, nullptr, false);
            std::string name;
            if (body.is_object() && body.contains("name") && body["name"].is_string())
                name = body["name"].get<std::string>();
            std::lock_guard<std::mutex> lock(mu);
            std::string id = counter_uuid(next_id++);
            Json resource{{"id", id}, {"name", name}};
            resources[id] = resource;
            send_json(res, 201, resource);
        });

        server.Delete(R"(/resources/([^/]+))",
                      [&](const httplib::Request& req, httplib::Response& res) {
                          std::string id = req.matches[1].str();
                          std::lock_guard<std::mutex> lock(mu);
                          auto it = resources.find(id);
                          if (it == resources.end()) {
                              send_json(res, 404, Json{{"error", "resource not found"}});
                              return;
                          }
                          resources.erase(it);
                          deleted.insert(id);
                          res.status = 204;
                      });

        server.Put(R"(/resources/([^/]+))",
                   [&](const httplib::Request& req, httplib::Response& res) {
                       std::string id = req.matches[1].str();
                       std::lock_guard<std::mutex> lock(mu);
                       if (deleted.count(id)) {
                           // Seeded stateful bug: editing a deleted resource.
                           send_json(res, 500, Json{{"error", "internal error"}});
                           return;
                       }
                       auto it = resources.find(id);
                       if (it == resources.end()) {
                           send_json(res, 404, Json{{"error", "resource not found"}});
                           return;
                       }
                       Json body = Json::parse(req.body, nullptr, false);
                       if (body.is_object() && body.contains("name") && body["name"].is_string())
                           it->second["name"] = body["name"];
                       send_json(res, 200, it->second);
                   });

        server.Get("/teapot", [&](const httplib::Request&, httplib::Response& res) {
            send_json(res, 418, Json{{"message", "short and stout"}});
        });

        server.Get("/badbody", [&](const httplib::Request&, httplib::Response& res) {
            // Documented schema requires "name"; this body omits it.
            send_json(res, 200, Json{{"id", "bad-1"}});
        });

        server.Post("/reset", [&](const httplib::Request&, httplib::Response& res) {
            reset_state();
            res.status = 204;
        });

        server.Get("/swagger.json", [&](const httplib::Request&, httplib::Response& res) {
            OrderedJson doc = FixtureService::document_template();
            doc["host"] = "127.0.0.1:" + std::to_string(port);
            res.status = 200;
            res.set_content(doc.dump(2), "application/json");
        });
    }
};

FixtureService::FixtureService() : impl_(std::make_unique<Impl>()) {
    impl_->install_routes();
}

FixtureService::~FixtureService() { stop(); }

int FixtureService::start(int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port))
            throw ConfigError("cannot bind fixture service to port " + std::to_string(port));
        impl_->port = port;
    }
    impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void FixtureService::stop() {
    if (impl_->serve_thread.joinable()) {
        impl_->server.stop();
        impl_->serve_thread.join();
    }
}

void FixtureService::request_stop() { impl_->server.stop(); }

void FixtureService::wait() {
    if (impl_->serve_thread.joinable()) impl_->serve_thread.join();
}

int FixtureService::port() const { return impl_->port; }

std::string FixtureService::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void FixtureService::reset() { impl_->reset_state(); }

std::string FixtureService::document_text() const {
    OrderedJson doc = document_template();
    doc["host"] = "127.0.0.1:" + std::to_string(impl_->port);
    return doc.dump(2);
}

OrderedJson FixtureService::document_template() {
    return OrderedJson::parse(R"({
  "swagger": "2.0",
  "info": {"title": "fixture service", "version": "1.0"},
  "host": "",
  "basePath": "/",
  "schemes": ["http"],
  "paths": {
    "/objects": {
      "get": {
        "parameters": [
          {"name": "q", "in": "query", "required": true, "type": "string"}
        ],
        "responses": {
          "200": {"description": "matches", "schema": {"type": "array", "items": {"$ref": "#/definitions/ObjectInfo"}}},
          "400": {"description": "missing or invalid query"}
        }
      },
      "post": {
        "parameters": [
          {"name": "object", "in": "body", "required": true, "schema": {"$ref": "#/definitions/ObjectInfo"}}
        ],
        "responses": {
          "201": {"description": "created", "schema": {"$ref": "#/definitions/ObjectInfo"}},
          "400": {"description": "invalid object"}
        }
      }
    },
    "/items/{n}": {
      "get": {
        "parameters": [
          {"name": "n", "in": "path", "required": true, "type": "integer"}
        ],
        "responses": {
          "200": {"description": "item", "schema": {"$ref": "#/definitions/Item"}},
          "404": {"description": "invalid item reference"}
        }
      }
    },
    "/resources": {
      "post": {
        "parameters": [
          {"name": "resource", "in": "body", "required": false, "schema": {"$ref": "#/definitions/ResourceNew"}}
        ],
        "responses": {
          "201": {"description": "created", "schema": {"$ref": "#/definitions/Resource"}}
        }
      }
    },
    "/resources/{id}": {
      "delete": {
        "parameters": [
          {"name": "id", "in": "path", "required": true, "type": "string", "format": "uuid"}
        ],
        "responses": {
          "204": {"description": "deleted"},
          "404": {"description": "not found"}
        }
      },
      "put": {
        "parameters": [
          {"name": "id", "in": "path", "required": true, "type": "string", "format": "uuid"},
          {"name": "resource", "in": "body", "required": false, "schema": {"$ref": "#/definitions/ResourceNew"}}
        ],
        "responses": {
          "200": {"description": "updated", "schema": {"$ref": "#/definitions/Resource"}},
          "404": {"description": "not found"}
        }
      }
    },
    "/teapot": {
      "get": {
        "responses": {
          "200": {"description": "ok"}
        }
      }
    },
    "/badbody": {
      "get": {
        "responses": {
          "200": {"description": "ok", "schema": {"$ref": "#/definitions/BadBody"}}
        }
      }
    },
    "/reset": {
      "post": {
        "responses": {
          "204": {"description": "state cleared"}
        }
      }
    }
  },
  "definitions": {
    "ObjectInfo": {
      "type": "object",
      "required": ["name"],
      "properties": {
        "name": {"type": "string"},
        "id": {"type": "string", "format": "uuid"}
      }
    },
    "Item": {
      "type": "object",
      "required": ["n"],
      "properties": {
        "n": {"type": "integer"}
      }
    },
    "Resource": {
      "type": "object",
      "required": ["id"],
      "properties": {
        "id": {"type": "string", "format": "uuid"},
        "name": {"type": "string"}
      }
    },
    "ResourceNew": {
      "type": "object",
      "properties": {
        "name": {"type": "string"}
      }
    },
    "BadBody": {
      "type": "object",
      "required": ["name"],
      "properties": {
        "id": {"type": "string"},
        "name": {"type": "string"}
      }
    }
  }
})");
}

}  // namespace quickrest
