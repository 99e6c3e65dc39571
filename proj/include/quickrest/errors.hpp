// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace quickrest {

/// One structural problem found while validating a parsed document.
/// `pointer` is a JSON pointer into the source document.
struct ModelViolation {
    std::string pointer;
    std::string message;
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MalformedJsonError : public Error {
  public:
    using Error::Error;
};

class UnsupportedVersionError : public Error {
  public:
    using Error::Error;
};

class InvalidModelError : public Error {
  public:
    explicit InvalidModelError(std::vector<ModelViolation> violations)
        : Error(render(violations)), violations_(std::move(violations)) {}

    const std::vector<ModelViolation>& violations() const { return violations_; }

  private:
    static std::string render(const std::vector<ModelViolation>& vs) {
        std::string out = "invalid OpenAPI model:";
        for (const auto& v : vs) {
            out += "\n  " + v.pointer + ": " + v.message;
        }
        return out;
    }

    std::vector<ModelViolation> violations_;
};

class UnknownReferenceError : public Error {
  public:
    explicit UnknownReferenceError(const std::string& name)
        : Error("unknown definition reference: " + name), name_(name) {}

    const std::string& name() const { return name_; }

  private:
    std::string name_;
};

class CyclicReferenceError : public Error {
  public:
    explicit CyclicReferenceError(std::vector<std::string> cycle)
        : Error(render(cycle)), cycle_(std::move(cycle)) {}

    const std::vector<std::string>& cycle() const { return cycle_; }

  private:
    static std::string render(const std::vector<std::string>& names) {
        std::string out = "cyclic definition reference:";
        for (const auto& n : names) out += " " + n;
        return out;
    }

    std::vector<std::string> cycle_;
};

class CollisionError : public Error {
  public:
    using Error::Error;
};

class UnknownSpecError : public Error {
  public:
    using Error::Error;
};

class UnsupportedTypeError : public Error {
  public:
    using Error::Error;
};

class GenerationExhaustedError : public Error {
  public:
    using Error::Error;
};

class MissingPathParameterError : public Error {
  public:
    explicit MissingPathParameterError(const std::string& param)
        : Error("path parameter missing from assignment: " + param), param_(param) {}

    const std::string& param() const { return param_; }

  private:
    std::string param_;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace quickrest
