// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rsr {

/// Malformed or inconsistent input data. `location()` names where it was found
/// (e.g. "scores.jsonl:17" or "record p3/teacher/2"); it may be empty for
/// errors that concern a whole input.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& message, std::string location = {})
        : std::runtime_error(location.empty() ? message : location + ": " + message),
          message_(message),
          location_(std::move(location)) {}

    const std::string& message() const noexcept { return message_; }
    const std::string& location() const noexcept { return location_; }

private:
    std::string message_;
    std::string location_;
};

/// A metric's preconditions do not hold for the given trajectory or dataset.
class MetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace rsr
