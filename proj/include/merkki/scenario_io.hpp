#pragma once

// Plain-text scenario files. See scenarios/README.md for the schema; the
// bundled scenarios/reference.scn is the normative example.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "merkki/scenario.hpp"

namespace merkki {

class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ScenarioValidationError : public std::runtime_error {
public:
    explicit ScenarioValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Syntax only; throws ScenarioParseError.
Scenario parse_scenario(std::string_view text);

// parse_scenario followed by validate_scenario; throws ScenarioValidationError
// when any invariant is violated.
Scenario load_scenario(std::string_view text);

std::string read_file(const std::string& path);

}  // namespace merkki
