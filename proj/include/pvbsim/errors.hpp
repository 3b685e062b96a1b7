#pragma once

#include <stdexcept>
#include <string>

namespace pvbsim {

// Iterative solver failed to converge; the message carries the inputs.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// DC bus energy fell below the guard floor ("DC bus collapse").
class BusCollapseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario text rejected; the message carries line/column diagnostics.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(column) + ": " + what),
          line(line), column(column) {}
    int line = 0;
    int column = 0;
};

}  // namespace pvbsim
