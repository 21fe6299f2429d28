#pragma once

#include <stdexcept>
#include <string>

namespace rer {

enum class ErrorKind {
    parameter,   // argument outside its admissible range
    domain,      // operation undefined for the given input (empty set, n too small, ...)
    parse,       // malformed graph or config file
    io,          // file could not be opened/read/written
    contract,    // user callback broke an invariant it promised to keep
    budget,      // corruption set larger than the allowed budget
    infeasible,  // no object satisfies the requested constraints
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& w) : Error(ErrorKind::parameter, w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct ParseError : Error {
    ParseError(std::size_t line, const std::string& w)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + w), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};
struct ContractViolation : Error {
    explicit ContractViolation(const std::string& w) : Error(ErrorKind::contract, w) {}
};
struct BudgetError : Error {
    explicit BudgetError(const std::string& w) : Error(ErrorKind::budget, w) {}
};
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& w) : Error(ErrorKind::infeasible, w) {}
};

}  // namespace rer
