#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdc {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed domain text; offset is the byte index of the problem.
class DomainParseError : public Error {
public:
    DomainParseError(std::string message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Duplicate names, contradictory flags, unknown relations.
class RegistryError : public Error {
public:
    using Error::Error;
};

// Fact payload does not match the registered shape of its relation.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A cycle inside a relation declared acyclic.
class CycleError : public Error {
public:
    CycleError(std::string relation, std::string domain, std::vector<std::string> cycle);

    const std::string& relation() const noexcept { return relation_; }
    const std::string& domain() const noexcept { return domain_; }
    // Closed walk v0 -> v1 -> ... -> v0; the first vertex is repeated at the end.
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    std::string relation_;
    std::string domain_;
    std::vector<std::string> cycle_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

// Syntax or semantic error in a query; offset is a byte index into the query text.
class QueryError : public Error {
public:
    QueryError(std::string message, std::size_t offset)
        : Error(std::move(message)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace cdc
