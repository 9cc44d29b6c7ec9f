#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgprobe {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that does not follow its file format. Carries the 1-based line
// (0 when the location is a whole document).
class FormatError : public Error {
public:
    FormatError(std::string source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

// A single record violates a domain invariant. Lenient loaders collect these.
class RecordError : public Error {
public:
    RecordError(std::string record_id, std::size_t line, const std::string& what)
        : Error("record '" + record_id + "' (line " + std::to_string(line) + "): " + what),
          record_id_(std::move(record_id)),
          line_(line) {}

    const std::string& record_id() const noexcept { return record_id_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string record_id_;
    std::size_t line_;
};

}  // namespace kgprobe
