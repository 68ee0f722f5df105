#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace harmkit {

enum class Errc {
    Syntax,
    DuplicateHost,
    UnknownTarget,
    UnknownHost,
    UnresolvedLabel,
    DuplicateCve,
    InconsistentHostSet,
    NoPath,
    Stuck,
    UnexploitableHost,
    ExploitNotFound,
    NotExecutable,
    UnresolvedStep,
    EmptyScan,
    Invariant,
    Io,
};

const char* errc_name(Errc code);

class HarmkitError : public std::runtime_error {
public:
    HarmkitError(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Input-file error with a 1-based line/column position (0 = unknown).
class ParseError : public HarmkitError {
public:
    ParseError(Errc code, const std::string& message, int line = 0, int column = 0)
        : HarmkitError(code, position_prefix(line, column) + message),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string position_prefix(int line, int column);

    int line_;
    int column_;
};

class NoPathError : public HarmkitError {
public:
    explicit NoPathError(const std::string& message)
        : HarmkitError(Errc::NoPath, message) {}
};

// Greedy walk ran out of moves before reaching the target; carries the
// deepest prefix that was explored.
class StuckError : public HarmkitError {
public:
    StuckError(const std::string& message, std::vector<std::string> partial_path)
        : HarmkitError(Errc::Stuck, message), partial_path_(std::move(partial_path)) {}

    const std::vector<std::string>& partial_path() const noexcept { return partial_path_; }

private:
    std::vector<std::string> partial_path_;
};

}  // namespace harmkit
