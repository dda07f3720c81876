#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nanolog {

/// 1-based line/column into a source text.
struct SourcePosition {
    std::size_t line = 1;
    std::size_t column = 1;

    friend bool operator==(const SourcePosition&, const SourcePosition&) = default;
};

/// Every failure condition raised by the library. The service maps each one
/// onto exactly one wire-level error code.
enum class ErrorKind {
    ParseError,
    BareVariableHead,
    BudgetExhausted,
    InvalidVariable,
    NodeNotOpen,
    UnificationFailed,
    BadPath,
    EmptyHistory,
    ReplayMismatch,
    InvalidId,
    AlreadyExists,
    NotFound,
    BadIndex,
    Io,
};

inline constexpr std::array<ErrorKind, 14> all_error_kinds = {
    ErrorKind::ParseError,      ErrorKind::BareVariableHead, ErrorKind::BudgetExhausted,
    ErrorKind::InvalidVariable, ErrorKind::NodeNotOpen,      ErrorKind::UnificationFailed,
    ErrorKind::BadPath,         ErrorKind::EmptyHistory,     ErrorKind::ReplayMismatch,
    ErrorKind::InvalidId,       ErrorKind::AlreadyExists,    ErrorKind::NotFound,
    ErrorKind::BadIndex,        ErrorKind::Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<SourcePosition> position = std::nullopt)
        : std::runtime_error(message), kind_(kind), position_(position) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::optional<SourcePosition>& position() const noexcept { return position_; }

private:
    ErrorKind kind_;
    std::optional<SourcePosition> position_;
};

/// A substitution chase ran deeper than its budget; almost always a cyclic
/// binding left behind by the missing occurs check.
class BudgetExhausted : public Error {
public:
    explicit BudgetExhausted(std::size_t budget)
        : Error(ErrorKind::BudgetExhausted,
                "substitution budget of " + std::to_string(budget) +
                    " chase steps exhausted (cyclic binding?)"),
          budget_(budget) {}

    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

/// Syntax error. what() is "<line>:<col>: expected <expected>, found <found>".
class ParseError : public Error {
public:
    ParseError(SourcePosition pos, std::string expected, std::string found)
        : Error(ErrorKind::ParseError,
                std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": expected " +
                    expected + ", found " + found,
                pos),
          expected_(std::move(expected)),
          found_(std::move(found)) {}

    SourcePosition where() const { return *position(); }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::string expected_;
    std::string found_;
};

}  // namespace nanolog
