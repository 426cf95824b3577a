#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citesem {

// Input that violates an operation's domain (empty data, unknown names,
// degenerate distributions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input file. `line` is 1-based; 0 when the location is unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A metric whose denominator is zero, e.g. sensitivity with no positives.
class UndefinedMetricError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A document that cannot be featurized because none of its tokens are in
// the word-vector table.
class ExclusionError : public DomainError {
 public:
  explicit ExclusionError(std::string doc_id)
      : DomainError("document '" + doc_id + "' has no in-table words"),
        doc_id_(std::move(doc_id)) {}

  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

}  // namespace citesem
