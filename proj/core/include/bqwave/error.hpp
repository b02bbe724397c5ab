#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bqwave {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failure; carries the residual history for the report.
class SolverError : public Error {
 public:
  SolverError(std::string stage, const std::string& what, std::vector<double> history = {})
      : Error(stage + ": " + what), stage_(std::move(stage)), history_(std::move(history)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::string stage_;
  std::vector<double> history_;
};

}  // namespace bqwave
