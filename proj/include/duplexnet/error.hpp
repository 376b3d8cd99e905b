#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace duplexnet {

enum class Errc {
  MissingAsset,
  BadPrice,
  ParseError,
  BadCount,
  NoOverlap,
  TooShort,
  ShapeError,
  BudgetTooLarge,
  DegenerateGraph,
  InsufficientHistory,
  NumericError,
  DegenerateLabels,
  IncomparableFits,
  UndefinedAUC,
  BenchmarkDegenerate,
  IoError,
  Usage,
};

// Coarse grouping used by the command line for exit codes.
enum class ErrorClass { Usage, Data, Numeric };

std::string_view to_string(Errc code);
ErrorClass classify(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace duplexnet
