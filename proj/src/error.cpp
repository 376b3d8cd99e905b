#include "duplexnet/error.hpp"
#include "duplexnet/types.hpp"

namespace duplexnet {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MissingAsset: return "MissingAsset";
    case Errc::BadPrice: return "BadPrice";
    case Errc::ParseError: return "ParseError";
    case Errc::BadCount: return "BadCount";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::TooShort: return "TooShort";
    case Errc::ShapeError: return "ShapeError";
    case Errc::BudgetTooLarge: return "BudgetTooLarge";
    case Errc::DegenerateGraph: return "DegenerateGraph";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::NumericError: return "NumericError";
    case Errc::DegenerateLabels: return "DegenerateLabels";
    case Errc::IncomparableFits: return "IncomparableFits";
    case Errc::UndefinedAUC: return "UndefinedAUC";
    case Errc::BenchmarkDegenerate: return "BenchmarkDegenerate";
    case Errc::IoError: return "IoError";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

ErrorClass classify(Errc code) {
  switch (code) {
    case Errc::Usage:
    case Errc::BudgetTooLarge:
      return ErrorClass::Usage;
    case Errc::NumericError:
    case Errc::DegenerateLabels:
    case Errc::IncomparableFits:
    case Errc::UndefinedAUC:
    case Errc::BenchmarkDegenerate:
      return ErrorClass::Numeric;
    default:
      return ErrorClass::Data;
  }
}

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Financial: return "financial";
    case Layer::Social: return "social";
    case Layer::Aggregated: return "aggregated";
  }
  return "unknown";
}

Layer parse_layer(std::string_view text) {
  if (text == "financial") return Layer::Financial;
  if (text == "social") return Layer::Social;
  if (text == "aggregated") return Layer::Aggregated;
  throw Error(Errc::Usage, "unknown layer '" + std::string(text) + "'");
}

}  // namespace duplexnet
