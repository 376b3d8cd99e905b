#pragma once

#include "duplexnet/backtest.hpp"
#include "duplexnet/synth.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace duplexnet::cli {

/// Fully resolved settings for one subcommand. `values` holds the textual
/// value of every key the subcommand accepts, after merging flags (highest
/// priority), the config file and defaults.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;

  std::optional<std::filesystem::path> prices, opinions, tickers, graphs;
  std::filesystem::path out;
  NetworkOptions network;
  BacktestConfig backtest;
  std::optional<std::string> train_start, train_end, test_end;
  bool train_windows_given = false;
  int max_h = 20;
  std::optional<std::filesystem::path> dump_corr, dump_graphs, dump_features, dump_models;
  SynthSpec synth;
  int verbosity = 1;  // 0 quiet, 1 normal, 2 verbose

  /// Flat `key = value` text, keys sorted, preceded by command and version.
  std::string to_text() const;
};

/// Thrown by parse_and_validate for --help; carries the usage text.
struct HelpRequest {
  std::string text;
};

/// Throws Error(Usage) naming the offending flag or key.
RunConfig parse_and_validate(const std::vector<std::string>& args);

/// 0 success, 1 usage error, 2 data error, 3 numeric failure.
int main(int argc, char** argv);

std::string version();

}  // namespace duplexnet::cli
