#pragma once

#include "duplexnet/correlate.hpp"
#include "duplexnet/evaluate.hpp"
#include "duplexnet/model.hpp"
#include "duplexnet/multiplex.hpp"
#include "duplexnet/netbuild.hpp"
#include "duplexnet/panel.hpp"

#include <array>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace duplexnet {

/// Network construction settings shared by every window.
struct NetworkOptions {
  WindowSpec window;
  EdgeBudget budget;
  TauVariant tau = TauVariant::B;
  unsigned threads = 1;
};

/// Correlation -> distance -> filtered graph for both layers in every window.
/// Panels must be aligned. Window labels are the last date in each window.
DuplexTimeline build_timeline(const PanelSeries& returns, const PanelSeries& opinion,
                              const NetworkOptions& options);

/// All time indices below are network-window indices. One lag unit is one
/// window step.
struct BacktestConfig {
  Layer target = Layer::Financial;
  std::vector<int> lags = default_lags();
  WindowPolicy train_policy = WindowPolicy::Rolling;
  int train_windows = 25;
  // First prediction time; default is train_windows + max(lags) - 1.
  std::optional<int> first_prediction;
  // Last window whose realized graph may be used as a test label.
  std::optional<int> last_label_window;
  FitOptions fit;
  unsigned threads = 1;

  static std::vector<int> default_lags();
};

BacktestConfig layer_swap(BacktestConfig config);

struct SplitMetrics {
  double auc = std::numeric_limits<double>::quiet_NaN();
  double auc_benchmark = std::numeric_limits<double>::quiet_NaN();
  double auc_star = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

/// Everything computed for one (prediction time, lag) cell.
struct CellResult {
  int t = 0;
  int lag = 0;
  WindowRange train;
  bool failed = false;
  std::string failure;
  FitResult restricted;
  FitResult full;
  LikelihoodRatio lr;
  Eigen::VectorXd scores;     // full-model probabilities for all pairs at t
  std::vector<bool> labels;   // target-layer presence at t + lag
  std::array<SplitMetrics, 3> metrics;  // indexed by Split
};

/// Training span used for prediction at t with lag h; labels in the span
/// never extend past t.
WindowRange training_span(const BacktestConfig& config, int t, int lag);

CellResult run_cell(const BacktestConfig& config, const DuplexTimeline& timeline, int t, int lag);

struct ReportRow {
  int lag = 0;
  Split split = Split::FullGraph;
  int t = 0;
  std::string window_end;
  double auc = 0.0;
  double auc_benchmark = 0.0;
  double auc_star = 0.0;
  double lambda = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

struct SplitAggregate {
  Summary auc;
  Summary auc_benchmark;
  Summary auc_star;
  Summary lambda;
  double significant_fraction = 0.0;
  std::size_t cells = 0;
  std::size_t failed = 0;
};

struct BacktestReport {
  Layer target = Layer::Financial;
  std::vector<ReportRow> rows;
  std::vector<CellResult> cells;  // fixed (lag, t) order
  std::map<std::pair<int, Split>, SplitAggregate> aggregates;
};

/// Sweeps prediction times and lags. Failed fits mark their cell rather than
/// aborting.
BacktestReport run(const BacktestConfig& config, const DuplexTimeline& timeline);
BacktestReport run(const BacktestConfig& config, const PanelSeries& returns,
                   const PanelSeries& opinion, const NetworkOptions& network);

/// Aggregates recomputed from rows alone (cell bookkeeping from `cells`).
std::map<std::pair<int, Split>, SplitAggregate> aggregate(std::span<const ReportRow> rows);

struct ChurnTable {
  Layer layer = Layer::Financial;
  std::vector<Summary> new_edge_fraction;  // index h - 1
  Eigen::MatrixXd jaccard;                 // all window pairs
};

ChurnTable churn_diagnostics(std::span<const LayerGraph> graphs, int max_h);

void write_report_csv(const BacktestReport& report, const std::filesystem::path& path);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);
void write_report_json(const BacktestReport& report, const std::filesystem::path& path);
void write_churn_csv(std::span<const ChurnTable> tables, const std::filesystem::path& path);
void write_jaccard_csv(const ChurnTable& table, const std::filesystem::path& path);
void write_model_json(const CellResult& cell, const std::filesystem::path& dir);

}  // namespace duplexnet
