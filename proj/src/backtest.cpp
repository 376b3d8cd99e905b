#include "duplexnet/backtest.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/io.hpp"
#include "duplexnet/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace duplexnet {

namespace fs = std::filesystem;

DuplexTimeline build_timeline(const PanelSeries& returns, const PanelSeries& opinion,
                              const NetworkOptions& options) {
  if (returns.dates != opinion.dates || returns.tickers != opinion.tickers)
    throw Error(Errc::ShapeError, "panels must be aligned before building networks");
  const auto ws = windows(options.window, returns.length());
  std::vector<DuplexSnapshot> snapshots(ws.size());
  std::vector<std::string> labels(ws.size());
  parallel_for(ws.size(), options.threads, [&](std::size_t t) {
    const Window w = ws[t];
    auto fin = filter_graph(to_distance(correlation_matrix(returns, w, options.tau)), options.budget,
                            Layer::Financial);
    auto soc = filter_graph(to_distance(correlation_matrix(opinion, w, options.tau)), options.budget,
                            Layer::Social);
    snapshots[t] = make_duplex(std::move(fin), std::move(soc));
    labels[t] = returns.dates[std::size_t(w.end - 1)];
  });
  return make_timeline(std::move(snapshots), std::move(labels), options.threads);
}

std::vector<int> BacktestConfig::default_lags() {
  std::vector<int> lags(20);
  for (int h = 1; h <= 20; ++h) lags[std::size_t(h - 1)] = h;
  return lags;
}

BacktestConfig layer_swap(BacktestConfig config) {
  config.target = other_layer(config.target);
  return config;
}

namespace {

int max_lag(const BacktestConfig& config) {
  if (config.lags.empty()) throw Error(Errc::Usage, "no lags configured");
  for (int h : config.lags)
    if (h < 1) throw Error(Errc::Usage, "lags must be positive");
  return *std::max_element(config.lags.begin(), config.lags.end());
}

int first_prediction(const BacktestConfig& config) {
  if (config.train_windows < 1) throw Error(Errc::Usage, "train_windows must be positive");
  return config.first_prediction.value_or(config.train_windows + max_lag(config) - 1);
}

Eigen::MatrixXd feature_matrix(std::span<const PairFeatures> rows) {
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), kFeatureColumns);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(Index(r)) = feature_row(rows[r]);
  return m;
}

SplitMetrics evaluate_split(const ScoredPairs& model, const ScoredPairs& benchmark) {
  SplitMetrics m;
  m.n_pos = model.positives();
  m.n_neg = model.rows.size() - m.n_pos;
  if (m.n_pos == 0 || m.n_neg == 0) return m;
  m.auc = auc(model);
  m.auc_benchmark = auc(benchmark);
  if (m.auc_benchmark > 0.5) m.auc_star = auc_star(m.auc, m.auc_benchmark);
  return m;
}

}  // namespace

WindowRange training_span(const BacktestConfig& config, int t, int lag) {
  const int last = t - lag;
  if (config.train_policy == WindowPolicy::Rolling) return {last - config.train_windows + 1, last};
  return {first_prediction(config) - lag - config.train_windows + 1, last};
}

CellResult run_cell(const BacktestConfig& config, const DuplexTimeline& timeline, int t, int lag) {
  CellResult cell;
  cell.t = t;
  cell.lag = lag;
  cell.train = training_span(config, t, lag);
  if (t < 0 || t + lag >= timeline.size())
    throw Error(Errc::InsufficientHistory, "no realized graph at window " + std::to_string(t + lag));
  // Training labels live at t' + lag and must be observable at time t.
  if (cell.train.last + lag > t) throw std::logic_error("training span reaches past prediction time");

  try {
    if (cell.train.first < 0 || cell.train.last < cell.train.first)
      throw Error(Errc::InsufficientHistory, "training span starts before the first window");
    const TrainingSet data = build_training_set(timeline, config.target, lag, cell.train);
    cell.restricted = fit({ModelVariant::Restricted, config.target, lag}, data, config.fit);
    cell.full = fit({ModelVariant::Full, config.target, lag}, data, config.fit);
    cell.lr = likelihood_ratio(cell.full, cell.restricted);
    if (!cell.restricted.converged || !cell.full.converged) {
      cell.failed = true;
      cell.failure = "fit did not converge";
    }
  } catch (const Error& e) {
    cell.failed = true;
    cell.failure = e.what();
  }

  const LayerGraph& now = timeline.snapshots[std::size_t(t)].layer(config.target);
  const LayerGraph& future = timeline.snapshots[std::size_t(t + lag)].layer(config.target);
  cell.labels.assign(std::size_t(pair_count(timeline.n())), false);
  for (const auto& [u, v] : future.edges) cell.labels[std::size_t(pair_index(u, v, future.n))] = true;
  if (cell.failed) return cell;

  cell.scores = predict(cell.full, feature_matrix(timeline.features[std::size_t(t)]));
  const auto bench = benchmark_scores(now);
  const SplitViews model_views =
      split(score_pairs(std::span<const double>(cell.scores.data(), std::size_t(cell.scores.size())), future), now);
  const SplitViews bench_views = split(score_pairs(bench, future), now);
  cell.metrics[std::size_t(Split::FullGraph)] = evaluate_split(model_views.full, bench_views.full);
  cell.metrics[std::size_t(Split::NewEdges)] = evaluate_split(model_views.new_edges, bench_views.new_edges);
  cell.metrics[std::size_t(Split::Deletions)] = evaluate_split(model_views.deletions, bench_views.deletions);
  return cell;
}

std::map<std::pair<int, Split>, SplitAggregate> aggregate(std::span<const ReportRow> rows) {
  struct Columns {
    std::vector<double> auc, bench, star, lambda;
  };
  std::map<std::pair<int, Split>, Columns> columns;
  for (const auto& r : rows) {
    auto& c = columns[{r.lag, r.split}];
    c.auc.push_back(r.auc);
    c.bench.push_back(r.auc_benchmark);
    c.star.push_back(r.auc_star);
    c.lambda.push_back(r.lambda);
  }
  std::map<std::pair<int, Split>, SplitAggregate> out;
  for (const auto& [key, c] : columns) {
    SplitAggregate a;
    a.auc = summarize(c.auc);
    a.auc_benchmark = summarize(c.bench);
    a.auc_star = summarize(c.star);
    a.lambda = summarize(c.lambda);
    a.cells = c.lambda.size();
    std::size_t significant = 0;
    for (double l : c.lambda) {
      if (std::isnan(l))
        ++a.failed;
      else if (l > kLambdaThreshold)
        ++significant;
    }
    const std::size_t fitted = a.cells - a.failed;
    a.significant_fraction = fitted ? static_cast<double>(significant) / static_cast<double>(fitted)
                                    : std::numeric_limits<double>::quiet_NaN();
    out.emplace(key, a);
  }
  return out;
}

BacktestReport run(const BacktestConfig& config, const DuplexTimeline& timeline) {
  const int t0 = first_prediction(config);
  const int last_label = std::min(config.last_label_window.value_or(timeline.size() - 1), timeline.size() - 1);

  std::vector<std::pair<int, int>> plan;  // (lag, t)
  for (int lag : config.lags)
    for (int t = std::max(t0, 0); t + lag <= last_label; ++t) plan.emplace_back(lag, t);

  BacktestReport report;
  report.target = config.target;
  report.cells.resize(plan.size());
  parallel_for(plan.size(), config.threads, [&](std::size_t k) {
    report.cells[k] = run_cell(config, timeline, plan[k].second, plan[k].first);
  });

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& cell : report.cells) {
    for (Split s : {Split::FullGraph, Split::NewEdges, Split::Deletions}) {
      const auto& m = cell.metrics[std::size_t(s)];
      ReportRow row;
      row.lag = cell.lag;
      row.split = s;
      row.t = cell.t;
      row.window_end = timeline.labels[std::size_t(cell.t)];
      row.auc = cell.failed ? nan : m.auc;
      row.auc_benchmark = cell.failed ? nan : m.auc_benchmark;
      row.auc_star = cell.failed ? nan : m.auc_star;
      row.lambda = cell.failed ? nan : cell.lr.lambda;
      row.n_pos = m.n_pos;
      row.n_neg = m.n_neg;
      report.rows.push_back(std::move(row));
    }
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

BacktestReport run(const BacktestConfig& config, const PanelSeries& returns, const PanelSeries& opinion,
                   const NetworkOptions& network) {
  return run(config, build_timeline(returns, opinion, network));
}

ChurnTable churn_diagnostics(std::span<const LayerGraph> graphs, int max_h) {
  if (max_h < 1) throw Error(Errc::Usage, "max_h must be positive");
  if (static_cast<int>(graphs.size()) < max_h + 1)
    throw Error(Errc::InsufficientHistory, "churn needs at least " + std::to_string(max_h + 1) + " graphs");
  ChurnTable table;
  table.layer = graphs.front().layer;
  const int m = static_cast<int>(graphs.size());
  for (int h = 1; h <= max_h; ++h) {
    std::vector<double> fractions;
    for (int t = 0; t + h < m; ++t)
      fractions.push_back(new_edge_fraction(graphs[std::size_t(t)], graphs[std::size_t(t + h)]));
    table.new_edge_fraction.push_back(summarize(fractions));
  }
  table.jaccard.resize(m, m);
  for (int a = 0; a < m; ++a) {
    table.jaccard(a, a) = jaccard(graphs[std::size_t(a)], graphs[std::size_t(a)]);
    for (int b = a + 1; b < m; ++b)
      table.jaccard(a, b) = table.jaccard(b, a) = jaccard(graphs[std::size_t(a)], graphs[std::size_t(b)]);
  }
  return table;
}

void write_report_csv(const BacktestReport& report, const fs::path& path) {
  std::ostringstream out;
  out << "lag,split,window_end,auc,auc_benchmark,auc_star,lambda,n_pos,n_neg\n";
  for (const auto& r : report.rows)
    out << r.lag << ',' << to_string(r.split) << ',' << r.window_end << ',' << format_double(r.auc) << ','
        << format_double(r.auc_benchmark) << ',' << format_double(r.auc_star) << ','
        << format_double(r.lambda) << ',' << r.n_pos << ',' << r.n_neg << '\n';
  write_file_atomic(path, out.str());
}

std::vector<ReportRow> read_report_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<ReportRow> rows;
  auto split_of = [](const std::string& s) {
    if (s == "full") return Split::FullGraph;
    if (s == "new_edges") return Split::NewEdges;
    if (s == "deletions") return Split::Deletions;
    throw Error(Errc::ParseError, "unknown split '" + s + "'");
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(Errc::ParseError, path.string() + ": expected 9 fields");
    ReportRow r;
    r.lag = std::stoi(f[0]);
    r.split = split_of(f[1]);
    r.t = -1;
    r.window_end = f[2];
    r.auc = std::strtod(f[3].c_str(), nullptr);
    r.auc_benchmark = std::strtod(f[4].c_str(), nullptr);
    r.auc_star = std::strtod(f[5].c_str(), nullptr);
    r.lambda = std::strtod(f[6].c_str(), nullptr);
    r.n_pos = std::stoull(f[7]);
    r.n_neg = std::stoull(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

nlohmann::ordered_json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"standard_error", s.standard_error}, {"count", s.count}};
}

}  // namespace

void write_report_json(const BacktestReport& report, const fs::path& path) {
  nlohmann::ordered_json j;
  j["target"] = std::string(to_string(report.target));
  j["cells"] = report.cells.size();
  j["lambda_threshold"] = kLambdaThreshold;
  auto& rows = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& [key, a] : report.aggregates) {
    nlohmann::ordered_json row;
    row["lag"] = key.first;
    row["split"] = std::string(to_string(key.second));
    row["auc"] = summary_json(a.auc);
    row["auc_benchmark"] = summary_json(a.auc_benchmark);
    row["auc_star"] = summary_json(a.auc_star);
    row["lambda"] = summary_json(a.lambda);
    row["significant_fraction"] = a.significant_fraction;
    row["cells"] = a.cells;
    row["failed"] = a.failed;
    rows.push_back(std::move(row));
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_churn_csv(std::span<const ChurnTable> tables, const fs::path& path) {
  std::ostringstream out;
  out << "layer,h,mean,standard_error,count\n";
  for (const auto& t : tables)
    for (std::size_t h = 0; h < t.new_edge_fraction.size(); ++h) {
      const auto& s = t.new_edge_fraction[h];
      out << to_string(t.layer) << ',' << h + 1 << ',' << format_double(s.mean) << ','
          << format_double(s.standard_error) << ',' << s.count << '\n';
    }
  write_file_atomic(path, out.str());
}

void write_jaccard_csv(const ChurnTable& table, const fs::path& path) {
  std::ostringstream out;
  for (Index a = 0; a < table.jaccard.rows(); ++a) {
    for (Index b = 0; b < table.jaccard.cols(); ++b) {
      if (b) out << ',';
      out << format_double(table.jaccard(a, b));
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_model_json(const CellResult& cell, const fs::path& dir) {
  for (const FitResult* f : {&cell.restricted, &cell.full}) {
    if (f->coefficients.size() == 0) continue;
    const bool full = f->spec.variant == ModelVariant::Full;
    nlohmann::ordered_json j;
    j["variant"] = full ? "full" : "restricted";
    j["target"] = std::string(to_string(f->spec.target));
    j["lag_h"] = cell.lag;
    j["train_start"] = cell.train.first;
    j["train_end"] = cell.train.last;
    j["predict_at"] = cell.t;
    auto names = f->spec.regressors();
    nlohmann::ordered_json coef;
    for (std::size_t k = 0; k < names.size(); ++k) coef[names[k]] = f->coefficients(Index(k));
    j["coefficients"] = coef;
    j["loglik"] = f->loglik;
    j["lambda"] = cell.lr.lambda;
    j["converged"] = f->converged;
    j["ridge_fallback"] = f->ridge_fallback;
    j["iterations"] = f->iterations;
    const std::string name = std::string("model_") + (full ? "full" : "restricted") + "_h" +
                             std::to_string(cell.lag) + "_t" + std::to_string(cell.t) + ".json";
    write_file_atomic(dir / name, j.dump(2) + "\n");
  }
}

}  // namespace duplexnet
