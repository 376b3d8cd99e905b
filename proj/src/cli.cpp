#include "duplexnet/cli.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

namespace duplexnet::cli {

namespace fs = std::filesystem;

std::string version() { return DUPLEXNET_VERSION; }

namespace {

enum Command : unsigned {
  kIngest = 1u << 0,
  kGraphs = 1u << 1,
  kFeatures = 1u << 2,
  kBacktest = 1u << 3,
  kChurn = 1u << 4,
  kSynth = 1u << 5,
};

constexpr unsigned kNetwork = kGraphs | kFeatures | kBacktest | kChurn;
constexpr unsigned kPanels = kIngest | kNetwork;

struct Key {
  const char* name;
  const char* fallback;  // "" means unset
  unsigned commands;
  const char* help;
};

// Every configurable setting. Flags are `--name`; config file keys are `name`.
const Key kKeys[] = {
    {"prices", "", kPanels, "price CSV (date,ticker,close)"},
    {"opinions", "", kPanels, "opinion CSV (date,ticker,bullish_count)"},
    {"tickers", "", kPanels, "ticker list, one symbol per line"},
    {"graphs", "", kBacktest | kChurn | kFeatures, "directory of graph_<layer>_<start>_<end>.edgelist files"},
    {"out", "", kIngest | kNetwork | kSynth, "output directory"},
    {"window", "126", kNetwork | kSynth, "window width in trading days"},
    {"step", "5", kNetwork | kSynth, "window step in trading days"},
    {"tau", "b", kNetwork, "Kendall tie convention: a or b"},
    {"edge-budget", "quartile", kNetwork | kSynth, "edges kept per graph: quartile or count:K"},
    {"threads", "0", kNetwork, "worker threads (0 = all cores)"},
    {"target", "financial", kBacktest, "layer to predict: financial or social"},
    {"lags", "1..20", kBacktest, "prediction lags in weeks, e.g. 1..20 or 1,5,10"},
    {"policy", "rolling", kBacktest, "training window policy: rolling or expanding"},
    {"train-start", "", kBacktest, "first date of the initial training span (ISO-8601)"},
    {"train-end", "", kBacktest, "last date of the initial training span (ISO-8601)"},
    {"test-end", "", kBacktest, "last date whose graph may serve as a test label (ISO-8601)"},
    {"train-windows", "25", kBacktest, "network windows per training span"},
    {"max-h", "20", kChurn, "largest lag for churn diagnostics"},
    {"dump-corr", "", kGraphs | kBacktest, "write correlation matrices under --out/DIR"},
    {"dump-graphs", "", kFeatures | kBacktest, "write edge lists under --out/DIR"},
    {"dump-features", "", kBacktest, "write pair features under --out/DIR"},
    {"dump-models", "", kBacktest, "write fitted models under --out/DIR"},
    {"mode", "graphs", kSynth, "graphs or timeseries"},
    {"n", "100", kSynth, "number of assets"},
    {"windows", "250", kSynth, "number of network windows"},
    {"seed", "1", kSynth, "random seed"},
    {"persistence", "0.9", kSynth, "probability an edge survives one step"},
    {"closure-strength", "6", kSynth, "formation log-odds per unit triadic closure"},
    {"formation-base", "-3", kSynth, "formation log-odds at zero closure"},
    {"burn-in", "50", kSynth, "discarded initial steps"},
    {"social-lead", "0", kSynth, "windows by which the social layer leads"},
    {"social-noise", "0.3", kSynth, "fraction of social edges redrawn at random"},
    {"blocks", "5", kSynth, "latent factor blocks (timeseries mode)"},
    {"return-noise", "1", kSynth, "idiosyncratic to factor volatility ratio"},
    {"opinion-noise", "1", kSynth, "opinion noise relative to its factor"},
    {"start-date", "2012-01-02", kSynth, "first calendar date (timeseries mode)"},
};

const std::pair<const char*, Command> kCommands[] = {
    {"ingest", kIngest},     {"graphs", kGraphs}, {"features", kFeatures},
    {"backtest", kBacktest}, {"churn", kChurn},   {"synth", kSynth},
};

const char* describe(Command c) {
  switch (c) {
    case kIngest: return "load, align and re-emit the return and opinion panels";
    case kGraphs: return "build filtered financial and social graphs for every window";
    case kFeatures: return "compute persistence and triadic-closure features for every window";
    case kBacktest: return "rolling link-prediction backtest with likelihood-ratio tests";
    case kChurn: return "edge churn and Jaccard similarity diagnostics";
    case kSynth: return "generate synthetic duplex data";
  }
  return "";
}

[[noreturn]] void usage(const std::string& key, const std::string& message) {
  throw Error(Errc::Usage, "--" + key + ": " + message);
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Usage, "--config: cannot open " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::Usage, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, std::string>& values) : values_(values) {}

  const std::string& text(const std::string& key) const { return values_.at(key); }
  bool has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
  }

  std::optional<fs::path> path(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return fs::path(text(key));
  }

  long long integer(const std::string& key, long long lo) const {
    const auto& s = text(key);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) usage(key, "expected an integer, got '" + s + "'");
    if (v < lo) usage(key, "must be at least " + std::to_string(lo));
    return v;
  }

  double real(const std::string& key) const {
    const auto& s = text(key);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      usage(key, "expected a number, got '" + s + "'");
    return v;
  }

  std::optional<std::string> date(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!valid_iso_date(text(key))) usage(key, "expected an ISO-8601 date (YYYY-MM-DD), got '" + text(key) + "'");
    return text(key);
  }

  template <class F>
  auto convert(const std::string& key, F&& f) const {
    try {
      return f(text(key));
    } catch (const Error& e) {
      usage(key, e.what());
    }
  }

 private:
  const std::map<std::string, std::string>& values_;
};

std::vector<int> parse_lags(const std::string& text) {
  std::vector<int> lags;
  std::stringstream ss(text);
  std::string item;
  auto to_int = [&](const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 1)
      throw Error(Errc::Usage, "bad lag '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      lags.push_back(to_int(item));
    } else {
      const int a = to_int(item.substr(0, dots)), b = to_int(item.substr(dots + 2));
      if (b < a) throw Error(Errc::Usage, "empty lag range '" + item + "'");
      for (int h = a; h <= b; ++h) lags.push_back(h);
    }
  }
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  if (lags.empty()) throw Error(Errc::Usage, "no lags");
  return lags;
}

WindowPolicy parse_policy(const std::string& s) {
  if (s == "rolling") return WindowPolicy::Rolling;
  if (s == "expanding") return WindowPolicy::Expanding;
  throw Error(Errc::Usage, "expected rolling or expanding, got '" + s + "'");
}

// Dump directories live inside --out.
std::optional<fs::path> inside_out(const Resolver& r, const std::string& key, const fs::path& out) {
  auto p = r.path(key);
  if (!p) return std::nullopt;
  if (p->is_absolute()) usage(key, "must be a path relative to --out");
  for (const auto& part : *p)
    if (part == "..") usage(key, "must stay inside --out");
  return out / *p;
}

RunConfig resolve(const std::string& command, unsigned bit, std::map<std::string, std::string> values) {
  RunConfig cfg;
  cfg.command = command;
  cfg.values = values;
  const Resolver r(cfg.values);

  if (!r.has("out")) usage("out", "required");
  cfg.out = fs::path(r.text("out"));

  if (bit & kPanels) {
    cfg.prices = r.path("prices");
    cfg.opinions = r.path("opinions");
    cfg.tickers = r.path("tickers");
  }
  if (bit & (kBacktest | kChurn | kFeatures)) cfg.graphs = r.path("graphs");
  const bool panels_given = cfg.prices || cfg.opinions;
  if (bit & kIngest || ((bit & kNetwork) && !cfg.graphs)) {
    if (!cfg.prices) usage("prices", "required");
    if (!cfg.opinions) usage("opinions", "required");
  }
  if (cfg.graphs && panels_given) usage("graphs", "cannot be combined with --prices/--opinions");
  if ((bit & kPanels) && !cfg.tickers) usage("tickers", "required");

  if (bit & (kNetwork | kSynth)) {
    cfg.network.window.width = static_cast<int>(r.integer("window", 2));
    cfg.network.window.step = static_cast<int>(r.integer("step", 1));
    cfg.network.budget = r.convert("edge-budget", EdgeBudget::parse);
  }
  if (bit & kNetwork) {
    cfg.network.tau = r.convert("tau", parse_tau);
    cfg.network.threads = static_cast<unsigned>(r.integer("threads", 0));
  }
  if (bit & kBacktest) {
    auto& bt = cfg.backtest;
    bt.target = r.convert("target", [](const std::string& s) {
      const Layer l = parse_layer(s);
      if (l == Layer::Aggregated) throw Error(Errc::Usage, "target must be financial or social");
      return l;
    });
    bt.lags = r.convert("lags", parse_lags);
    bt.train_policy = r.convert("policy", parse_policy);
    bt.train_windows = static_cast<int>(r.integer("train-windows", 1));
    bt.threads = cfg.network.threads;
    cfg.train_start = r.date("train-start");
    cfg.train_end = r.date("train-end");
    cfg.test_end = r.date("test-end");
    if (cfg.train_start && !cfg.train_end) usage("train-end", "required when --train-start is given");
    if (cfg.train_start && cfg.train_end && !(*cfg.train_start < *cfg.train_end))
      usage("train-start", "must precede --train-end");
    if (cfg.train_end && cfg.test_end && !(*cfg.train_end < *cfg.test_end))
      usage("test-end", "must come after --train-end");
    if (cfg.graphs && (cfg.train_start || cfg.train_end || cfg.test_end))
      usage("graphs", "date flags need panel input");
    cfg.dump_features = inside_out(r, "dump-features", cfg.out);
    cfg.dump_models = inside_out(r, "dump-models", cfg.out);
  }
  if (bit & (kGraphs | kBacktest)) cfg.dump_corr = inside_out(r, "dump-corr", cfg.out);
  if (bit & (kFeatures | kBacktest)) cfg.dump_graphs = inside_out(r, "dump-graphs", cfg.out);
  if (bit & kChurn) cfg.max_h = static_cast<int>(r.integer("max-h", 1));

  if (bit & kSynth) {
    auto& s = cfg.synth;
    s.mode = r.convert("mode", [](const std::string& m) { return parse_synth_mode(m); });
    s.n = static_cast<int>(r.integer("n", 4));
    s.n_windows = static_cast<int>(r.integer("windows", 1));
    s.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
    s.persistence = r.real("persistence");
    s.closure_strength = r.real("closure-strength");
    s.formation_base = r.real("formation-base");
    s.burn_in = static_cast<int>(r.integer("burn-in", 0));
    s.social_lead = static_cast<int>(r.integer("social-lead", 0));
    s.social_noise = r.real("social-noise");
    s.n_blocks = static_cast<int>(r.integer("blocks", 1));
    s.return_noise = r.real("return-noise");
    s.opinion_noise = r.real("opinion-noise");
    s.budget = cfg.network.budget;
    s.window = cfg.network.window;
    s.start_date = r.convert("start-date", [](const std::string& d) {
      if (!valid_iso_date(d)) throw Error(Errc::Usage, "expected an ISO-8601 date");
      return d;
    });
    try {
      s.validate();
    } catch (const Error& e) {
      throw Error(Errc::Usage, e.what());
    }
  }
  return cfg;
}

}  // namespace

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "# duplexnet resolved configuration\n";
  out << "command = " << command << '\n';
  out << "version = " << version() << '\n';
  for (const auto& [k, v] : values) out << k << " = " << v << '\n';
  return out.str();
}

RunConfig parse_and_validate(const std::vector<std::string>& args) {
  CLI::App app{"Duplex correlation-network link prediction", "duplexnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  struct Sub {
    std::string name;
    Command bit;
    CLI::App* app;
    std::map<std::string, std::string> raw;
    std::string config;
    bool quiet = false;
    bool verbose = false;
  };
  std::vector<Sub> subs;
  subs.reserve(std::size(kCommands));
  for (const auto& [name, bit] : kCommands) {
    subs.push_back({name, bit, nullptr, {}, {}});
    auto& s = subs.back();
    s.app = app.add_subcommand(name, describe(bit));
    for (const auto& key : kKeys) {
      if (!(key.commands & bit)) continue;
      std::string help = key.help;
      if (*key.fallback) help += std::string(" [") + key.fallback + "]";
      s.app->add_option(std::string("--") + key.name, s.raw[key.name], help);
    }
    s.app->add_option("--config", s.config, "flat key = value file; flags override it");
    s.app->add_flag("--quiet", s.quiet, "errors only");
    s.app->add_flag("--verbose", s.verbose, "progress detail");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream out, err;
    app.exit(e, out, err);
    throw HelpRequest{out.str()};
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream out, err;
    app.exit(e, out, err);
    throw HelpRequest{out.str()};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequest{version() + "\n"};
  } catch (const CLI::ParseError& e) {
    throw Error(Errc::Usage, e.what());
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    std::map<std::string, std::string> values;
    for (const auto& key : kKeys)
      if ((key.commands & s.bit) && s.app->count(std::string("--") + key.name) > 0)
        values[key.name] = s.raw[key.name];
    if (!s.config.empty()) {
      for (const auto& [k, v] : read_config_file(s.config)) {
        if (k == "command" || k == "version") continue;
        const bool known = std::any_of(std::begin(kKeys), std::end(kKeys), [&](const Key& key) {
          return k == key.name && (key.commands & s.bit);
        });
        if (!known) throw Error(Errc::Usage, "--config: unknown key '" + k + "' for " + s.name);
        values.emplace(k, v);  // flags already present win
      }
    }
    for (const auto& key : kKeys)
      if (key.commands & s.bit) values.emplace(key.name, key.fallback);
    RunConfig cfg = resolve(s.name, s.bit, std::move(values));
    cfg.verbosity = s.quiet ? 0 : (s.verbose ? 2 : 1);
    if (cfg.command == "backtest") cfg.train_windows_given = s.app->count("--train-windows") > 0;
    return cfg;
  }
  throw Error(Errc::Usage, "no subcommand");
}

namespace {

class Log {
 public:
  explicit Log(int verbosity) : verbosity_(verbosity) {}
  void info(const std::string& m) const {
    if (verbosity_ >= 1) std::cerr << "duplexnet: " << m << '\n';
  }
  void debug(const std::string& m) const {
    if (verbosity_ >= 2) std::cerr << "duplexnet: " << m << '\n';
  }

 private:
  int verbosity_;
};

std::pair<PanelSeries, PanelSeries> load_panels(const RunConfig& cfg, const Log& log) {
  const auto tickers = load_tickers(*cfg.tickers);
  PanelSeries returns = load_price_panel(*cfg.prices, tickers);
  OpinionLoadStats stats;
  PanelSeries opinion = load_opinion_panel(*cfg.opinions, tickers, &stats, &returns.dates);
  if (stats.unknown_ticker_rows > 0)
    log.info("ignored " + std::to_string(stats.unknown_ticker_rows) + " opinion rows for unlisted tickers");
  auto aligned = align(returns, opinion);
  log.info("panels: " + std::to_string(aligned.first.assets()) + " assets x " +
           std::to_string(aligned.first.length()) + " days");
  return aligned;
}

DuplexTimeline load_graph_dir(const fs::path& dir, const std::vector<std::string>& tickers) {
  if (!fs::is_directory(dir)) throw Error(Errc::IoError, "not a directory: " + dir.string());
  static const std::regex pattern(R"(graph_(financial|social)_(\d+)_(\d+)\.edgelist)");
  std::map<std::pair<int, int>, std::map<Layer, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    found[{std::stoi(m[2]), std::stoi(m[3])}][parse_layer(m[1].str())] = entry.path();
  }
  if (found.empty()) throw Error(Errc::IoError, "no edge lists in " + dir.string());
  std::vector<DuplexSnapshot> snapshots;
  std::vector<std::string> labels;
  for (const auto& [w, layers] : found) {
    const Window window{w.first, w.second};
    if (layers.size() != 2)
      throw Error(Errc::MissingAsset, "window " + std::to_string(w.first) + "_" + std::to_string(w.second) +
                                          " lacks one layer in " + dir.string());
    snapshots.push_back(make_duplex(read_edgelist(layers.at(Layer::Financial), tickers, Layer::Financial, window),
                                    read_edgelist(layers.at(Layer::Social), tickers, Layer::Social, window)));
    labels.push_back(std::to_string(w.second));
  }
  return make_timeline(std::move(snapshots), std::move(labels));
}

struct Inputs {
  std::vector<std::string> tickers;
  std::optional<std::pair<PanelSeries, PanelSeries>> panels;
  DuplexTimeline timeline;
};

Inputs load_network(const RunConfig& cfg, const Log& log) {
  Inputs in;
  if (cfg.graphs) {
    in.tickers = load_tickers(*cfg.tickers);
    in.timeline = load_graph_dir(*cfg.graphs, in.tickers);
  } else {
    in.panels = load_panels(cfg, log);
    in.tickers = in.panels->first.tickers;
    in.timeline = build_timeline(in.panels->first, in.panels->second, cfg.network);
  }
  log.info("networks: " + std::to_string(in.timeline.size()) + " windows");
  return in;
}

void dump_upstream(const RunConfig& cfg, const Inputs& in) {
  if (cfg.dump_corr && in.panels) {
    for (const Window w : windows(cfg.network.window, in.panels->first.length())) {
      const std::string name = "corr_" + std::to_string(w.start) + "_" + std::to_string(w.end) + ".csv";
      write_matrix_csv(correlation_matrix(in.panels->first, w, cfg.network.tau, cfg.network.threads),
                       *cfg.dump_corr / "financial" / name);
      write_matrix_csv(correlation_matrix(in.panels->second, w, cfg.network.tau, cfg.network.threads),
                       *cfg.dump_corr / "social" / name);
    }
  }
  if (cfg.dump_graphs) {
    for (const auto& s : in.timeline.snapshots) {
      write_edgelist(s.financial, in.tickers, *cfg.dump_graphs / edgelist_filename(s.financial));
      write_edgelist(s.social, in.tickers, *cfg.dump_graphs / edgelist_filename(s.social));
    }
  }
  if (cfg.dump_features) {
    for (std::size_t t = 0; t < in.timeline.features.size(); ++t) {
      const Window w = in.timeline.snapshots[t].financial.window;
      write_features_csv(in.timeline.features[t], *cfg.dump_features / ("features_" + std::to_string(w.start) +
                                                                         "_" + std::to_string(w.end) + ".csv"));
    }
  }
}

// Maps calendar flags onto window indices using each window's last date.
void resolve_dates(RunConfig& cfg, const DuplexTimeline& tl) {
  auto& bt = cfg.backtest;
  const auto& labels = tl.labels;
  auto last_at_or_before = [&](const std::string& date) {
    int idx = -1;
    for (int t = 0; t < tl.size(); ++t)
      if (labels[std::size_t(t)] <= date) idx = t;
    return idx;
  };
  if (cfg.train_end) {
    const int t0 = last_at_or_before(*cfg.train_end);
    if (t0 < 0) throw Error(Errc::InsufficientHistory, "no network window ends by " + *cfg.train_end);
    bt.first_prediction = t0;
    if (cfg.train_start && !cfg.train_windows_given) {
      int count = 0;
      for (int t = 0; t <= t0; ++t)
        if (labels[std::size_t(t)] >= *cfg.train_start) ++count;
      if (count == 0) throw Error(Errc::InsufficientHistory, "no network window inside the training dates");
      bt.train_windows = count;
    }
  }
  if (cfg.test_end) bt.last_label_window = last_at_or_before(*cfg.test_end);
}

void write_config(const RunConfig& cfg) { write_file_atomic(cfg.out / "config.txt", cfg.to_text()); }

void run_ingest(const RunConfig& cfg, const Log& log) {
  const auto [returns, opinion] = load_panels(cfg, log);
  save_panel(returns, cfg.out / "returns.csv");
  save_panel(opinion, cfg.out / "opinions.csv");
}

void run_graphs(RunConfig cfg, const Log& log) {
  cfg.dump_graphs = cfg.out;
  const Inputs in = load_network(cfg, log);
  dump_upstream(cfg, in);
}

void run_features(RunConfig cfg, const Log& log) {
  cfg.dump_features = cfg.out;
  const Inputs in = load_network(cfg, log);
  dump_upstream(cfg, in);
}

std::vector<ChurnTable> churn_both(const DuplexTimeline& tl, int max_h) {
  std::vector<LayerGraph> fin, soc;
  for (const auto& s : tl.snapshots) {
    fin.push_back(s.financial);
    soc.push_back(s.social);
  }
  return {churn_diagnostics(fin, max_h), churn_diagnostics(soc, max_h)};
}

void run_churn(const RunConfig& cfg, const Log& log) {
  const Inputs in = load_network(cfg, log);
  const auto tables = churn_both(in.timeline, cfg.max_h);
  write_churn_csv(tables, cfg.out / "churn.csv");
  write_jaccard_csv(tables[0], cfg.out / "jaccard.csv");
  write_jaccard_csv(tables[1], cfg.out / "jaccard_social.csv");
}

void run_backtest(RunConfig cfg, const Log& log) {
  const Inputs in = load_network(cfg, log);
  dump_upstream(cfg, in);
  resolve_dates(cfg, in.timeline);
  const BacktestReport report = run(cfg.backtest, in.timeline);
  std::size_t failed = 0;
  for (const auto& c : report.cells) failed += c.failed;
  log.info("backtest: " + std::to_string(report.cells.size()) + " cells, " + std::to_string(failed) + " failed");
  for (const auto& c : report.cells)
    if (c.failed) log.debug("cell t=" + std::to_string(c.t) + " h=" + std::to_string(c.lag) + ": " + c.failure);
  write_report_csv(report, cfg.out / "report.csv");
  write_report_json(report, cfg.out / "report.json");
  const int max_h = *std::max_element(cfg.backtest.lags.begin(), cfg.backtest.lags.end());
  if (in.timeline.size() > max_h) {
    const auto tables = churn_both(in.timeline, max_h);
    write_churn_csv(tables, cfg.out / "churn.csv");
    write_jaccard_csv(tables[0], cfg.out / "jaccard.csv");
  }
  if (cfg.dump_models)
    for (const auto& c : report.cells) write_model_json(c, *cfg.dump_models);
}

void write_long_csv(const fs::path& path, const char* column, const std::vector<std::string>& dates,
                    const std::vector<std::string>& tickers, const RowMatrix& values) {
  std::ostringstream out;
  out << "date,ticker," << column << '\n';
  for (std::size_t k = 0; k < dates.size(); ++k)
    for (std::size_t i = 0; i < tickers.size(); ++i)
      out << dates[k] << ',' << tickers[i] << ',' << format_double(values(Index(i), Index(k))) << '\n';
  write_file_atomic(path, out.str());
}

void run_synth(const RunConfig& cfg, const Log& log) {
  const auto& spec = cfg.synth;
  if (spec.mode == SynthMode::TimeSeries) {
    const auto [returns, opinion] = generate_timeseries(spec);
    const auto first = weekday_calendar(spec.start_date, 1).front();
    const auto [dates, closes] = prices_from_returns(returns, first);
    write_long_csv(cfg.out / "prices.csv", "close", dates, returns.tickers, closes);
    write_long_csv(cfg.out / "opinions.csv", "bullish_count", opinion.dates, opinion.tickers, opinion.values);
    std::ostringstream t;
    for (const auto& s : returns.tickers) t << s << '\n';
    write_file_atomic(cfg.out / "tickers.txt", t.str());
    log.info("synth: " + std::to_string(spec.n) + " assets x " + std::to_string(returns.length()) + " days");
  } else {
    const auto snapshots = generate_graph_dynamics(spec);
    std::vector<std::string> tickers;
    std::ostringstream t;
    for (int i = 0; i < spec.n; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "A%03d", i);
      tickers.emplace_back(buf);
      t << buf << '\n';
    }
    write_file_atomic(cfg.out / "tickers.txt", t.str());
    for (const auto& s : snapshots) {
      write_edgelist(s.financial, tickers, cfg.out / edgelist_filename(s.financial));
      write_edgelist(s.social, tickers, cfg.out / edgelist_filename(s.social));
    }
    log.info("synth: " + std::to_string(snapshots.size()) + " duplex snapshots");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  RunConfig cfg;
  try {
    cfg = parse_and_validate(args);
  } catch (const HelpRequest& h) {
    std::cout << h.text;
    return 0;
  } catch (const Error& e) {
    std::cerr << "duplexnet: " << e.what() << "\n(see duplexnet <command> --help)\n";
    return 1;
  }

  const Log log(cfg.verbosity);
  try {
    fs::create_directories(cfg.out);
    if (cfg.command == "ingest") run_ingest(cfg, log);
    else if (cfg.command == "graphs") run_graphs(cfg, log);
    else if (cfg.command == "features") run_features(cfg, log);
    else if (cfg.command == "backtest") run_backtest(cfg, log);
    else if (cfg.command == "churn") run_churn(cfg, log);
    else if (cfg.command == "synth") run_synth(cfg, log);
    write_config(cfg);
  } catch (const Error& e) {
    std::cerr << "duplexnet: " << e.what() << '\n';
    switch (classify(e.code())) {
      case ErrorClass::Usage: return 1;
      case ErrorClass::Data: return 2;
      case ErrorClass::Numeric: return 3;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "duplexnet: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace duplexnet::cli
