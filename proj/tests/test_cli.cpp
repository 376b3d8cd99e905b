#include "duplexnet/cli.hpp"

#include "check_errc.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace duplexnet;
using namespace duplexnet::testing;

namespace {

int run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "duplexnet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(int(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("defaults follow the method") {
  auto cfg = cli::parse_and_validate({"backtest", "--prices", "p.csv", "--opinions", "o.csv", "--tickers", "t.txt",
                                      "--out", "x"});
  CHECK(cfg.command == "backtest");
  CHECK(cfg.network.window.width == 126);
  CHECK(cfg.network.window.step == 5);
  CHECK(cfg.network.budget.kind == EdgeBudget::Kind::Quartile);
  CHECK(cfg.network.tau == TauVariant::B);
  CHECK(cfg.backtest.lags.size() == 20);
  CHECK(cfg.backtest.lags.back() == 20);
  CHECK(cfg.backtest.target == Layer::Financial);
  CHECK(cfg.backtest.train_windows == 25);
  CHECK(cfg.backtest.train_policy == WindowPolicy::Rolling);
}

TEST_CASE("flags") {
  auto cfg = cli::parse_and_validate({"backtest", "--prices", "p", "--opinions", "o", "--tickers", "t", "--out", "x",
                                      "--window", "126", "--step", "5", "--lags", "1,5,10..12", "--target", "social",
                                      "--policy", "expanding", "--edge-budget", "count:25", "--tau", "a"});
  CHECK(cfg.network.window.width == 126);
  CHECK(cfg.network.window.step == 5);
  CHECK(cfg.network.window.policy == WindowPolicy::Rolling);
  CHECK(cfg.backtest.lags == std::vector<int>{1, 5, 10, 11, 12});
  CHECK(cfg.backtest.target == Layer::Social);
  CHECK(cfg.backtest.train_policy == WindowPolicy::Expanding);
  CHECK(cfg.network.budget.edges_for(100) == 25);
  CHECK(cfg.network.tau == TauVariant::A);
}

TEST_CASE("usage errors name the flag") {
  auto expect = [](std::vector<std::string> args, const std::string& flag) {
    try {
      cli::parse_and_validate(args);
      FAIL("accepted: " << flag);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Usage);
      CHECK_MESSAGE(std::string(e.what()).find(flag) != std::string::npos, e.what());
    }
  };
  const std::vector<std::string> base{"backtest", "--prices", "p", "--opinions", "o", "--tickers", "t", "--out", "x"};
  auto with = [&](std::vector<std::string> extra) {
    auto v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  expect(with({"--train-end", "2014-09-10", "--test-end", "2014-01-01"}), "--test-end");
  expect(with({"--train-end", "2014-13-10"}), "--train-end");
  expect(with({"--window", "abc"}), "--window");
  expect(with({"--window", "1"}), "--window");
  expect(with({"--lags", "0"}), "--lags");
  expect(with({"--target", "aggregated"}), "--target");
  expect(with({"--policy", "sideways"}), "--policy");
  expect(with({"--dump-models", "../elsewhere"}), "--dump-models");
  expect(with({"--dump-models", "/tmp/elsewhere"}), "--dump-models");
  expect(with({"--bogus", "1"}), "--bogus");
  expect({"backtest", "--prices", "p", "--opinions", "o", "--tickers", "t"}, "--out");
  expect({"synth", "--out", "x", "--persistence", "2"}, "persistence");
  CHECK_ERRC(cli::parse_and_validate({}), Errc::Usage);
  CHECK_ERRC(cli::parse_and_validate({"frobnicate"}), Errc::Usage);
}

TEST_CASE("config file and precedence") {
  auto dir = scratch_dir("cli_config");
  write_text(dir / "run.cfg",
             "# comment\ncommand = backtest\nversion = 0.0.0\nprices = p.csv\nopinions = o.csv\ntickers = t.txt\n"
             "out = result\nwindow = 60\nlags = 2..4\n");
  SUBCASE("file values used") {
    auto cfg = cli::parse_and_validate({"backtest", "--config", (dir / "run.cfg").string()});
    CHECK(cfg.network.window.width == 60);
    CHECK(cfg.backtest.lags == std::vector<int>{2, 3, 4});
    CHECK(cfg.out == "result");
  }
  SUBCASE("flags win") {
    auto cfg = cli::parse_and_validate({"backtest", "--config", (dir / "run.cfg").string(), "--window", "80"});
    CHECK(cfg.network.window.width == 80);
    CHECK(cfg.values.at("window") == "80");
  }
  SUBCASE("echoed config parses back to the same values") {
    auto cfg = cli::parse_and_validate({"backtest", "--config", (dir / "run.cfg").string(), "--step", "3"});
    write_text(dir / "echo.cfg", cfg.to_text());
    auto again = cli::parse_and_validate({"backtest", "--config", (dir / "echo.cfg").string()});
    CHECK(again.values == cfg.values);
    CHECK(again.to_text() == cfg.to_text());
    CHECK(cfg.to_text().find("version = " + cli::version()) != std::string::npos);
  }
  SUBCASE("unknown keys") {
    write_text(dir / "bad.cfg", "out = x\nwindw = 5\n");
    CHECK_ERRC(cli::parse_and_validate({"synth", "--config", (dir / "bad.cfg").string()}), Errc::Usage);
  }
}

TEST_CASE("help") {
  try {
    cli::parse_and_validate({"--help"});
    FAIL("no help");
  } catch (const cli::HelpRequest& h) {
    CHECK(h.text.find("backtest") != std::string::npos);
  }
  try {
    cli::parse_and_validate({"backtest", "--help"});
    FAIL("no help");
  } catch (const cli::HelpRequest& h) {
    CHECK(h.text.find("--train-end") != std::string::npos);
  }
  CHECK(run_main({"--help"}) == 0);
}

TEST_CASE("exit codes and outputs") {
  auto dir = scratch_dir("cli_main");
  SUBCASE("usage error") { CHECK(run_main({"backtest", "--out", (dir / "a").string()}) == 1); }
  SUBCASE("missing input file") {
    write_text(dir / "t.txt", "AAA\n");
    CHECK(run_main({"ingest", "--prices", (dir / "nope.csv").string(), "--opinions", (dir / "nope2.csv").string(),
                    "--tickers", (dir / "t.txt").string(), "--out", (dir / "b").string(), "--quiet"}) == 2);
  }
  SUBCASE("synth graphs then backtest and churn on the edge lists") {
    const auto data = dir / "graphs";
    REQUIRE(run_main({"synth", "--mode", "graphs", "--n", "12", "--windows", "30", "--out", data.string(),
                      "--quiet"}) == 0);
    CHECK(std::filesystem::exists(data / "tickers.txt"));
    CHECK(std::filesystem::exists(data / "config.txt"));
    CHECK(std::filesystem::exists(data / "graph_financial_0_126.edgelist"));
    const auto out = dir / "bt";
    REQUIRE(run_main({"backtest", "--graphs", data.string(), "--tickers", (data / "tickers.txt").string(), "--lags",
                      "1,2", "--train-windows", "5", "--out", out.string(), "--quiet", "--dump-models", "models"}) ==
            0);
    for (const char* f : {"report.csv", "report.json", "churn.csv", "jaccard.csv", "config.txt"})
      CHECK(std::filesystem::exists(out / f));
    CHECK(std::filesystem::exists(out / "models" / "model_full_h1_t6.json"));
    CHECK(read_text(out / "report.csv").rfind("lag,split,window_end,auc,auc_benchmark,auc_star,lambda,n_pos,n_neg\n",
                                              0) == 0);
    REQUIRE(run_main({"churn", "--graphs", data.string(), "--tickers", (data / "tickers.txt").string(), "--max-h",
                      "4", "--out", (dir / "churn").string(), "--quiet"}) == 0);
    CHECK(read_text(dir / "churn" / "churn.csv").rfind("layer,h,mean,standard_error,count\n", 0) == 0);
  }
  SUBCASE("synth series then every panel command") {
    const auto data = dir / "series";
    REQUIRE(run_main({"synth", "--mode", "timeseries", "--n", "10", "--windows", "20", "--window", "30",
                      "--out", data.string(), "--quiet"}) == 0);
    const std::vector<std::string> in{"--prices", (data / "prices.csv").string(), "--opinions",
                                      (data / "opinions.csv").string(), "--tickers", (data / "tickers.txt").string(),
                                      "--quiet"};
    auto cmd = [&](std::string name, std::vector<std::string> extra) {
      std::vector<std::string> args{name};
      args.insert(args.end(), in.begin(), in.end());
      args.insert(args.end(), extra.begin(), extra.end());
      return run_main(args);
    };
    CHECK(cmd("ingest", {"--out", (dir / "ingest").string()}) == 0);
    CHECK(read_text(dir / "ingest" / "opinions.csv").rfind("date,ticker,bullish_count\n", 0) == 0);
    CHECK(cmd("graphs", {"--window", "30", "--out", (dir / "g").string(), "--dump-corr", "corr"}) == 0);
    CHECK(std::filesystem::exists(dir / "g" / "graph_social_0_30.edgelist"));
    CHECK(std::filesystem::exists(dir / "g" / "corr" / "financial" / "corr_0_30.csv"));
    CHECK(cmd("features", {"--window", "30", "--out", (dir / "f").string()}) == 0);
    CHECK(std::filesystem::exists(dir / "f" / "features_0_30.csv"));
    CHECK(cmd("backtest", {"--window", "30", "--out", (dir / "bt").string(), "--lags", "1,2", "--train-windows", "4"}) == 0);
    CHECK(cmd("backtest", {"--window", "30", "--out", (dir / "bt2").string(), "--lags", "1", "--train-windows", "30"}) == 0);
  }
}
