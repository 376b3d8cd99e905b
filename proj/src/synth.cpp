#include "duplexnet/synth.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace duplexnet {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ull))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::Usage, "Rng::below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % bound;
  }
}

SynthMode parse_synth_mode(std::string_view text) {
  if (text == "graphs") return SynthMode::GraphDynamics;
  if (text == "timeseries") return SynthMode::TimeSeries;
  throw Error(Errc::Usage, "--mode must be graphs or timeseries, got '" + std::string(text) + "'");
}

void SynthSpec::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::Usage, std::string(name) + " must lie in [0, 1]");
  };
  prob(persistence, "persistence");
  prob(social_noise, "social_noise");
  if (n < 4) throw Error(Errc::Usage, "synthetic panels need n >= 4");
  if (n_windows < 1) throw Error(Errc::Usage, "need at least one window");
  if (social_lead < 0) throw Error(Errc::Usage, "social_lead must be >= 0");
  if (burn_in < 0) throw Error(Errc::Usage, "burn_in must be >= 0");
  if (n_blocks < 1) throw Error(Errc::Usage, "n_blocks must be >= 1");
  if (!(return_noise >= 0.0) || !(opinion_noise >= 0.0)) throw Error(Errc::Usage, "noise scales must be >= 0");
  if (!std::isfinite(closure_strength) || !std::isfinite(formation_base))
    throw Error(Errc::Usage, "closure parameters must be finite");
  budget.edges_for(n);
}

namespace {

// Stream ids keep every random draw addressable by (purpose, step).
constexpr std::uint64_t kFinancialStream = 0;
constexpr std::uint64_t kSocialStream = 1ull << 32;
constexpr std::uint64_t kFactorStream = 2ull << 32;
constexpr std::uint64_t kIdioStream = 3ull << 32;
constexpr std::uint64_t kOpinionStream = 4ull << 32;

std::vector<Pair> all_pairs(int n) {
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(pair_count(n)));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return pairs;
}

// Weighted sampling without replacement: the `count` candidates with the
// smallest exponential race keys -log(U) / weight.
std::vector<std::size_t> weighted_sample(std::span<const std::size_t> candidates,
                                         std::span<const double> weights, std::size_t count, Rng& rng) {
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double u = 1.0 - rng.uniform();
    const double w = weights[k];
    keyed.emplace_back(w > 0.0 ? -std::log(u) / w : std::numeric_limits<double>::infinity(), candidates[k]);
  }
  count = std::min(count, keyed.size());
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count), keyed.end());
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (std::size_t k = 0; k < count; ++k) chosen.push_back(keyed[k].second);
  return chosen;
}

LayerGraph graph_from(const std::vector<Pair>& pairs, const std::vector<std::size_t>& chosen, Layer layer,
                      Window window, int n) {
  std::vector<Pair> edges;
  edges.reserve(chosen.size());
  for (std::size_t k : chosen) edges.push_back(pairs[k]);
  return make_graph(layer, window, n, std::move(edges));
}

}  // namespace

std::vector<DuplexSnapshot> generate_graph_dynamics(const SynthSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const auto k_edges = static_cast<std::size_t>(spec.budget.edges_for(n));
  const auto pairs = all_pairs(n);
  const std::size_t p = pairs.size();
  const int steps = spec.burn_in + spec.n_windows + spec.social_lead;

  auto window_of = [&](int t) {
    const int start = t * spec.window.step;
    return Window{start, start + spec.window.width};
  };

  std::vector<std::size_t> everything(p);
  std::iota(everything.begin(), everything.end(), std::size_t{0});

  // Financial chain, including burn-in and the lead horizon.
  std::vector<LayerGraph> financial;
  financial.reserve(std::size_t(spec.n_windows + spec.social_lead));
  LayerGraph current;
  {
    Rng rng(spec.seed, kFinancialStream);
    const std::vector<double> flat(p, 1.0);
    current = graph_from(pairs, weighted_sample(everything, flat, k_edges, rng), Layer::Financial, {}, n);
  }
  for (int step = 1; step <= steps; ++step) {
    Rng rng(spec.seed, kFinancialStream + std::uint64_t(step));
    const std::vector<double> closure = closure_scores(current);
    std::vector<std::size_t> kept, candidates;
    std::vector<double> weights;
    std::size_t e = 0;
    for (std::size_t k = 0; k < p; ++k) {
      const bool is_edge = e < current.edges.size() && current.edges[e] == pairs[k];
      if (is_edge) ++e;
      const double u = rng.uniform();
      if (is_edge && u < spec.persistence) {
        kept.push_back(k);
      } else {
        candidates.push_back(k);
        weights.push_back(logistic(spec.formation_base + spec.closure_strength * closure[k]));
      }
    }
    const auto fresh = weighted_sample(candidates, weights, k_edges - kept.size(), rng);
    kept.insert(kept.end(), fresh.begin(), fresh.end());
    current = graph_from(pairs, kept, Layer::Financial, {}, n);
    const int t = step - 1 - spec.burn_in;
    if (t >= 0) {
      current.window = window_of(t);
      financial.push_back(current);
    }
  }

  std::vector<DuplexSnapshot> out;
  out.reserve(std::size_t(spec.n_windows));
  for (int t = 0; t < spec.n_windows; ++t) {
    Rng rng(spec.seed, kSocialStream + std::uint64_t(t));
    const LayerGraph& source = financial[std::size_t(t + spec.social_lead)];
    std::vector<std::size_t> kept, candidates;
    std::size_t e = 0;
    for (std::size_t k = 0; k < p; ++k) {
      const bool is_edge = e < source.edges.size() && source.edges[e] == pairs[k];
      if (is_edge) ++e;
      if (is_edge && rng.uniform() >= spec.social_noise)
        kept.push_back(k);
      else
        candidates.push_back(k);
    }
    const std::vector<double> flat(candidates.size(), 1.0);
    const auto fresh = weighted_sample(candidates, flat, k_edges - kept.size(), rng);
    kept.insert(kept.end(), fresh.begin(), fresh.end());
    LayerGraph fin = financial[std::size_t(t)];
    LayerGraph soc = graph_from(pairs, kept, Layer::Social, window_of(t), n);
    out.push_back(make_duplex(std::move(fin), std::move(soc)));
  }
  return out;
}

std::vector<std::string> weekday_calendar(const std::string& start, int count) {
  if (!valid_iso_date(start)) throw Error(Errc::Usage, "bad start date '" + start + "'");
  using namespace std::chrono;
  const int y = std::stoi(start.substr(0, 4));
  const unsigned m = unsigned(std::stoi(start.substr(5, 2)));
  const unsigned dd = unsigned(std::stoi(start.substr(8, 2)));
  sys_days cur{year{y} / month{m} / std::chrono::day{dd}};
  std::vector<std::string> dates;
  dates.reserve(std::size_t(count));
  while (static_cast<int>(dates.size()) < count) {
    const weekday wd{cur};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day ymd{cur};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                    unsigned(ymd.day()));
      dates.emplace_back(buf);
    }
    cur += days{1};
  }
  return dates;
}

std::pair<PanelSeries, PanelSeries> generate_timeseries(const SynthSpec& spec) {
  spec.validate();
  const int length = spec.window.width + (spec.n_windows - 1) * spec.window.step;
  const int lead_days = spec.social_lead * spec.window.step;
  const int horizon = length + lead_days;

  RowMatrix factors(spec.n_blocks, horizon);
  for (int b = 0; b < spec.n_blocks; ++b) {
    Rng rng(spec.seed, kFactorStream + std::uint64_t(b));
    for (int tau = 0; tau < horizon; ++tau) factors(b, tau) = rng.normal();
  }

  const auto calendar = weekday_calendar(spec.start_date, length + 1);
  PanelSeries returns, opinion;
  returns.kind = PanelKind::Returns;
  opinion.kind = PanelKind::Opinion;
  returns.dates.assign(calendar.begin() + 1, calendar.end());
  opinion.dates = returns.dates;
  for (int i = 0; i < spec.n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "A%03d", i);
    returns.tickers.emplace_back(buf);
  }
  opinion.tickers = returns.tickers;
  returns.values.resize(spec.n, length);
  opinion.values.resize(spec.n, length);

  for (int i = 0; i < spec.n; ++i) {
    const int block = i % spec.n_blocks;
    Rng idio(spec.seed, kIdioStream + std::uint64_t(i));
    Rng talk(spec.seed, kOpinionStream + std::uint64_t(i));
    for (int tau = 0; tau < length; ++tau) {
      returns.values(i, tau) = 0.01 * (factors(block, tau) + spec.return_noise * idio.normal());
      const double mood = factors(block, tau + lead_days) + spec.opinion_noise * talk.normal();
      opinion.values(i, tau) = std::floor(5.0 * std::exp(0.5 * mood));
    }
  }
  return {std::move(returns), std::move(opinion)};
}

std::pair<std::vector<std::string>, RowMatrix> prices_from_returns(const PanelSeries& returns,
                                                                   const std::string& first_date) {
  std::vector<std::string> dates;
  dates.reserve(returns.dates.size() + 1);
  dates.push_back(first_date);
  dates.insert(dates.end(), returns.dates.begin(), returns.dates.end());
  RowMatrix closes(returns.assets(), returns.length() + 1);
  for (Index i = 0; i < returns.assets(); ++i) {
    double log_price = std::log(100.0);
    closes(i, 0) = 100.0;
    for (Index k = 0; k < returns.length(); ++k) {
      log_price += returns.values(i, k);
      closes(i, k + 1) = std::exp(log_price);
    }
  }
  return {std::move(dates), std::move(closes)};
}

}  // namespace duplexnet
