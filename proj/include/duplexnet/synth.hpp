#pragma once

#include "duplexnet/multiplex.hpp"
#include "duplexnet/netbuild.hpp"
#include "duplexnet/panel.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace duplexnet {

/// Portable random stream: mt19937_64 keyed by (seed, stream) through
/// splitmix64, with distributions implemented here so output is identical
/// across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();
  std::uint64_t below(std::uint64_t bound);  // [0, bound)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

enum class SynthMode { GraphDynamics, TimeSeries };

SynthMode parse_synth_mode(std::string_view text);

struct SynthSpec {
  int n = 100;
  int n_windows = 250;
  EdgeBudget budget;
  double persistence = 0.9;
  double closure_strength = 6.0;
  double formation_base = -3.0;
  int burn_in = 50;  // steps discarded before window 0
  int social_lead = 0;       // windows; social(t) tracks financial(t + lead)
  double social_noise = 0.3;  // fraction of social edges redrawn at random
  std::uint64_t seed = 1;
  SynthMode mode = SynthMode::GraphDynamics;

  // TimeSeries mode.
  int n_blocks = 5;
  double return_noise = 1.0;   // idiosyncratic / factor volatility ratio
  double opinion_noise = 1.0;
  WindowSpec window;           // sizes the generated calendar
  std::string start_date = "2012-01-02";

  void validate() const;
};

/// Markov edge process with persistence and triadic-closure-driven formation,
/// renormalized to the edge budget every step.
std::vector<DuplexSnapshot> generate_graph_dynamics(const SynthSpec& spec);

/// Block latent-factor returns and opinion counts driven by (optionally
/// leading) factors. Returns (returns, opinion), aligned.
std::pair<PanelSeries, PanelSeries> generate_timeseries(const SynthSpec& spec);

/// Close prices starting at 100 whose log-returns reproduce `returns`,
/// with one extra leading date.
std::pair<std::vector<std::string>, RowMatrix> prices_from_returns(const PanelSeries& returns,
                                                                   const std::string& first_date);

std::vector<std::string> weekday_calendar(const std::string& start, int count);

}  // namespace duplexnet
