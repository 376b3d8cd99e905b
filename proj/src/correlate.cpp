#include "duplexnet/correlate.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/io.hpp"
#include "duplexnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace duplexnet {

TauVariant parse_tau(std::string_view text) {
  if (text == "a") return TauVariant::A;
  if (text == "b") return TauVariant::B;
  throw Error(Errc::Usage, "--tau must be a or b, got '" + std::string(text) + "'");
}

namespace {

// Pairs tied within runs of equal values of a sorted sequence.
std::int64_t tied_pairs(std::span<const double> sorted) {
  std::int64_t ties = 0;
  std::size_t run = 1;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    if (k < sorted.size() && sorted[k] == sorted[k - 1]) {
      ++run;
    } else {
      ties += static_cast<std::int64_t>(run * (run - 1) / 2);
      run = 1;
    }
  }
  return ties;
}

// Sorts `v` ascending and returns the number of strictly inverted pairs.
std::int64_t sort_count_inversions(std::span<double> v, std::span<double> scratch) {
  const std::size_t n = v.size();
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          scratch[k++] = v[j++];
        } else {
          scratch[k++] = v[i++];
        }
      }
      while (i < mid) scratch[k++] = v[i++];
      while (j < hi) scratch[k++] = v[j++];
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n), v.begin());
  }
  return swaps;
}

struct PairCounts {
  std::int64_t total = 0;    // n(n-1)/2
  std::int64_t x_ties = 0;
  std::int64_t y_ties = 0;
  std::int64_t joint_ties = 0;
  std::int64_t discordant = 0;
};

std::optional<double> tau_from_counts(const PairCounts& c, TauVariant variant) {
  const std::int64_t x_pairs = c.total - c.x_ties;
  const std::int64_t y_pairs = c.total - c.y_ties;
  if (x_pairs == 0 || y_pairs == 0) return std::nullopt;
  const std::int64_t s = c.total - c.x_ties - c.y_ties + c.joint_ties - 2 * c.discordant;
  if (variant == TauVariant::A) return static_cast<double>(s) / static_cast<double>(c.total);
  return static_cast<double>(s) / std::sqrt(static_cast<double>(x_pairs) * static_cast<double>(y_pairs));
}

// Per-series precomputation shared by every pair involving that series.
struct RankedSeries {
  std::vector<std::uint32_t> order;  // stable argsort
  std::vector<std::uint32_t> run_end;  // for each sorted position, end of its tie run
  std::int64_t ties = 0;
};

RankedSeries rank_series(std::span<const double> x) {
  RankedSeries r;
  const std::size_t n = x.size();
  r.order.resize(n);
  std::iota(r.order.begin(), r.order.end(), 0u);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
  r.run_end.resize(n);
  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n || x[r.order[k]] != x[r.order[start]]) {
      for (std::size_t m = start; m < k; ++m) r.run_end[m] = static_cast<std::uint32_t>(k);
      r.ties += static_cast<std::int64_t>((k - start) * (k - start - 1) / 2);
      start = k;
    }
  }
  return r;
}

// Counts for x ranked by `rx` against y; `buf` and `scratch` hold n doubles.
PairCounts pair_counts(const RankedSeries& rx, std::span<const double> y, std::int64_t y_ties,
                       std::span<double> buf, std::span<double> scratch) {
  const std::size_t n = y.size();
  PairCounts c;
  c.total = static_cast<std::int64_t>(n * (n - 1) / 2);
  c.x_ties = rx.ties;
  c.y_ties = y_ties;
  for (std::size_t k = 0; k < n; ++k) buf[k] = y[rx.order[k]];
  // Within each run of tied x, order by y so those pairs never count as
  // discordant, and count the jointly tied pairs.
  for (std::size_t k = 0; k < n;) {
    const std::size_t end = rx.run_end[k];
    if (end - k > 1) {
      std::sort(buf.begin() + static_cast<std::ptrdiff_t>(k), buf.begin() + static_cast<std::ptrdiff_t>(end));
      c.joint_ties += tied_pairs(buf.subspan(k, end - k));
    }
    k = end;
  }
  c.discordant = sort_count_inversions(buf.first(n), scratch);
  return c;
}

}  // namespace

std::optional<double> kendall(std::span<const double> x, std::span<const double> y,
                              TauVariant variant) {
  if (x.size() != y.size())
    throw Error(Errc::ShapeError, "kendall: sequences of length " + std::to_string(x.size()) +
                                      " and " + std::to_string(y.size()));
  if (x.size() < 2) throw Error(Errc::ShapeError, "kendall: need at least two observations");
  for (std::size_t k = 0; k < x.size(); ++k)
    if (std::isnan(x[k]) || std::isnan(y[k]))
      throw Error(Errc::ShapeError, "kendall: NaN input");
  const RankedSeries rx = rank_series(x);
  std::vector<double> ys(y.begin(), y.end());
  std::sort(ys.begin(), ys.end());
  const std::int64_t y_ties = tied_pairs(ys);
  std::vector<double> buf(y.size()), scratch(y.size());
  return tau_from_counts(pair_counts(rx, y, y_ties, buf, scratch), variant);
}

WindowedMatrix correlation_matrix(const PanelSeries& panel, Window window, TauVariant variant,
                                  unsigned threads) {
  if (window.start < 0 || window.end > panel.length() || window.width() < 2)
    throw Error(Errc::ShapeError, "window [" + std::to_string(window.start) + ", " +
                                      std::to_string(window.end) + ") outside panel");
  const Index n_assets = panel.assets();
  const auto width = static_cast<std::size_t>(window.width());
  auto series = [&](Index i) {
    return std::span<const double>(panel.values.row(i).data() + window.start, width);
  };
  if (!panel.values.middleCols(window.start, window.width()).allFinite())
    throw Error(Errc::ShapeError, "non-finite values in window");

  std::vector<RankedSeries> ranked(static_cast<std::size_t>(n_assets));
  for (Index i = 0; i < n_assets; ++i) ranked[std::size_t(i)] = rank_series(series(i));

  WindowedMatrix out;
  out.window = window;
  out.kind = MatrixKind::Correlation;
  out.values = Eigen::MatrixXd::Identity(n_assets, n_assets);
  std::vector<std::vector<Pair>> degenerate(static_cast<std::size_t>(n_assets));

  parallel_for(static_cast<std::size_t>(n_assets), threads, [&](std::size_t ui) {
    const Index i = static_cast<Index>(ui);
    std::vector<double> buf(width), scratch(width);
    for (Index j = i + 1; j < n_assets; ++j) {
      const auto counts = pair_counts(ranked[ui], series(j), ranked[std::size_t(j)].ties, buf, scratch);
      const auto tau = tau_from_counts(counts, variant);
      double value = 0.0;
      if (tau)
        value = std::clamp(*tau, -1.0, 1.0);
      else
        degenerate[ui].emplace_back(int(i), int(j));
      out.values(i, j) = value;
      out.values(j, i) = value;
    }
  });
  for (auto& d : degenerate) out.degenerate.insert(out.degenerate.end(), d.begin(), d.end());
  return out;
}

WindowedMatrix to_distance(const WindowedMatrix& correlation) {
  if (correlation.kind != MatrixKind::Correlation)
    throw Error(Errc::ShapeError, "to_distance expects a correlation matrix");
  WindowedMatrix out = correlation;
  out.kind = MatrixKind::Distance;
  out.values = (2.0 * (1.0 - correlation.values.array())).max(0.0).sqrt().matrix();
  return out;
}

void write_matrix_csv(const WindowedMatrix& m, const std::filesystem::path& path) {
  std::ostringstream out;
  for (Index i = 0; i < m.values.rows(); ++i) {
    for (Index j = 0; j < m.values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m.values(i, j));
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace duplexnet
