#pragma once

#include "duplexnet/types.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace duplexnet {

enum class PanelKind { Returns, Opinion };

/// Date-aligned N x L panel: one row per asset, one column per trading day.
/// Returns panels hold daily log-returns; Opinion panels hold bullish message
/// counts and are never negative.
struct PanelSeries {
  std::vector<std::string> dates;    // ISO-8601, strictly increasing
  std::vector<std::string> tickers;  // unique
  RowMatrix values;                  // tickers.size() x dates.size()
  PanelKind kind = PanelKind::Returns;

  Index assets() const { return values.rows(); }
  Index length() const { return values.cols(); }

  /// Throws ShapeError / ParseError / BadCount if an invariant is broken.
  void validate() const;
};

enum class WindowPolicy { Rolling, Expanding };

struct WindowSpec {
  int width = 126;
  int step = 5;
  WindowPolicy policy = WindowPolicy::Rolling;
};

struct OpinionLoadStats {
  std::size_t unknown_ticker_rows = 0;
};

/// Reads `date,ticker,close` rows and converts them to log-returns on the
/// calendar of dates where every requested ticker has a close. The first
/// date is dropped.
PanelSeries load_price_panel(const std::filesystem::path& path,
                             std::span<const std::string> tickers);

/// Reads `date,ticker,bullish_count` rows. Without a calendar the union of
/// all dates seen for the requested tickers is used; with one, that calendar
/// is used as-is and rows outside it are dropped. Missing days are zero.
PanelSeries load_opinion_panel(const std::filesystem::path& path,
                               std::span<const std::string> tickers,
                               OpinionLoadStats* stats = nullptr,
                               const std::vector<std::string>* calendar = nullptr);

/// Restricts both panels to their common dates.
std::pair<PanelSeries, PanelSeries> align(const PanelSeries& a, const PanelSeries& b);

std::vector<Window> windows(const WindowSpec& spec, Index length);

/// One ticker symbol per line; blank lines and `#` comments are skipped.
std::vector<std::string> load_tickers(const std::filesystem::path& path);

/// Long-format CSV (`date,ticker,log_return` or `date,ticker,bullish_count`)
/// readable by load_panel, and for opinions also by load_opinion_panel.
void save_panel(const PanelSeries& panel, const std::filesystem::path& path);
PanelSeries load_panel(const std::filesystem::path& path);

bool valid_iso_date(std::string_view text);

}  // namespace duplexnet
