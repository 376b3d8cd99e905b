#include "duplexnet/panel.hpp"

#include "duplexnet/error.hpp"
#include "duplexnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace duplexnet {

namespace fs = std::filesystem;

bool valid_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc() && p == text.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return false;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                     std::chrono::day{unsigned(d)}}
      .ok();
}

void PanelSeries::validate() const {
  if (values.rows() != static_cast<Index>(tickers.size()) ||
      values.cols() != static_cast<Index>(dates.size()))
    throw Error(Errc::ShapeError, "panel values do not match tickers x dates");
  for (std::size_t i = 1; i < dates.size(); ++i)
    if (!(dates[i - 1] < dates[i]))
      throw Error(Errc::ParseError, "dates not strictly increasing at " + dates[i]);
  std::set<std::string> seen(tickers.begin(), tickers.end());
  if (seen.size() != tickers.size()) throw Error(Errc::ShapeError, "duplicate ticker");
  if (!values.allFinite()) throw Error(Errc::ShapeError, "panel contains non-finite values");
  if (kind == PanelKind::Opinion && values.size() > 0 && values.minCoeff() < 0.0)
    throw Error(Errc::BadCount, "negative opinion count");
}

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::string date;
  std::string ticker;
  std::string value;
};

// Reads a three-column CSV and checks its header.
std::vector<CsvRow> read_three_column_csv(const fs::path& path, std::string_view value_column) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (!header) {
      if (fields.size() != 3 || fields[0] != "date" || fields[1] != "ticker" ||
          fields[2] != value_column)
        throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) +
                                          ": expected header date,ticker," +
                                          std::string(value_column));
      header = true;
      continue;
    }
    if (fields.size() != 3 || fields[1].empty() || !valid_iso_date(fields[0]))
      throw Error(Errc::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": malformed row");
    rows.push_back({line_no, std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  if (!header) throw Error(Errc::ParseError, path.string() + ": missing header");
  return rows;
}

double parse_number(const CsvRow& row, const fs::path& path) {
  double v = 0.0;
  const auto* first = row.value.data();
  const auto* last = first + row.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !std::isfinite(v))
    throw Error(Errc::ParseError, path.string() + ":" + std::to_string(row.line) +
                                      ": bad number '" + row.value + "'");
  return v;
}

std::unordered_map<std::string, Index> ticker_positions(std::span<const std::string> tickers) {
  std::unordered_map<std::string, Index> pos;
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    if (!pos.emplace(tickers[i], static_cast<Index>(i)).second)
      throw Error(Errc::ShapeError, "duplicate ticker " + tickers[i]);
  }
  return pos;
}

}  // namespace

PanelSeries load_price_panel(const fs::path& path, std::span<const std::string> tickers) {
  const auto rows = read_three_column_csv(path, "close");
  const auto pos = ticker_positions(tickers);
  std::vector<std::map<std::string, double>> closes(tickers.size());
  for (const auto& row : rows) {
    auto it = pos.find(row.ticker);
    if (it == pos.end()) continue;
    const double close = parse_number(row, path);
    if (!(close > 0.0))
      throw Error(Errc::BadPrice, path.string() + ":" + std::to_string(row.line) +
                                      ": non-positive close for " + row.ticker);
    if (!closes[it->second].emplace(row.date, close).second)
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(row.line) +
                                        ": duplicate row for " + row.ticker + " " + row.date);
  }
  for (std::size_t i = 0; i < tickers.size(); ++i)
    if (closes[i].empty()) throw Error(Errc::MissingAsset, "no prices for " + tickers[i]);

  // Trading calendar: dates on which every asset has a close.
  std::vector<std::string> calendar;
  for (const auto& [date, _] : closes.front()) {
    bool everywhere = true;
    for (std::size_t i = 1; i < closes.size() && everywhere; ++i)
      everywhere = closes[i].count(date) > 0;
    if (everywhere) calendar.push_back(date);
  }
  if (calendar.size() < 2) throw Error(Errc::NoOverlap, "fewer than two common price dates");

  PanelSeries panel;
  panel.kind = PanelKind::Returns;
  panel.tickers.assign(tickers.begin(), tickers.end());
  panel.dates.assign(calendar.begin() + 1, calendar.end());
  panel.values.resize(static_cast<Index>(tickers.size()), static_cast<Index>(calendar.size() - 1));
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    double prev = std::log(closes[i].at(calendar[0]));
    for (std::size_t k = 1; k < calendar.size(); ++k) {
      const double cur = std::log(closes[i].at(calendar[k]));
      panel.values(static_cast<Index>(i), static_cast<Index>(k - 1)) = cur - prev;
      prev = cur;
    }
  }
  return panel;
}

PanelSeries load_opinion_panel(const fs::path& path, std::span<const std::string> tickers,
                               OpinionLoadStats* stats, const std::vector<std::string>* calendar) {
  const auto rows = read_three_column_csv(path, "bullish_count");
  const auto pos = ticker_positions(tickers);
  OpinionLoadStats local;

  struct Count {
    Index asset;
    std::string date;
    double value;
  };
  std::vector<Count> counts;
  std::set<std::string> seen_dates;
  for (const auto& row : rows) {
    auto it = pos.find(row.ticker);
    if (it == pos.end()) {
      ++local.unknown_ticker_rows;
      continue;
    }
    long long c = 0;
    const auto* first = row.value.data();
    const auto* last = first + row.value.size();
    auto [p, ec] = std::from_chars(first, last, c);
    if (ec != std::errc() || p != last)
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(row.line) +
                                        ": bad count '" + row.value + "'");
    if (c < 0)
      throw Error(Errc::BadCount, path.string() + ":" + std::to_string(row.line) +
                                      ": negative count for " + row.ticker);
    counts.push_back({it->second, row.date, static_cast<double>(c)});
    seen_dates.insert(row.date);
  }

  PanelSeries panel;
  panel.kind = PanelKind::Opinion;
  panel.tickers.assign(tickers.begin(), tickers.end());
  if (calendar)
    panel.dates = *calendar;
  else
    panel.dates.assign(seen_dates.begin(), seen_dates.end());
  std::unordered_map<std::string, Index> date_pos;
  for (std::size_t k = 0; k < panel.dates.size(); ++k)
    date_pos.emplace(panel.dates[k], static_cast<Index>(k));

  panel.values = RowMatrix::Zero(static_cast<Index>(tickers.size()),
                                 static_cast<Index>(panel.dates.size()));
  for (const auto& c : counts) {
    auto it = date_pos.find(c.date);
    if (it == date_pos.end()) continue;
    panel.values(c.asset, it->second) += c.value;
  }
  if (stats) *stats = local;
  return panel;
}

std::pair<PanelSeries, PanelSeries> align(const PanelSeries& a, const PanelSeries& b) {
  if (a.tickers != b.tickers) {
    std::set<std::string> sa(a.tickers.begin(), a.tickers.end());
    std::set<std::string> sb(b.tickers.begin(), b.tickers.end());
    if (sa != sb) throw Error(Errc::ShapeError, "panels cover different tickers");
  }
  std::vector<std::string> common;
  std::set_intersection(a.dates.begin(), a.dates.end(), b.dates.begin(), b.dates.end(),
                        std::back_inserter(common));
  if (common.empty()) throw Error(Errc::NoOverlap, "panels share no dates");

  auto restrict = [&](const PanelSeries& p) {
    std::unordered_map<std::string, Index> col;
    for (std::size_t k = 0; k < p.dates.size(); ++k) col.emplace(p.dates[k], Index(k));
    std::unordered_map<std::string, Index> row;
    for (std::size_t i = 0; i < p.tickers.size(); ++i) row.emplace(p.tickers[i], Index(i));
    PanelSeries out;
    out.kind = p.kind;
    out.tickers = a.tickers;
    out.dates = common;
    out.values.resize(static_cast<Index>(a.tickers.size()), static_cast<Index>(common.size()));
    for (std::size_t i = 0; i < a.tickers.size(); ++i) {
      const Index r = row.at(a.tickers[i]);
      for (std::size_t k = 0; k < common.size(); ++k)
        out.values(Index(i), Index(k)) = p.values(r, col.at(common[k]));
    }
    return out;
  };
  return {restrict(a), restrict(b)};
}

std::vector<Window> windows(const WindowSpec& spec, Index length) {
  if (spec.width < 2 || spec.step < 1)
    throw Error(Errc::Usage, "window width must be >= 2 and step >= 1");
  if (length < spec.width)
    throw Error(Errc::TooShort, "series of length " + std::to_string(length) +
                                    " is shorter than window width " + std::to_string(spec.width));
  std::vector<Window> out;
  for (Index end = spec.width; end <= length; end += spec.step) {
    const int start = spec.policy == WindowPolicy::Rolling ? static_cast<int>(end - spec.width) : 0;
    out.push_back({start, static_cast<int>(end)});
  }
  return out;
}

std::vector<std::string> load_tickers(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<std::string> tickers;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    tickers.push_back(line.substr(first, last - first + 1));
  }
  if (tickers.empty()) throw Error(Errc::ParseError, path.string() + ": no tickers");
  return tickers;
}

void save_panel(const PanelSeries& panel, const fs::path& path) {
  panel.validate();
  std::ostringstream out;
  out << "date,ticker," << (panel.kind == PanelKind::Returns ? "log_return" : "bullish_count")
      << '\n';
  for (Index k = 0; k < panel.length(); ++k)
    for (Index i = 0; i < panel.assets(); ++i)
      out << panel.dates[k] << ',' << panel.tickers[i] << ',' << format_double(panel.values(i, k))
          << '\n';
  write_file_atomic(path, out.str());
}

PanelSeries load_panel(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  const auto fields = split_csv_line(header);
  const bool returns = fields.size() == 3 && fields[2] == "log_return";
  const bool opinion = fields.size() == 3 && fields[2] == "bullish_count";
  if (!returns && !opinion) throw Error(Errc::ParseError, path.string() + ": unknown panel header");

  const auto rows = read_three_column_csv(path, fields[2]);
  std::vector<std::string> tickers;
  std::unordered_map<std::string, Index> tpos;
  std::set<std::string> dates;
  for (const auto& r : rows) {
    if (tpos.emplace(r.ticker, Index(tickers.size())).second) tickers.push_back(r.ticker);
    dates.insert(r.date);
  }
  if (opinion) return load_opinion_panel(path, tickers);

  PanelSeries panel;
  panel.kind = PanelKind::Returns;
  panel.tickers = tickers;
  panel.dates.assign(dates.begin(), dates.end());
  std::unordered_map<std::string, Index> dpos;
  for (std::size_t k = 0; k < panel.dates.size(); ++k) dpos.emplace(panel.dates[k], Index(k));
  panel.values = RowMatrix::Constant(Index(tickers.size()), Index(dates.size()),
                                     std::numeric_limits<double>::quiet_NaN());
  for (const auto& r : rows) panel.values(tpos.at(r.ticker), dpos.at(r.date)) = parse_number(r, path);
  if (!panel.values.allFinite())
    throw Error(Errc::ParseError, path.string() + ": returns panel has gaps");
  return panel;
}

}  // namespace duplexnet
