#pragma once

#include "duplexnet/panel.hpp"
#include "duplexnet/types.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace duplexnet {

enum class TauVariant { A, B };

TauVariant parse_tau(std::string_view text);

/// Kendall rank correlation by the O(n log n) merge-sort method.
/// Returns nullopt when either sequence is entirely tied. Tau-b divides by
/// the tie-adjusted pair count, tau-a by n(n-1)/2.
std::optional<double> kendall(std::span<const double> x, std::span<const double> y,
                              TauVariant variant = TauVariant::B);

enum class MatrixKind { Correlation, Distance };

struct WindowedMatrix {
  Window window;
  MatrixKind kind = MatrixKind::Correlation;
  Eigen::MatrixXd values;
  // Pairs (i < j) whose correlation was undefined and set to 0.
  std::vector<Pair> degenerate;
};

WindowedMatrix correlation_matrix(const PanelSeries& panel, Window window,
                                  TauVariant variant = TauVariant::B, unsigned threads = 1);

/// d = sqrt(2 (1 - rho)).
WindowedMatrix to_distance(const WindowedMatrix& correlation);

/// N x N CSV with 17 significant digits, no header.
void write_matrix_csv(const WindowedMatrix& m, const std::filesystem::path& path);

}  // namespace duplexnet
