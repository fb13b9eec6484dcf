#pragma once

// Brute-force reference implementations used only by tests. They follow the
// defining formulas literally (explicit loops, full sorts, recounting) and
// share no code with the library's aggregation path.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "deepagg/types.hpp"

namespace oracle {

using Grid = std::vector<std::vector<double>>;  // [i][j], 0-based storage

inline Grid response(const deepagg::FeatureTensor& x) {
  Grid s(x.height(), std::vector<double>(x.width(), 0.0));
  for (std::size_t i = 0; i < x.height(); ++i)
    for (std::size_t j = 0; j < x.width(); ++j)
      for (std::size_t k = 0; k < x.channels(); ++k) s[i][j] += x.at(k, i, j);
  return s;
}

/// Sorts (-value, row-major index) tuples and averages 1-based coordinates
/// of the first n.
inline std::pair<double, double> center(const Grid& s, double alpha) {
  const std::size_t h = s.size(), w = s[0].size();
  std::vector<std::tuple<double, std::size_t, std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) cells.emplace_back(-s[i][j], i * w + j, i + 1, j + 1);
  std::sort(cells.begin(), cells.end());
  long n = std::lround(alpha * static_cast<double>(h * w));
  n = std::max(1L, n);
  double ci = 0, cj = 0;
  for (long r = 0; r < n; ++r) {
    ci += static_cast<double>(std::get<2>(cells[r]));
    cj += static_cast<double>(std::get<3>(cells[r]));
  }
  return {ci / static_cast<double>(n), cj / static_cast<double>(n)};
}

inline double gaussian(double i, double j, double ci, double cj, double sigma) {
  return 1.0 / (2.0 * std::numbers::pi * sigma * sigma) *
         std::exp(-((i - ci) * (i - ci) + (j - cj) * (j - cj)) / (2.0 * sigma * sigma));
}

inline Grid gaussian_grid(std::size_t h, std::size_t w, double ci, double cj, double sigma) {
  Grid g(h, std::vector<double>(w));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      g[i][j] = gaussian(static_cast<double>(i + 1), static_cast<double>(j + 1), ci, cj, sigma);
  return g;
}

inline std::vector<double> omega(const deepagg::FeatureTensor& x, const Grid& s) {
  std::vector<double> out(x.channels(), 0.0);
  for (std::size_t k = 0; k < x.channels(); ++k)
    for (std::size_t i = 0; i < x.height(); ++i)
      for (std::size_t j = 0; j < x.width(); ++j)
        out[k] += static_cast<double>(x.at(k, i, j)) * s[i][j];
  return out;
}

inline std::vector<double> items(const std::vector<double>& om, std::size_t h, std::size_t w) {
  std::vector<double> b;
  for (double o : om) b.push_back(std::pow(o / static_cast<double>(w * h), 2));
  return b;
}

inline std::vector<double> weights(const std::vector<double>& b, double eps) {
  double total = 0;
  for (double v : b) total += v;
  std::vector<double> out;
  for (double v : b) out.push_back(std::log((static_cast<double>(b.size()) * eps + total) / (eps + v)));
  return out;
}

inline std::vector<double> normalize(std::vector<double> v) {
  double n = 0;
  for (double e : v) n += e * e;
  n = std::sqrt(n);
  for (double& e : v) e /= n;
  return v;
}

/// Adaptive Gaussian + element-value weighting, step by step.
inline std::vector<double> descriptor(const deepagg::FeatureTensor& x, double alpha, double eps) {
  const auto [ci, cj] = center(response(x), alpha);
  const double sigma = (x.height() == 1 && x.width() == 1)
                           ? 0.5
                           : static_cast<double>(std::max(x.height(), x.width())) / 4.0;
  const auto om = omega(x, gaussian_grid(x.height(), x.width(), ci, cj, sigma));
  const auto bw = weights(items(om, x.height(), x.width()), eps);
  std::vector<double> beta(om.size());
  for (std::size_t k = 0; k < om.size(); ++k) beta[k] = bw[k] * om[k];
  return normalize(beta);
}

/// Standard AP by definition: (1/P) * sum over positives of precision at
/// their rank, with precision recounted from scratch for each prefix.
inline double ap_definition(const std::vector<std::string>& ranking,
                            const std::set<std::string>& positives,
                            const std::set<std::string>& junk) {
  std::vector<std::string> filtered;
  for (const auto& id : ranking)
    if (!junk.count(id)) filtered.push_back(id);
  double sum = 0;
  for (std::size_t r = 0; r < filtered.size(); ++r) {
    if (!positives.count(filtered[r])) continue;
    std::size_t hits = 0;
    for (std::size_t q = 0; q <= r; ++q) hits += positives.count(filtered[q]);
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(positives.size());
}

/// Sample covariance (1/N) of row vectors.
inline std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size(), d = rows[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < d; ++c) mean[c] += r[c] / static_cast<double>(n);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        cov[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]) / static_cast<double>(n);
  return cov;
}

}  // namespace oracle
