#ifndef SIMDIALOG_TESTS_ORACLES_HPP
#define SIMDIALOG_TESTS_ORACLES_HPP

// Reference implementations written from the formulas alone, sharing no code
// with the library beyond plain data types.

#include <cmath>
#include <string>
#include <vector>

#include "simdialog/model.hpp"

namespace oracle {

/// w_g + sum_i wp_i * sp_i + sum_j wn_j * sn_j, accumulated in long double.
inline double cause_score(double general, const std::vector<double>& wp, const std::vector<double>& sp,
                          const std::vector<double>& wn, const std::vector<double>& sn) {
  long double s = general;
  for (std::size_t i = 0; i < wp.size(); ++i) s += static_cast<long double>(wp[i]) * sp[i];
  for (std::size_t j = 0; j < wn.size(); ++j) s += static_cast<long double>(wn[j]) * sn[j];
  return static_cast<double>(s);
}

inline double bounded_add(double s, double e) {
  double v = s + e;
  if (v > 1.0) return 1.0;
  if (v < -1.0) return -1.0;
  return v;
}

/// Mean over every cause component, general weight included.
inline double mean(double general, const std::vector<double>& wp, const std::vector<double>& wn) {
  long double sum = general;
  std::size_t n = 1;
  for (double w : wp) sum += w, ++n;
  for (double w : wn) sum += w, ++n;
  return static_cast<double>(sum / n);
}

/// Index of the best score; among equal maxima the lowest order wins.
/// `order[i]` is candidate i's edge order.
inline std::size_t argmax(const std::vector<double>& scores, const std::vector<int>& order) {
  double best = -INFINITY;
  for (double s : scores) best = std::max(best, s);
  std::size_t pick = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] == best && (pick == scores.size() || order[i] < order[pick])) pick = i;
  return pick;
}

}  // namespace oracle

namespace fixtures {

/// State vector named s0..s(n-1).
inline simdialog::StateVector states(const std::vector<double>& values, const std::string& stem = "s") {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < values.size(); ++i) names.push_back(stem + std::to_string(i));
  return simdialog::StateVector(std::move(names), values);
}

}  // namespace fixtures

#endif  // SIMDIALOG_TESTS_ORACLES_HPP
