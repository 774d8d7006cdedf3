#include <cmath>

#include "mcpulse/channel.hpp"

namespace mcpulse {

namespace {

double zeta_by_summation(double s, long n_terms) {
  // Smallest terms first.
  double sum = 0.0;
  for (long k = n_terms; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  const double n = static_cast<double>(n_terms);
  const double tail = std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s) +
                      s * std::pow(n, -s - 1.0) / 12.0 -
                      s * (s + 1.0) * (s + 2.0) * std::pow(n, -s - 3.0) / 720.0;
  return sum + tail;
}

}  // namespace

double zeta_three_halves() {
  static const double value = zeta_by_summation(1.5, 1'000'000);
  return value;
}

}  // namespace mcpulse
