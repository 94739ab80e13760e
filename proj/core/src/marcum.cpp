#include "radnet/marcum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radnet {

namespace {

// log of the Poisson pmf exp(-mu) mu^k / k!
double log_poisson_pmf(int k, double mu) {
  if (mu == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mu + k * std::log(mu) - std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

namespace {

void validate_arguments(int order, double a, double b, const char* who) {
  if (order < 1) throw std::invalid_argument(std::string(who) + ": order must be >= 1");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument(std::string(who) + ": non-finite argument");
  if (a < 0.0 || b < 0.0) throw std::invalid_argument(std::string(who) + ": negative argument");
}

struct PoissonWindow {
  int lo;
  int hi;
};

// Index window outside which the Poisson(mu) mass is < 1e-18.
PoissonWindow poisson_window(double mu) {
  const double half_width = 12.0 * std::sqrt(mu) + 40.0;
  return {std::max(0, static_cast<int>(std::floor(mu - half_width))),
          static_cast<int>(std::ceil(mu + half_width))};
}

// log of the gamma/Erlang pmf term exp(-y) y^m / m!
double log_gamma_pmf(int m, double y) {
  return -y + m * std::log(y) - std::lgamma(static_cast<double>(m) + 1.0);
}

}  // namespace

double marcum_q(int order, double a, double b) {
  validate_arguments(order, a, b, "marcum_q");

  if (b == 0.0) return 1.0;

  const double mu = 0.5 * a * a;  // Poisson mean from the noncentrality
  const double y = 0.5 * b * b;   // gamma threshold
  const auto [j_lo, j_hi] = poisson_window(mu);

  // g = Q(order + j, y), the survival of an Erlang(order + j) at y, advanced
  // alongside j via Q(m+1, y) = Q(m, y) + exp(-y) y^m / m!.
  double g = 0.0;
  const int m0 = order + j_lo;
  for (int i = 0; i < m0; ++i) g += std::exp(log_gamma_pmf(i, y));
  g = std::min(g, 1.0);

  double acc = 0.0;
  for (int j = j_lo; j <= j_hi; ++j) {
    acc += std::exp(log_poisson_pmf(j, mu)) * g;
    g = std::min(1.0, g + std::exp(log_gamma_pmf(order + j, y)));
  }
  return std::clamp(acc, 0.0, 1.0);
}

double marcum_q_increment(int order, double a, double b) {
  validate_arguments(order, a, b, "marcum_q_increment");
  if (b == 0.0) return 0.0;
  const double mu = 0.5 * a * a;
  const double y = 0.5 * b * b;
  const auto [j_lo, j_hi] = poisson_window(mu);
  // Q_{v+1} - Q_v = sum_j pois(j; mu) exp(-y) y^{v+j} / (v+j)!, all positive.
  double acc = 0.0;
  for (int j = j_lo; j <= j_hi; ++j)
    acc += std::exp(log_poisson_pmf(j, mu) + log_gamma_pmf(order + j, y));
  return acc;
}

double marcum_q_second_difference(int order, double a, double b) {
  validate_arguments(order, a, b, "marcum_q_second_difference");
  if (b == 0.0) return 0.0;
  const double mu = 0.5 * a * a;
  const double y = 0.5 * b * b;
  const auto [j_lo, j_hi] = poisson_window(mu);
  // Termwise (y/(m+1) - 1) weighting of the increment sum avoids forming the
  // two near-equal Q differences.
  double acc = 0.0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const int m = order + j;
    acc += std::exp(log_poisson_pmf(j, mu) + log_gamma_pmf(m, y)) * (y / (m + 1) - 1.0);
  }
  return acc;
}

}  // namespace radnet
