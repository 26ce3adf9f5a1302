#include "hopcap/oracles.hpp"

#include <cmath>
#include <limits>

#include "hopcap/error.hpp"

namespace hopcap {

namespace {

void check_range(double q, std::uint64_t n) {
  if (n < 2) throw DomainError("oracle needs n >= 2");
  const double lo = 1.0 / static_cast<double>(n);
  if (!(q >= lo * (1.0 - 1e-12) && q <= 1.0 + 1e-12)) throw DomainError("q outside [1/n, 1]");
}

}  // namespace

double oracle_invert_recurrent(double q, std::uint64_t n) {
  check_range(q, n);
  const double nd = static_cast<double>(n);
  auto f = [&](double u) { return u * u + (1.0 - u) / nd - q; };
  // f is increasing on [1/(2n), 1], which contains [1/n, 1]
  double lo = 1.0 / nd;
  double hi = 1.0;
  if (f(lo) >= 0.0) return lo;
  if (f(hi) <= 0.0) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TwoFunctionOptimum oracle_minimize_two_function(double q, std::uint64_t n) {
  check_range(q, n);
  const double nd = static_cast<double>(n);
  const double p_lo = 1.0 / nd;
  const double q_c = std::min(1.0, std::max(q, p_lo));

  auto hop2 = [&](double p1) { return (q_c - (1.0 - p1) / nd) / p1; };
  auto feasible = [&](double p1) {
    const double p2 = hop2(p1);
    return p2 >= p_lo * (1.0 - 1e-12) && p2 <= 1.0 + 1e-12;
  };
  auto product = [&](double p1) {
    if (!feasible(p1)) return std::numeric_limits<double>::infinity();
    return p1 * hop2(p1);
  };

  TwoFunctionOptimum best;
  double best_prod = std::numeric_limits<double>::infinity();
  double best_p1 = 1.0;
  auto consider = [&](double p1) {
    const double v = product(p1);
    if (v < best_prod) {
      best_prod = v;
      best_p1 = p1;
    }
  };

  constexpr int kGrid = 4000;
  const double log_lo = std::log(p_lo);
  double step = -log_lo / kGrid;
  for (int i = 0; i <= kGrid; ++i) consider(std::exp(log_lo + step * i));
  consider(p_lo);
  consider(1.0);
  if (!std::isfinite(best_prod)) throw DomainError("no feasible hop probabilities");

  // golden section on the bracket around the best grid point, in log p1
  double a = std::max(log_lo, std::log(best_p1) - step);
  double b = std::min(0.0, std::log(best_p1) + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto obj = [&](double x) { return product(std::exp(x)); };
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = obj(c);
  double fd = obj(d);
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = obj(d);
    }
  }
  consider(std::exp(0.5 * (a + b)));
  consider(std::exp(a));
  consider(std::exp(b));

  best.hop1_prob = best_p1;
  best.hop2_prob = std::min(1.0, hop2(best_p1));
  best.summed_loss_nats = -std::log(best.hop1_prob) - std::log(best.hop2_prob);
  return best;
}

}  // namespace hopcap
