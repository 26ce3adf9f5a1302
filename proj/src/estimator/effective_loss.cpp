#include <algorithm>
#include <cmath>

#include "hopcap/error.hpp"
#include "hopcap/estimator.hpp"

namespace hopcap {

namespace {

constexpr double kClampTolerance = 1e-12;

struct Clamped {
  double q = 0.0;
  bool clamped = false;
};

// Small excursions are floating noise and snap silently; larger ones are
// reported through Branch::Clamped.
Clamped clamp_q(double q, double lo) {
  if (q > 1.0) return {1.0, q - 1.0 > kClampTolerance};
  if (q < lo) return {lo, (lo - q) > kClampTolerance * lo};
  return {q, false};
}

void require_n(std::uint64_t n) {
  if (n < 2) throw DomainError("effective loss needs n >= 2");
}

void require_mean(double mean, double var) {
  // rounding-level negatives are tolerated and clamp like any q above 1
  if (!std::isfinite(mean) || mean < -1e-12) throw DomainError("mean loss must be finite and non-negative");
  if (!std::isfinite(var) || var < 0.0) throw DomainError("loss variance must be finite and non-negative");
}

}  // namespace

std::string_view to_string(Branch branch) noexcept {
  switch (branch) {
    case Branch::AboveThreshold: return "above_threshold";
    case Branch::BelowThreshold: return "below_threshold";
    case Branch::Clamped: return "clamped";
  }
  return "above_threshold";
}

nlohmann::json EffectiveLoss::to_json() const {
  nlohmann::json j{{"model", to_string(model)},
                   {"loss_nats", loss_nats},
                   {"loss_bits", nats_to_bits(loss_nats)},
                   {"branch", to_string(branch)},
                   {"q_raw", q_raw},
                   {"q_tilde", q_tilde},
                   {"u", u},
                   {"hop1_prob", hop1_prob},
                   {"hop2_prob", hop2_prob}};
  j["epsilon"] = epsilon ? nlohmann::json(*epsilon) : nlohmann::json(nullptr);
  return j;
}

double two_function_threshold(double n) noexcept { return 2.0 / n - 1.0 / (n * n); }

EffectiveLoss effective_loss_recurrent(double mean_loss_nats, double var_loss_nats, std::uint64_t n,
                                       bool variance_correction) {
  require_n(n);
  require_mean(mean_loss_nats, var_loss_nats);
  const auto nd = static_cast<double>(n);
  EffectiveLoss out;
  out.model = ModelKind::Recurrent;
  out.q_raw = std::exp(-mean_loss_nats) * (variance_correction ? 1.0 + var_loss_nats / 2.0 : 1.0);
  const auto c = clamp_q(out.q_raw, 1.0 / nd);
  out.q_tilde = c.q;

  const double disc = std::max(0.0, 1.0 - 4.0 * nd * (1.0 - nd * out.q_tilde));
  double u = (1.0 + std::sqrt(disc)) / (2.0 * nd);
  u = std::clamp(u, 1.0 / nd, 1.0);
  out.u = u;
  out.hop1_prob = u;
  out.hop2_prob = u;
  out.loss_nats = std::max(0.0, -std::log(u));
  out.branch = c.clamped ? Branch::Clamped
                         : (out.q_tilde > two_function_threshold(nd) ? Branch::AboveThreshold : Branch::BelowThreshold);
  return out;
}

EffectiveLoss effective_loss_two_function(double mean_loss_nats, double var_loss_nats, std::uint64_t n) {
  require_n(n);
  require_mean(mean_loss_nats, var_loss_nats);
  const auto nd = static_cast<double>(n);
  const double inv = 1.0 / nd;
  EffectiveLoss out;
  out.model = ModelKind::TwoFunction;
  out.q_raw = std::exp(-mean_loss_nats) * (1.0 + var_loss_nats / 2.0);
  const auto c = clamp_q(out.q_raw, inv);
  out.q_tilde = c.q;

  const double excess = out.q_tilde - inv;  // >= 0
  const bool above = out.q_tilde > two_function_threshold(nd);
  if (above) {
    // second hop certain, first hop carries the rest
    out.hop2_prob = 1.0;
    out.hop1_prob = excess / (1.0 - inv);
    out.loss_nats = -std::log(excess / (1.0 - inv));
  } else {
    // first hop at chance
    out.hop1_prob = inv;
    const double product = excess + inv * inv;
    out.hop2_prob = product * nd;
    out.loss_nats = -std::log(product);
  }
  out.loss_nats = std::max(0.0, out.loss_nats);
  out.u = std::sqrt(out.hop1_prob * out.hop2_prob);
  out.epsilon = std::sqrt(out.hop1_prob / out.hop2_prob);
  out.branch = c.clamped ? Branch::Clamped : (above ? Branch::AboveThreshold : Branch::BelowThreshold);
  return out;
}

}  // namespace hopcap
