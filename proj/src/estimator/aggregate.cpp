#include <cmath>

#include "hopcap/error.hpp"
#include "hopcap/estimator.hpp"

namespace hopcap {

std::string_view to_string(KindFilter kind) noexcept {
  switch (kind) {
    case KindFilter::Any: return "any";
    case KindFilter::OneHop: return "one_hop";
    case KindFilter::TwoHop: return "two_hop";
  }
  return "any";
}

bool matches(KindFilter filter, QuestionKind kind) noexcept {
  switch (filter) {
    case KindFilter::Any: return true;
    case KindFilter::OneHop: return kind == QuestionKind::OneHop;
    case KindFilter::TwoHop: return is_two_hop(kind);
  }
  return false;
}

void LossAccumulator::add(double loss_nats) noexcept {
  ++count_;
  const double delta = loss_nats - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (loss_nats - mean_);
}

void LossAccumulator::merge(const LossAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto n_a = static_cast<double>(count_);
  const auto n_b = static_cast<double>(other.count_);
  const double n = n_a + n_b;
  const double delta = other.mean_ - mean_;
  mean_ += delta * n_b / n;
  m2_ += other.m2_ + delta * delta * n_a * n_b / n;
  count_ += other.count_;
}

double LossAccumulator::variance() const noexcept {
  if (count_ == 0) return 0.0;
  return std::max(0.0, m2_ / static_cast<double>(count_));
}

nlohmann::json AggregateLoss::to_json() const {
  return nlohmann::json{{"mean_loss_nats", mean_loss_nats},
                        {"var_loss_nats", var_loss_nats},
                        {"count", count},
                        {"split", split ? nlohmann::json(*split) : nlohmann::json(nullptr)},
                        {"kind", to_string(kind)}};
}

AggregateLoss aggregate_losses(std::span<const LossRecord> records, const LossFilter& filter) {
  LossAccumulator acc;
  for (const auto& r : records) {
    if (filter.split && r.split != *filter.split) continue;
    if (!matches(filter.kind, r.kind)) continue;
    if (!std::isfinite(r.logprob_nats)) throw DataError("non-finite logprob for " + r.qid);
    if (r.logprob_nats > 0.0) throw DataError("positive logprob for " + r.qid);
    acc.add(-r.logprob_nats);
  }
  if (acc.count() == 0) {
    throw DomainError("no loss records match split '" + filter.split.value_or("*") + "' and kind " +
                      std::string(to_string(filter.kind)));
  }
  AggregateLoss out;
  out.mean_loss_nats = acc.mean();
  out.var_loss_nats = acc.variance();
  out.count = acc.count();
  out.split = filter.split;
  out.kind = filter.kind;
  return out;
}

}  // namespace hopcap
