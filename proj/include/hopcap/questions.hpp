#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "hopcap/world.hpp"

namespace hopcap {

enum class QuestionKind { OneHop, TwoHop, TwoHopCoT };

[[nodiscard]] std::string_view to_string(QuestionKind kind) noexcept;
// "one_hop" | "two_hop" | "two_hop_cot"
[[nodiscard]] QuestionKind parse_question_kind(std::string_view text);
[[nodiscard]] inline bool is_two_hop(QuestionKind kind) noexcept { return kind != QuestionKind::OneHop; }

// (e1, r, a). r is absent for one-hop questions and must be a relation otherwise.
struct Query {
  EntityId e1 = 0;
  std::optional<std::string> r;
  std::string a;
  QuestionKind kind = QuestionKind::OneHop;

  friend bool operator==(const Query&, const Query&) = default;
};

struct QAItem {
  std::string qid;
  Query query;
  std::optional<EntityId> e2;
  std::string answer;
  std::string text;
  std::string split;

  friend bool operator==(const QAItem&, const QAItem&) = default;
};

// "1h:{e1}:{a}" and "2h:{e1}:{r}:{a}".
[[nodiscard]] std::string make_qid(const Query& query);

// One-hop:      What was {e1}'s {a}? {answer}
// Two-hop:      What was {e1}'s {r}'s {a}? {answer}
// Two-hop CoT:  What was {e1}'s {r}'s {a}? {e1}'s {r} was {e2}. {e2}'s {a} was {answer}.
// The split tag of the result is empty.
[[nodiscard]] QAItem render_question(const World& world, const Query& query);

// Index-based variant used by bulk generation; skips the name lookups.
[[nodiscard]] QAItem render_question(const World& world, EntityId e1, std::optional<std::size_t> relation,
                                     std::size_t attribute, QuestionKind kind);

}  // namespace hopcap
