#include "hopcap/questions.hpp"

#include "hopcap/error.hpp"

namespace hopcap {

std::string_view to_string(QuestionKind kind) noexcept {
  switch (kind) {
    case QuestionKind::OneHop: return "one_hop";
    case QuestionKind::TwoHop: return "two_hop";
    case QuestionKind::TwoHopCoT: return "two_hop_cot";
  }
  return "one_hop";
}

QuestionKind parse_question_kind(std::string_view text) {
  if (text == "one_hop") return QuestionKind::OneHop;
  if (text == "two_hop") return QuestionKind::TwoHop;
  if (text == "two_hop_cot") return QuestionKind::TwoHopCoT;
  throw DataError("unknown question kind: " + std::string(text));
}

std::string make_qid(const Query& query) {
  if (query.kind == QuestionKind::OneHop) return "1h:" + std::to_string(query.e1) + ":" + query.a;
  return "2h:" + std::to_string(query.e1) + ":" + query.r.value_or("") + ":" + query.a;
}

QAItem render_question(const World& world, EntityId e1, std::optional<std::size_t> relation, std::size_t attribute,
                       QuestionKind kind) {
  const auto& config = world.config;
  if (e1 >= world.size()) throw DomainError("unknown entity " + std::to_string(e1));
  if (attribute >= config.attribute_count()) throw DomainError("attribute index out of range");

  QAItem item;
  item.query.e1 = e1;
  item.query.a = config.attribute_name(attribute);
  item.query.kind = kind;
  const auto e1_name = world.full_name(e1);
  const auto& a_name = item.query.a;

  if (kind == QuestionKind::OneHop) {
    if (relation) throw DomainError("one-hop questions take no relation");
    item.answer = world.answer_text(e1, attribute);
    item.text = "What was " + e1_name + "'s " + a_name + "? " + item.answer;
  } else {
    if (!relation) throw DomainError("two-hop questions need a first-hop relation");
    if (!config.is_relation(*relation)) {
      throw DomainError("'" + config.attribute_name(*relation) + "' is a property and cannot be a first hop");
    }
    const auto& r_name = config.relations[*relation];
    item.query.r = r_name;
    const auto e2 = world.relation_target(e1, *relation);
    item.e2 = e2;
    item.answer = world.answer_text(e2, attribute);
    const auto prompt = "What was " + e1_name + "'s " + r_name + "'s " + a_name + "? ";
    if (kind == QuestionKind::TwoHop) {
      item.text = prompt + item.answer;
    } else {
      const auto e2_name = world.full_name(e2);
      item.text = prompt + e1_name + "'s " + r_name + " was " + e2_name + ". " + e2_name + "'s " + a_name + " was " +
                  item.answer + ".";
    }
  }
  item.qid = make_qid(item.query);
  return item;
}

QAItem render_question(const World& world, const Query& query) {
  const auto& config = world.config;
  const auto attribute = config.find_attribute(query.a);
  if (!attribute) throw DomainError("unknown attribute '" + query.a + "'");

  std::optional<std::size_t> relation;
  if (query.kind == QuestionKind::OneHop) {
    if (query.r) throw DomainError("one-hop query must not carry a relation");
  } else {
    if (!query.r) throw DomainError("two-hop query needs a relation");
    const auto any = config.find_attribute(*query.r);
    if (!any) throw DomainError("unknown attribute '" + *query.r + "'");
    relation = *any;  // render_question rejects properties in this position
  }
  return render_question(world, query.e1, relation, *attribute, query.kind);
}

}  // namespace hopcap
