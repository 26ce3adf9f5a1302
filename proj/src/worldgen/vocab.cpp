#include "hopcap/vocab.hpp"

#include "hopcap/error.hpp"

namespace hopcap {

namespace {

bool is_word_byte(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') || u >= 0x80;
}

}  // namespace

std::vector<std::string> split_pieces(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    // A single space joins the piece that follows it.
    if (text[i] == ' ' && i + 1 < text.size() && text[i + 1] != ' ') ++i;
    if (is_word_byte(text[i])) {
      while (i < text.size() && is_word_byte(text[i])) ++i;
    } else {
      ++i;
    }
    pieces.emplace_back(text.substr(start, i - start));
  }
  return pieces;
}

Vocab::Vocab() {
  add("<pad>");
  add("<eoa>");
}

const std::string& Vocab::token(TokenId id) const {
  if (id >= tokens_.size()) throw DomainError("token id out of range: " + std::to_string(id));
  return tokens_[id];
}

bool Vocab::contains(std::string_view piece) const { return index_.contains(std::string(piece)); }

TokenId Vocab::add(std::string piece) {
  const auto [it, inserted] = index_.try_emplace(piece, static_cast<TokenId>(tokens_.size()));
  if (inserted) tokens_.push_back(std::move(piece));
  return it->second;
}

std::vector<TokenId> Vocab::tokenize(std::string_view text) const {
  std::vector<TokenId> ids;
  for (auto& piece : split_pieces(text)) {
    const auto it = index_.find(piece);
    if (it == index_.end()) throw DomainError("symbol outside the vocabulary: '" + piece + "'");
    ids.push_back(it->second);
  }
  return ids;
}

std::string Vocab::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (const auto id : ids) {
    if (id == kPad || id == kEndOfAnswer) continue;
    out += token(id);
  }
  return out;
}

Vocab build_vocab(std::span<const QAItem* const> items, std::size_t max_size) {
  Vocab vocab;
  for (const auto* item : items) {
    for (auto& piece : split_pieces(item->text)) {
      vocab.add(std::move(piece));
      if (vocab.size() > max_size) {
        throw DomainError("corpus needs more than " + std::to_string(max_size) + " tokens");
      }
    }
  }
  return vocab;
}

Vocab build_vocab(std::span<const QAItem> items, std::size_t max_size) {
  std::vector<const QAItem*> ptrs;
  ptrs.reserve(items.size());
  for (const auto& item : items) ptrs.push_back(&item);
  return build_vocab(std::span<const QAItem* const>(ptrs), max_size);
}

}  // namespace hopcap
