#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hopcap/questions.hpp"

namespace hopcap {

using TokenId = std::uint32_t;

// Whole-word tokenizer built from the corpus. Text is cut into pieces that
// are either a run of word bytes (ASCII letters, digits, any non-ASCII byte)
// or a single other character. A single preceding space stays attached to
// the piece, so concatenating the pieces restores the text exactly.
class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kEndOfAnswer = 1;
  static constexpr std::size_t kDefaultMaxSize = 3000;

  Vocab();

  [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }
  [[nodiscard]] const std::string& token(TokenId id) const;
  [[nodiscard]] bool contains(std::string_view piece) const;

  // Throws DomainError for pieces outside the vocabulary.
  [[nodiscard]] std::vector<TokenId> tokenize(std::string_view text) const;
  [[nodiscard]] std::string detokenize(std::span<const TokenId> ids) const;

  [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  TokenId add(std::string piece);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

[[nodiscard]] std::vector<std::string> split_pieces(std::string_view text);

// Ids are assigned in order of first appearance after the reserved tokens.
// Throws DomainError when the corpus needs more than max_size tokens.
[[nodiscard]] Vocab build_vocab(std::span<const QAItem* const> items, std::size_t max_size = Vocab::kDefaultMaxSize);
[[nodiscard]] Vocab build_vocab(std::span<const QAItem> items, std::size_t max_size = Vocab::kDefaultMaxSize);

}  // namespace hopcap
