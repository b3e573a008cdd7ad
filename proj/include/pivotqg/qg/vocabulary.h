#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace pivotqg::qg {

using TokenId = long;

/// Fixed token <-> index map. Indices 0..3 are reserved.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBos = 2;
  static constexpr TokenId kEos = 3;

  Vocabulary();

  // Most frequent tokens first, ties broken lexicographically, until the
  // vocabulary holds max_size entries including the reserved ones.
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpora,
                          std::size_t max_size);

  TokenId add(const std::string& token);
  TokenId index(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }

  friend void to_json(nlohmann::json& j, const Vocabulary& v);
  friend void from_json(const nlohmann::json& j, Vocabulary& v);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Per-example extension of a Vocabulary with the source tokens it lacks.
/// Extended indices [vocab.size(), vocab.size() + extra) name those tokens.
class DynamicDictionary {
 public:
  DynamicDictionary() = default;
  DynamicDictionary(const Vocabulary& vocab, const std::vector<std::string>& source);

  std::size_t fixed_size() const { return fixed_size_; }
  std::size_t extended_size() const { return fixed_size_ + extra_.size(); }
  const std::vector<std::string>& extra_tokens() const { return extra_; }

  // Extended index per source position (fixed index when in-vocabulary).
  const std::vector<TokenId>& source_ids() const { return source_ids_; }

  // Target index: fixed if known, else dynamic if in the source, else kUnk.
  TokenId target_id(const Vocabulary& vocab, const std::string& token) const;
  std::string resolve(const Vocabulary& vocab, TokenId id) const;
  bool is_dynamic(TokenId id) const { return id >= static_cast<TokenId>(fixed_size_); }

 private:
  std::size_t fixed_size_ = 0;
  std::vector<std::string> extra_;
  std::unordered_map<std::string, TokenId> extra_ids_;
  std::vector<TokenId> source_ids_;
};

}  // namespace pivotqg::qg
