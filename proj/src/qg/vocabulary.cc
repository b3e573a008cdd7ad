#include "pivotqg/qg/vocabulary.h"

#include <algorithm>
#include <map>

#include "pivotqg/common/error.h"

namespace pivotqg::qg {

Vocabulary::Vocabulary() {
  for (const char* t : {"<pad>", "<unk>", "<s>", "</s>"}) add(t);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpora,
                             std::size_t max_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpora) {
    for (const auto& t : seq) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [token, _] : ranked) {
    if (v.size() >= max_size) break;
    v.add(token);
  }
  return v;
}

TokenId Vocabulary::add(const std::string& token) {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

TokenId Vocabulary::index(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const { return ids_.count(token) > 0; }

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(Errc::RangeOutOfBounds, "token id " + std::to_string(id) + " outside vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

void to_json(nlohmann::json& j, const Vocabulary& v) { j = v.tokens_; }

void from_json(const nlohmann::json& j, Vocabulary& v) {
  const auto tokens = j.get<std::vector<std::string>>();
  if (tokens.size() < 4 || tokens[0] != "<pad>" || tokens[1] != "<unk>" ||
      tokens[2] != "<s>" || tokens[3] != "</s>") {
    throw Error(Errc::BadCheckpoint, "vocabulary lacks the reserved entries");
  }
  v = Vocabulary();
  for (const auto& t : tokens) v.add(t);
}

DynamicDictionary::DynamicDictionary(const Vocabulary& vocab,
                                     const std::vector<std::string>& source)
    : fixed_size_(vocab.size()) {
  source_ids_.reserve(source.size());
  for (const auto& t : source) {
    if (vocab.contains(t)) {
      source_ids_.push_back(vocab.index(t));
      continue;
    }
    auto [it, inserted] =
        extra_ids_.emplace(t, static_cast<TokenId>(fixed_size_ + extra_.size()));
    if (inserted) extra_.push_back(t);
    source_ids_.push_back(it->second);
  }
}

TokenId DynamicDictionary::target_id(const Vocabulary& vocab, const std::string& token) const {
  if (vocab.contains(token)) return vocab.index(token);
  auto it = extra_ids_.find(token);
  return it == extra_ids_.end() ? Vocabulary::kUnk : it->second;
}

std::string DynamicDictionary::resolve(const Vocabulary& vocab, TokenId id) const {
  if (is_dynamic(id)) {
    const auto k = static_cast<std::size_t>(id) - fixed_size_;
    if (k >= extra_.size()) throw Error(Errc::RangeOutOfBounds, "dynamic index out of range");
    return extra_[k];
  }
  return vocab.token(id);
}

}  // namespace pivotqg::qg
