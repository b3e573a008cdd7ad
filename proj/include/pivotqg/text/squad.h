#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pivotqg/common/range.h"
#include "pivotqg/text/paragraph.h"

namespace pivotqg {

struct SquadRecord {
  std::string id;
  std::size_t paragraph_index = 0;  // into SquadDataset::paragraphs
  std::string question;
  std::optional<CharRange> answer;  // first gold answer; absent when unanswerable
};

struct SquadDataset {
  std::vector<Paragraph> paragraphs;
  std::vector<SquadRecord> records;
};

// Reads SQuAD 1.x / 2.0 JSON. answer_start counts code points. An answer
// whose text does not match the context at its offset raises BadData.
SquadDataset load_squad(const std::string& path);
SquadDataset parse_squad(const std::string& json_text);

}  // namespace pivotqg
