#include "pivotqg/text/squad.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pivotqg/common/error.h"
#include "pivotqg/common/utf8.h"
#include "pivotqg/text/review.h"

namespace pivotqg {

SquadDataset load_squad(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::BadData, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_squad(buf.str());
}

SquadDataset parse_squad(const std::string& json_text) {
  SquadDataset out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    for (const auto& article : doc.at("data")) {
      for (const auto& para : article.at("paragraphs")) {
        const std::string context = para.at("context").get<std::string>();
        const std::size_t pi = out.paragraphs.size();
        out.paragraphs.push_back(tokenize(context, std::to_string(pi)));
        const std::u32string& text = out.paragraphs.back().text;
        for (const auto& qa : para.at("qas")) {
          SquadRecord r;
          r.id = qa.value("id", std::string{});
          r.paragraph_index = pi;
          r.question = qa.at("question").get<std::string>();
          const bool impossible = qa.value("is_impossible", false);
          const auto& answers = qa.contains("answers") ? qa.at("answers") : nlohmann::json::array();
          if (!impossible && !answers.empty()) {
            const auto& a = answers.front();
            const std::u32string answer_text = utf8::decode(a.at("text").get<std::string>());
            const auto start = a.at("answer_start").get<std::size_t>();
            const CharRange range{start, start + answer_text.size()};
            if (range.end > text.size() || text.compare(start, answer_text.size(), answer_text) != 0) {
              throw Error(Errc::BadData, "answer text does not match context for " + r.id);
            }
            r.answer = range;
          }
          out.records.push_back(std::move(r));
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadData, std::string("malformed SQuAD json: ") + e.what());
  }
  return out;
}

}  // namespace pivotqg
