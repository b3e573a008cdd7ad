#include "pivotqg/answers/annotator.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <string_view>
#include <unordered_set>

#include "pivotqg/common/error.h"

namespace pivotqg {

std::string_view candidate_kind_name(CandidateKind kind) {
  return kind == CandidateKind::NamedEntity ? "named_entity" : "noun_phrase";
}

CandidateKind parse_candidate_kind(std::string_view name) {
  if (name == "named_entity") return CandidateKind::NamedEntity;
  if (name == "noun_phrase") return CandidateKind::NounPhrase;
  throw Error(Errc::BadData, "unknown candidate kind '" + std::string(name) + "'");
}

namespace {

using Pos = HeuristicAnnotator::Pos;
using WordSet = std::unordered_set<std::string_view>;

const WordSet kDeterminers = {
    "a", "an", "the", "this", "that", "these", "those", "his", "her", "its",
    "their", "our", "my", "your", "some", "any", "every", "each", "no",
    "several", "many", "few", "all", "both", "another", "such"};
const WordSet kPronouns = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
    "who", "whom", "whose", "which", "what", "where", "when", "why", "how",
    "there", "here", "himself", "herself", "itself", "themselves", "one"};
const WordSet kPrepositions = {
    "in", "on", "at", "by", "for", "with", "from", "to", "of", "into", "onto",
    "about", "after", "before", "during", "over", "under", "between", "among",
    "through", "across", "against", "without", "within", "upon", "near",
    "since", "until", "towards", "toward", "behind", "beyond", "above",
    "below", "around", "along", "despite", "via", "per", "as", "than"};
const WordSet kConjunctions = {"and", "or", "but", "nor", "so", "yet", "if",
                               "because", "although", "though", "while",
                               "whereas", "unless", "whether", "then"};
const WordSet kAuxiliaries = {
    "is", "was", "are", "were", "be", "been", "being", "am", "has", "have",
    "had", "do", "does", "did", "will", "would", "can", "could", "may",
    "might", "shall", "should", "must", "not"};
const WordSet kAdverbs = {"also", "very", "often", "still", "already", "soon",
                          "never", "always", "later", "again", "too",
                          "however", "therefore", "thus", "only", "just",
                          "even", "now", "once", "ever", "almost"};
const WordSet kVerbs = {
    "born", "made", "went", "became", "become", "began", "begun", "known",
    "written", "wrote", "took", "taken", "gave", "given", "found", "led",
    "built", "won", "held", "left", "came", "come", "saw", "seen", "said",
    "told", "got", "grew", "grown", "ran", "run", "rains", "fell", "fought",
    "sold", "bought", "brought", "thought", "taught", "kept", "lost", "met",
    "paid", "sent", "spent", "stood", "understood", "wore", "worn", "chose",
    "chosen", "drew", "drawn", "flew", "flown", "rose", "risen", "spoke",
    "spoken", "struck", "swore", "threw", "thrown", "broke", "broken",
    "includes", "include", "lives", "lived", "live", "rains", "rain", "died",
    "die", "dies", "makes", "make", "is", "has"};
const WordSet kAdjectives = {
    "big", "small", "large", "new", "old", "first", "last", "second", "third",
    "great", "good", "bad", "long", "short", "high", "low", "young", "early",
    "late", "major", "main", "other", "same", "different", "important",
    "public", "national", "several", "many", "little", "own", "free", "full",
    "true", "whole", "modern", "ancient", "red", "blue", "green", "black",
    "white", "famous", "popular", "human", "local", "social", "political"};
const WordSet kMonths = {"january", "february", "march", "april", "may",
                         "june", "july", "august", "september", "october",
                         "november", "december"};
const WordSet kWeekdays = {"monday", "tuesday", "wednesday", "thursday",
                           "friday", "saturday", "sunday"};
const WordSet kPlaces = {
    "india", "china", "japan", "france", "germany", "england", "britain",
    "america", "africa", "asia", "europe", "australia", "canada", "russia",
    "italy", "spain", "egypt", "mexico", "brazil", "london", "paris",
    "delhi", "mumbai", "berlin", "rome", "tokyo", "beijing", "moscow"};
// Entity connectors allowed between two capitalised tokens.
const WordSet kConnectors = {"of", "de", "von", "van", "del", "da"};

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_punct_token(std::string_view t) {
  return std::all_of(t.begin(), t.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

bool is_numeric(std::string_view t) {
  bool digit = false;
  for (char c : t) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != ',' && c != '.' && c != ':' && c != '-' && c != '%') {
      return false;
    }
  }
  return digit;
}

bool is_capitalized(std::string_view t) {
  return !t.empty() && std::isupper(static_cast<unsigned char>(t[0]));
}

bool sentence_initial(const Paragraph& p, std::size_t t) {
  if (t == 0) return true;
  const auto& prev = p.tokens[t - 1];
  return prev == "." || prev == "!" || prev == "?" || prev == "\"";
}

bool closed_class(const std::string& lower) {
  return kDeterminers.count(lower) || kPronouns.count(lower) ||
         kPrepositions.count(lower) || kConjunctions.count(lower) ||
         kAuxiliaries.count(lower) || kAdverbs.count(lower);
}

std::string entity_label(const Paragraph& p, std::size_t first, std::size_t last) {
  const std::string head = lowercase(p.tokens[first]);
  if (kMonths.count(head) || kWeekdays.count(head)) return "DATE";
  if (first == last && is_numeric(p.tokens[first])) {
    const auto& t = p.tokens[first];
    if (t.size() == 4 && std::all_of(t.begin(), t.end(), ::isdigit) &&
        (t[0] == '1' || t[0] == '2')) {
      return "DATE";
    }
    return "NUMBER";
  }
  if (kPlaces.count(head)) return "LOCATION";
  return "ENTITY";
}

}  // namespace

std::vector<Pos> HeuristicAnnotator::tag(const Paragraph& p) const {
  std::vector<Pos> tags(p.size(), Pos::Other);
  for (std::size_t t = 0; t < p.size(); ++t) {
    const auto& tok = p.tokens[t];
    const std::string lower = lowercase(tok);
    const Pos prev = t > 0 ? tags[t - 1] : Pos::Other;
    Pos pos;
    if (is_punct_token(tok)) {
      pos = Pos::Punct;
    } else if (is_numeric(tok)) {
      pos = Pos::Num;
    } else if (is_capitalized(tok) &&
               !(sentence_initial(p, t) && (closed_class(lower) || kVerbs.count(lower))) &&
               tok != "I") {
      pos = Pos::Propn;
    } else if (kDeterminers.count(lower)) {
      pos = Pos::Det;
    } else if (kPronouns.count(lower)) {
      pos = Pos::Pron;
    } else if (kPrepositions.count(lower)) {
      pos = Pos::Prep;
    } else if (kConjunctions.count(lower)) {
      pos = Pos::Conj;
    } else if (kAuxiliaries.count(lower)) {
      pos = Pos::Aux;
    } else if (kAdverbs.count(lower) || (lower.size() > 4 && ends_with(lower, "ly"))) {
      pos = Pos::Adv;
    } else if (kAdjectives.count(lower)) {
      pos = Pos::Adj;
    } else if (kVerbs.count(lower)) {
      pos = Pos::Verb;
    } else if (lower.size() > 4 && (ends_with(lower, "ing") || ends_with(lower, "ed"))) {
      // Participles directly after a determiner or adjective modify a noun.
      pos = (prev == Pos::Det || prev == Pos::Adj) ? Pos::Adj : Pos::Verb;
    } else if (lower.size() > 4 &&
               (ends_with(lower, "ous") || ends_with(lower, "ful") ||
                ends_with(lower, "ive") || ends_with(lower, "able") ||
                ends_with(lower, "ible") || ends_with(lower, "less") ||
                ends_with(lower, "ical") || ends_with(lower, "ish"))) {
      pos = Pos::Adj;
    } else {
      pos = Pos::Noun;
    }
    tags[t] = pos;
  }
  return tags;
}

Annotation HeuristicAnnotator::annotate(const Paragraph& p) const {
  Annotation out;
  const auto tags = tag(p);

  // Entities: runs of proper nouns (optionally joined by a connector), month
  // names with a following numeral, and standalone numerals.
  auto entity_like = [&](std::size_t t) {
    if (tags[t] == Pos::Propn) return true;
    const std::string lower = lowercase(p.tokens[t]);
    return is_capitalized(p.tokens[t]) &&
           (kMonths.count(lower) || kWeekdays.count(lower) || kPlaces.count(lower));
  };
  std::size_t t = 0;
  while (t < p.size()) {
    if (tags[t] == Pos::Num) {
      out.entities.push_back({{p.token_offsets[t].start, p.token_offsets[t].end},
                              entity_label(p, t, t)});
      ++t;
      continue;
    }
    if (!entity_like(t)) {
      ++t;
      continue;
    }
    std::size_t last = t;
    while (true) {
      if (last + 1 < p.size() && entity_like(last + 1)) {
        ++last;
      } else if (last + 2 < p.size() && kConnectors.count(p.tokens[last + 1]) &&
                 entity_like(last + 2)) {
        last += 2;
      } else if (last + 1 < p.size() && tags[last + 1] == Pos::Num &&
                 kMonths.count(lowercase(p.tokens[last]))) {
        ++last;
      } else {
        break;
      }
    }
    out.entities.push_back({{p.token_offsets[t].start, p.token_offsets[last].end},
                            entity_label(p, t, last)});
    t = last + 1;
  }

  // Noun phrases: Det? (Adj|Num)* (Noun|Propn)+, or Det? Num+.
  t = 0;
  while (t < p.size()) {
    std::size_t j = t;
    if (tags[j] == Pos::Det) ++j;
    std::size_t k = j;
    while (k < p.size() && (tags[k] == Pos::Adj || tags[k] == Pos::Num)) ++k;
    std::size_t m = k;
    while (m < p.size() && (tags[m] == Pos::Noun || tags[m] == Pos::Propn)) ++m;
    if (m > k) {
      out.noun_phrases.push_back({p.token_offsets[t].start, p.token_offsets[m - 1].end});
      t = m;
      continue;
    }
    const bool all_num = k > j && std::all_of(tags.begin() + static_cast<long>(j),
                                              tags.begin() + static_cast<long>(k),
                                              [](Pos x) { return x == Pos::Num; });
    if (all_num) {
      out.noun_phrases.push_back({p.token_offsets[t].start, p.token_offsets[k - 1].end});
      t = k;
      continue;
    }
    ++t;
  }
  return out;
}

std::vector<AnswerSpan> extract_candidates(const Paragraph& paragraph,
                                           CandidateKind kind,
                                           const Annotator& annotator) {
  if (paragraph.tokens.empty()) {
    throw Error(Errc::EmptyInput, "paragraph has no tokens");
  }
  const Annotation annotation = annotator.annotate(paragraph);
  std::vector<CharRange> ranges;
  if (kind == CandidateKind::NamedEntity) {
    for (const auto& e : annotation.entities) ranges.push_back(e.range);
  } else {
    ranges = annotation.noun_phrases;
  }
  const SpanSource source =
      kind == CandidateKind::NamedEntity ? SpanSource::NamedEntity : SpanSource::NounPhrase;

  std::vector<AnswerSpan> spans;
  std::set<CharRange> seen;
  for (const auto& r : ranges) {
    if (r.end > paragraph.text.size() || r.start >= r.end) continue;
    AnswerSpan span;
    try {
      span = validate_custom_span(paragraph, r);
    } catch (const Error& e) {
      if (e.code() == Errc::EmptySpan) continue;
      throw;
    }
    span.source = source;
    if (seen.insert(span.chars).second) spans.push_back(std::move(span));
  }
  std::sort(spans.begin(), spans.end(), [](const AnswerSpan& a, const AnswerSpan& b) {
    return a.chars < b.chars;
  });
  return spans;
}

}  // namespace pivotqg
