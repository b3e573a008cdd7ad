#include "pivotqg/grouping/porter_stemmer.h"

#include <algorithm>
#include <cctype>
#include <initializer_list>
#include <utility>

#include "pivotqg/text/review.h"

namespace pivotqg {

namespace {

class Stemmer {
 public:
  explicit Stemmer(std::string_view word) : w_(word) {}

  std::string run() {
    if (w_.size() <= 2) return w_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 || !consonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V] for the first `len` letters.
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // *o: stem ends consonant-vowel-consonant, the last not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) const {
    return w_.size() >= suffix.size() &&
           std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
  }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace(std::string_view suffix, std::string_view with) {
    w_.replace(w_.size() - suffix.size(), suffix.size(), with);
  }

  // First matching suffix decides; it is replaced only when m(stem) > min_m.
  void rules(std::initializer_list<std::pair<std::string_view, std::string_view>> list, int min_m) {
    for (const auto& [suffix, with] : list) {
      if (ends(suffix)) {
        if (measure(stem_len(suffix)) > min_m) replace(suffix, with);
        return;
      }
    }
  }

  void step1a() {
    if (ends("sses")) {
      replace("sses", "ss");
    } else if (ends("ies")) {
      replace("ies", "i");
    } else if (ends("ss")) {
      // unchanged
    } else if (ends("s")) {
      replace("s", "");
    }
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace("eed", "ee");
      return;
    }
    bool stripped = false;
    for (std::string_view suffix : {"ed", "ing"}) {
      if (ends(suffix) && has_vowel(stem_len(suffix))) {
        replace(suffix, "");
        stripped = true;
        break;
      }
    }
    if (!stripped) return;
    if (ends("at")) {
      replace("at", "ate");
    } else if (ends("bl")) {
      replace("bl", "ble");
    } else if (ends("iz")) {
      replace("iz", "ize");
    } else if (double_consonant(w_.size())) {
      const char last = w_.back();
      if (last != 'l' && last != 's' && last != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
      w_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) replace("y", "i");
  }

  void step2() {
    rules({{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
           {"izer", "ize"}, {"abli", "able"}, {"alli", "al"}, {"entli", "ent"},
           {"eli", "e"}, {"ousli", "ous"}, {"ization", "ize"}, {"ation", "ate"},
           {"ator", "ate"}, {"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"},
           {"ousness", "ous"}, {"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}},
          0);
  }

  void step3() {
    rules({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
           {"ical", "ic"}, {"ful", ""}, {"ness", ""}},
          0);
  }

  void step4() {
    static constexpr std::string_view kSuffixes[] = {
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
        "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"};
    for (std::string_view suffix : kSuffixes) {
      if (!ends(suffix)) continue;
      const std::size_t len = stem_len(suffix);
      bool ok = measure(len) > 1;
      if (suffix == "ion") ok = ok && len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't');
      if (ok) replace(suffix, "");
      return;
    }
  }

  void step5a() {
    if (!ends("e")) return;
    const std::size_t len = stem_len("e");
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') {
      w_.pop_back();
    }
  }

  std::string w_;
};

}  // namespace

std::string porter_stem(std::string_view word) { return Stemmer(word).run(); }

std::string stem_key(std::string_view surface) {
  const Paragraph tokens = [&] {
    try {
      return tokenize(surface);
    } catch (...) {
      return Paragraph{};
    }
  }();
  auto wordlike = [](const std::string& t) {
    return std::any_of(t.begin(), t.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) > 127;
    });
  };
  const bool any_word = std::any_of(tokens.tokens.begin(), tokens.tokens.end(), wordlike);
  std::string key;
  for (const auto& t : tokens.tokens) {
    if (any_word && !wordlike(t)) continue;  // stray punctuation
    std::string lower = t;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!key.empty()) key += ' ';
    key += porter_stem(lower);
  }
  return key;
}

}  // namespace pivotqg
