#include "dupq/porter.hpp"

namespace dupq {

namespace {

// Working state for a single word. b_ holds the word, k_ indexes its
// last character, and j_ indexes the last character of the stem once a
// candidate suffix has been matched by ends().
class Stemmer {
 public:
  std::string run(std::string_view word) {
    b_.assign(word);
    k_ = static_cast<int>(b_.size()) - 1;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return std::move(b_);
  }

 private:
  std::string b_;
  int k_ = 0;
  int j_ = 0;

  bool cons(int i) const {
    switch (b_[static_cast<std::size_t>(i)]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Measure of the stem b_[0..j_]: the m in the [C](VC)^m[V] form.
  int m() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!cons(i)) return true;
    }
    return false;
  }

  bool double_cons(int i) const {
    if (i < 1) return false;
    if (b_[static_cast<std::size_t>(i)] != b_[static_cast<std::size_t>(i - 1)]) return false;
    return cons(i);
  }

  // consonant-vowel-consonant ending at i with the final consonant not
  // w, x or y; marks short stems like -hop that restore a final e.
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    char c = b_[static_cast<std::size_t>(i)];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) {
    int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (b_.compare(static_cast<std::size_t>(k_ + 1 - len), static_cast<std::size_t>(len), s) != 0) {
      return false;
    }
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    b_.resize(static_cast<std::size_t>(j_ + 1));
    b_.append(s);
    k_ = static_cast<int>(b_.size()) - 1;
  }

  void trim_to(int new_k) {
    k_ = new_k;
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }

  void step1a() {
    if (b_[static_cast<std::size_t>(k_)] != 's') return;
    if (ends("sses")) {
      set_to("ss");
    } else if (ends("ies")) {
      set_to("i");
    } else if (ends("ss")) {
      // kept as is
    } else if (ends("s")) {
      set_to("");
    }
  }

  void step1b() {
    if (ends("eed")) {
      if (m() > 0) trim_to(k_ - 1);
      return;
    }
    bool removed = false;
    if (ends("ed")) {
      if (!vowel_in_stem()) return;
      set_to("");
      removed = true;
    } else if (ends("ing")) {
      if (!vowel_in_stem()) return;
      set_to("");
      removed = true;
    }
    if (!removed) return;
    if (ends("at")) {
      set_to("ate");
    } else if (ends("bl")) {
      set_to("ble");
    } else if (ends("iz")) {
      set_to("ize");
    } else if (double_cons(k_)) {
      char c = b_[static_cast<std::size_t>(k_)];
      if (c != 'l' && c != 's' && c != 'z') trim_to(k_ - 1);
    } else {
      j_ = k_;
      if (m() == 1 && cvc(k_)) set_to("e");
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
  }

  struct Rule {
    std::string_view from;
    std::string_view to;
  };

  // Only the longest matching suffix is considered per step; when its
  // measure condition fails no other rule in the step applies. Tables
  // are therefore ordered by descending suffix length.
  void apply_table(const Rule* rules, std::size_t count, int min_measure) {
    for (std::size_t i = 0; i < count; ++i) {
      if (ends(rules[i].from)) {
        if (m() > min_measure - 1) set_to(rules[i].to);
        return;
      }
    }
  }

  void step2() {
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"ization", "ize"}, {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"tional", "tion"}, {"biliti", "ble"},  {"entli", "ent"},
        {"ousli", "ous"},   {"ation", "ate"},   {"alism", "al"},    {"aliti", "al"},
        {"iviti", "ive"},   {"enci", "ence"},   {"anci", "ance"},   {"izer", "ize"},
        {"abli", "able"},   {"alli", "al"},     {"ator", "ate"},    {"eli", "e"},
    };
    apply_table(rules, std::size(rules), 1);
  }

  void step3() {
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ness", ""},  {"ful", ""},
    };
    apply_table(rules, std::size(rules), 1);
  }

  void step4() {
    static constexpr std::string_view rules[] = {
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ion", "ism",
        "ate",   "iti",  "ous",  "ive",  "ize",  "al",   "er",  "ic",  "ou",
    };
    for (std::string_view s : rules) {
      if (!ends(s)) continue;
      if (s == "ion" &&
          !(j_ >= 0 && (b_[static_cast<std::size_t>(j_)] == 's' ||
                        b_[static_cast<std::size_t>(j_)] == 't'))) {
        return;
      }
      if (m() > 1) set_to("");
      return;
    }
  }

  void step5a() {
    if (b_[static_cast<std::size_t>(k_)] != 'e') return;
    j_ = k_;
    int measure = m();
    if (measure > 1 || (measure == 1 && !cvc(k_ - 1))) trim_to(k_ - 1);
  }

  void step5b() {
    j_ = k_;
    if (b_[static_cast<std::size_t>(k_)] == 'l' && double_cons(k_) && m() > 1) trim_to(k_ - 1);
  }
};

}  // namespace

std::string porter_stem(std::string_view word) {
  if (word.size() < 3) return std::string(word);
  for (char c : word) {
    if (c < 'a' || c > 'z') return std::string(word);
  }
  Stemmer stemmer;
  return stemmer.run(word);
}

}  // namespace dupq
