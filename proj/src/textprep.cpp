#include "dupq/textprep.hpp"

#include <fstream>
#include <sstream>

#include "dupq/errors.hpp"
#include "dupq/porter.hpp"
#include "dupq/util.hpp"

namespace dupq {

namespace {

bool is_word_char(unsigned char c, TokenizeMode mode) {
  if (c >= 0x80) return true;
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
  if (mode == TokenizeMode::code && (c == '_' || c == '$')) return true;
  return false;
}

char lower_ascii(unsigned char c) {
  if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return static_cast<char>(c);
}

constexpr const char* kEnglishStops[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",    "am",
    "an",      "and",     "any",    "are",     "aren",    "as",      "at",     "be",
    "because", "been",    "before", "being",   "below",   "between", "both",   "but",
    "by",      "can",     "cannot", "could",   "couldn",  "did",     "didn",   "do",
    "does",    "doesn",   "doing",  "don",     "down",    "during",  "each",   "few",
    "for",     "from",    "further", "had",    "hadn",    "has",     "hasn",   "have",
    "haven",   "having",  "he",     "her",     "here",    "hers",    "herself", "him",
    "himself", "his",     "how",    "i",       "if",      "in",      "into",   "is",
    "isn",     "it",      "its",    "itself",  "just",    "ll",      "me",     "more",
    "most",    "mustn",   "my",     "myself",  "no",      "nor",     "not",    "now",
    "of",      "off",     "on",     "once",    "only",    "or",      "other",  "ought",
    "our",     "ours",    "ourselves", "out",  "over",    "own",     "re",     "s",
    "same",    "shan",    "she",    "should",  "shouldn", "so",      "some",   "such",
    "t",       "than",    "that",   "the",     "their",   "theirs",  "them",   "themselves",
    "then",    "there",   "these",  "they",    "this",    "those",   "through", "to",
    "too",     "under",   "until",  "up",      "ve",      "very",    "was",    "wasn",
    "we",      "were",    "weren",  "what",    "when",    "where",   "which",  "while",
    "who",     "whom",    "why",    "will",    "with",    "won",     "would",  "wouldn",
    "you",     "your",    "yours",  "yourself", "yourselves",
};

}  // namespace

TokenList tokenize(std::string_view input, TokenizeMode mode) {
  TokenList tokens;
  std::string current;
  for (unsigned char c : input) {
    if (is_word_char(c, mode)) {
      current.push_back(lower_ascii(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

StopList::StopList(const std::vector<std::string>& words) {
  for (const std::string& w : words) {
    std::string t = to_lower_ascii(trim(w));
    if (!t.empty()) words_.insert(std::move(t));
  }
}

const StopList& StopList::english() {
  static const StopList instance = [] {
    std::vector<std::string> words(std::begin(kEnglishStops), std::end(kEnglishStops));
    return StopList(words);
  }();
  return instance;
}

StopList StopList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open stop-word list: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    words.push_back(t);
  }
  return StopList(words);
}

TokenList remove_stopwords(const TokenList& tokens, const StopList& stops) {
  TokenList out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (!stops.contains(t)) out.push_back(t);
  }
  return out;
}

TokenList stem(const TokenList& tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(porter_stem(t));
  return out;
}

void TagSynonymMap::add(const std::string& synonym, const std::string& master) {
  std::string syn = to_lower_ascii(trim(synonym));
  std::string mas = to_lower_ascii(trim(master));
  if (syn.empty() || mas.empty()) throw ConfigError("tag synonym entries must be non-empty");
  if (syn == mas) throw ConfigError("tag synonym maps \"" + syn + "\" to itself");
  auto existing = entries_.find(syn);
  if (existing != entries_.end()) {
    if (existing->second != mas) {
      throw ConfigError("tag synonym \"" + syn + "\" maps to both \"" + existing->second +
                        "\" and \"" + mas + "\"");
    }
    return;
  }
  if (masters_.count(syn)) {
    throw ConfigError("tag \"" + syn + "\" is already a master and cannot be a synonym");
  }
  if (entries_.count(mas)) {
    throw ConfigError("tag \"" + mas + "\" is already a synonym and cannot be a master");
  }
  entries_.emplace(syn, mas);
  masters_.insert(mas);
}

const std::string& TagSynonymMap::resolve(const std::string& tag) const {
  auto it = entries_.find(tag);
  return it == entries_.end() ? tag : it->second;
}

TagSynonymMap TagSynonymMap::from_csv(std::string_view text) {
  TagSynonymMap map;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (line_no == 1 && t == "synonym,master") continue;
    auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      throw ConfigError("tag synonym line " + std::to_string(line_no) +
                        ": expected exactly two comma-separated fields");
    }
    map.add(t.substr(0, comma), t.substr(comma + 1));
  }
  return map;
}

TagSynonymMap TagSynonymMap::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open tag synonym map: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str());
}

std::set<std::string> normalize_tags(const std::set<std::string>& tags,
                                     const TagSynonymMap& synonyms) {
  std::set<std::string> out;
  for (const std::string& tag : tags) out.insert(synonyms.resolve(tag));
  return out;
}

std::string strip_duplicate_marker(std::string_view title) {
  std::string t = trim(title);
  static constexpr std::string_view marker = "[duplicate]";
  if (t.size() >= marker.size()) {
    std::string tail = to_lower_ascii(t.substr(t.size() - marker.size()));
    if (tail == marker) t = trim(t.substr(0, t.size() - marker.size()));
  }
  return t;
}

PreparedQuestion prepare_question(const Question& q, const TagSynonymMap& synonyms,
                                  const StopList& stops) {
  PreparedQuestion out;
  out.id = q.id;
  out.title_tokens = stem(remove_stopwords(tokenize(strip_duplicate_marker(q.title)), stops));
  out.body_tokens = stem(remove_stopwords(tokenize(q.body_text), stops));
  for (const std::string& block : q.code_blocks) {
    TokenList toks = tokenize(block, TokenizeMode::code);
    out.code_tokens.insert(out.code_tokens.end(), toks.begin(), toks.end());
  }
  out.tags = normalize_tags(q.tags, synonyms);
  return out;
}

}  // namespace dupq
