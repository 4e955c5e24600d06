#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dupq/types.hpp"

namespace dupq {

using TokenList = std::vector<std::string>;

// text mode splits on anything outside ASCII alphanumerics; code mode
// additionally keeps '_' and '$' so identifiers survive intact. Bytes
// outside ASCII are treated as word characters in both modes.
enum class TokenizeMode { text, code };

TokenList tokenize(std::string_view input, TokenizeMode mode = TokenizeMode::text);

class StopList {
 public:
  StopList() = default;
  explicit StopList(const std::vector<std::string>& words);

  // Built-in English list (version en-v1), used when no file is given.
  static const StopList& english();
  static StopList from_file(const std::filesystem::path& path);

  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

TokenList remove_stopwords(const TokenList& tokens, const StopList& stops);

TokenList stem(const TokenList& tokens);

// synonym tag -> master tag. No master ever appears as a key, so
// resolution is a single lookup and idempotent by construction.
class TagSynonymMap {
 public:
  TagSynonymMap() = default;

  static TagSynonymMap from_file(const std::filesystem::path& path);
  static TagSynonymMap from_csv(std::string_view text);

  void add(const std::string& synonym, const std::string& master);
  const std::string& resolve(const std::string& tag) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
  std::unordered_set<std::string> masters_;
};

std::set<std::string> normalize_tags(const std::set<std::string>& tags,
                                     const TagSynonymMap& synonyms);

struct PreparedQuestion {
  PostId id = 0;
  TokenList title_tokens;  // tokenize -> remove_stopwords -> stem
  TokenList body_tokens;   // same pipeline as title
  TokenList code_tokens;   // code-mode tokenize only
  std::set<std::string> tags;  // synonym-normalized
};

// Strips a trailing "[duplicate]" marker (any case) that closed
// questions carry in their displayed titles.
std::string strip_duplicate_marker(std::string_view title);

PreparedQuestion prepare_question(const Question& q, const TagSynonymMap& synonyms,
                                  const StopList& stops);

}  // namespace dupq
