#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <vector>

#include "dupq/types.hpp"

namespace dupq {

// post id -> master post id, from duplicate-type post links.
using PostLinkMap = std::map<PostId, PostId>;

struct IngestDiagnostics {
  std::size_t rows_total = 0;
  std::size_t question_rows = 0;
  std::size_t non_question_rows = 0;
  std::size_t rows_skipped_missing_attr = 0;
};

// Stream a Posts dump. Question rows (PostTypeId=1) are decomposed and
// emitted through `on_question`; other row kinds are skipped. Rows
// missing a required attribute (Id, PostTypeId, Title, Body) are
// skipped and tallied in `diag`.
void parse_posts(std::istream& in, const std::function<void(Question&&)>& on_question,
                 IngestDiagnostics* diag = nullptr);

std::vector<Question> parse_posts(std::istream& in, IngestDiagnostics* diag = nullptr);

// Stream a PostLinks dump, keeping only duplicate links (LinkTypeId=3).
// A post linked more than once keeps the last link.
PostLinkMap parse_postlinks(std::istream& in);

// Fold duplicate links into question statuses: link sources become
// closed_duplicate (with duplicate_of set), link targets become
// masters, remaining closed posts stay closed_non_duplicate.
void annotate_links(std::vector<Question>& questions, const PostLinkMap& links);

// Keep exactly the questions with at least one image reference.
std::vector<Question> filter_image_questions(const std::vector<Question>& questions);

struct PairBuild {
  std::vector<QuestionPair> dup_pairs;
  std::vector<QuestionPair> nondup_pairs;
  CorpusStats stats;
};

// Build the labeled pair set from an annotated corpus: one pair per
// duplicate whose master is retained, and the same number of
// (non-duplicate, random master) pairs, deterministically for a fixed
// seed. Throws DataError when there are fewer non-duplicates than
// duplicate pairs.
PairBuild build_pairs(const std::vector<Question>& questions, std::uint64_t seed);

// Same, but with the duplicate links supplied explicitly (annotates a
// copy of the corpus first).
PairBuild build_pairs(const std::vector<Question>& questions, const PostLinkMap& links,
                      std::uint64_t seed);

// Seeded down-sampling of the balanced pair lists to `count` pairs per
// class (no-op if either class is already smaller).
void subsample_pairs(PairBuild& pairs, std::size_t count, std::uint64_t seed);

// JSONL corpus:
//   {"id":int,"title":str,"body_html":str,"tags":[str],"status":str,"duplicate_of":int|null}
// Body decomposition is re-derived on load so invariants match the
// dump path. Errors name the line number and the offending field.
std::vector<Question> load_jsonl_corpus(const std::filesystem::path& path);
std::vector<Question> load_jsonl_corpus(std::istream& in);
void save_jsonl_corpus(std::ostream& out, const std::vector<Question>& questions);
std::string corpus_to_jsonl(const std::vector<Question>& questions);

// Pairs artifact: {"query_id":int,"candidate_id":int,"label":str}
std::string pairs_to_jsonl(const PairBuild& pairs);
PairBuild load_jsonl_pairs(const std::filesystem::path& path);

}  // namespace dupq
