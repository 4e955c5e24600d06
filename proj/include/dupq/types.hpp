#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dupq {

using PostId = std::int64_t;

enum class PostStatus {
  open,
  closed_duplicate,      // closed as duplicate, linked to a master
  closed_non_duplicate,  // closed for another reason
  master,                // target of at least one duplicate link
};

std::string to_string(PostStatus s);
PostStatus post_status_from_string(const std::string& s);

// One Stack Exchange style question. body_text / code_blocks /
// image_refs are always derived from body_html so the decomposition is
// identical whether a question came from a dump or a JSONL corpus.
struct Question {
  PostId id = 0;
  std::string title;
  std::string body_html;
  std::string body_text;                 // markup-free, whitespace-collapsed
  std::vector<std::string> code_blocks;  // <code>/<pre> contents, document order
  std::set<std::string> tags;            // lowercase
  std::vector<std::string> image_refs;   // <img src>, document order
  std::optional<PostId> duplicate_of;    // present iff status == closed_duplicate
  PostStatus status = PostStatus::open;

  bool has_images() const { return !image_refs.empty(); }
};

enum class PairLabel { duplicate, non_duplicate };

std::string to_string(PairLabel l);
PairLabel pair_label_from_string(const std::string& s);

// A (query, candidate) training/evaluation unit. For duplicate pairs
// the candidate is the query's master.
struct QuestionPair {
  PostId query_id = 0;
  PostId candidate_id = 0;
  PairLabel label = PairLabel::non_duplicate;

  bool operator==(const QuestionPair&) const = default;
};

struct CorpusStats {
  std::size_t n_duplicates = 0;
  std::size_t n_non_duplicates = 0;
  std::size_t n_masters = 0;
  std::size_t n_dup_pairs = 0;
  std::size_t n_nondup_pairs = 0;
};

}  // namespace dupq
