#pragma once

#include <map>
#include <vector>

#include "dupq/classifier.hpp"
#include "dupq/features.hpp"
#include "dupq/types.hpp"

namespace dupq {

struct RankEntry {
  PostId candidate_id = 0;
  double probability = 0.0;
};

struct RankedList {
  PostId query_id = 0;
  std::vector<RankEntry> entries;  // probability non-increasing, id tie-break
  std::size_t k = 0;
};

// Scores every candidate and keeps the top k. The query is skipped if
// it appears in the pool, so callers can pass one shared pool.
RankedList rank(const PairFeaturizer& featurizer, const TrainedModel& model, PostId query_id,
                const std::vector<PostId>& candidate_ids, std::size_t k);

// One RankedList per test duplicate, each ranked against the shared
// pool. Throws if any query's master is missing from the pool.
std::map<PostId, RankedList> batch_rank(const PairFeaturizer& featurizer,
                                        const TrainedModel& model,
                                        const std::vector<QuestionPair>& test_dup_pairs,
                                        const std::vector<PostId>& pool, std::size_t k,
                                        std::size_t jobs = 1);

std::string rankings_to_jsonl(const std::map<PostId, RankedList>& rankings);
std::map<PostId, RankedList> rankings_from_jsonl(const std::string& text);

}  // namespace dupq
