#include "dupq/ranker.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dupq/errors.hpp"
#include "dupq/util.hpp"

namespace dupq {

using nlohmann::json;

RankedList rank(const PairFeaturizer& featurizer, const TrainedModel& model, PostId query_id,
                const std::vector<PostId>& candidate_ids, std::size_t k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  std::vector<RankEntry> scored;
  scored.reserve(candidate_ids.size());
  for (PostId candidate : candidate_ids) {
    if (candidate == query_id) continue;
    FeatureVector features = featurizer.featurize(query_id, candidate);
    scored.push_back({candidate, predict_proba(model, features)});
  }
  if (scored.empty()) {
    throw DataError("empty candidate pool for query " + std::to_string(query_id));
  }
  std::sort(scored.begin(), scored.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.candidate_id < b.candidate_id;
  });
  if (scored.size() > k) scored.resize(k);
  return {query_id, std::move(scored), k};
}

std::map<PostId, RankedList> batch_rank(const PairFeaturizer& featurizer,
                                        const TrainedModel& model,
                                        const std::vector<QuestionPair>& test_dup_pairs,
                                        const std::vector<PostId>& pool, std::size_t k,
                                        std::size_t jobs) {
  std::set<PostId> pool_ids(pool.begin(), pool.end());
  std::vector<PostId> missing;
  for (const QuestionPair& pair : test_dup_pairs) {
    if (!pool_ids.count(pair.candidate_id)) missing.push_back(pair.query_id);
  }
  if (!missing.empty()) {
    std::string ids;
    for (PostId id : missing) {
      if (!ids.empty()) ids += ", ";
      ids += std::to_string(id);
    }
    throw DataError("candidate pool is missing the master for query/queries: " + ids);
  }

  std::vector<RankedList> lists(test_dup_pairs.size());
  auto work = [&](std::size_t i) {
    lists[i] = rank(featurizer, model, test_dup_pairs[i].query_id, pool, k);
  };

  jobs = std::max<std::size_t>(1, jobs);
  if (jobs == 1 || test_dup_pairs.size() <= 1) {
    for (std::size_t i = 0; i < test_dup_pairs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::size_t n_workers = std::min(jobs, test_dup_pairs.size());
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= lists.size()) return;
          work(i);
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }

  std::map<PostId, RankedList> out;
  for (RankedList& list : lists) out[list.query_id] = std::move(list);
  return out;
}

std::string rankings_to_jsonl(const std::map<PostId, RankedList>& rankings) {
  std::ostringstream ss;
  for (const auto& [query_id, list] : rankings) {
    json top = json::array();
    for (const RankEntry& e : list.entries) {
      top.push_back({{"candidate_id", e.candidate_id}, {"p", e.probability}});
    }
    json j;
    j["query_id"] = query_id;
    j["top"] = top;
    ss << j.dump() << '\n';
  }
  return ss.str();
}

std::map<PostId, RankedList> rankings_from_jsonl(const std::string& text) {
  std::map<PostId, RankedList> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("rankings line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!j.contains("query_id") || !j.contains("top") || !j["top"].is_array()) {
      throw DataError("rankings line " + std::to_string(line_no) +
                      ": requires query_id and top array");
    }
    RankedList list;
    list.query_id = j["query_id"].get<PostId>();
    for (const auto& e : j["top"]) {
      list.entries.push_back({e.at("candidate_id").get<PostId>(), e.at("p").get<double>()});
    }
    list.k = list.entries.size();
    out[list.query_id] = std::move(list);
  }
  return out;
}

}  // namespace dupq
