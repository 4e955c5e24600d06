#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "dupq/classifier.hpp"
#include "dupq/errors.hpp"
#include "dupq/features.hpp"
#include "dupq/ranker.hpp"

using namespace dupq;

namespace {

// Featurizer backed by a score table: one feature whose value for
// (query, candidate) is looked up directly.
class TableFeaturizer : public PairFeaturizer {
 public:
  explicit TableFeaturizer(std::map<std::pair<PostId, PostId>, double> scores)
      : scores_(std::move(scores)), schema_({"sim_title_title"}) {}

  FeatureVector featurize(PostId query_id, PostId candidate_id) const override {
    auto it = scores_.find({query_id, candidate_id});
    double value = it == scores_.end() ? 0.0 : it->second;
    return {schema_, {value}};
  }

  const FeatureSchema& schema() const override { return schema_; }

 private:
  std::map<std::pair<PostId, PostId>, double> scores_;
  FeatureSchema schema_;
};

TrainedModel identity_model() {
  TrainedModel model;
  model.schema = FeatureSchema({"sim_title_title"});
  model.weights = {1.0};
  model.bias = 0.0;
  return model;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_SUITE("ranker") {

TEST_CASE("rank sorts by probability with ascending id tie-break") {
  std::map<std::pair<PostId, PostId>, double> scores = {
      {{1, 10}, 0.9}, {{1, 11}, 0.2}, {{1, 12}, 0.9}, {{1, 13}, 0.5}, {{1, 14}, 0.2},
  };
  TableFeaturizer featurizer(scores);
  TrainedModel model = identity_model();

  RankedList list = rank(featurizer, model, 1, {14, 13, 12, 11, 10}, 10);
  CHECK(list.query_id == 1);
  CHECK(list.k == 10);
  REQUIRE(list.entries.size() == 5);

  std::vector<PostId> order;
  for (const RankEntry& e : list.entries) order.push_back(e.candidate_id);
  CHECK(order == std::vector<PostId>{10, 12, 13, 11, 14});

  for (std::size_t i = 0; i + 1 < list.entries.size(); ++i) {
    CHECK(list.entries[i].probability >= list.entries[i + 1].probability);
  }
  CHECK(list.entries[0].probability == doctest::Approx(sigmoid(0.9)));
  CHECK(list.entries[3].probability == doctest::Approx(sigmoid(0.2)));
}

TEST_CASE("rank agrees with a brute-force oracle on random scores") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 4);

  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::pair<PostId, PostId>, double> scores;
    std::vector<PostId> pool;
    for (PostId c = 100; c < 120; ++c) {
      pool.push_back(c);
      // Coarse grid on half the trials forces plenty of exact ties.
      double v = trial % 2 == 0 ? uniform(rng) : coarse(rng) / 4.0;
      scores[{1, c}] = v;
    }

    std::vector<std::pair<double, PostId>> expected;
    for (PostId c : pool) expected.push_back({scores[{1, c}], c});
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });

    TableFeaturizer featurizer(scores);
    RankedList list = rank(featurizer, identity_model(), 1, pool, 7);
    REQUIRE(list.entries.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(list.entries[i].candidate_id == expected[i].second);
      CHECK(list.entries[i].probability == doctest::Approx(sigmoid(expected[i].first)));
    }
  }
}

TEST_CASE("the query never ranks against itself") {
  std::map<std::pair<PostId, PostId>, double> scores = {
      {{5, 5}, 1.0}, {{5, 6}, 0.4}, {{5, 7}, 0.1},
  };
  TableFeaturizer featurizer(scores);

  RankedList list = rank(featurizer, identity_model(), 5, {5, 6, 7}, 10);
  REQUIRE(list.entries.size() == 2);
  CHECK(list.entries[0].candidate_id == 6);
  CHECK(list.entries[1].candidate_id == 7);
}

TEST_CASE("top-k is a prefix of top-(k+1)") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> grid(0, 3);
  std::map<std::pair<PostId, PostId>, double> scores;
  std::vector<PostId> pool;
  for (PostId c = 1; c <= 15; ++c) {
    pool.push_back(c);
    scores[{99, c}] = grid(rng) / 3.0;
  }
  TableFeaturizer featurizer(scores);
  TrainedModel model = identity_model();

  RankedList previous = rank(featurizer, model, 99, pool, 1);
  for (std::size_t k = 2; k <= pool.size(); ++k) {
    RankedList current = rank(featurizer, model, 99, pool, k);
    REQUIRE(current.entries.size() == std::min(k, pool.size()));
    for (std::size_t i = 0; i < previous.entries.size(); ++i) {
      CHECK(current.entries[i].candidate_id == previous.entries[i].candidate_id);
    }
    previous = current;
  }
}

TEST_CASE("ranking ignores candidate pool order") {
  std::map<std::pair<PostId, PostId>, double> scores;
  std::vector<PostId> pool;
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> grid(0, 2);
  for (PostId c = 1; c <= 12; ++c) {
    pool.push_back(c);
    scores[{50, c}] = grid(rng) / 2.0;
  }
  TableFeaturizer featurizer(scores);
  TrainedModel model = identity_model();

  RankedList baseline = rank(featurizer, model, 50, pool, 5);
  std::vector<PostId> shuffled = pool;
  for (int round = 0; round < 5; ++round) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    RankedList list = rank(featurizer, model, 50, shuffled, 5);
    REQUIRE(list.entries.size() == baseline.entries.size());
    for (std::size_t i = 0; i < baseline.entries.size(); ++i) {
      CHECK(list.entries[i].candidate_id == baseline.entries[i].candidate_id);
    }
  }
}

TEST_CASE("rank validates k and the pool") {
  TableFeaturizer featurizer({{{1, 2}, 0.5}});
  TrainedModel model = identity_model();

  CHECK_THROWS_AS(rank(featurizer, model, 1, {2}, 0), ConfigError);
  CHECK_THROWS_WITH_AS(rank(featurizer, model, 1, {}, 5),
                       doctest::Contains("empty candidate pool"), DataError);
  CHECK_THROWS_WITH_AS(rank(featurizer, model, 1, {1}, 5),
                       doctest::Contains("query 1"), DataError);
}

TEST_CASE("batch_rank requires every master in the pool") {
  std::map<std::pair<PostId, PostId>, double> scores;
  for (PostId q : {11, 21}) {
    for (PostId c : {10, 20}) scores[{q, c}] = 0.5;
  }
  TableFeaturizer featurizer(scores);
  TrainedModel model = identity_model();
  std::vector<QuestionPair> pairs = {
      {11, 10, PairLabel::duplicate},
      {21, 20, PairLabel::duplicate},
  };

  auto rankings = batch_rank(featurizer, model, pairs, {10, 20}, 3);
  CHECK(rankings.size() == 2);
  CHECK(rankings.count(11) == 1);
  CHECK(rankings.count(21) == 1);

  std::vector<QuestionPair> orphaned = pairs;
  orphaned.push_back({31, 30, PairLabel::duplicate});
  CHECK_THROWS_WITH_AS(batch_rank(featurizer, model, orphaned, {10, 20}, 3),
                       doctest::Contains("missing the master"), DataError);
  try {
    batch_rank(featurizer, model, orphaned, {10, 20}, 3);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("31") != std::string::npos);
  }
}

TEST_CASE("batch_rank with several jobs matches the serial result") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<PostId> pool;
  for (PostId c = 200; c < 216; ++c) pool.push_back(c);
  std::vector<QuestionPair> pairs;
  std::map<std::pair<PostId, PostId>, double> scores;
  for (PostId q = 1; q <= 8; ++q) {
    pairs.push_back({q, 200 + q, PairLabel::duplicate});
    for (PostId c : pool) scores[{q, c}] = uniform(rng);
  }
  TableFeaturizer featurizer(scores);
  TrainedModel model = identity_model();

  auto serial = batch_rank(featurizer, model, pairs, pool, 6, 1);
  auto parallel = batch_rank(featurizer, model, pairs, pool, 6, 4);

  REQUIRE(serial.size() == parallel.size());
  for (const auto& [query_id, list] : serial) {
    REQUIRE(parallel.count(query_id) == 1);
    const RankedList& other = parallel.at(query_id);
    REQUIRE(other.entries.size() == list.entries.size());
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      CHECK(other.entries[i].candidate_id == list.entries[i].candidate_id);
      CHECK(other.entries[i].probability == list.entries[i].probability);
    }
  }
}

TEST_CASE("rankings survive a jsonl round trip") {
  std::map<PostId, RankedList> rankings;
  rankings[3] = {3, {{30, 0.75}, {31, 0.25}}, 2};
  rankings[1] = {1, {{10, 0.9375}}, 1};

  std::string text = rankings_to_jsonl(rankings);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);

  auto parsed = rankings_from_jsonl(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed.at(1).entries.size() == 1);
  CHECK(parsed.at(1).entries[0].candidate_id == 10);
  CHECK(parsed.at(1).entries[0].probability == doctest::Approx(0.9375));
  CHECK(parsed.at(3).entries[0].candidate_id == 30);
  CHECK(parsed.at(3).entries[1].candidate_id == 31);
  CHECK(parsed.at(3).k == 2);

  CHECK(rankings_from_jsonl("").empty());
  CHECK_THROWS_WITH_AS(rankings_from_jsonl("{oops\n"), doctest::Contains("rankings line 1"),
                       DataError);
  CHECK_THROWS_WITH_AS(rankings_from_jsonl(R"({"query_id": 1})"
                                           "\n"),
                       doctest::Contains("requires query_id and top"), DataError);
}

}
