#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dupq/features.hpp"
#include "dupq/types.hpp"

namespace dupq {

struct Hyperparams {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  double l2 = 0.0;
  double final_loss = 0.0;
};

struct TrainedModel {
  FeatureSchema schema;
  std::vector<double> weights;  // one per schema name
  double bias = 0.0;
  TrainingMeta meta;
};

struct TrainingRow {
  FeatureVector features;
  PairLabel label = PairLabel::non_duplicate;
  // Carried through for error messages only.
  PostId query_id = 0;
  PostId candidate_id = 0;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct PairSplit {
  std::vector<QuestionPair> train_dup, train_nondup;
  std::vector<QuestionPair> test_dup, test_nondup;
};

// Stratified shuffle-and-cut; the train side takes
// floor(fraction * class size) items of each class.
PairSplit split(const std::vector<QuestionPair>& dup_pairs,
                const std::vector<QuestionPair>& nondup_pairs, const SplitSpec& spec);

// Mean negative log-likelihood plus (l2/2)|w|^2, bias unregularized.
// Exposed so tests can difference it against the analytic gradient.
double loss_and_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                         const std::vector<double>& weights, double bias, double l2,
                         std::vector<double>& grad_w, double& grad_b);

TrainedModel train(const std::vector<TrainingRow>& rows, const Hyperparams& hyper,
                   std::vector<double>* loss_trace = nullptr);

double predict_proba(const TrainedModel& model, const FeatureVector& features);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace dupq
