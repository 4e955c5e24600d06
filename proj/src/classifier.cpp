#include "dupq/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dupq/errors.hpp"
#include "dupq/util.hpp"

namespace dupq {

using nlohmann::json;

namespace {

// Clamping the argument keeps the output strictly inside (0,1) in
// double precision; beyond |35| sigmoid rounds to exactly 0 or 1.
double sigmoid(double z) {
  z = std::clamp(z, -35.0, 35.0);
  return 1.0 / (1.0 + std::exp(-z));
}

std::vector<QuestionPair> take(const std::vector<QuestionPair>& v, std::size_t from,
                               std::size_t to) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from),
          v.begin() + static_cast<std::ptrdiff_t>(to)};
}

void split_class(const std::vector<QuestionPair>& pairs, const SplitSpec& spec,
                 std::mt19937_64& rng, const char* class_name,
                 std::vector<QuestionPair>& train, std::vector<QuestionPair>& test) {
  if (pairs.size() < 2) {
    throw DataError(std::string("cannot split class \"") + class_name + "\": " +
                    std::to_string(pairs.size()) + " pair(s), need at least 2");
  }
  std::vector<QuestionPair> shuffled = pairs;
  det_shuffle(shuffled, rng);
  auto n_train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(shuffled.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, shuffled.size() - 1);
  train = take(shuffled, 0, n_train);
  test = take(shuffled, n_train, shuffled.size());
}

}  // namespace

PairSplit split(const std::vector<QuestionPair>& dup_pairs,
                const std::vector<QuestionPair>& nondup_pairs, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
    throw ConfigError("train_fraction must lie strictly between 0 and 1");
  }
  if (!spec.stratified) {
    throw ConfigError("only stratified splitting is supported");
  }
  PairSplit out;
  std::mt19937_64 rng(spec.seed);
  split_class(dup_pairs, spec, rng, "duplicate", out.train_dup, out.test_dup);
  split_class(nondup_pairs, spec, rng, "non_duplicate", out.train_nondup, out.test_nondup);
  return out;
}

double loss_and_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                         const std::vector<double>& weights, double bias, double l2,
                         std::vector<double>& grad_w, double& grad_b) {
  std::size_t n = x.size();
  std::size_t d = weights.size();
  grad_w.assign(d, 0.0);
  grad_b = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = bias;
    for (std::size_t j = 0; j < d; ++j) z += weights[j] * x[i][j];
    double p = sigmoid(z);
    double yi = static_cast<double>(y[i]);
    loss += yi > 0.5 ? -std::log(p) : -std::log(1.0 - p);
    double err = p - yi;
    for (std::size_t j = 0; j < d; ++j) grad_w[j] += err * x[i][j];
    grad_b += err;
  }
  double inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  grad_b *= inv_n;
  for (std::size_t j = 0; j < d; ++j) {
    grad_w[j] = grad_w[j] * inv_n + l2 * weights[j];
  }
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  loss += 0.5 * l2 * reg;
  return loss;
}

TrainedModel train(const std::vector<TrainingRow>& rows, const Hyperparams& hyper,
                   std::vector<double>* loss_trace) {
  if (rows.empty()) throw DataError("training set is empty");
  const FeatureSchema& schema = rows.front().features.schema;
  std::size_t d = schema.size();

  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(rows.size());
  y.reserve(rows.size());
  for (const TrainingRow& row : rows) {
    if (!(row.features.schema == schema)) {
      throw DataError("training rows disagree on feature schema (pair " +
                      std::to_string(row.query_id) + "," + std::to_string(row.candidate_id) + ")");
    }
    for (double v : row.features.values) {
      if (!std::isfinite(v)) {
        throw DataError("non-finite feature value in pair " + std::to_string(row.query_id) + "," +
                        std::to_string(row.candidate_id));
      }
    }
    x.push_back(row.features.values);
    y.push_back(row.label == PairLabel::duplicate ? 1 : 0);
  }

  std::vector<double> weights(d, 0.0);
  double bias = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
  double loss = 0.0;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    loss = loss_and_gradient(x, y, weights, bias, hyper.l2, grad_w, grad_b);
    if (loss_trace) loss_trace->push_back(loss);
    for (std::size_t j = 0; j < d; ++j) weights[j] -= hyper.learning_rate * grad_w[j];
    bias -= hyper.learning_rate * grad_b;
  }
  loss = loss_and_gradient(x, y, weights, bias, hyper.l2, grad_w, grad_b);
  if (loss_trace) loss_trace->push_back(loss);

  TrainedModel model;
  model.schema = schema;
  model.weights = std::move(weights);
  model.bias = bias;
  model.meta = {hyper.seed, hyper.epochs, hyper.learning_rate, hyper.l2, loss};
  return model;
}

double predict_proba(const TrainedModel& model, const FeatureVector& features) {
  if (!(features.schema == model.schema)) {
    throw DataError("feature schema does not match the model schema");
  }
  double z = model.bias;
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    z += model.weights[j] * features.values[j];
  }
  return sigmoid(z);
}

std::string model_to_json(const TrainedModel& model) {
  json j;
  j["schema"] = model.schema.names();
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["training_meta"] = {
      {"seed", model.meta.seed},           {"epochs", model.meta.epochs},
      {"learning_rate", model.meta.learning_rate}, {"l2", model.meta.l2},
      {"final_loss", model.meta.final_loss},
  };
  return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  }
  if (!j.contains("schema") || !j.contains("weights") || !j.contains("bias")) {
    throw DataError("model JSON requires schema, weights and bias");
  }
  TrainedModel model;
  model.schema = FeatureSchema(j["schema"].get<std::vector<std::string>>());
  model.weights = j["weights"].get<std::vector<double>>();
  model.bias = j["bias"].get<double>();
  if (model.weights.size() != model.schema.size()) {
    throw DataError("model JSON weight count does not match schema size");
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw DataError("model JSON contains non-finite weight");
  }
  if (!std::isfinite(model.bias)) throw DataError("model JSON contains non-finite bias");
  if (j.contains("training_meta")) {
    const json& m = j["training_meta"];
    model.meta.seed = m.value("seed", std::uint64_t{0});
    model.meta.epochs = m.value("epochs", std::size_t{0});
    model.meta.learning_rate = m.value("learning_rate", 0.0);
    model.meta.l2 = m.value("l2", 0.0);
    model.meta.final_loss = m.value("final_loss", 0.0);
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  atomic_write_file(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace dupq
