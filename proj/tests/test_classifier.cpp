#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "dupq/classifier.hpp"
#include "dupq/errors.hpp"
#include "test_helpers.hpp"

using namespace dupq;
using doctest::Approx;

namespace {

FeatureSchema two_features() { return FeatureSchema({"sim_title_title", "sim_body_body"}); }

TrainingRow row(const FeatureSchema& schema, std::vector<double> values, PairLabel label,
                PostId query = 1, PostId candidate = 2) {
  TrainingRow r;
  r.features.schema = schema;
  r.features.values = std::move(values);
  r.label = label;
  r.query_id = query;
  r.candidate_id = candidate;
  return r;
}

// Separable toy problem: duplicates live near (1,1), negatives near (0,0).
std::vector<TrainingRow> toy_rows(const FeatureSchema& schema) {
  std::vector<TrainingRow> rows;
  PostId id = 100;
  for (double a : {0.85, 0.9, 0.95, 1.0}) {
    rows.push_back(row(schema, {a, a - 0.05}, PairLabel::duplicate, id, id + 1));
    id += 2;
  }
  for (double a : {0.0, 0.05, 0.1, 0.15}) {
    rows.push_back(row(schema, {a, a + 0.05}, PairLabel::non_duplicate, id, id + 1));
    id += 2;
  }
  return rows;
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("analytic gradient matches central finite differences") {
  // Fixed data, asymmetric weights; bias and every weight coordinate.
  std::vector<std::vector<double>> x{{0.9, 0.1}, {0.2, 0.8}, {0.5, 0.5}, {1.0, 0.0}};
  std::vector<int> y{1, 0, 1, 0};
  std::vector<double> w{0.3, -0.7};
  double b = 0.25;
  double l2 = 0.01;

  std::vector<double> grad_w;
  double grad_b = 0.0;
  loss_and_gradient(x, y, w, b, l2, grad_w, grad_b);
  REQUIRE(grad_w.size() == w.size());

  const double h = 1e-5;
  std::vector<double> unused_g;
  double unused_b = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    std::vector<double> wp = w, wm = w;
    wp[j] += h;
    wm[j] -= h;
    double fp = loss_and_gradient(x, y, wp, b, l2, unused_g, unused_b);
    double fm = loss_and_gradient(x, y, wm, b, l2, unused_g, unused_b);
    double fd = (fp - fm) / (2 * h);
    CHECK(grad_w[j] == Approx(fd).epsilon(1e-5));
  }
  double fp = loss_and_gradient(x, y, w, b + h, l2, unused_g, unused_b);
  double fm = loss_and_gradient(x, y, w, b - h, l2, unused_g, unused_b);
  CHECK(grad_b == Approx((fp - fm) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("regularization contributes l2/2 times the squared weights, bias exempt") {
  std::vector<std::vector<double>> x{{1.0}};
  std::vector<int> y{1};
  std::vector<double> w{2.0};
  std::vector<double> g;
  double gb = 0.0;

  double with_l2 = loss_and_gradient(x, y, w, 3.0, 0.5, g, gb);
  double without = loss_and_gradient(x, y, w, 3.0, 0.0, g, gb);
  CHECK(with_l2 - without == Approx(0.5 / 2.0 * 4.0));  // bias never enters the penalty
}

TEST_CASE("training loss decreases monotonically on a separable problem") {
  FeatureSchema schema = two_features();
  Hyperparams hyper;
  hyper.epochs = 400;  // enough steps to push the separable classes past 0.8 / 0.2
  std::vector<double> trace;
  TrainedModel model = train(toy_rows(schema), hyper, &trace);

  REQUIRE(trace.size() == hyper.epochs + 1);  // every step plus the final loss
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1] + 1e-12);
  }
  CHECK(model.meta.final_loss == Approx(trace.back()));
  CHECK(model.meta.final_loss < trace.front());
  CHECK(model.meta.epochs == hyper.epochs);

  // The learned separator must order the classes.
  FeatureVector dup_like{schema, {0.95, 0.9}};
  FeatureVector nondup_like{schema, {0.05, 0.1}};
  CHECK(predict_proba(model, dup_like) > 0.8);
  CHECK(predict_proba(model, nondup_like) < 0.2);
}

TEST_CASE("training is deterministic") {
  FeatureSchema schema = two_features();
  Hyperparams hyper;
  hyper.epochs = 50;
  TrainedModel a = train(toy_rows(schema), hyper);
  TrainedModel b = train(toy_rows(schema), hyper);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.meta.final_loss == b.meta.final_loss);
}

TEST_CASE("symmetric data pins the probability at one half") {
  // Same feature vector appearing with both labels: the optimum is
  // w=0, b=0, p=0.5, and gradient descent stays there.
  FeatureSchema schema = two_features();
  std::vector<TrainingRow> rows{
      row(schema, {0.5, 0.5}, PairLabel::duplicate, 1, 2),
      row(schema, {0.5, 0.5}, PairLabel::non_duplicate, 3, 4),
  };
  Hyperparams hyper;
  hyper.epochs = 100;
  TrainedModel model = train(rows, hyper);
  FeatureVector probe{schema, {0.5, 0.5}};
  CHECK(predict_proba(model, probe) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("predict_proba applies the logistic link exactly") {
  FeatureSchema schema = two_features();
  TrainedModel model;
  model.schema = schema;
  model.weights = {std::log(3.0), 0.0};
  model.bias = 0.0;

  FeatureVector probe{schema, {1.0, 0.7}};
  CHECK(predict_proba(model, probe) == Approx(0.75));  // sigmoid(ln 3) = 3/4

  FeatureVector zero{schema, {0.0, 0.0}};
  CHECK(predict_proba(model, zero) == Approx(0.5));

  FeatureVector wrong_schema{FeatureSchema({"sim_title_title"}), {1.0}};
  CHECK_THROWS_WITH_AS(predict_proba(model, wrong_schema), doctest::Contains("schema"),
                       DataError);
}

TEST_CASE("extreme scores saturate without non-finite values") {
  FeatureSchema schema = two_features();
  TrainedModel model;
  model.schema = schema;
  model.weights = {500.0, -500.0};
  model.bias = 0.0;

  double hi = predict_proba(model, FeatureVector{schema, {1.0, 0.0}});
  double lo = predict_proba(model, FeatureVector{schema, {0.0, 1.0}});
  CHECK(std::isfinite(hi));
  CHECK(std::isfinite(lo));
  CHECK(hi > 0.999);
  CHECK(lo < 0.001);
  CHECK(hi < 1.0);
  CHECK(lo > 0.0);
}

TEST_CASE("train validates its rows") {
  FeatureSchema schema = two_features();
  Hyperparams hyper;
  CHECK_THROWS_AS(train({}, hyper), DataError);

  std::vector<TrainingRow> mixed{
      row(schema, {0.5, 0.5}, PairLabel::duplicate),
      row(FeatureSchema({"sim_title_title"}), {0.5}, PairLabel::non_duplicate),
  };
  CHECK_THROWS_WITH_AS(train(mixed, hyper), doctest::Contains("schema"), DataError);

  std::vector<TrainingRow> bad_value{
      row(schema, {0.5, std::nan("")}, PairLabel::duplicate, 31, 32),
      row(schema, {0.5, 0.5}, PairLabel::non_duplicate),
  };
  CHECK_THROWS_WITH_AS(train(bad_value, hyper), doctest::Contains("31"), DataError);
}

TEST_CASE("model json round-trips and validates") {
  FeatureSchema schema = two_features();
  Hyperparams hyper;
  hyper.epochs = 30;
  hyper.seed = 99;
  TrainedModel model = train(toy_rows(schema), hyper);

  test::ScratchDir dir;
  save_model(model, dir.file("model.json"));
  TrainedModel loaded = load_model(dir.file("model.json"));

  CHECK(loaded.schema == model.schema);
  CHECK(loaded.weights == model.weights);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.meta.seed == model.meta.seed);
  CHECK(loaded.meta.epochs == model.meta.epochs);
  CHECK(loaded.meta.final_loss == Approx(model.meta.final_loss));

  FeatureVector probe{schema, {0.9, 0.8}};
  CHECK(predict_proba(loaded, probe) == Approx(predict_proba(model, probe)));

  CHECK_THROWS_AS(model_from_json("{ not json"), Error);
  CHECK_THROWS_WITH_AS(
      model_from_json(R"({"schema":["sim_title_title"],"weights":[1.0,2.0],"bias":0.0})"),
      doctest::Contains("weight count"), DataError);
}

TEST_CASE("split is stratified, seeded and bounded") {
  std::vector<QuestionPair> dups, nondups;
  for (PostId i = 0; i < 10; ++i) dups.push_back({100 + i, 1, PairLabel::duplicate});
  for (PostId i = 0; i < 6; ++i) nondups.push_back({200 + i, 1, PairLabel::non_duplicate});

  SplitSpec spec;
  spec.train_fraction = 0.8;
  spec.seed = 5;
  PairSplit s = split(dups, nondups, spec);

  CHECK(s.train_dup.size() == 8);
  CHECK(s.test_dup.size() == 2);
  CHECK(s.train_nondup.size() == 4);  // floor(0.8 * 6)
  CHECK(s.test_nondup.size() == 2);

  // Partition, no duplication.
  std::set<PostId> seen;
  for (const auto* part : {&s.train_dup, &s.test_dup}) {
    for (const auto& p : *part) CHECK(seen.insert(p.query_id).second);
  }
  CHECK(seen.size() == 10);

  PairSplit again = split(dups, nondups, spec);
  CHECK(again.train_dup == s.train_dup);
  CHECK(again.test_dup == s.test_dup);

  spec.seed = 6;
  PairSplit other = split(dups, nondups, spec);
  bool same_assignment = other.train_dup == s.train_dup && other.train_nondup == s.train_nondup;
  CHECK_FALSE(same_assignment);
}

TEST_CASE("split keeps at least one pair on each side") {
  std::vector<QuestionPair> dups{{1, 9, PairLabel::duplicate}, {2, 9, PairLabel::duplicate}};
  std::vector<QuestionPair> nondups{{3, 9, PairLabel::non_duplicate},
                                    {4, 9, PairLabel::non_duplicate}};
  SplitSpec spec;
  spec.train_fraction = 0.99;  // floor would take everything
  PairSplit s = split(dups, nondups, spec);
  CHECK(s.train_dup.size() == 1);
  CHECK(s.test_dup.size() == 1);

  spec.train_fraction = 0.01;  // floor would take nothing
  PairSplit t = split(dups, nondups, spec);
  CHECK(t.train_dup.size() == 1);
  CHECK(t.test_dup.size() == 1);
}

TEST_CASE("split refuses classes below two pairs") {
  std::vector<QuestionPair> one{{1, 9, PairLabel::duplicate}};
  std::vector<QuestionPair> enough{{3, 9, PairLabel::non_duplicate},
                                   {4, 9, PairLabel::non_duplicate}};
  SplitSpec spec;
  CHECK_THROWS_WITH_AS(split(one, enough, spec), doctest::Contains("duplicate"), DataError);
  CHECK_THROWS_WITH_AS(split(enough, one, spec), doctest::Contains("non_duplicate"), DataError);

  spec.train_fraction = 1.5;
  CHECK_THROWS_AS(split(enough, enough, spec), ConfigError);
}

}  // TEST_SUITE
