#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dupq/classifier.hpp"
#include "dupq/corpus.hpp"
#include "dupq/imaging.hpp"
#include "dupq/pipeline.hpp"
#include "dupq/ranker.hpp"

namespace dupq {

struct RecallResult {
  double rate = 0.0;
  std::size_t n_detected = 0;
  std::size_t n_all = 0;
};

// Fraction of truth queries whose master appears in their top-k.
// Queries present in truth but missing from rankings count as missed;
// ranked queries absent from truth are an error.
RecallResult recall_rate(const std::map<PostId, RankedList>& rankings,
                         const std::map<PostId, PostId>& truth, std::size_t k);

inline constexpr const char* kConfigNames[] = {
    "dupe_text",         "ocr_only",           "captions_only",
    "ocr_plus_text",     "captions_plus_text", "combined_plus_text",
};

struct EvalConfig {
  std::string name;
  FeatureSchema schema;
  std::vector<std::size_t> k_values = {5, 10, 20};
};

EvalConfig config_by_name(const std::string& name, bool split_image_features = false);
std::vector<EvalConfig> default_configs(bool split_image_features = false);

struct EvalRow {
  std::string config;
  std::size_t k = 0;
  double recall = 0.0;  // fraction in [0,1]
  std::size_t n_detected = 0;
  std::size_t n_all = 0;
};

struct ConfigFailure {
  std::string config;
  std::string message;
};

struct Provenance {
  std::string corpus_hash;
  std::uint64_t pairing_seed = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t training_seed = 0;
  Hyperparams hyper;
  std::string pool;
  bool split_image_features = false;
  std::size_t n_train_dup = 0, n_train_nondup = 0;
  std::size_t n_test_dup = 0, n_test_nondup = 0;
  std::string generated_at;  // ISO 8601; the only non-deterministic field
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<ConfigFailure> failures;
  Provenance provenance;
};

struct MatrixInputs {
  const std::vector<Question>* questions = nullptr;
  const PairBuild* pairs = nullptr;
  const ArtifactCache* cache = nullptr;  // null for text-only corpora
  std::vector<EvalConfig> configs;
  SplitSpec split_spec;
  Hyperparams hyper;
  PoolKind pool = PoolKind::masters_and_nondup;
  const StopList* stops = nullptr;       // defaults to the built-in list
  const TagSynonymMap* synonyms = nullptr;
  std::size_t jobs = 1;
  bool split_image_features = false;
  std::uint64_t pairing_seed = 0;  // provenance only
};

struct MatrixResult {
  EvalReport report;
  std::map<std::string, TrainedModel> models;
  PairSplit split;
};

// Shared split, then per config: featurize the train pairs, train,
// rank every test duplicate against the pool, score recall at each k.
// A failing config contributes a failure entry; the rest proceed.
MatrixResult run_matrix(const MatrixInputs& inputs);

std::string report_to_csv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string render_report_table(const EvalReport& report);

}  // namespace dupq
