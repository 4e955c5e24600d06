#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "dupq/classifier.hpp"
#include "dupq/corpus.hpp"
#include "dupq/features.hpp"
#include "dupq/imaging.hpp"
#include "dupq/textprep.hpp"
#include "dupq/types.hpp"

namespace dupq {

struct FeaturizerIndexes {
  TfidfIndex text;     // one doc per training question: title + body tokens
  TfidfIndex code;     // one doc per training question: code tokens
  TfidfIndex ocr;      // one doc per training question: concatenated OCR tokens
  TfidfIndex caption;  // one doc per training question: all caption tokens
};

enum class PoolKind { masters_and_nondup, all };

PoolKind pool_kind_from_string(const std::string& s);
std::string to_string(PoolKind kind);

std::vector<PostId> candidate_pool(const std::vector<Question>& questions, PoolKind kind);

// Ids of every question that appears on either side of a training pair.
std::vector<PostId> training_question_ids(const std::vector<QuestionPair>& train_dup,
                                          const std::vector<QuestionPair>& train_nondup);

// Prepares the whole corpus once (textprep plus cached image artifacts),
// freezes document frequencies over the training questions, and then
// serves feature vectors for arbitrary (query, candidate) id pairs.
// Schema-restricted copies share the underlying prepared state.
class CorpusFeaturizer : public PairFeaturizer {
 public:
  static CorpusFeaturizer build(const std::vector<Question>& questions,
                                const TagSynonymMap& synonyms, const StopList& stops,
                                const ArtifactCache* cache,
                                const std::vector<PostId>& training_ids, FeatureSchema schema);

  CorpusFeaturizer with_schema(FeatureSchema schema) const;

  FeatureVector featurize(PostId query_id, PostId candidate_id) const override;
  const FeatureSchema& schema() const override { return schema_; }

  ImagePairSims image_sims(PostId a, PostId b) const;
  bool knows(PostId id) const;
  const PreparedQuestion& prepared(PostId id) const;

 private:
  struct ImageSide {
    SparseVector ocr_vec;
    std::vector<SparseVector> caption_vecs;
  };
  struct State {
    std::map<PostId, PreparedQuestion> questions;
    FeaturizerIndexes indexes;
    std::map<PostId, PreparedPairSide> sides;
    std::map<PostId, ImageSide> images;
  };

  std::shared_ptr<const State> state_;
  FeatureSchema schema_;
};

// Feature matrix rows for a list of pairs, in the given order.
std::vector<TrainingRow> featurize_pairs(const CorpusFeaturizer& featurizer,
                                         const std::vector<QuestionPair>& pairs);

std::string training_rows_to_csv(const std::vector<TrainingRow>& rows);
std::vector<TrainingRow> training_rows_from_csv(const std::string& text);

std::vector<DeltaAuditRecord> collect_delta_records(const CorpusFeaturizer& featurizer,
                                                    const std::vector<QuestionPair>& pairs);

std::string delta_audit_to_csv(const std::vector<DeltaAuditEntry>& entries);

}  // namespace dupq
