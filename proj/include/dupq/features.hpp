#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dupq/textprep.hpp"
#include "dupq/types.hpp"

namespace dupq {

struct SparseVector {
  std::map<std::string, double> entries;  // term -> positive finite weight

  bool empty() const { return entries.empty(); }
  double norm() const;
};

double dot(const SparseVector& u, const SparseVector& v);

// dot/(|u||v|); 0 when either vector has zero norm.
double cosine(const SparseVector& u, const SparseVector& v);

// Frozen document-frequency statistics. Build over the training
// questions once; later documents are vectorized against the frozen
// idf table (unseen terms get the maximal idf).
class TfidfIndex {
 public:
  static TfidfIndex build(const std::vector<TokenList>& docs);

  std::size_t n_docs() const { return n_docs_; }
  double idf(const std::string& term) const;
  SparseVector vectorize(const TokenList& doc) const;

 private:
  std::size_t n_docs_ = 0;
  std::map<std::string, std::size_t> df_;
};

// |a∩b| / min(|a|,|b|); 0 when either set is empty.
double term_overlap(const std::set<std::string>& a, const std::set<std::string>& b);

// Jaccard |a∩b| / |a∪b|; 0 when both sets are empty.
double entity_overlap(const std::set<std::string>& a, const std::set<std::string>& b);

double combined_image_similarity(double image_text, double image_caption);
double similarity_delta(double image_text, double image_caption);

inline constexpr const char* kFeatureNames[] = {
    "sim_title_title",  "sim_title_body",    "sim_body_body",
    "sim_code_code",    "term_overlap",      "entity_overlap",
    "sim_image_text",   "sim_image_caption", "sim_image_combined",
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<std::string> names);  // ConfigError on unknown/duplicate

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool has(const std::string& name) const;
  bool uses_images() const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<std::string> names_;
};

struct FeatureVector {
  FeatureSchema schema;
  std::vector<double> values;  // schema order, each in [0,1]
};

struct ImagePairSims {
  double image_text = 0.0;     // it
  double image_caption = 0.0;  // ic
};

// Everything featurize_pair needs from one side of a pair, with the
// text vectors already weighted against the frozen index.
struct PreparedPairSide {
  const PreparedQuestion* question = nullptr;
  SparseVector title_vec;
  SparseVector body_vec;
  SparseVector code_vec;
};

PreparedPairSide prepare_side(const PreparedQuestion& q, const TfidfIndex& index);

FeatureVector featurize_pair(const PreparedPairSide& query, const PreparedPairSide& candidate,
                             const std::optional<ImagePairSims>& image_sims,
                             const FeatureSchema& schema);

// Produces labelled feature vectors for (query, candidate) pairs by id.
class PairFeaturizer {
 public:
  virtual ~PairFeaturizer() = default;
  virtual FeatureVector featurize(PostId query_id, PostId candidate_id) const = 0;
  virtual const FeatureSchema& schema() const = 0;
};

struct DeltaAuditEntry {
  PostId query_id = 0;
  PostId candidate_id = 0;
  double image_text = 0.0;
  double image_caption = 0.0;
  double delta = 0.0;
  PairLabel label = PairLabel::non_duplicate;
};

struct DeltaAuditRecord {
  QuestionPair pair;
  ImagePairSims sims;
};

// Pairs whose |it-ic| exceeds the threshold, sorted by descending
// delta, then ascending query id, then ascending candidate id.
std::vector<DeltaAuditEntry> delta_audit(const std::vector<DeltaAuditRecord>& records,
                                         double threshold);

}  // namespace dupq
