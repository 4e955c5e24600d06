#include "dupq/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dupq/errors.hpp"

namespace dupq {

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto& [term, w] : entries) sum += w * w;
  return std::sqrt(sum);
}

double dot(const SparseVector& u, const SparseVector& v) {
  const SparseVector& small = u.entries.size() <= v.entries.size() ? u : v;
  const SparseVector& large = u.entries.size() <= v.entries.size() ? v : u;
  double sum = 0.0;
  for (const auto& [term, w] : small.entries) {
    auto it = large.entries.find(term);
    if (it != large.entries.end()) sum += w * it->second;
  }
  return sum;
}

double cosine(const SparseVector& u, const SparseVector& v) {
  double nu = u.norm();
  double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot(u, v) / (nu * nv), 0.0, 1.0);
}

TfidfIndex TfidfIndex::build(const std::vector<TokenList>& docs) {
  if (docs.empty()) throw DataError("tf-idf index requires a non-empty corpus");
  TfidfIndex index;
  index.n_docs_ = docs.size();
  for (const TokenList& doc : docs) {
    std::set<std::string> unique(doc.begin(), doc.end());
    for (const std::string& term : unique) ++index.df_[term];
  }
  return index;
}

double TfidfIndex::idf(const std::string& term) const {
  auto it = df_.find(term);
  double df = it == df_.end() ? 1.0 : static_cast<double>(it->second);
  return std::log(1.0 + static_cast<double>(n_docs_) / df);
}

SparseVector TfidfIndex::vectorize(const TokenList& doc) const {
  std::map<std::string, std::size_t> tf;
  for (const std::string& term : doc) ++tf[term];
  SparseVector v;
  for (const auto& [term, count] : tf) {
    v.entries.emplace(term, static_cast<double>(count) * idf(term));
  }
  return v;
}

namespace {

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
  const std::set<std::string>& small = a.size() <= b.size() ? a : b;
  const std::set<std::string>& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const std::string& x : small) {
    if (large.count(x)) ++n;
  }
  return n;
}

}  // namespace

double term_overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  double inter = static_cast<double>(intersection_size(a, b));
  return inter / static_cast<double>(std::min(a.size(), b.size()));
}

double entity_overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  double inter = static_cast<double>(intersection_size(a, b));
  double uni = static_cast<double>(a.size() + b.size()) - inter;
  return inter / uni;
}

double combined_image_similarity(double image_text, double image_caption) {
  return std::max(image_text, image_caption);
}

double similarity_delta(double image_text, double image_caption) {
  return std::fabs(image_text - image_caption);
}

FeatureSchema::FeatureSchema(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const std::string& name : names_) {
    bool known = std::any_of(std::begin(kFeatureNames), std::end(kFeatureNames),
                             [&](const char* k) { return name == k; });
    if (!known) throw ConfigError("unknown feature name: \"" + name + "\"");
    if (!seen.insert(name).second) throw ConfigError("duplicate feature name: \"" + name + "\"");
  }
}

bool FeatureSchema::has(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

bool FeatureSchema::uses_images() const {
  return has("sim_image_text") || has("sim_image_caption") || has("sim_image_combined");
}

PreparedPairSide prepare_side(const PreparedQuestion& q, const TfidfIndex& index) {
  PreparedPairSide side;
  side.question = &q;
  side.title_vec = index.vectorize(q.title_tokens);
  side.body_vec = index.vectorize(q.body_tokens);
  side.code_vec = index.vectorize(q.code_tokens);
  return side;
}

namespace {

std::set<std::string> text_term_set(const PreparedQuestion& q) {
  std::set<std::string> terms(q.title_tokens.begin(), q.title_tokens.end());
  terms.insert(q.body_tokens.begin(), q.body_tokens.end());
  return terms;
}

std::set<std::string> entity_set(const PreparedQuestion& q) {
  std::set<std::string> entities(q.code_tokens.begin(), q.code_tokens.end());
  entities.insert(q.tags.begin(), q.tags.end());
  return entities;
}

}  // namespace

FeatureVector featurize_pair(const PreparedPairSide& query, const PreparedPairSide& candidate,
                             const std::optional<ImagePairSims>& image_sims,
                             const FeatureSchema& schema) {
  double it = image_sims ? image_sims->image_text : 0.0;
  double ic = image_sims ? image_sims->image_caption : 0.0;

  FeatureVector out;
  out.schema = schema;
  out.values.reserve(schema.size());
  for (const std::string& name : schema.names()) {
    double value = 0.0;
    if (name == "sim_title_title") {
      value = cosine(query.title_vec, candidate.title_vec);
    } else if (name == "sim_title_body") {
      value = cosine(query.title_vec, candidate.body_vec);
    } else if (name == "sim_body_body") {
      value = cosine(query.body_vec, candidate.body_vec);
    } else if (name == "sim_code_code") {
      value = cosine(query.code_vec, candidate.code_vec);
    } else if (name == "term_overlap") {
      value = term_overlap(text_term_set(*query.question), text_term_set(*candidate.question));
    } else if (name == "entity_overlap") {
      value = entity_overlap(entity_set(*query.question), entity_set(*candidate.question));
    } else if (name == "sim_image_text") {
      value = it;
    } else if (name == "sim_image_caption") {
      value = ic;
    } else if (name == "sim_image_combined") {
      value = combined_image_similarity(it, ic);
    } else {
      throw ConfigError("unknown feature name: \"" + name + "\"");
    }
    out.values.push_back(std::clamp(value, 0.0, 1.0));
  }
  return out;
}

std::vector<DeltaAuditEntry> delta_audit(const std::vector<DeltaAuditRecord>& records,
                                         double threshold) {
  std::vector<DeltaAuditEntry> out;
  for (const DeltaAuditRecord& r : records) {
    double delta = similarity_delta(r.sims.image_text, r.sims.image_caption);
    if (delta > threshold) {
      out.push_back({r.pair.query_id, r.pair.candidate_id, r.sims.image_text,
                     r.sims.image_caption, delta, r.pair.label});
    }
  }
  std::sort(out.begin(), out.end(), [](const DeltaAuditEntry& a, const DeltaAuditEntry& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    if (a.query_id != b.query_id) return a.query_id < b.query_id;
    return a.candidate_id < b.candidate_id;
  });
  return out;
}

}  // namespace dupq
