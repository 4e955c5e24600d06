#include "dupq/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "dupq/errors.hpp"
#include "dupq/util.hpp"

namespace dupq {

PoolKind pool_kind_from_string(const std::string& s) {
  if (s == "masters_and_nondup") return PoolKind::masters_and_nondup;
  if (s == "all") return PoolKind::all;
  throw ConfigError("unknown candidate pool kind: \"" + s +
                    "\" (expected masters_and_nondup or all)");
}

std::string to_string(PoolKind kind) {
  return kind == PoolKind::all ? "all" : "masters_and_nondup";
}

std::vector<PostId> candidate_pool(const std::vector<Question>& questions, PoolKind kind) {
  std::vector<PostId> pool;
  for (const Question& q : questions) {
    bool include = kind == PoolKind::all ||
                   q.status == PostStatus::master ||
                   q.status == PostStatus::closed_non_duplicate;
    if (include) pool.push_back(q.id);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<PostId> training_question_ids(const std::vector<QuestionPair>& train_dup,
                                          const std::vector<QuestionPair>& train_nondup) {
  std::set<PostId> ids;
  for (const QuestionPair& p : train_dup) {
    ids.insert(p.query_id);
    ids.insert(p.candidate_id);
  }
  for (const QuestionPair& p : train_nondup) {
    ids.insert(p.query_id);
    ids.insert(p.candidate_id);
  }
  return {ids.begin(), ids.end()};
}

CorpusFeaturizer CorpusFeaturizer::build(const std::vector<Question>& questions,
                                         const TagSynonymMap& synonyms, const StopList& stops,
                                         const ArtifactCache* cache,
                                         const std::vector<PostId>& training_ids,
                                         FeatureSchema schema) {
  auto state = std::make_shared<State>();

  std::map<PostId, PreparedImageSet> image_sets;
  for (const Question& q : questions) {
    state->questions.emplace(q.id, prepare_question(q, synonyms, stops));
    PreparedImageSet set;
    if (cache) {
      for (const std::string& url : q.image_refs) {
        std::optional<ImageArtifacts> artifact = cache->lookup(url);
        if (artifact) set.images.push_back(prepare_image(*artifact, stops));
      }
    }
    image_sets.emplace(q.id, std::move(set));
  }

  if (training_ids.empty()) throw DataError("no training questions to freeze statistics over");
  std::vector<TokenList> text_docs, code_docs, ocr_docs, caption_docs;
  for (PostId id : training_ids) {
    auto it = state->questions.find(id);
    if (it == state->questions.end()) {
      throw DataError("training pair references unknown question " + std::to_string(id));
    }
    const PreparedQuestion& q = it->second;
    TokenList text = q.title_tokens;
    text.insert(text.end(), q.body_tokens.begin(), q.body_tokens.end());
    text_docs.push_back(std::move(text));
    code_docs.push_back(q.code_tokens);

    const PreparedImageSet& set = image_sets.at(id);
    ocr_docs.push_back(set.concatenated_ocr());
    TokenList caption_doc;
    for (const TokenList& c : set.all_captions()) {
      caption_doc.insert(caption_doc.end(), c.begin(), c.end());
    }
    caption_docs.push_back(std::move(caption_doc));
  }
  state->indexes.text = TfidfIndex::build(text_docs);
  state->indexes.code = TfidfIndex::build(code_docs);
  state->indexes.ocr = TfidfIndex::build(ocr_docs);
  state->indexes.caption = TfidfIndex::build(caption_docs);

  for (const auto& [id, q] : state->questions) {
    PreparedPairSide side;
    side.question = &q;
    side.title_vec = state->indexes.text.vectorize(q.title_tokens);
    side.body_vec = state->indexes.text.vectorize(q.body_tokens);
    side.code_vec = state->indexes.code.vectorize(q.code_tokens);
    state->sides.emplace(id, std::move(side));

    ImageSide img;
    const PreparedImageSet& set = image_sets.at(id);
    TokenList ocr = set.concatenated_ocr();
    if (!ocr.empty()) img.ocr_vec = state->indexes.ocr.vectorize(ocr);
    for (const TokenList& c : set.all_captions()) {
      img.caption_vecs.push_back(state->indexes.caption.vectorize(c));
    }
    state->images.emplace(id, std::move(img));
  }

  CorpusFeaturizer featurizer;
  featurizer.state_ = std::move(state);
  featurizer.schema_ = std::move(schema);
  return featurizer;
}

CorpusFeaturizer CorpusFeaturizer::with_schema(FeatureSchema schema) const {
  CorpusFeaturizer copy;
  copy.state_ = state_;
  copy.schema_ = std::move(schema);
  return copy;
}

bool CorpusFeaturizer::knows(PostId id) const { return state_->questions.count(id) > 0; }

const PreparedQuestion& CorpusFeaturizer::prepared(PostId id) const {
  auto it = state_->questions.find(id);
  if (it == state_->questions.end()) {
    throw DataError("unknown question id " + std::to_string(id));
  }
  return it->second;
}

ImagePairSims CorpusFeaturizer::image_sims(PostId a, PostId b) const {
  auto ia = state_->images.find(a);
  auto ib = state_->images.find(b);
  if (ia == state_->images.end() || ib == state_->images.end()) {
    throw DataError("unknown question id " + std::to_string(ia == state_->images.end() ? a : b));
  }
  ImagePairSims sims;
  const ImageSide& sa = ia->second;
  const ImageSide& sb = ib->second;
  if (!sa.ocr_vec.empty() && !sb.ocr_vec.empty()) {
    sims.image_text = cosine(sa.ocr_vec, sb.ocr_vec);
  }
  for (const SparseVector& va : sa.caption_vecs) {
    for (const SparseVector& vb : sb.caption_vecs) {
      sims.image_caption = std::max(sims.image_caption, cosine(va, vb));
    }
  }
  return sims;
}

FeatureVector CorpusFeaturizer::featurize(PostId query_id, PostId candidate_id) const {
  auto qi = state_->sides.find(query_id);
  auto ci = state_->sides.find(candidate_id);
  if (qi == state_->sides.end()) {
    throw DataError("unknown question id " + std::to_string(query_id));
  }
  if (ci == state_->sides.end()) {
    throw DataError("unknown question id " + std::to_string(candidate_id));
  }
  std::optional<ImagePairSims> sims;
  if (schema_.uses_images()) sims = image_sims(query_id, candidate_id);
  return featurize_pair(qi->second, ci->second, sims, schema_);
}

std::vector<TrainingRow> featurize_pairs(const CorpusFeaturizer& featurizer,
                                         const std::vector<QuestionPair>& pairs) {
  std::vector<TrainingRow> rows;
  rows.reserve(pairs.size());
  for (const QuestionPair& p : pairs) {
    TrainingRow row;
    row.features = featurizer.featurize(p.query_id, p.candidate_id);
    row.label = p.label;
    row.query_id = p.query_id;
    row.candidate_id = p.candidate_id;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string training_rows_to_csv(const std::vector<TrainingRow>& rows) {
  if (rows.empty()) throw DataError("no feature rows to export");
  const FeatureSchema& schema = rows.front().features.schema;
  std::ostringstream ss;
  for (const std::string& name : schema.names()) ss << name << ',';
  ss << "label\n";
  for (const TrainingRow& row : rows) {
    if (!(row.features.schema == schema)) {
      throw DataError("feature rows disagree on schema");
    }
    for (double v : row.features.values) ss << format_double(v) << ',';
    ss << (row.label == PairLabel::duplicate ? '1' : '0') << '\n';
  }
  return ss.str();
}

std::vector<TrainingRow> training_rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("feature CSV is empty");
  std::vector<std::string> header = split_on(trim(line), ',');
  if (header.empty() || header.back() != "label") {
    throw DataError("feature CSV header must end with \"label\"");
  }
  header.pop_back();
  FeatureSchema schema(header);  // validates names

  std::vector<TrainingRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> fields = split_on(t, ',');
    if (fields.size() != schema.size() + 1) {
      throw DataError("feature CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(schema.size() + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    TrainingRow row;
    row.features.schema = schema;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      try {
        row.features.values.push_back(std::stod(fields[i]));
      } catch (const std::exception&) {
        throw DataError("feature CSV line " + std::to_string(line_no) +
                        ": invalid number \"" + fields[i] + "\"");
      }
    }
    if (fields.back() == "1") {
      row.label = PairLabel::duplicate;
    } else if (fields.back() == "0") {
      row.label = PairLabel::non_duplicate;
    } else {
      throw DataError("feature CSV line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("feature CSV contains no rows");
  return rows;
}

std::vector<DeltaAuditRecord> collect_delta_records(const CorpusFeaturizer& featurizer,
                                                    const std::vector<QuestionPair>& pairs) {
  std::vector<DeltaAuditRecord> records;
  records.reserve(pairs.size());
  for (const QuestionPair& p : pairs) {
    records.push_back({p, featurizer.image_sims(p.query_id, p.candidate_id)});
  }
  return records;
}

std::string delta_audit_to_csv(const std::vector<DeltaAuditEntry>& entries) {
  std::ostringstream ss;
  ss << "query_id,candidate_id,image_text,image_caption,delta,label\n";
  for (const DeltaAuditEntry& e : entries) {
    ss << e.query_id << ',' << e.candidate_id << ',' << format_double(e.image_text) << ','
       << format_double(e.image_caption) << ',' << format_double(e.delta) << ','
       << to_string(e.label) << '\n';
  }
  return ss.str();
}

}  // namespace dupq
