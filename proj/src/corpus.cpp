#include "dupq/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dupq/errors.hpp"
#include "dupq/html.hpp"
#include "dupq/util.hpp"
#include "dupq/xml_rows.hpp"

namespace dupq {

using nlohmann::json;

std::string to_string(PostStatus s) {
  switch (s) {
    case PostStatus::open: return "open";
    case PostStatus::closed_duplicate: return "closed_duplicate";
    case PostStatus::closed_non_duplicate: return "closed_non_duplicate";
    case PostStatus::master: return "master";
  }
  return "open";
}

PostStatus post_status_from_string(const std::string& s) {
  if (s == "open") return PostStatus::open;
  if (s == "closed_duplicate") return PostStatus::closed_duplicate;
  if (s == "closed_non_duplicate") return PostStatus::closed_non_duplicate;
  if (s == "master") return PostStatus::master;
  throw DataError("unknown post status: \"" + s + "\"");
}

std::string to_string(PairLabel l) {
  return l == PairLabel::duplicate ? "duplicate" : "non_duplicate";
}

PairLabel pair_label_from_string(const std::string& s) {
  if (s == "duplicate") return PairLabel::duplicate;
  if (s == "non_duplicate") return PairLabel::non_duplicate;
  throw DataError("unknown pair label: \"" + s + "\"");
}

namespace {

bool parse_post_id(const std::string& s, PostId& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out > 0;
}

// Tags attribute comes angle-bracket delimited: "<python><pandas>".
std::set<std::string> parse_tags_attr(const std::string& raw) {
  std::set<std::string> tags;
  std::string current;
  bool in_tag = false;
  for (char c : raw) {
    if (c == '<') {
      in_tag = true;
      current.clear();
    } else if (c == '>') {
      if (in_tag && !current.empty()) tags.insert(to_lower_ascii(current));
      in_tag = false;
    } else if (in_tag) {
      current.push_back(c);
    }
  }
  return tags;
}

void apply_body(Question& q) {
  BodyParts parts = decompose_body_html(q.body_html);
  q.body_text = std::move(parts.body_text);
  q.code_blocks = std::move(parts.code_blocks);
  q.image_refs = std::move(parts.image_refs);
}

}  // namespace

void parse_posts(std::istream& in, const std::function<void(Question&&)>& on_question,
                 IngestDiagnostics* diag) {
  IngestDiagnostics local;
  IngestDiagnostics& d = diag ? *diag : local;
  scan_xml_rows(in, [&](const XmlRow& row) {
    if (row.element != "row") return;  // root element
    ++d.rows_total;
    const std::string* id_attr = row.attr("Id");
    const std::string* type_attr = row.attr("PostTypeId");
    if (!id_attr || !type_attr) {
      ++d.rows_skipped_missing_attr;
      return;
    }
    if (*type_attr != "1") {
      ++d.non_question_rows;
      return;
    }
    const std::string* title = row.attr("Title");
    const std::string* body = row.attr("Body");
    PostId id = 0;
    if (!title || !body || !parse_post_id(*id_attr, id)) {
      ++d.rows_skipped_missing_attr;
      return;
    }
    Question q;
    q.id = id;
    q.title = *title;
    q.body_html = *body;
    if (const std::string* tags = row.attr("Tags")) q.tags = parse_tags_attr(*tags);
    q.status = row.attr("ClosedDate") ? PostStatus::closed_non_duplicate : PostStatus::open;
    apply_body(q);
    ++d.question_rows;
    on_question(std::move(q));
  });
}

std::vector<Question> parse_posts(std::istream& in, IngestDiagnostics* diag) {
  std::vector<Question> out;
  parse_posts(in, [&](Question&& q) { out.push_back(std::move(q)); }, diag);
  return out;
}

PostLinkMap parse_postlinks(std::istream& in) {
  PostLinkMap links;
  scan_xml_rows(in, [&](const XmlRow& row) {
    if (row.element != "row") return;
    const std::string* type = row.attr("LinkTypeId");
    const std::string* post = row.attr("PostId");
    const std::string* related = row.attr("RelatedPostId");
    if (!type || *type != "3" || !post || !related) return;
    PostId post_id = 0, master_id = 0;
    if (!parse_post_id(*post, post_id) || !parse_post_id(*related, master_id)) return;
    links[post_id] = master_id;  // last link wins
  });
  return links;
}

void annotate_links(std::vector<Question>& questions, const PostLinkMap& links) {
  std::unordered_set<PostId> masters;
  for (const auto& [dup, master] : links) masters.insert(master);
  for (Question& q : questions) {
    auto it = links.find(q.id);
    if (it != links.end()) {
      q.duplicate_of = it->second;
      q.status = PostStatus::closed_duplicate;
    } else if (masters.count(q.id)) {
      q.status = PostStatus::master;
      q.duplicate_of.reset();
    }
  }
}

std::vector<Question> filter_image_questions(const std::vector<Question>& questions) {
  std::vector<Question> out;
  out.reserve(questions.size());
  for (const Question& q : questions) {
    if (q.has_images()) out.push_back(q);
  }
  return out;
}

PairBuild build_pairs(const std::vector<Question>& questions, std::uint64_t seed) {
  PairBuild out;
  std::unordered_map<PostId, const Question*> by_id;
  for (const Question& q : questions) by_id.emplace(q.id, &q);

  std::vector<const Question*> non_duplicates;
  std::vector<const Question*> masters;
  for (const Question& q : questions) {
    switch (q.status) {
      case PostStatus::closed_duplicate: ++out.stats.n_duplicates; break;
      case PostStatus::closed_non_duplicate:
        ++out.stats.n_non_duplicates;
        non_duplicates.push_back(&q);
        break;
      case PostStatus::master:
        ++out.stats.n_masters;
        masters.push_back(&q);
        break;
      case PostStatus::open: break;
    }
  }

  // Duplicate pairs, corpus order. A pair forms only when the master is
  // itself retained (and really is a master; link chains are dropped).
  for (const Question& q : questions) {
    if (q.status != PostStatus::closed_duplicate || !q.duplicate_of) continue;
    auto it = by_id.find(*q.duplicate_of);
    if (it == by_id.end() || it->second->status != PostStatus::master) continue;
    out.dup_pairs.push_back({q.id, it->second->id, PairLabel::duplicate});
  }
  out.stats.n_dup_pairs = out.dup_pairs.size();

  if (!out.dup_pairs.empty()) {
    if (non_duplicates.size() < out.dup_pairs.size()) {
      throw DataError("insufficient negatives: " + std::to_string(non_duplicates.size()) +
                      " non-duplicate questions for " + std::to_string(out.dup_pairs.size()) +
                      " duplicate pairs");
    }
    if (masters.empty()) throw DataError("no master questions to pair negatives with");
    std::mt19937_64 rng(seed);
    det_shuffle(non_duplicates, rng);
    for (std::size_t i = 0; i < out.dup_pairs.size(); ++i) {
      const Question* nondup = non_duplicates[i];
      const Question* master = masters[rng() % masters.size()];
      out.nondup_pairs.push_back({nondup->id, master->id, PairLabel::non_duplicate});
    }
  }
  out.stats.n_nondup_pairs = out.nondup_pairs.size();
  return out;
}

PairBuild build_pairs(const std::vector<Question>& questions, const PostLinkMap& links,
                      std::uint64_t seed) {
  std::vector<Question> annotated = questions;
  annotate_links(annotated, links);
  return build_pairs(annotated, seed);
}

void subsample_pairs(PairBuild& pairs, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto sample = [&](std::vector<QuestionPair>& v) {
    if (v.size() <= count) return;
    det_shuffle(v, rng);
    v.resize(count);
  };
  sample(pairs.dup_pairs);
  sample(pairs.nondup_pairs);
  pairs.stats.n_dup_pairs = pairs.dup_pairs.size();
  pairs.stats.n_nondup_pairs = pairs.nondup_pairs.size();
}

namespace {

Question question_from_json(const json& j, std::size_t line_no) {
  auto fail = [line_no](const std::string& field, const std::string& why) -> Question {
    throw DataError("line " + std::to_string(line_no) + ": field \"" + field + "\" " + why);
  };
  if (!j.is_object()) return fail("<root>", "is not a JSON object");

  Question q;
  if (!j.contains("id")) return fail("id", "is missing");
  if (!j["id"].is_number_integer() || j["id"].get<PostId>() <= 0) {
    return fail("id", "must be a positive integer");
  }
  q.id = j["id"].get<PostId>();

  if (!j.contains("title") || !j["title"].is_string()) return fail("title", "must be a string");
  q.title = j["title"].get<std::string>();

  if (!j.contains("body_html") || !j["body_html"].is_string()) {
    return fail("body_html", "must be a string");
  }
  q.body_html = j["body_html"].get<std::string>();

  if (!j.contains("tags") || !j["tags"].is_array()) return fail("tags", "must be an array");
  for (const auto& t : j["tags"]) {
    if (!t.is_string()) return fail("tags", "must contain only strings");
    q.tags.insert(to_lower_ascii(t.get<std::string>()));
  }

  if (!j.contains("status") || !j["status"].is_string()) return fail("status", "must be a string");
  try {
    q.status = post_status_from_string(j["status"].get<std::string>());
  } catch (const DataError&) {
    return fail("status", "has unknown value \"" + j["status"].get<std::string>() + "\"");
  }

  if (j.contains("duplicate_of") && !j["duplicate_of"].is_null()) {
    if (!j["duplicate_of"].is_number_integer()) {
      return fail("duplicate_of", "must be an integer or null");
    }
    q.duplicate_of = j["duplicate_of"].get<PostId>();
  }

  // status <-> duplicate_of coupling is a corpus invariant.
  if ((q.status == PostStatus::closed_duplicate) != q.duplicate_of.has_value()) {
    return fail("duplicate_of",
                q.duplicate_of ? "is set but status is not closed_duplicate"
                               : "is required when status is closed_duplicate");
  }

  BodyParts parts = decompose_body_html(q.body_html);
  q.body_text = std::move(parts.body_text);
  q.code_blocks = std::move(parts.code_blocks);
  q.image_refs = std::move(parts.image_refs);
  return q;
}

}  // namespace

std::vector<Question> load_jsonl_corpus(std::istream& in) {
  std::vector<Question> out;
  std::unordered_set<PostId> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    Question q = question_from_json(j, line_no);
    if (!seen.insert(q.id).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate question id " +
                      std::to_string(q.id));
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> load_jsonl_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  return load_jsonl_corpus(in);
}

void save_jsonl_corpus(std::ostream& out, const std::vector<Question>& questions) {
  for (const Question& q : questions) {
    json j;
    j["id"] = q.id;
    j["title"] = q.title;
    j["body_html"] = q.body_html;
    j["tags"] = std::vector<std::string>(q.tags.begin(), q.tags.end());
    j["status"] = to_string(q.status);
    if (q.duplicate_of) {
      j["duplicate_of"] = *q.duplicate_of;
    } else {
      j["duplicate_of"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

std::string corpus_to_jsonl(const std::vector<Question>& questions) {
  std::ostringstream ss;
  save_jsonl_corpus(ss, questions);
  return ss.str();
}

std::string pairs_to_jsonl(const PairBuild& pairs) {
  std::ostringstream ss;
  auto dump = [&](const std::vector<QuestionPair>& v) {
    for (const QuestionPair& p : v) {
      json j;
      j["query_id"] = p.query_id;
      j["candidate_id"] = p.candidate_id;
      j["label"] = to_string(p.label);
      ss << j.dump() << '\n';
    }
  };
  dump(pairs.dup_pairs);
  dump(pairs.nondup_pairs);
  return ss.str();
}

PairBuild load_jsonl_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pairs file: " + path.string());
  PairBuild out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!j.contains("query_id") || !j.contains("candidate_id") || !j.contains("label")) {
      throw DataError("line " + std::to_string(line_no) +
                      ": pair requires query_id, candidate_id, label");
    }
    QuestionPair p;
    p.query_id = j["query_id"].get<PostId>();
    p.candidate_id = j["candidate_id"].get<PostId>();
    p.label = pair_label_from_string(j["label"].get<std::string>());
    if (p.query_id == p.candidate_id) {
      throw DataError("line " + std::to_string(line_no) + ": query_id equals candidate_id");
    }
    (p.label == PairLabel::duplicate ? out.dup_pairs : out.nondup_pairs).push_back(p);
  }
  out.stats.n_dup_pairs = out.dup_pairs.size();
  out.stats.n_nondup_pairs = out.nondup_pairs.size();
  return out;
}

}  // namespace dupq
