// Acceptance checks for the duplicate-question toolkit. Each criterion
// prints exactly one [PASS]/[FAIL] line; the exit code is the number of
// failed criteria. Arguments: <dupq-cli> <source-dir> <scratch-dir>.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dupq/classifier.hpp"
#include "dupq/corpus.hpp"
#include "dupq/errors.hpp"
#include "dupq/eval.hpp"
#include "dupq/features.hpp"
#include "dupq/imaging.hpp"
#include "dupq/pipeline.hpp"
#include "dupq/porter.hpp"
#include "dupq/ranker.hpp"
#include "dupq/textprep.hpp"
#include "dupq/util.hpp"

namespace fs = std::filesystem;
using namespace dupq;

namespace {

fs::path g_cli;
fs::path g_source;
fs::path g_scratch;

int run_cli(const std::vector<std::string>& args, const fs::path& log) {
  std::string cmd = "\"" + g_cli.string() + "\"";
  for (const std::string& a : args) cmd += " \"" + a + "\"";
  cmd += " >> \"" + log.string() + "\" 2>&1";
  int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

// ---------------------------------------------------------------- 1
std::string check_similarity_oracles() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> weight(0.1, 5.0);

  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t dim = 1 + rng() % 50;
    std::vector<double> du(dim, 0.0), dv(dim, 0.0);
    SparseVector u, v;
    for (std::size_t i = 0; i < dim; ++i) {
      if (rng() % 5 < 2) {
        du[i] = weight(rng);
        u.entries["t" + std::to_string(i)] = du[i];
      }
      if (rng() % 5 < 2) {
        dv[i] = weight(rng);
        v.entries["t" + std::to_string(i)] = dv[i];
      }
    }
    double dot_uv = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      dot_uv += du[i] * dv[i];
      uu += du[i] * du[i];
      vv += dv[i] * dv[i];
    }
    double dense = (uu == 0.0 || vv == 0.0) ? 0.0 : dot_uv / (std::sqrt(uu) * std::sqrt(vv));
    if (std::fabs(cosine(u, v) - dense) > 1e-9) {
      return "cosine deviates from dense brute force on trial " + std::to_string(trial);
    }
  }

  for (int trial = 0; trial < 1000; ++trial) {
    std::set<std::string> a, b;
    for (int e = 0; e < 12; ++e) {
      std::string name = "e" + std::to_string(e);
      if (rng() % 3 == 0) a.insert(name);
      if (rng() % 3 == 0) b.insert(name);
    }
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    std::vector<std::string> all;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));

    double expected_term =
        (a.empty() || b.empty())
            ? 0.0
            : static_cast<double>(common.size()) / static_cast<double>(std::min(a.size(), b.size()));
    if (term_overlap(a, b) != expected_term) {
      return "term_overlap deviates from the set oracle on trial " + std::to_string(trial);
    }
    double expected_entity =
        all.empty() ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(all.size());
    if (entity_overlap(a, b) != expected_entity) {
      return "entity_overlap deviates from the set oracle on trial " + std::to_string(trial);
    }
  }
  return "";
}

// ---------------------------------------------------------------- 2
std::string check_fusion_algebra() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (int trial = 0; trial < 10000; ++trial) {
    // Grid values are dyadic rationals, so the half-sum identity is
    // exact in floating point, not merely close.
    double it = static_cast<double>(rng() % 1025) / 1024.0;
    double ic = static_cast<double>(rng() % 1025) / 1024.0;
    double combined = combined_image_similarity(it, ic);
    if (combined != std::max(it, ic)) return "combined != max on the grid";
    if (combined != (it + ic + std::fabs(it - ic)) / 2.0) {
      return "combined breaks the half-sum identity on the grid";
    }
    if (combined < it || combined < ic) return "combined below one of its inputs";
    if (similarity_delta(it, ic) != similarity_delta(ic, it)) return "delta is asymmetric";

    double a = uniform(rng), b = uniform(rng);
    if (combined_image_similarity(a, b) != std::max(a, b)) return "combined != max off the grid";
    if (similarity_delta(a, b) != std::fabs(a - b)) return "delta != |a-b|";
  }
  return "";
}

// ---------------------------------------------------------------- 3
std::string check_gradient() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);
  const double h = 1e-5;
  const double tol = 1e-5;
  const double l2_choices[] = {0.0, 1e-4, 0.01};

  for (int instance = 0; instance < 100; ++instance) {
    std::size_t nf = 1 + rng() % 9;
    std::size_t nr = 2 + rng() % 99;
    std::vector<std::vector<double>> x(nr, std::vector<double>(nf));
    std::vector<int> y(nr);
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t f = 0; f < nf; ++f) x[r][f] = unit(rng);
      y[r] = r < 2 ? static_cast<int>(r) : static_cast<int>(rng() % 2);
    }
    std::vector<double> w(nf);
    for (double& wj : w) wj = symmetric(rng);
    double b = symmetric(rng);
    double l2 = l2_choices[rng() % 3];

    std::vector<double> grad_w;
    double grad_b = 0.0;
    loss_and_gradient(x, y, w, b, l2, grad_w, grad_b);

    std::vector<double> scratch_g;
    double scratch_b = 0.0;
    auto relative_gap = [](double g, double fd) {
      return std::fabs(g - fd) / std::max({1.0, std::fabs(g), std::fabs(fd)});
    };
    for (std::size_t j = 0; j < nf; ++j) {
      std::vector<double> wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      double fp = loss_and_gradient(x, y, wp, b, l2, scratch_g, scratch_b);
      double fm = loss_and_gradient(x, y, wm, b, l2, scratch_g, scratch_b);
      if (relative_gap(grad_w[j], (fp - fm) / (2 * h)) > tol) {
        return "weight gradient off on instance " + std::to_string(instance);
      }
    }
    double fp = loss_and_gradient(x, y, w, b + h, l2, scratch_g, scratch_b);
    double fm = loss_and_gradient(x, y, w, b - h, l2, scratch_g, scratch_b);
    if (relative_gap(grad_b, (fp - fm) / (2 * h)) > tol) {
      return "bias gradient off on instance " + std::to_string(instance);
    }
  }

  // Full-batch descent at the default step size never increases the loss.
  for (int instance = 0; instance < 20; ++instance) {
    std::size_t nf = 1 + rng() % 9;
    std::size_t nr = 4 + rng() % 97;
    std::vector<std::string> names(kFeatureNames, kFeatureNames + nf);
    FeatureSchema schema(names);
    std::vector<TrainingRow> rows;
    for (std::size_t r = 0; r < nr; ++r) {
      TrainingRow row;
      row.features.schema = schema;
      for (std::size_t f = 0; f < nf; ++f) row.features.values.push_back(unit(rng));
      row.label = (r % 2 == 0) ? PairLabel::duplicate : PairLabel::non_duplicate;
      row.query_id = static_cast<PostId>(r);
      row.candidate_id = static_cast<PostId>(1000 + r);
      rows.push_back(std::move(row));
    }
    std::vector<double> trace;
    train(rows, Hyperparams{}, &trace);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i] > trace[i - 1] + 1e-12) {
        return "loss increased at epoch " + std::to_string(i) + " on instance " +
               std::to_string(instance);
      }
    }
  }
  return "";
}

// ---------------------------------------------------------------- 4
std::string check_recall_oracle() {
  std::map<PostId, RankedList> rankings;
  std::map<PostId, PostId> truth;
  for (PostId q = 1; q <= 10; ++q) {
    PostId master = 1000 + q;
    truth[q] = master;
    RankedList list;
    list.query_id = q;
    double p = 0.99;
    for (int pos = 1; pos <= 25; ++pos) {
      PostId candidate = (pos == q) ? master : 2000 + 100 * q + pos;
      list.entries.push_back({candidate, p});
      p -= 0.01;
    }
    list.k = list.entries.size();
    rankings[q] = list;
  }
  truth[11] = 1011;  // never ranked: counts as missed
  truth[12] = 1012;

  struct Expect {
    std::size_t k, detected;
  };
  for (Expect e : {Expect{5, 5}, Expect{10, 10}, Expect{20, 10}}) {
    RecallResult r = recall_rate(rankings, truth, e.k);
    if (r.n_detected != e.detected || r.n_all != 12 ||
        r.rate != static_cast<double>(e.detected) / 12.0) {
      return "recall@" + std::to_string(e.k) + " disagrees with the hand count";
    }
  }

  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    std::map<PostId, RankedList> rs;
    std::map<PostId, PostId> ts;
    std::size_t n_queries = 3 + rng() % 6;
    std::size_t n_candidates = 5 + rng() % 16;
    for (PostId q = 1; q <= static_cast<PostId>(n_queries); ++q) {
      std::vector<PostId> order;
      for (std::size_t c = 0; c < n_candidates; ++c) order.push_back(100 + c);
      std::shuffle(order.begin(), order.end(), rng);
      RankedList list;
      list.query_id = q;
      double p = 1.0;
      for (PostId c : order) list.entries.push_back({c, p -= 0.01});
      list.k = list.entries.size();
      rs[q] = list;
      ts[q] = 100 + rng() % (n_candidates + 3);  // sometimes absent
    }
    double previous = 0.0;
    for (std::size_t k = 1; k <= n_candidates; ++k) {
      double rate = recall_rate(rs, ts, k).rate;
      if (rate + 1e-15 < previous) return "recall not monotone on trial " + std::to_string(trial);
      previous = rate;
    }
  }
  return "";
}

// ---------------------------------------------------------------- 5
class ScoreTable : public PairFeaturizer {
 public:
  ScoreTable() : schema_({"sim_title_title"}) {}
  std::map<PostId, double> scores;

  FeatureVector featurize(PostId, PostId candidate_id) const override {
    return {schema_, {scores.at(candidate_id)}};
  }
  const FeatureSchema& schema() const override { return schema_; }

 private:
  FeatureSchema schema_;
};

std::string check_ranking() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  TrainedModel model;
  model.schema = FeatureSchema({"sim_title_title"});
  model.weights = {1.0};
  model.bias = 0.0;

  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + rng() % 99;
    ScoreTable featurizer;
    std::vector<PostId> pool;
    for (std::size_t i = 0; i < n; ++i) {
      PostId id = 10 + static_cast<PostId>(i);
      pool.push_back(id);
      featurizer.scores[id] = (trial % 2 == 0) ? uniform(rng)
                                               : static_cast<double>(rng() % 5) / 4.0;
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    PostId query = 1;
    if (rng() % 3 == 0) {
      query = pool[rng() % pool.size()];  // query inside the pool must be skipped
      featurizer.scores[query] = 1.0;
    } else {
      featurizer.scores[query] = 0.0;
    }
    std::size_t k = 1 + rng() % (n + 3);

    std::vector<std::pair<double, PostId>> expected;
    for (PostId c : pool) {
      if (c == query) continue;
      expected.push_back({predict_proba(model, featurizer.featurize(query, c)), c});
    }
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (expected.size() > k) expected.resize(k);

    RankedList list = rank(featurizer, model, query, pool, k);
    if (list.entries.size() != expected.size()) {
      return "size mismatch on trial " + std::to_string(trial);
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (list.entries[i].candidate_id != expected[i].second ||
          list.entries[i].probability != expected[i].first) {
        return "order mismatch on trial " + std::to_string(trial);
      }
    }
  }
  return "";
}

// ---------------------------------------------------------------- 6
std::string check_stemmer() {
  fs::path vocab = g_source / "data" / "porter" / "sample_vocab.tsv";
  if (!fs::exists(vocab)) return "missing fixture " + vocab.string();
  std::istringstream in(read_file(vocab));
  std::string line;
  std::size_t entries = 0, mismatches = 0;
  std::string first_bad;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) return "malformed fixture line: " + line;
    std::string word = line.substr(0, tab);
    std::string expected = line.substr(tab + 1);
    ++entries;
    std::string got = porter_stem(word);
    if (got != expected) {
      ++mismatches;
      if (first_bad.empty()) first_bad = word + " -> " + got + " (wanted " + expected + ")";
    }
  }
  if (entries < 200) return "fixture has only " + std::to_string(entries) + " entries";
  if (mismatches > 0) {
    return std::to_string(mismatches) + "/" + std::to_string(entries) +
           " mismatches, first: " + first_bad;
  }
  return "";
}

// ---------------------------------------------------------------- 7
struct GoldenRun {
  fs::path mini;
  fs::path out;
  fs::path manifest;
};

std::optional<GoldenRun> prepare_golden_dir(const std::string& name, std::string& error) {
  GoldenRun run;
  fs::path root = g_scratch / name;
  run.mini = root / "mini";
  run.out = run.mini / "out";
  run.manifest = run.mini / "manifest.json";
  std::error_code ec;
  fs::create_directories(run.mini, ec);
  if (ec) {
    error = "cannot create " + run.mini.string();
    return std::nullopt;
  }
  for (const char* file :
       {"posts.xml", "postlinks.xml", "manifest.json", "image_cache.jsonl"}) {
    fs::copy_file(g_source / "data" / "mini" / file, run.mini / file,
                  fs::copy_options::overwrite_existing, ec);
    if (ec) {
      error = std::string("cannot copy ") + file;
      return std::nullopt;
    }
  }
  fs::copy_file(g_source / "data" / "tag_synonyms.csv", root / "tag_synonyms.csv",
                fs::copy_options::overwrite_existing, ec);
  if (ec) {
    error = "cannot copy tag_synonyms.csv";
    return std::nullopt;
  }
  return run;
}

std::string run_golden_chain(const GoldenRun& run) {
  fs::path log = g_scratch / "cli.log";
  for (const char* sub :
       {"ingest", "pairs", "images", "featurize", "train", "rank", "eval"}) {
    int code = run_cli({"--manifest", run.manifest.string(), "--cache-only", sub}, log);
    if (code != 0) {
      return std::string("dupq ") + sub + " exited " + std::to_string(code) + "; see " +
             log.string();
    }
  }
  return "";
}

std::string strip_generated_at(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("generated_at") == std::string::npos) out << line << '\n';
  }
  return out.str();
}

std::string check_golden_run() {
  std::string error;
  std::optional<GoldenRun> run1 = prepare_golden_dir("golden1", error);
  if (!run1) return error;
  std::optional<GoldenRun> run2 = prepare_golden_dir("golden2", error);
  if (!run2) return error;

  if (std::string e = run_golden_chain(*run1); !e.empty()) return e;
  if (std::string e = run_golden_chain(*run2); !e.empty()) return e;

  std::string csv = read_file(run1->out / "report.csv");
  std::vector<std::string> lines = split_on(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 19) {
    return "report.csv has " + std::to_string(lines.size() - 1) + " rows, expected 18";
  }

  std::map<std::string, std::map<std::size_t, double>> rates;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields = split_on(lines[i], ',');
    if (fields.size() != 5) return "malformed report row: " + lines[i];
    rates[fields[0]][std::stoul(fields[1])] = std::stod(fields[2]);
  }
  if (rates.size() != 6) return "expected 6 configs in the report";
  for (const char* name : kConfigNames) {
    auto it = rates.find(name);
    if (it == rates.end()) return std::string("config missing from report: ") + name;
    const auto& by_k = it->second;
    if (by_k.size() != 3 || !by_k.count(5) || !by_k.count(10) || !by_k.count(20)) {
      return std::string("config ") + name + " lacks k in {5,10,20}";
    }
    if (by_k.at(5) > by_k.at(10) + 1e-9 || by_k.at(10) > by_k.at(20) + 1e-9) {
      return std::string("rates not monotone in k for ") + name;
    }
  }

  if (read_file(run2->out / "report.csv") != csv) {
    return "report.csv differs between two runs";
  }
  std::string json1 = strip_generated_at(read_file(run1->out / "report.json"));
  std::string json2 = strip_generated_at(read_file(run2->out / "report.json"));
  if (json1 != json2) return "report.json differs between two runs (beyond the timestamp)";

  // The planted duplicates carry deliberate lexical overlap: text
  // features alone must place the master in the top five for at least
  // eight of the ten, scoring held-out and training queries alike.
  std::vector<Question> corpus = load_jsonl_corpus(run1->out / "corpus.jsonl");
  PairBuild pairs = build_pairs(corpus, 13);
  PairSplit split_result = split(pairs.dup_pairs, pairs.nondup_pairs, {0.8, 17, true});
  TagSynonymMap synonyms =
      TagSynonymMap::from_file(g_source / "data" / "tag_synonyms.csv");
  std::vector<PostId> train_ids =
      training_question_ids(split_result.train_dup, split_result.train_nondup);
  CorpusFeaturizer featurizer =
      CorpusFeaturizer::build(corpus, synonyms, StopList::english(), nullptr, train_ids,
                              config_by_name("dupe_text").schema);

  std::vector<QuestionPair> train_pairs = split_result.train_dup;
  train_pairs.insert(train_pairs.end(), split_result.train_nondup.begin(),
                     split_result.train_nondup.end());
  Hyperparams hyper;
  hyper.seed = 29;
  TrainedModel model = train(featurize_pairs(featurizer, train_pairs), hyper);

  std::vector<PostId> pool = candidate_pool(corpus, PoolKind::masters_and_nondup);
  std::size_t found = 0;
  for (const QuestionPair& dup : pairs.dup_pairs) {
    RankedList top = rank(featurizer, model, dup.query_id, pool, 5);
    for (const RankEntry& e : top.entries) {
      if (e.candidate_id == dup.candidate_id) {
        ++found;
        break;
      }
    }
  }
  if (found < 8) {
    return "only " + std::to_string(found) + "/10 masters in the top five for dupe_text";
  }
  return "";
}

// ---------------------------------------------------------------- 8
std::string check_delta_audit() {
  std::vector<DeltaAuditRecord> records = {
      {{201, 200, PairLabel::duplicate}, {0.9, 0.1}},
      {{301, 300, PairLabel::duplicate}, {0.2, 0.9}},
      {{401, 400, PairLabel::non_duplicate}, {1.0, 0.0}},
      {{501, 500, PairLabel::duplicate}, {0.5, 0.0}},  // exactly at the threshold: excluded
      {{601, 600, PairLabel::duplicate}, {0.3, 0.3}},
  };
  std::vector<DeltaAuditEntry> entries = delta_audit(records, 0.5);
  if (entries.size() != 3) {
    return "expected 3 audited pairs, got " + std::to_string(entries.size());
  }
  if (entries[0].query_id != 401 || entries[1].query_id != 201 || entries[2].query_id != 301) {
    return "audited pairs out of descending-delta order";
  }
  if (entries[0].label != PairLabel::non_duplicate) return "label lost in the audit";

  // Same check through the command line, over the planted image fixtures.
  // Pair (111,110) shares OCR text but no captions; (131,130) the
  // reverse. Both deltas are 1 up to rounding, everything else is 0.
  fs::path manifest = g_scratch / "golden1" / "mini" / "manifest.json";
  fs::path audit_csv = g_scratch / "golden1" / "mini" / "out" / "delta_audit.csv";
  if (!fs::exists(manifest)) return "golden run artifacts missing";
  int code = run_cli({"--manifest", manifest.string(), "--cache-only", "audit-delta",
                      "--threshold", "0.5"},
                     g_scratch / "cli.log");
  if (code != 0) return "dupq audit-delta exited " + std::to_string(code);

  std::vector<std::string> lines = split_on(read_file(audit_csv), '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 3 ||
      lines[0] != "query_id,candidate_id,image_text,image_caption,delta,label") {
    return "delta_audit.csv shape deviates from the hand-enumerated fixture";
  }
  double previous_delta = 2.0;
  std::set<PostId> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = split_on(lines[i], ',');
    if (f.size() != 6 || f[5] != "duplicate") return "unexpected audit row: " + lines[i];
    PostId query = std::stoll(f[0]);
    double it = std::stod(f[2]), ic = std::stod(f[3]), delta = std::stod(f[4]);
    if (delta > previous_delta) return "audit rows not in descending delta order";
    previous_delta = delta;
    seen.insert(query);
    bool ocr_pair = query == 111 && f[1] == "110" && std::fabs(it - 1) < 1e-9 && ic == 0.0;
    bool caption_pair = query == 131 && f[1] == "130" && it == 0.0 && std::fabs(ic - 1) < 1e-9;
    if (!ocr_pair && !caption_pair) return "unexpected audit row: " + lines[i];
    if (std::fabs(delta - 1) > 1e-9) return "unexpected delta in row: " + lines[i];
  }
  if (seen != std::set<PostId>{111, 131}) return "audited pair set deviates from the fixture";
  return "";
}

// ---------------------------------------------------------------- 9
std::string check_offline_guarantee() {
  std::vector<Question> corpus =
      filter_image_questions(load_jsonl_corpus(g_source / "data" / "mini" / "corpus.jsonl"));
  ArtifactCache cache =
      ArtifactCache::open(g_source / "data" / "mini" / "image_cache.jsonl", false);

  std::vector<std::string> urls;
  std::set<std::string> seen;
  for (const Question& q : corpus) {
    for (const std::string& url : q.image_refs) {
      if (seen.insert(url).second) urls.push_back(url);
    }
  }
  if (urls.empty()) return "fixture corpus carries no image references";

  // Empty fixture maps: any provider call would both count and throw.
  StubOcrProvider ocr;
  StubCaptionProvider captions;
  ResolveOptions options;
  options.cache_only = true;
  options.jobs = 2;
  ResolveDiagnostics diag;
  resolve_artifacts(urls, &ocr, &captions, cache, options, &diag);

  if (ocr.calls() != 0 || captions.calls() != 0) {
    return "providers were called " + std::to_string(ocr.calls() + captions.calls()) +
           " time(s) in cache-only mode";
  }
  if (diag.unresolved != 0 || diag.cache_hits != urls.size()) {
    return "cache-only resolution left " + std::to_string(diag.unresolved) + " unresolved";
  }

  // The full matrix then runs against the cache alone.
  PairBuild pairs = build_pairs(corpus, 13);
  TagSynonymMap synonyms =
      TagSynonymMap::from_file(g_source / "data" / "tag_synonyms.csv");
  MatrixInputs inputs;
  inputs.questions = &corpus;
  inputs.pairs = &pairs;
  inputs.cache = &cache;
  inputs.configs = default_configs();
  inputs.split_spec = {0.8, 17, true};
  inputs.hyper.seed = 29;
  inputs.synonyms = &synonyms;
  inputs.pairing_seed = 13;
  MatrixResult result = run_matrix(inputs);
  if (!result.report.failures.empty()) {
    return "offline matrix failed: " + result.report.failures.front().message;
  }
  if (result.report.rows.size() != 18) {
    return "offline matrix produced " + std::to_string(result.report.rows.size()) + " rows";
  }
  if (ocr.calls() != 0 || captions.calls() != 0) return "providers touched during the matrix";
  return "";
}

struct Criterion {
  const char* name;
  std::string (*check)();
  double budget_seconds;  // 0 = no explicit limit
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: dupq_acceptance <dupq-cli> <source-dir> <scratch-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_source = argv[2];
  g_scratch = argv[3];

  std::error_code ec;
  fs::remove_all(g_scratch, ec);
  fs::create_directories(g_scratch, ec);
  if (ec) {
    std::cerr << "cannot prepare scratch dir " << g_scratch << "\n";
    return 2;
  }

  const Criterion criteria[] = {
      {"similarity oracles (cosine vs dense, overlaps vs set arithmetic)",
       check_similarity_oracles, 5.0},
      {"image fusion algebra (max identity, bounds, symmetric delta)", check_fusion_algebra,
       1.0},
      {"classifier gradient vs central differences; monotone training loss", check_gradient,
       30.0},
      {"recall-rate oracle (hand counts at k=5,10,20; monotone in k)", check_recall_oracle,
       5.0},
      {"ranking equals brute-force score-and-sort with id tie-break", check_ranking, 30.0},
      {"stemmer agrees with the bundled sample vocabulary", check_stemmer, 1.0},
      {"golden run: six configs, 18 rows, monotone, deterministic, top-5 hits",
       check_golden_run, 60.0},
      {"delta audit returns the hand-enumerated set in order", check_delta_audit, 1.0},
      {"cache-only pipeline never calls a provider", check_offline_guarantee, 0.0},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    std::string detail;
    auto started = std::chrono::steady_clock::now();
    try {
      detail = c.check();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (detail.empty() && c.budget_seconds > 0.0 && elapsed >= c.budget_seconds) {
      detail = "exceeded the " + format_double(c.budget_seconds) + "s budget";
    }
    char timing[32];
    std::snprintf(timing, sizeof(timing), " (%.2fs)", elapsed);
    if (detail.empty()) {
      std::cout << "[PASS] " << index << "/9 " << c.name << timing << "\n";
    } else {
      std::cout << "[FAIL] " << index << "/9 " << c.name << ": " << detail << timing << "\n";
      ++failures;
    }
  }
  return failures;
}
