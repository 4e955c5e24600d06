#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dupq/corpus.hpp"
#include "dupq/errors.hpp"
#include "dupq/eval.hpp"
#include "dupq/imaging.hpp"
#include "dupq/manifest.hpp"
#include "dupq/pipeline.hpp"
#include "dupq/util.hpp"

namespace {

using namespace dupq;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitProvider = 3;

struct GlobalFlags {
  std::string manifest_path;
  bool cache_only = false;
  std::size_t jobs = 1;
  std::vector<std::string> configs;
  std::vector<std::size_t> k_values;
  std::string out_dir;
  std::string pool;
  bool split_image_features = false;
  std::optional<std::uint64_t> seed_pairing, seed_split, seed_training;
  double threshold = 0.5;
};

struct Run {
  RunManifest manifest;
  GlobalFlags flags;

  fs::path artifact(const std::string& name) const { return manifest.out_dir / name; }

  void require_artifact(const fs::path& path, const std::string& producer) const {
    if (!fs::exists(path)) {
      throw DataError("missing artifact: " + path.string() + " (run \"dupq " + producer +
                      "\" first)");
    }
  }

  std::vector<EvalConfig> selected_configs() const {
    std::vector<EvalConfig> out;
    for (const std::string& name : manifest.configs) {
      out.push_back(config_by_name(name, manifest.split_image_features));
      out.back().k_values = manifest.k_values;
    }
    return out;
  }

  StopList load_stops() const {
    return manifest.stoplist ? StopList::from_file(*manifest.stoplist) : StopList::english();
  }

  TagSynonymMap load_synonyms() const {
    return manifest.tag_synonyms ? TagSynonymMap::from_file(*manifest.tag_synonyms)
                                 : TagSynonymMap{};
  }

  std::vector<Question> load_corpus_artifact() const {
    fs::path path = artifact("corpus.jsonl");
    require_artifact(path, "ingest");
    return load_jsonl_corpus(path);
  }

  PairBuild load_pairs_artifact() const {
    fs::path path = artifact("pairs.jsonl");
    require_artifact(path, "pairs");
    return load_jsonl_pairs(path);
  }

  ArtifactCache open_cache(bool writable) const {
    if (!manifest.image_cache) {
      throw ConfigError("manifest has no image_cache path but images are required");
    }
    return ArtifactCache::open(*manifest.image_cache, writable);
  }

  bool any_config_uses_images() const {
    for (const EvalConfig& c : selected_configs()) {
      if (c.schema.uses_images()) return true;
    }
    return false;
  }

  // Split and featurizer are re-derived from artifacts on every
  // command, so stages agree without a shared in-memory session.
  PairSplit derive_split(const PairBuild& pairs) const {
    SplitSpec spec;
    spec.seed = manifest.seeds.split;
    return split(pairs.dup_pairs, pairs.nondup_pairs, spec);
  }

  CorpusFeaturizer build_featurizer(const std::vector<Question>& questions,
                                    const PairSplit& split_result, const StopList& stops,
                                    const TagSynonymMap& synonyms,
                                    const ArtifactCache* cache) const {
    std::vector<PostId> train_ids =
        training_question_ids(split_result.train_dup, split_result.train_nondup);
    return CorpusFeaturizer::build(questions, synonyms, stops, cache, train_ids, FeatureSchema{});
  }
};

void apply_flag_overrides(RunManifest& m, const GlobalFlags& flags) {
  if (!flags.configs.empty()) {
    std::set<std::string> seen;
    m.configs.clear();
    for (const std::string& name : flags.configs) {
      config_by_name(name);
      if (seen.insert(name).second) m.configs.push_back(name);
    }
  }
  if (!flags.k_values.empty()) {
    for (std::size_t k : flags.k_values) {
      if (k == 0) throw ConfigError("--k values must be positive");
    }
    m.k_values = flags.k_values;
  }
  if (!flags.out_dir.empty()) m.out_dir = fs::path(flags.out_dir);
  if (!flags.pool.empty()) m.pool = pool_kind_from_string(flags.pool);
  if (flags.split_image_features) m.split_image_features = true;
  if (flags.seed_pairing) m.seeds.pairing = *flags.seed_pairing;
  if (flags.seed_split) m.seeds.split = *flags.seed_split;
  if (flags.seed_training) {
    m.seeds.training = *flags.seed_training;
    m.hyper.seed = *flags.seed_training;
  }
}

int cmd_ingest(Run& run) {
  const RunManifest& m = run.manifest;
  std::vector<Question> questions;
  if (m.posts_xml) {
    std::ifstream posts(*m.posts_xml, std::ios::binary);
    if (!posts) throw DataError("cannot open posts XML: " + m.posts_xml->string());
    IngestDiagnostics diag;
    questions = parse_posts(posts, &diag);
    std::ifstream links_in(*m.postlinks_xml, std::ios::binary);
    if (!links_in) throw DataError("cannot open postlinks XML: " + m.postlinks_xml->string());
    PostLinkMap links = parse_postlinks(links_in);
    annotate_links(questions, links);
    std::cout << "parsed " << diag.rows_total << " rows, " << diag.question_rows << " questions ("
              << diag.non_question_rows << " non-question rows, "
              << diag.rows_skipped_missing_attr << " rows missing attributes)\n";
  } else {
    questions = load_jsonl_corpus(*m.corpus_jsonl);
    std::cout << "loaded " << questions.size() << " questions from JSONL\n";
  }

  std::size_t before = questions.size();
  if (m.require_images) {
    questions = filter_image_questions(questions);
    std::cout << "kept " << questions.size() << " of " << before << " questions with images\n";
  }

  std::size_t n_open = 0, n_dup = 0, n_nondup = 0, n_master = 0;
  for (const Question& q : questions) {
    switch (q.status) {
      case PostStatus::open: ++n_open; break;
      case PostStatus::closed_duplicate: ++n_dup; break;
      case PostStatus::closed_non_duplicate: ++n_nondup; break;
      case PostStatus::master: ++n_master; break;
    }
  }

  fs::create_directories(m.out_dir);
  atomic_write_file(run.artifact("corpus.jsonl"), corpus_to_jsonl(questions));

  nlohmann::json stats;
  stats["questions"] = {{"total", questions.size()}, {"open", n_open},
                        {"closed_duplicate", n_dup},  {"closed_non_duplicate", n_nondup},
                        {"master", n_master}};
  atomic_write_file(run.artifact("corpus_stats.json"), stats.dump(2) + "\n");
  std::cout << "wrote " << run.artifact("corpus.jsonl").string() << "\n";
  return kExitOk;
}

int cmd_pairs(Run& run) {
  std::vector<Question> questions = run.load_corpus_artifact();
  PairBuild pairs = build_pairs(questions, run.manifest.seeds.pairing);
  if (run.manifest.subsample) {
    subsample_pairs(pairs, *run.manifest.subsample, run.manifest.seeds.pairing);
  }
  atomic_write_file(run.artifact("pairs.jsonl"), pairs_to_jsonl(pairs));

  nlohmann::json stats;
  fs::path stats_path = run.artifact("corpus_stats.json");
  if (fs::exists(stats_path)) {
    stats = nlohmann::json::parse(read_file(stats_path));
  }
  stats["pairs"] = {{"duplicate", pairs.dup_pairs.size()},
                    {"non_duplicate", pairs.nondup_pairs.size()}};
  atomic_write_file(stats_path, stats.dump(2) + "\n");

  std::cout << "built " << pairs.dup_pairs.size() << " duplicate and "
            << pairs.nondup_pairs.size() << " non-duplicate pairs\n";
  return kExitOk;
}

int cmd_images(Run& run) {
  std::vector<Question> questions = run.load_corpus_artifact();

  std::vector<std::string> urls;
  std::set<std::string> seen;
  for (const Question& q : questions) {
    for (const std::string& url : q.image_refs) {
      if (seen.insert(url).second) urls.push_back(url);
    }
  }

  bool online = !run.flags.cache_only;
  ArtifactCache cache = run.open_cache(/*writable=*/online);

  std::unique_ptr<HttpOcrProvider> ocr;
  std::unique_ptr<HttpCaptionProvider> captions;
  if (online) {
    if (!run.manifest.ocr_provider && !run.manifest.caption_provider) {
      throw ConfigError("manifest configures no providers; use --cache-only for offline runs");
    }
    if (run.manifest.ocr_provider) ocr = std::make_unique<HttpOcrProvider>(*run.manifest.ocr_provider);
    if (run.manifest.caption_provider) {
      captions = std::make_unique<HttpCaptionProvider>(*run.manifest.caption_provider);
    }
  }

  ResolveOptions options;
  options.cache_only = run.flags.cache_only;
  options.jobs = run.flags.jobs;
  ResolveDiagnostics diag;
  resolve_artifacts(urls, ocr.get(), captions.get(), cache, options, &diag);

  std::cout << urls.size() << " image(s): " << diag.cache_hits << " cached, " << diag.fetched
            << " fetched, " << diag.unresolved << " unresolved\n";
  for (const std::string& error : diag.errors) std::cerr << "  " << error << "\n";

  if (online && !diag.errors.empty()) {
    throw ProviderError(std::to_string(diag.errors.size()) +
                        " image(s) failed to resolve; resolved artifacts were cached, rerun to resume");
  }
  return kExitOk;
}

int cmd_featurize(Run& run) {
  std::vector<Question> questions = run.load_corpus_artifact();
  PairBuild pairs = run.load_pairs_artifact();
  PairSplit split_result = run.derive_split(pairs);

  StopList stops = run.load_stops();
  TagSynonymMap synonyms = run.load_synonyms();

  std::optional<ArtifactCache> cache;
  if (run.any_config_uses_images()) cache.emplace(run.open_cache(/*writable=*/false));

  CorpusFeaturizer base = run.build_featurizer(questions, split_result, stops, synonyms,
                                               cache ? &*cache : nullptr);

  std::vector<QuestionPair> train_pairs = split_result.train_dup;
  train_pairs.insert(train_pairs.end(), split_result.train_nondup.begin(),
                     split_result.train_nondup.end());

  for (const EvalConfig& config : run.selected_configs()) {
    CorpusFeaturizer featurizer = base.with_schema(config.schema);
    std::vector<TrainingRow> rows = featurize_pairs(featurizer, train_pairs);
    fs::path path = run.artifact("features_" + config.name + ".csv");
    atomic_write_file(path, training_rows_to_csv(rows));
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  }
  return kExitOk;
}

int cmd_train(Run& run) {
  for (const EvalConfig& config : run.selected_configs()) {
    fs::path features_path = run.artifact("features_" + config.name + ".csv");
    run.require_artifact(features_path, "featurize");
    std::vector<TrainingRow> rows = training_rows_from_csv(read_file(features_path));
    TrainedModel model = train(rows, run.manifest.hyper);
    fs::path model_path = run.artifact("model_" + config.name + ".json");
    save_model(model, model_path);
    std::cout << "trained " << config.name << ": final loss "
              << format_double(model.meta.final_loss) << "\n";
  }
  return kExitOk;
}

int cmd_rank(Run& run) {
  std::vector<Question> questions = run.load_corpus_artifact();
  PairBuild pairs = run.load_pairs_artifact();
  PairSplit split_result = run.derive_split(pairs);

  StopList stops = run.load_stops();
  TagSynonymMap synonyms = run.load_synonyms();
  std::optional<ArtifactCache> cache;
  if (run.any_config_uses_images()) cache.emplace(run.open_cache(/*writable=*/false));
  CorpusFeaturizer base = run.build_featurizer(questions, split_result, stops, synonyms,
                                               cache ? &*cache : nullptr);

  std::vector<PostId> pool = candidate_pool(questions, run.manifest.pool);
  std::size_t max_k =
      *std::max_element(run.manifest.k_values.begin(), run.manifest.k_values.end());

  for (const EvalConfig& config : run.selected_configs()) {
    fs::path model_path = run.artifact("model_" + config.name + ".json");
    run.require_artifact(model_path, "train");
    TrainedModel model = load_model(model_path);
    CorpusFeaturizer featurizer = base.with_schema(model.schema);
    std::map<PostId, RankedList> rankings =
        batch_rank(featurizer, model, split_result.test_dup, pool, max_k, run.flags.jobs);
    fs::path path = run.artifact("rankings_" + config.name + ".jsonl");
    atomic_write_file(path, rankings_to_jsonl(rankings));
    std::cout << "wrote " << path.string() << " (" << rankings.size() << " queries, top "
              << max_k << ")\n";
  }
  return kExitOk;
}

int cmd_eval(Run& run) {
  std::vector<Question> questions = run.load_corpus_artifact();
  PairBuild pairs = run.load_pairs_artifact();
  PairSplit split_result = run.derive_split(pairs);

  std::map<PostId, PostId> truth;
  for (const QuestionPair& p : split_result.test_dup) truth[p.query_id] = p.candidate_id;

  EvalReport report;
  for (const EvalConfig& config : run.selected_configs()) {
    fs::path model_path = run.artifact("model_" + config.name + ".json");
    run.require_artifact(model_path, "train");
    fs::path rankings_path = run.artifact("rankings_" + config.name + ".jsonl");
    run.require_artifact(rankings_path, "rank");

    std::map<PostId, RankedList> rankings = rankings_from_jsonl(read_file(rankings_path));
    std::vector<std::size_t> ks = config.k_values;
    std::sort(ks.begin(), ks.end());
    for (std::size_t k : ks) {
      RecallResult r = recall_rate(rankings, truth, k);
      report.rows.push_back({config.name, k, r.rate, r.n_detected, r.n_all});
    }
  }

  Provenance& prov = report.provenance;
  prov.corpus_hash = fnv1a64_hex(read_file(run.artifact("corpus.jsonl")));
  prov.pairing_seed = run.manifest.seeds.pairing;
  prov.split_seed = run.manifest.seeds.split;
  prov.training_seed = run.manifest.seeds.training;
  prov.hyper = run.manifest.hyper;
  prov.pool = to_string(run.manifest.pool);
  prov.split_image_features = run.manifest.split_image_features;
  prov.n_train_dup = split_result.train_dup.size();
  prov.n_train_nondup = split_result.train_nondup.size();
  prov.n_test_dup = split_result.test_dup.size();
  prov.n_test_nondup = split_result.test_nondup.size();
  prov.generated_at = iso8601_utc_now();

  atomic_write_file(run.artifact("report.json"), report_to_json(report));
  atomic_write_file(run.artifact("report.csv"), report_to_csv(report));
  std::cout << "wrote " << run.artifact("report.json").string() << " and "
            << run.artifact("report.csv").string() << "\n";
  return kExitOk;
}

int cmd_report(Run& run) {
  fs::path path = run.artifact("report.json");
  run.require_artifact(path, "eval");
  EvalReport report = report_from_json(read_file(path));
  std::cout << render_report_table(report);
  return kExitOk;
}

int cmd_audit_delta(Run& run) {
  if (run.flags.threshold < 0.0 || run.flags.threshold > 1.0) {
    throw ConfigError("--threshold must lie in [0,1]");
  }
  std::vector<Question> questions = run.load_corpus_artifact();
  PairBuild pairs = run.load_pairs_artifact();
  PairSplit split_result = run.derive_split(pairs);

  StopList stops = run.load_stops();
  TagSynonymMap synonyms = run.load_synonyms();
  ArtifactCache cache = run.open_cache(/*writable=*/false);
  CorpusFeaturizer featurizer =
      run.build_featurizer(questions, split_result, stops, synonyms, &cache);

  std::vector<QuestionPair> all_pairs = pairs.dup_pairs;
  all_pairs.insert(all_pairs.end(), pairs.nondup_pairs.begin(), pairs.nondup_pairs.end());
  std::vector<DeltaAuditRecord> records = collect_delta_records(featurizer, all_pairs);
  std::vector<DeltaAuditEntry> entries = delta_audit(records, run.flags.threshold);

  fs::path path = run.artifact("delta_audit.csv");
  atomic_write_file(path, delta_audit_to_csv(entries));
  std::cout << entries.size() << " pair(s) above delta threshold "
            << format_double(run.flags.threshold) << "; wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duplicate question detection pipeline"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--manifest", flags.manifest_path, "run manifest JSON")->required();
  app.add_flag("--cache-only", flags.cache_only, "forbid all network access");
  app.add_option("--jobs", flags.jobs, "worker count for parallel stages")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", flags.configs, "config name(s) to run")->delimiter(',');
  app.add_option("--k", flags.k_values, "k cutoffs, e.g. 5,10,20")->delimiter(',');
  app.add_option("--out", flags.out_dir, "output directory override");
  app.add_option("--pool", flags.pool, "candidate pool: masters_and_nondup or all");
  app.add_flag("--split-image-features", flags.split_image_features,
               "use raw image features instead of the fused score in combined_plus_text");
  std::uint64_t seed_pairing = 0, seed_split = 0, seed_training = 0;
  auto* opt_sp = app.add_option("--seed-pairing", seed_pairing, "pairing seed override");
  auto* opt_ss = app.add_option("--seed-split", seed_split, "split seed override");
  auto* opt_st = app.add_option("--seed-training", seed_training, "training seed override");

  auto* ingest = app.add_subcommand("ingest", "parse the corpus source into corpus.jsonl");
  auto* pairs = app.add_subcommand("pairs", "build labeled question pairs");
  auto* images = app.add_subcommand("images", "resolve image OCR/captions into the cache");
  auto* featurize = app.add_subcommand("featurize", "export per-config training feature matrices");
  auto* train_cmd = app.add_subcommand("train", "fit per-config logistic regression models");
  auto* rank_cmd = app.add_subcommand("rank", "rank test duplicates against the candidate pool");
  auto* eval_cmd = app.add_subcommand("eval", "score recall-rate@k and write the report");
  auto* report_cmd = app.add_subcommand("report", "print the evaluation report table");
  auto* audit = app.add_subcommand("audit-delta", "list pairs whose image similarities disagree");
  audit->add_option("--threshold", flags.threshold, "minimum delta to report (default 0.5)");

  for (auto* sub : {ingest, pairs, images, featurize, train_cmd, rank_cmd,
                    eval_cmd, report_cmd, audit}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Run run{RunManifest::load(flags.manifest_path), flags};
    if (opt_sp->count()) run.flags.seed_pairing = seed_pairing;
    if (opt_ss->count()) run.flags.seed_split = seed_split;
    if (opt_st->count()) run.flags.seed_training = seed_training;
    apply_flag_overrides(run.manifest, run.flags);
    run.manifest.validate_paths();

    if (ingest->parsed()) return cmd_ingest(run);
    if (pairs->parsed()) return cmd_pairs(run);
    if (images->parsed()) return cmd_images(run);
    if (featurize->parsed()) return cmd_featurize(run);
    if (train_cmd->parsed()) return cmd_train(run);
    if (rank_cmd->parsed()) return cmd_rank(run);
    if (eval_cmd->parsed()) return cmd_eval(run);
    if (report_cmd->parsed()) return cmd_report(run);
    if (audit->parsed()) return cmd_audit_delta(run);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitData;
  }
}
