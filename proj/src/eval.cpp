#include "dupq/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "dupq/errors.hpp"
#include "dupq/util.hpp"

namespace dupq {

using nlohmann::json;

RecallResult recall_rate(const std::map<PostId, RankedList>& rankings,
                         const std::map<PostId, PostId>& truth, std::size_t k) {
  if (truth.empty()) throw DataError("recall_rate requires a non-empty truth set");
  for (const auto& [query_id, list] : rankings) {
    if (!truth.count(query_id)) {
      throw DataError("ranked query " + std::to_string(query_id) + " is missing from the truth set");
    }
  }
  RecallResult out;
  out.n_all = truth.size();
  for (const auto& [query_id, master_id] : truth) {
    auto it = rankings.find(query_id);
    if (it == rankings.end()) continue;
    const std::vector<RankEntry>& entries = it->second.entries;
    std::size_t depth = std::min(k, entries.size());
    for (std::size_t i = 0; i < depth; ++i) {
      if (entries[i].candidate_id == master_id) {
        ++out.n_detected;
        break;
      }
    }
  }
  out.rate = static_cast<double>(out.n_detected) / static_cast<double>(out.n_all);
  return out;
}

namespace {

const std::vector<std::string> kTextFeatures = {
    "sim_title_title", "sim_title_body", "sim_body_body", "sim_code_code"};

std::vector<std::string> with_text(std::initializer_list<const char*> extra) {
  std::vector<std::string> names = kTextFeatures;
  for (const char* e : extra) names.emplace_back(e);
  return names;
}

// Published full-scale recall percentages, carried into reports purely
// as reference annotations; desk-scale corpora cannot reproduce them.
const std::map<std::string, std::map<std::size_t, double>> kReferenceRecallPct = {
    {"dupe_text", {{5, 43.43}, {10, 54.24}, {20, 61.06}}},
    {"ocr_only", {{5, 21.63}, {10, 25.12}, {20, 30.28}}},
    {"captions_only", {{5, 13.98}, {10, 16.98}, {20, 24.28}}},
    {"ocr_plus_text", {{5, 45.42}, {10, 55.57}, {20, 62.23}}},
    {"captions_plus_text", {{5, 43.93}, {10, 54.25}, {20, 61.23}}},
    {"combined_plus_text", {{5, 45.26}, {10, 55.24}, {20, 62.37}}},
};

}  // namespace

EvalConfig config_by_name(const std::string& name, bool split_image_features) {
  EvalConfig config;
  config.name = name;
  if (name == "dupe_text") {
    config.schema = FeatureSchema(kTextFeatures);
  } else if (name == "ocr_only") {
    config.schema = FeatureSchema({"sim_image_text"});
  } else if (name == "captions_only") {
    config.schema = FeatureSchema({"sim_image_caption"});
  } else if (name == "ocr_plus_text") {
    config.schema = FeatureSchema(with_text({"sim_image_text"}));
  } else if (name == "captions_plus_text") {
    config.schema = FeatureSchema(with_text({"sim_image_caption"}));
  } else if (name == "combined_plus_text") {
    config.schema = split_image_features
                        ? FeatureSchema(with_text({"sim_image_text", "sim_image_caption"}))
                        : FeatureSchema(with_text({"sim_image_combined"}));
  } else {
    throw ConfigError("unknown evaluation config: \"" + name + "\"");
  }
  return config;
}

std::vector<EvalConfig> default_configs(bool split_image_features) {
  std::vector<EvalConfig> configs;
  for (const char* name : kConfigNames) {
    configs.push_back(config_by_name(name, split_image_features));
  }
  return configs;
}

MatrixResult run_matrix(const MatrixInputs& inputs) {
  if (!inputs.questions || !inputs.pairs) {
    throw ConfigError("run_matrix requires a corpus and a pair build");
  }
  const StopList& stops = inputs.stops ? *inputs.stops : StopList::english();
  TagSynonymMap no_synonyms;
  const TagSynonymMap& synonyms = inputs.synonyms ? *inputs.synonyms : no_synonyms;

  MatrixResult out;
  out.split = split(inputs.pairs->dup_pairs, inputs.pairs->nondup_pairs, inputs.split_spec);

  std::vector<PostId> train_ids = training_question_ids(out.split.train_dup, out.split.train_nondup);
  CorpusFeaturizer base = CorpusFeaturizer::build(*inputs.questions, synonyms, stops, inputs.cache,
                                                  train_ids, FeatureSchema{});

  std::vector<PostId> pool = candidate_pool(*inputs.questions, inputs.pool);
  std::map<PostId, PostId> truth;
  for (const QuestionPair& p : out.split.test_dup) truth[p.query_id] = p.candidate_id;

  Provenance& prov = out.report.provenance;
  prov.corpus_hash = fnv1a64_hex(corpus_to_jsonl(*inputs.questions));
  prov.pairing_seed = inputs.pairing_seed;
  prov.split_seed = inputs.split_spec.seed;
  prov.training_seed = inputs.hyper.seed;
  prov.hyper = inputs.hyper;
  prov.pool = to_string(inputs.pool);
  prov.split_image_features = inputs.split_image_features;
  prov.n_train_dup = out.split.train_dup.size();
  prov.n_train_nondup = out.split.train_nondup.size();
  prov.n_test_dup = out.split.test_dup.size();
  prov.n_test_nondup = out.split.test_nondup.size();
  prov.generated_at = iso8601_utc_now();

  for (const EvalConfig& config : inputs.configs) {
    try {
      CorpusFeaturizer featurizer = base.with_schema(config.schema);

      std::vector<QuestionPair> train_pairs = out.split.train_dup;
      train_pairs.insert(train_pairs.end(), out.split.train_nondup.begin(),
                         out.split.train_nondup.end());
      std::vector<TrainingRow> rows = featurize_pairs(featurizer, train_pairs);
      TrainedModel model = train(rows, inputs.hyper);

      std::size_t max_k = *std::max_element(config.k_values.begin(), config.k_values.end());
      std::map<PostId, RankedList> rankings =
          batch_rank(featurizer, model, out.split.test_dup, pool, max_k, inputs.jobs);

      std::vector<std::size_t> ks = config.k_values;
      std::sort(ks.begin(), ks.end());
      for (std::size_t k : ks) {
        RecallResult r = recall_rate(rankings, truth, k);
        out.report.rows.push_back({config.name, k, r.rate, r.n_detected, r.n_all});
      }
      out.models.emplace(config.name, std::move(model));
    } catch (const Error& e) {
      out.report.failures.push_back({config.name, e.what()});
    }
  }
  return out;
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream ss;
  ss << "config,k,recall_rate_pct,n_detected,n_all\n";
  for (const EvalRow& row : report.rows) {
    ss << row.config << ',' << row.k << ',' << format_pct2(row.recall) << ',' << row.n_detected
       << ',' << row.n_all << '\n';
  }
  return ss.str();
}

std::string report_to_json(const EvalReport& report) {
  json rows = json::array();
  for (const EvalRow& row : report.rows) {
    rows.push_back({{"config", row.config},
                    {"k", row.k},
                    {"recall_rate", row.recall},
                    {"recall_rate_pct", format_pct2(row.recall)},
                    {"n_detected", row.n_detected},
                    {"n_all", row.n_all}});
  }
  json failures = json::array();
  for (const ConfigFailure& f : report.failures) {
    failures.push_back({{"config", f.config}, {"message", f.message}});
  }
  const Provenance& p = report.provenance;
  json provenance = {
      {"corpus_hash", p.corpus_hash},
      {"seeds", {{"pairing", p.pairing_seed}, {"split", p.split_seed}, {"training", p.training_seed}}},
      {"hyperparams",
       {{"learning_rate", p.hyper.learning_rate},
        {"epochs", p.hyper.epochs},
        {"l2", p.hyper.l2}}},
      {"pool", p.pool},
      {"split_image_features", p.split_image_features},
      {"split_sizes",
       {{"train_dup", p.n_train_dup},
        {"train_nondup", p.n_train_nondup},
        {"test_dup", p.n_test_dup},
        {"test_nondup", p.n_test_nondup}}},
      {"generated_at", p.generated_at},
  };
  json reference;
  reference["note"] =
      "recall-rate percentages from the original full-scale experiments; "
      "desk-scale corpora are not comparable";
  json ref_values;
  for (const auto& [config, by_k] : kReferenceRecallPct) {
    json per_config;
    for (const auto& [k, pct] : by_k) per_config[std::to_string(k)] = pct;
    ref_values[config] = per_config;
  }
  reference["recall_pct"] = ref_values;

  json j;
  j["rows"] = rows;
  j["failures"] = failures;
  j["provenance"] = provenance;
  j["reference_full_scale"] = reference;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid report JSON: ") + e.what());
  }
  EvalReport report;
  for (const auto& row : j.value("rows", json::array())) {
    report.rows.push_back({row.at("config").get<std::string>(), row.at("k").get<std::size_t>(),
                           row.at("recall_rate").get<double>(),
                           row.at("n_detected").get<std::size_t>(),
                           row.at("n_all").get<std::size_t>()});
  }
  for (const auto& f : j.value("failures", json::array())) {
    report.failures.push_back(
        {f.at("config").get<std::string>(), f.at("message").get<std::string>()});
  }
  if (j.contains("provenance")) {
    const json& p = j["provenance"];
    report.provenance.corpus_hash = p.value("corpus_hash", std::string{});
    if (p.contains("seeds")) {
      report.provenance.pairing_seed = p["seeds"].value("pairing", std::uint64_t{0});
      report.provenance.split_seed = p["seeds"].value("split", std::uint64_t{0});
      report.provenance.training_seed = p["seeds"].value("training", std::uint64_t{0});
    }
    if (p.contains("hyperparams")) {
      report.provenance.hyper.learning_rate = p["hyperparams"].value("learning_rate", 0.0);
      report.provenance.hyper.epochs = p["hyperparams"].value("epochs", std::size_t{0});
      report.provenance.hyper.l2 = p["hyperparams"].value("l2", 0.0);
    }
    report.provenance.pool = p.value("pool", std::string{});
    report.provenance.split_image_features = p.value("split_image_features", false);
    if (p.contains("split_sizes")) {
      const json& s = p["split_sizes"];
      report.provenance.n_train_dup = s.value("train_dup", std::size_t{0});
      report.provenance.n_train_nondup = s.value("train_nondup", std::size_t{0});
      report.provenance.n_test_dup = s.value("test_dup", std::size_t{0});
      report.provenance.n_test_nondup = s.value("test_nondup", std::size_t{0});
    }
    report.provenance.generated_at = p.value("generated_at", std::string{});
  }
  return report;
}

std::string render_report_table(const EvalReport& report) {
  std::ostringstream ss;
  ss << std::left << std::setw(22) << "config" << std::right << std::setw(4) << "k"
     << std::setw(10) << "recall%" << std::setw(15) << "detected/all" << std::setw(17)
     << "full-scale ref%" << '\n';
  for (const EvalRow& row : report.rows) {
    std::string detected = std::to_string(row.n_detected) + "/" + std::to_string(row.n_all);
    std::string ref = "-";
    auto config_it = kReferenceRecallPct.find(row.config);
    if (config_it != kReferenceRecallPct.end()) {
      auto k_it = config_it->second.find(row.k);
      if (k_it != config_it->second.end()) ref = format_pct2(k_it->second / 100.0);
    }
    ss << std::left << std::setw(22) << row.config << std::right << std::setw(4) << row.k
       << std::setw(10) << format_pct2(row.recall) << std::setw(15) << detected << std::setw(17)
       << ref << '\n';
  }
  for (const ConfigFailure& f : report.failures) {
    ss << "FAILED " << f.config << ": " << f.message << '\n';
  }
  return ss.str();
}

}  // namespace dupq
