#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
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

namespace py = pybind11;
using namespace dupq;

namespace {

SparseVector to_sparse(const std::map<std::string, double>& entries) {
  SparseVector v;
  v.entries = entries;
  return v;
}

TagSynonymMap load_synonyms(const std::optional<std::string>& path) {
  if (!path) return {};
  return TagSynonymMap::from_file(*path);
}

std::vector<TrainingRow> rows_from_python(
    const std::vector<std::pair<std::vector<double>, int>>& rows,
    const FeatureSchema& schema) {
  std::vector<TrainingRow> out;
  out.reserve(rows.size());
  for (const auto& [values, label] : rows) {
    TrainingRow row;
    row.features = {schema, values};
    row.label = label == 1 ? PairLabel::duplicate : PairLabel::non_duplicate;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_dupq, m) {
  m.doc() = "Duplicate-question detection core (text + image-augmented ranking)";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", m.attr("Error"));
  py::register_exception<DataError>(m, "DataError", m.attr("Error"));
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));
  py::register_exception<ProviderError>(m, "ProviderError", m.attr("Error"));

  py::class_<Question>(m, "Question")
      .def_readonly("id", &Question::id)
      .def_readonly("title", &Question::title)
      .def_readonly("body_html", &Question::body_html)
      .def_readonly("body_text", &Question::body_text)
      .def_readonly("code_blocks", &Question::code_blocks)
      .def_readonly("tags", &Question::tags)
      .def_readonly("image_refs", &Question::image_refs)
      .def_readonly("duplicate_of", &Question::duplicate_of)
      .def_property_readonly("status",
                             [](const Question& q) { return to_string(q.status); })
      .def_property_readonly("has_images", &Question::has_images)
      .def("__repr__", [](const Question& q) {
        return "<Question id=" + std::to_string(q.id) + " status=" + to_string(q.status) +
               ">";
      });

  py::class_<QuestionPair>(m, "QuestionPair")
      .def_readonly("query_id", &QuestionPair::query_id)
      .def_readonly("candidate_id", &QuestionPair::candidate_id)
      .def_property_readonly("label",
                             [](const QuestionPair& p) { return to_string(p.label); })
      .def("__repr__", [](const QuestionPair& p) {
        return "<QuestionPair " + std::to_string(p.query_id) + " -> " +
               std::to_string(p.candidate_id) + " " + to_string(p.label) + ">";
      });

  py::class_<PairBuild>(m, "PairBuild")
      .def_readonly("dup_pairs", &PairBuild::dup_pairs)
      .def_readonly("nondup_pairs", &PairBuild::nondup_pairs)
      .def_property_readonly("stats", [](const PairBuild& b) {
        py::dict d;
        d["n_duplicates"] = b.stats.n_duplicates;
        d["n_non_duplicates"] = b.stats.n_non_duplicates;
        d["n_masters"] = b.stats.n_masters;
        d["n_dup_pairs"] = b.stats.n_dup_pairs;
        d["n_nondup_pairs"] = b.stats.n_nondup_pairs;
        return d;
      });

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_property_readonly(
          "feature_names",
          [](const TrainedModel& model) { return model.schema.names(); })
      .def_readonly("weights", &TrainedModel::weights)
      .def_readonly("bias", &TrainedModel::bias)
      .def_property_readonly("meta",
                             [](const TrainedModel& model) {
                               py::dict d;
                               d["seed"] = model.meta.seed;
                               d["epochs"] = model.meta.epochs;
                               d["learning_rate"] = model.meta.learning_rate;
                               d["l2"] = model.meta.l2;
                               d["final_loss"] = model.meta.final_loss;
                               return d;
                             })
      .def(
          "predict",
          [](const TrainedModel& model, const std::vector<double>& values) {
            return predict_proba(model, {model.schema, values});
          },
          py::arg("values"), "Duplicate probability for one feature vector")
      .def("to_json", [](const TrainedModel& model) { return model_to_json(model); })
      .def_static("from_json", [](const std::string& text) { return model_from_json(text); },
                  py::arg("text"));

  py::class_<CorpusFeaturizer>(m, "Featurizer")
      .def_property_readonly(
          "feature_names",
          [](const CorpusFeaturizer& f) { return f.schema().names(); })
      .def("knows", &CorpusFeaturizer::knows, py::arg("question_id"))
      .def(
          "featurize",
          [](const CorpusFeaturizer& f, PostId query, PostId candidate) {
            return f.featurize(query, candidate).values;
          },
          py::arg("query_id"), py::arg("candidate_id"))
      .def(
          "image_sims",
          [](const CorpusFeaturizer& f, PostId a, PostId b) {
            ImagePairSims sims = f.image_sims(a, b);
            return std::make_pair(sims.image_text, sims.image_caption);
          },
          py::arg("a"), py::arg("b"),
          "(ocr similarity, caption similarity) for a question pair");

  m.def("porter_stem",
        [](const std::string& word) { return porter_stem(word); }, py::arg("word"));

  m.def(
      "cosine",
      [](const std::map<std::string, double>& u, const std::map<std::string, double>& v) {
        return cosine(to_sparse(u), to_sparse(v));
      },
      py::arg("u"), py::arg("v"), "Cosine over sparse term->weight mappings");

  m.def("term_overlap", &term_overlap, py::arg("a"), py::arg("b"));
  m.def("entity_overlap", &entity_overlap, py::arg("a"), py::arg("b"));
  m.def("combined_image_similarity", &combined_image_similarity, py::arg("image_text"),
        py::arg("image_caption"));
  m.def("similarity_delta", &similarity_delta, py::arg("image_text"),
        py::arg("image_caption"));

  m.def("feature_names", []() {
    return std::vector<std::string>(std::begin(kFeatureNames), std::end(kFeatureNames));
  });
  m.def("config_names", []() {
    return std::vector<std::string>(std::begin(kConfigNames), std::end(kConfigNames));
  });
  m.def(
      "config_feature_names",
      [](const std::string& name, bool split_image_features) {
        return config_by_name(name, split_image_features).schema.names();
      },
      py::arg("name"), py::arg("split_image_features") = false);

  m.def(
      "load_corpus",
      [](const std::string& path) { return load_jsonl_corpus(path); }, py::arg("path"),
      "Load a JSONL corpus; body decomposition is re-derived on load");
  m.def("filter_image_questions", &filter_image_questions, py::arg("questions"),
        "Keep exactly the questions with at least one image reference");
  m.def(
      "build_pairs",
      [](const std::vector<Question>& questions, std::uint64_t seed) {
        return build_pairs(questions, seed);
      },
      py::arg("questions"), py::arg("seed"),
      "Balanced duplicate / non-duplicate pair lists, deterministic per seed");

  m.def(
      "split_pairs",
      [](const std::vector<QuestionPair>& dup, const std::vector<QuestionPair>& nondup,
         double train_fraction, std::uint64_t seed, bool stratified) {
        PairSplit s = split(dup, nondup, {train_fraction, seed, stratified});
        return py::make_tuple(s.train_dup, s.train_nondup, s.test_dup, s.test_nondup);
      },
      py::arg("dup_pairs"), py::arg("nondup_pairs"), py::arg("train_fraction") = 0.8,
      py::arg("seed") = 0, py::arg("stratified") = true,
      "(train_dup, train_nondup, test_dup, test_nondup)");

  m.def(
      "build_featurizer",
      [](const std::vector<Question>& questions,
         const std::vector<QuestionPair>& train_pairs,
         const std::vector<std::string>& feature_names,
         const std::optional<std::string>& synonyms_csv,
         const std::optional<std::string>& image_cache) {
        TagSynonymMap synonyms = load_synonyms(synonyms_csv);
        ArtifactCache cache;
        const ArtifactCache* cache_ptr = nullptr;
        if (image_cache) {
          cache = ArtifactCache::open(*image_cache, false);
          cache_ptr = &cache;
        }
        std::vector<PostId> train_ids = training_question_ids(train_pairs, {});
        return CorpusFeaturizer::build(questions, synonyms, StopList::english(), cache_ptr,
                                       train_ids, FeatureSchema(feature_names));
      },
      py::arg("questions"), py::arg("train_pairs"), py::arg("feature_names"),
      py::arg("synonyms_csv") = std::nullopt, py::arg("image_cache") = std::nullopt,
      "Freeze document statistics over the training pairs' questions");

  m.def(
      "train",
      [](const std::vector<std::pair<std::vector<double>, int>>& rows,
         const std::vector<std::string>& feature_names, double learning_rate,
         std::size_t epochs, double l2, std::uint64_t seed) {
        FeatureSchema schema(feature_names);
        Hyperparams hyper{learning_rate, epochs, l2, seed};
        return train(rows_from_python(rows, schema), hyper);
      },
      py::arg("rows"), py::arg("feature_names"), py::arg("learning_rate") = 0.1,
      py::arg("epochs") = 500, py::arg("l2") = 1e-4, py::arg("seed") = 0,
      "rows: list of (feature values, label) with label 1 = duplicate");

  m.def(
      "rank",
      [](const CorpusFeaturizer& featurizer, const TrainedModel& model, PostId query_id,
         const std::vector<PostId>& pool, std::size_t k) {
        RankedList list = rank(featurizer, model, query_id, pool, k);
        std::vector<std::pair<PostId, double>> out;
        out.reserve(list.entries.size());
        for (const RankEntry& e : list.entries) out.push_back({e.candidate_id, e.probability});
        return out;
      },
      py::arg("featurizer"), py::arg("model"), py::arg("query_id"), py::arg("pool"),
      py::arg("k"), "Top-k (candidate id, probability), best first");

  m.def(
      "candidate_pool",
      [](const std::vector<Question>& questions, const std::string& kind) {
        return candidate_pool(questions, pool_kind_from_string(kind));
      },
      py::arg("questions"), py::arg("kind") = "masters_and_nondup");

  m.def(
      "recall_rate",
      [](const std::map<PostId, std::vector<PostId>>& rankings,
         const std::map<PostId, PostId>& truth, std::size_t k) {
        std::map<PostId, RankedList> lists;
        for (const auto& [query, candidates] : rankings) {
          RankedList list;
          list.query_id = query;
          double p = 1.0;
          for (PostId c : candidates) list.entries.push_back({c, p -= 1e-6});
          list.k = list.entries.size();
          lists.emplace(query, std::move(list));
        }
        RecallResult r = recall_rate(lists, truth, k);
        return py::make_tuple(r.rate, r.n_detected, r.n_all);
      },
      py::arg("rankings"), py::arg("truth"), py::arg("k"),
      "rankings: query id -> candidate ids in rank order; returns (rate, detected, all)");

  m.def(
      "delta_audit",
      [](const CorpusFeaturizer& featurizer, const std::vector<QuestionPair>& pairs,
         double threshold) {
        std::vector<DeltaAuditEntry> entries =
            delta_audit(collect_delta_records(featurizer, pairs), threshold);
        py::list out;
        for (const DeltaAuditEntry& e : entries) {
          py::dict d;
          d["query_id"] = e.query_id;
          d["candidate_id"] = e.candidate_id;
          d["image_text"] = e.image_text;
          d["image_caption"] = e.image_caption;
          d["delta"] = e.delta;
          d["label"] = to_string(e.label);
          out.append(d);
        }
        return out;
      },
      py::arg("featurizer"), py::arg("pairs"), py::arg("threshold") = 0.5,
      "Pairs whose OCR/caption similarities disagree by more than the threshold");

  m.def(
      "run_matrix_json",
      [](const std::vector<Question>& questions, std::uint64_t pairing_seed,
         double train_fraction, std::uint64_t split_seed, std::uint64_t training_seed,
         const std::optional<std::string>& image_cache,
         const std::optional<std::string>& synonyms_csv,
         const std::vector<std::string>& configs, const std::vector<std::size_t>& k_values,
         const std::string& pool, bool split_image_features, std::size_t jobs) {
        PairBuild pairs = build_pairs(questions, pairing_seed);
        TagSynonymMap synonyms = load_synonyms(synonyms_csv);
        ArtifactCache cache;
        MatrixInputs inputs;
        inputs.questions = &questions;
        inputs.pairs = &pairs;
        if (image_cache) {
          cache = ArtifactCache::open(*image_cache, false);
          inputs.cache = &cache;
        }
        if (configs.empty()) {
          inputs.configs = default_configs(split_image_features);
        } else {
          for (const std::string& name : configs) {
            inputs.configs.push_back(config_by_name(name, split_image_features));
          }
        }
        if (!k_values.empty()) {
          for (EvalConfig& config : inputs.configs) config.k_values = k_values;
        }
        inputs.split_spec = {train_fraction, split_seed, true};
        inputs.hyper.seed = training_seed;
        inputs.pool = pool_kind_from_string(pool);
        inputs.synonyms = &synonyms;
        inputs.jobs = jobs;
        inputs.split_image_features = split_image_features;
        inputs.pairing_seed = pairing_seed;
        return report_to_json(run_matrix(inputs).report);
      },
      py::arg("questions"), py::arg("pairing_seed") = 0, py::arg("train_fraction") = 0.8,
      py::arg("split_seed") = 0, py::arg("training_seed") = 0,
      py::arg("image_cache") = std::nullopt, py::arg("synonyms_csv") = std::nullopt,
      py::arg("configs") = std::vector<std::string>{},
      py::arg("k_values") = std::vector<std::size_t>{},
      py::arg("pool") = "masters_and_nondup", py::arg("split_image_features") = false,
      py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>(),
      "Full evaluation matrix; returns the report as a JSON string");
}
