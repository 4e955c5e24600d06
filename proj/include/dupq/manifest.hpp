#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dupq/classifier.hpp"
#include "dupq/imaging.hpp"
#include "dupq/pipeline.hpp"

namespace dupq {

struct ManifestSeeds {
  std::uint64_t pairing = 0;
  std::uint64_t split = 0;
  std::uint64_t training = 0;
};

// One run configuration file. Relative paths resolve against the
// manifest's own directory, so manifests can travel with their data.
struct RunManifest {
  std::filesystem::path base_dir;

  // Exactly one corpus source: a dump pair or a prepared JSONL file.
  std::optional<std::filesystem::path> posts_xml;
  std::optional<std::filesystem::path> postlinks_xml;
  std::optional<std::filesystem::path> corpus_jsonl;

  std::optional<std::filesystem::path> stoplist;      // built-in list when absent
  std::optional<std::filesystem::path> tag_synonyms;  // empty map when absent
  std::optional<std::filesystem::path> image_cache;

  std::optional<ProviderConfig> ocr_provider;
  std::optional<ProviderConfig> caption_provider;

  ManifestSeeds seeds;  // must be explicit in the file
  Hyperparams hyper;    // seed field mirrors seeds.training

  std::vector<std::string> configs;  // defaults to all six
  std::vector<std::size_t> k_values = {5, 10, 20};
  PoolKind pool = PoolKind::masters_and_nondup;
  bool split_image_features = false;
  bool require_images = true;
  std::optional<std::size_t> subsample;

  std::filesystem::path out_dir;

  static RunManifest load(const std::filesystem::path& path);

  // Checks that every referenced input file exists. The image cache
  // and out_dir are outputs and may not exist yet.
  void validate_paths() const;
};

}  // namespace dupq
