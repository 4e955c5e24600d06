#include "dupq/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dupq/errors.hpp"
#include "dupq/eval.hpp"

namespace dupq {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> optional_path(const json& j, const char* key,
                                                   const std::filesystem::path& base) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) {
    throw ConfigError(std::string("manifest field \"") + key + "\" must be a string path");
  }
  return resolve(base, j[key].get<std::string>());
}

ProviderConfig provider_from_json(const json& j, const std::string& which) {
  ProviderConfig config;
  if (!j.contains("endpoint") || !j["endpoint"].is_string()) {
    throw ConfigError("manifest " + which + " provider requires an endpoint");
  }
  config.endpoint = j["endpoint"].get<std::string>();
  config.auth_env = j.value("auth_env", std::string{});
  config.timeout_s = j.value("timeout_s", 30.0);
  config.max_retries = j.value("max_retries", std::size_t{3});
  config.rate_limit_rps = j.value("rate_limit_rps", 0.0);
  config.prompt = j.value("prompt", std::string{});
  config.provider_id = j.value("provider_id", which);
  if (config.timeout_s <= 0.0) {
    throw ConfigError("manifest " + which + " provider timeout must be positive");
  }
  return config;
}

}  // namespace

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest " + path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");

  RunManifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  if (j.contains("corpus")) {
    const json& c = j["corpus"];
    if (!c.is_object()) throw ConfigError("manifest field \"corpus\" must be an object");
    m.posts_xml = optional_path(c, "posts_xml", m.base_dir);
    m.postlinks_xml = optional_path(c, "postlinks_xml", m.base_dir);
    m.corpus_jsonl = optional_path(c, "jsonl", m.base_dir);
  }
  bool has_xml = m.posts_xml.has_value();
  bool has_jsonl = m.corpus_jsonl.has_value();
  if (has_xml == has_jsonl) {
    throw ConfigError("manifest corpus must name either posts_xml (+ postlinks_xml) or jsonl");
  }
  if (has_xml && !m.postlinks_xml) {
    throw ConfigError("manifest corpus with posts_xml also requires postlinks_xml");
  }

  m.stoplist = optional_path(j, "stoplist", m.base_dir);
  m.tag_synonyms = optional_path(j, "tag_synonyms", m.base_dir);
  m.image_cache = optional_path(j, "image_cache", m.base_dir);

  if (j.contains("providers") && j["providers"].is_object()) {
    const json& p = j["providers"];
    if (p.contains("ocr") && !p["ocr"].is_null()) {
      m.ocr_provider = provider_from_json(p["ocr"], "ocr");
    }
    if (p.contains("caption") && !p["caption"].is_null()) {
      m.caption_provider = provider_from_json(p["caption"], "caption");
    }
  }

  if (!j.contains("seeds") || !j["seeds"].is_object()) {
    throw ConfigError("manifest requires an explicit \"seeds\" object");
  }
  const json& seeds = j["seeds"];
  for (const char* key : {"pairing", "split", "training"}) {
    if (!seeds.contains(key) || !seeds[key].is_number_unsigned()) {
      throw ConfigError(std::string("manifest seeds require an unsigned \"") + key + "\" entry");
    }
  }
  m.seeds.pairing = seeds["pairing"].get<std::uint64_t>();
  m.seeds.split = seeds["split"].get<std::uint64_t>();
  m.seeds.training = seeds["training"].get<std::uint64_t>();

  if (j.contains("hyperparams")) {
    const json& h = j["hyperparams"];
    m.hyper.learning_rate = h.value("learning_rate", m.hyper.learning_rate);
    m.hyper.epochs = h.value("epochs", m.hyper.epochs);
    m.hyper.l2 = h.value("l2", m.hyper.l2);
    if (m.hyper.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (m.hyper.epochs == 0) throw ConfigError("epochs must be at least 1");
    if (m.hyper.l2 < 0.0) throw ConfigError("l2 must be non-negative");
  }
  m.hyper.seed = m.seeds.training;

  if (j.contains("configs")) {
    if (!j["configs"].is_array()) throw ConfigError("manifest field \"configs\" must be an array");
    for (const auto& c : j["configs"]) {
      if (!c.is_string()) throw ConfigError("manifest configs must be strings");
      m.configs.push_back(c.get<std::string>());
    }
  }
  if (m.configs.empty()) {
    m.configs.assign(std::begin(kConfigNames), std::end(kConfigNames));
  }
  std::set<std::string> seen;
  for (const std::string& name : m.configs) {
    config_by_name(name);  // throws on unknown names
    if (!seen.insert(name).second) {
      throw ConfigError("manifest lists config \"" + name + "\" twice");
    }
  }

  if (j.contains("k_values")) {
    if (!j["k_values"].is_array() || j["k_values"].empty()) {
      throw ConfigError("manifest field \"k_values\" must be a non-empty array");
    }
    m.k_values.clear();
    for (const auto& k : j["k_values"]) {
      if (!k.is_number_unsigned() || k.get<std::size_t>() == 0) {
        throw ConfigError("manifest k_values must be positive integers");
      }
      m.k_values.push_back(k.get<std::size_t>());
    }
  }

  if (j.contains("pool")) m.pool = pool_kind_from_string(j["pool"].get<std::string>());
  m.split_image_features = j.value("split_image_features", false);
  m.require_images = j.value("require_images", true);
  if (j.contains("subsample") && !j["subsample"].is_null()) {
    if (!j["subsample"].is_number_unsigned() || j["subsample"].get<std::size_t>() == 0) {
      throw ConfigError("manifest subsample must be a positive integer");
    }
    m.subsample = j["subsample"].get<std::size_t>();
  }

  if (!j.contains("out_dir") || !j["out_dir"].is_string()) {
    throw ConfigError("manifest requires an \"out_dir\" path");
  }
  m.out_dir = resolve(m.base_dir, j["out_dir"].get<std::string>());
  return m;
}

void RunManifest::validate_paths() const {
  auto require = [](const std::optional<std::filesystem::path>& p, const char* what) {
    if (p && !std::filesystem::exists(*p)) {
      throw ConfigError(std::string(what) + " does not exist: " + p->string());
    }
  };
  require(posts_xml, "posts_xml");
  require(postlinks_xml, "postlinks_xml");
  require(corpus_jsonl, "corpus jsonl");
  require(stoplist, "stoplist");
  require(tag_synonyms, "tag synonym map");
}

}  // namespace dupq
