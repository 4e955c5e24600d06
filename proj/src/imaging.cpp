#include "dupq/imaging.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#ifdef DUPQ_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "dupq/errors.hpp"
#include "dupq/util.hpp"

namespace dupq {

using nlohmann::json;

std::string image_key_for_url(const std::string& url) { return fnv1a64_hex(url); }

namespace {

json artifact_to_json(const ImageArtifacts& a) {
  json j;
  j["image_key"] = a.image_key;
  j["url"] = a.url;
  j["ocr_text"] = a.ocr_text;
  j["captions"] = a.captions;
  j["provider_ids"] = {{"ocr", a.provider_ids.ocr}, {"caption", a.provider_ids.caption}};
  j["fetched_at"] = a.fetched_at;
  return j;
}

ImageArtifacts artifact_from_json(const json& j, std::size_t line_no) {
  auto fail = [line_no](const std::string& what) -> ImageArtifacts {
    throw DataError("image cache line " + std::to_string(line_no) + ": " + what);
  };
  if (!j.is_object()) return fail("entry is not a JSON object");
  if (!j.contains("image_key") || !j["image_key"].is_string()) {
    return fail("missing string field image_key");
  }
  if (!j.contains("url") || !j["url"].is_string ()) return fail("missing string field url");
  ImageArtifacts a;
  a.image_key = j["image_key"].get<std::string>();
  a.url = j["url"].get<std::string>();
  if (a.image_key != image_key_for_url(a.url)) {
    return fail("image_key does not match the hash of url");
  }
  a.ocr_text = j.value("ocr_text", std::string{});
  if (j.contains("captions")) {
    if (!j["captions"].is_array()) return fail("captions must be an array");
    for (const auto& c : j["captions"]) {
      if (!c.is_string()) return fail("captions must contain only strings");
      a.captions.push_back(c.get<std::string>());
    }
  }
  if (a.captions.size() > 3) return fail("more than three captions");
  if (j.contains("provider_ids") && j["provider_ids"].is_object()) {
    a.provider_ids.ocr = j["provider_ids"].value("ocr", std::string{});
    a.provider_ids.caption = j["provider_ids"].value("caption", std::string{});
  }
  a.fetched_at = j.value("fetched_at", std::string{});
  return a;
}

}  // namespace

ArtifactCache ArtifactCache::open(const std::filesystem::path& path, bool writable) {
  ArtifactCache cache;
  cache.path_ = path;
  cache.writable_ = writable;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!writable) throw DataError("cannot open image cache: " + path.string());
    return cache;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("image cache line " + std::to_string(line_no) + ": invalid JSON: " +
                      e.what());
    }
    ImageArtifacts a = artifact_from_json(j, line_no);
    cache.by_key_[a.image_key] = std::move(a);  // last entry wins
  }
  return cache;
}

ArtifactCache ArtifactCache::in_memory() { return ArtifactCache{}; }

std::optional<ImageArtifacts> ArtifactCache::lookup(const std::string& url) const {
  std::lock_guard<std::mutex> lock(*mutex_);
  auto it = by_key_.find(image_key_for_url(url));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

void ArtifactCache::put(const ImageArtifacts& artifact) {
  std::lock_guard<std::mutex> lock(*mutex_);
  if (!path_.empty() && writable_) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw DataError("cannot append to image cache: " + path_.string());
    out << artifact_to_json(artifact).dump() << '\n';
  }
  by_key_[artifact.image_key] = artifact;
}

std::size_t ArtifactCache::size() const {
  std::lock_guard<std::mutex> lock(*mutex_);
  return by_key_.size();
}

namespace {

std::string require_token(const ProviderConfig& config) {
  if (config.auth_env.empty()) {
    throw ConfigError("provider \"" + config.provider_id + "\" has no auth environment variable");
  }
  const char* value = std::getenv(config.auth_env.c_str());
  if (!value || !*value) {
    throw ConfigError("environment variable " + config.auth_env + " required by provider \"" +
                      config.provider_id + "\" is not set");
  }
  return value;
}

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("provider endpoint must include a scheme: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

// One POST with retries and exponential backoff. Shared by both HTTP
// provider flavours; only the request/response JSON differs.
json post_with_retries(const ProviderConfig& config, const std::string& token,
                       std::mutex& rate_mutex,
                       std::chrono::steady_clock::time_point& next_allowed, const json& body) {
  SplitUrl url = split_endpoint(config.endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(std::chrono::duration<double>(config.timeout_s));
  client.set_read_timeout(std::chrono::duration<double>(config.timeout_s));
  client.set_bearer_token_auth(token);

  std::string payload = body.dump();
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (config.rate_limit_rps > 0.0) {
      std::chrono::steady_clock::time_point wait_until;
      {
        std::lock_guard<std::mutex> lock(rate_mutex);
        auto now = std::chrono::steady_clock::now();
        wait_until = std::max(now, next_allowed);
        next_allowed = wait_until + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                        std::chrono::duration<double>(1.0 / config.rate_limit_rps));
      }
      std::this_thread::sleep_until(wait_until);
    }
    if (attempt > 0) {
      auto backoff = std::chrono::milliseconds(250) * (1u << (attempt - 1));
      std::this_thread::sleep_for(backoff);
    }
    httplib::Result res = client.Post(url.path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        last_error = std::string("invalid JSON response: ") + e.what();
        continue;
      }
    }
    last_error = "HTTP status " + std::to_string(res->status);
    if (res->status >= 400 && res->status < 500 && res->status != 429) break;  // not retryable
  }
  throw ProviderError("provider \"" + config.provider_id + "\" failed after " +
                      std::to_string(config.max_retries + 1) + " attempt(s): " + last_error);
}

}  // namespace

HttpOcrProvider::HttpOcrProvider(ProviderConfig config) : config_(std::move(config)) {
  token_ = require_token(config_);
}

std::string HttpOcrProvider::recognize(const std::string& url) {
  json body = {{"url", url}};
  json res = post_with_retries(config_, token_, rate_mutex_, next_allowed_, body);
  if (!res.contains("text") || !res["text"].is_string()) {
    throw ProviderError("provider \"" + config_.provider_id +
                        "\" returned no \"text\" field for " + url);
  }
  return res["text"].get<std::string>();
}

HttpCaptionProvider::HttpCaptionProvider(ProviderConfig config) : config_(std::move(config)) {
  token_ = require_token(config_);
}

std::vector<std::string> HttpCaptionProvider::caption(const std::string& url) {
  json body = {{"url", url}, {"prompt", config_.prompt}};
  json res = post_with_retries(config_, token_, rate_mutex_, next_allowed_, body);
  if (!res.contains("captions") || !res["captions"].is_array()) {
    throw ProviderError("provider \"" + config_.provider_id +
                        "\" returned no \"captions\" field for " + url);
  }
  std::vector<std::string> captions;
  for (const auto& c : res["captions"]) {
    if (c.is_string()) captions.push_back(c.get<std::string>());
  }
  if (captions.size() > 3) captions.resize(3);
  return captions;
}

std::string StubOcrProvider::recognize(const std::string& url) {
  ++calls_;
  auto it = by_url_.find(url);
  if (it == by_url_.end()) throw ProviderError("stub OCR has no fixture for " + url);
  return it->second;
}

std::vector<std::string> StubCaptionProvider::caption(const std::string& url) {
  ++calls_;
  auto it = by_url_.find(url);
  if (it == by_url_.end()) throw ProviderError("stub captioner has no fixture for " + url);
  return it->second;
}

namespace {

ImageArtifacts resolve_one(const std::string& url, OcrProvider* ocr, CaptionProvider* captions,
                           ArtifactCache& cache, const ResolveOptions& options,
                           ResolveDiagnostics& diag, std::mutex& diag_mutex) {
  if (std::optional<ImageArtifacts> hit = cache.lookup(url)) {
    std::lock_guard<std::mutex> lock(diag_mutex);
    ++diag.cache_hits;
    return *hit;
  }

  ImageArtifacts artifact;
  artifact.image_key = image_key_for_url(url);
  artifact.url = url;

  if (options.cache_only || (!ocr && !captions)) {
    std::lock_guard<std::mutex> lock(diag_mutex);
    ++diag.unresolved;
    diag.errors.push_back("unresolved (cache-only): " + url);
    return artifact;
  }

  bool failed = false;
  std::string error;
  try {
    if (ocr) {
      artifact.ocr_text = ocr->recognize(url);
      artifact.provider_ids.ocr = ocr->id();
    }
    if (captions) {
      artifact.captions = captions->caption(url);
      if (artifact.captions.size() > 3) artifact.captions.resize(3);
      artifact.provider_ids.caption = captions->id();
    }
  } catch (const Error& e) {
    failed = true;
    error = e.what();
  }

  if (failed) {
    std::lock_guard<std::mutex> lock(diag_mutex);
    ++diag.unresolved;
    diag.errors.push_back(url + ": " + error);
    return ImageArtifacts{image_key_for_url(url), url, "", {}, {}, ""};
  }

  artifact.fetched_at = iso8601_utc_now();
  cache.put(artifact);
  {
    std::lock_guard<std::mutex> lock(diag_mutex);
    ++diag.fetched;
  }
  return artifact;
}

}  // namespace

std::vector<ImageArtifacts> resolve_artifacts(const std::vector<std::string>& urls,
                                              OcrProvider* ocr, CaptionProvider* captions,
                                              ArtifactCache& cache, const ResolveOptions& options,
                                              ResolveDiagnostics* diagnostics) {
  ResolveDiagnostics local;
  ResolveDiagnostics& diag = diagnostics ? *diagnostics : local;
  std::mutex diag_mutex;

  std::vector<ImageArtifacts> out(urls.size());
  std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  jobs = std::min(jobs, urls.size() == 0 ? 1 : urls.size());

  if (jobs == 1) {
    for (std::size_t i = 0; i < urls.size(); ++i) {
      out[i] = resolve_one(urls[i], ocr, captions, cache, options, diag, diag_mutex);
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= urls.size()) return;
        out[i] = resolve_one(urls[i], ocr, captions, cache, options, diag, diag_mutex);
      }
    });
  }
  for (std::thread& t : workers) t.join();
  return out;
}

double image_text_similarity(const TokenList& ocr_a, const TokenList& ocr_b,
                             const TfidfIndex& index) {
  if (ocr_a.empty() || ocr_b.empty()) return 0.0;
  return cosine(index.vectorize(ocr_a), index.vectorize(ocr_b));
}

double image_caption_similarity(const std::vector<TokenList>& captions_a,
                                const std::vector<TokenList>& captions_b,
                                const TfidfIndex& index) {
  if (captions_a.empty() || captions_b.empty()) return 0.0;
  double best = 0.0;
  for (const TokenList& a : captions_a) {
    SparseVector va = index.vectorize(a);
    for (const TokenList& b : captions_b) {
      best = std::max(best, cosine(va, index.vectorize(b)));
    }
  }
  return best;
}

PreparedImage prepare_image(const ImageArtifacts& artifact, const StopList& stops) {
  PreparedImage prepared;
  prepared.ocr_tokens = stem(remove_stopwords(tokenize(artifact.ocr_text), stops));
  for (const std::string& caption : artifact.captions) {
    prepared.caption_tokens.push_back(stem(remove_stopwords(tokenize(caption), stops)));
  }
  return prepared;
}

TokenList PreparedImageSet::concatenated_ocr() const {
  TokenList all;
  for (const PreparedImage& img : images) {
    all.insert(all.end(), img.ocr_tokens.begin(), img.ocr_tokens.end());
  }
  return all;
}

std::vector<TokenList> PreparedImageSet::all_captions() const {
  std::vector<TokenList> all;
  for (const PreparedImage& img : images) {
    for (const TokenList& c : img.caption_tokens) {
      if (!c.empty()) all.push_back(c);
    }
  }
  return all;
}

ImagePairSims aggregate_question_images(const PreparedImageSet& a, const PreparedImageSet& b,
                                        const TfidfIndex& ocr_index,
                                        const TfidfIndex& caption_index, ImageAggregation mode) {
  (void)mode;  // only concat_ocr_max_caption exists
  ImagePairSims sims;
  sims.image_text = image_text_similarity(a.concatenated_ocr(), b.concatenated_ocr(), ocr_index);
  sims.image_caption = image_caption_similarity(a.all_captions(), b.all_captions(), caption_index);
  return sims;
}

}  // namespace dupq
