#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dupq/features.hpp"
#include "dupq/textprep.hpp"

namespace dupq {

struct ProviderIds {
  std::string ocr;
  std::string caption;
};

struct ImageArtifacts {
  std::string image_key;  // stable hash of the URL
  std::string url;
  std::string ocr_text;               // possibly empty
  std::vector<std::string> captions;  // at most three
  ProviderIds provider_ids;
  std::string fetched_at;  // ISO 8601, empty for unresolved artifacts
};

std::string image_key_for_url(const std::string& url);

// Append-only JSONL store keyed by image URL hash. Reopening replays
// the log; the last entry per key wins, so corrected fetches simply
// append. Safe for concurrent put() calls from resolver workers.
class ArtifactCache {
 public:
  ArtifactCache() = default;

  // Missing files are fine when writable (they are created on first
  // put); read-only mode requires the file to exist.
  static ArtifactCache open(const std::filesystem::path& path, bool writable);
  static ArtifactCache in_memory();

  std::optional<ImageArtifacts> lookup(const std::string& url) const;
  void put(const ImageArtifacts& artifact);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  bool writable_ = false;
  // Held by pointer so the cache stays movable.
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
  std::map<std::string, ImageArtifacts> by_key_;
};

struct ProviderConfig {
  std::string endpoint;
  std::string auth_env;  // name of the environment variable holding the token
  double timeout_s = 30.0;
  std::size_t max_retries = 3;
  double rate_limit_rps = 0.0;  // 0 = unlimited
  std::string prompt;           // caption providers only
  std::string provider_id;
};

class OcrProvider {
 public:
  virtual ~OcrProvider() = default;
  virtual std::string recognize(const std::string& url) = 0;
  virtual std::string id() const = 0;
};

class CaptionProvider {
 public:
  virtual ~CaptionProvider() = default;
  virtual std::vector<std::string> caption(const std::string& url) = 0;
  virtual std::string id() const = 0;
};

// HTTP providers POST {"url": ...} (captions add "prompt") and expect
// {"text": ...} or {"captions": [...]} back. Retries use exponential
// backoff; a configured rate limit spaces out request starts.
class HttpOcrProvider : public OcrProvider {
 public:
  explicit HttpOcrProvider(ProviderConfig config);  // ConfigError if auth env unset
  std::string recognize(const std::string& url) override;
  std::string id() const override { return config_.provider_id; }

 private:
  ProviderConfig config_;
  std::string token_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_allowed_{};
};

class HttpCaptionProvider : public CaptionProvider {
 public:
  explicit HttpCaptionProvider(ProviderConfig config);
  std::vector<std::string> caption(const std::string& url) override;
  std::string id() const override { return config_.provider_id; }

 private:
  ProviderConfig config_;
  std::string token_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_allowed_{};
};

// Canned providers for tests; they count calls so offline-guarantee
// tests can assert that no request was ever issued.
class StubOcrProvider : public OcrProvider {
 public:
  explicit StubOcrProvider(std::map<std::string, std::string> by_url = {})
      : by_url_(std::move(by_url)) {}
  std::string recognize(const std::string& url) override;
  std::string id() const override { return "stub-ocr"; }
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, std::string> by_url_;
  std::size_t calls_ = 0;
};

class StubCaptionProvider : public CaptionProvider {
 public:
  explicit StubCaptionProvider(std::map<std::string, std::vector<std::string>> by_url = {})
      : by_url_(std::move(by_url)) {}
  std::vector<std::string> caption(const std::string& url) override;
  std::string id() const override { return "stub-caption"; }
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, std::vector<std::string>> by_url_;
  std::size_t calls_ = 0;
};

struct ResolveOptions {
  bool cache_only = false;
  std::size_t jobs = 1;
};

struct ResolveDiagnostics {
  std::size_t cache_hits = 0;
  std::size_t fetched = 0;
  std::size_t unresolved = 0;
  std::vector<std::string> errors;  // one message per failed image
};

// Resolves each URL through the cache first. Providers may be null in
// cache-only mode; misses then yield empty artifacts plus a diagnostic.
std::vector<ImageArtifacts> resolve_artifacts(const std::vector<std::string>& urls,
                                              OcrProvider* ocr, CaptionProvider* captions,
                                              ArtifactCache& cache, const ResolveOptions& options,
                                              ResolveDiagnostics* diagnostics = nullptr);

double image_text_similarity(const TokenList& ocr_a, const TokenList& ocr_b,
                             const TfidfIndex& index);

double image_caption_similarity(const std::vector<TokenList>& captions_a,
                                const std::vector<TokenList>& captions_b, const TfidfIndex& index);

struct PreparedImage {
  TokenList ocr_tokens;                     // textprep pipeline applied
  std::vector<TokenList> caption_tokens;    // one entry per caption
};

PreparedImage prepare_image(const ImageArtifacts& artifact, const StopList& stops);

// All images belonging to one question.
struct PreparedImageSet {
  std::vector<PreparedImage> images;

  TokenList concatenated_ocr() const;
  std::vector<TokenList> all_captions() const;
};

enum class ImageAggregation { concat_ocr_max_caption };

// Question-level {it, ic}: OCR texts concatenate before comparison,
// caption similarity is the max over all image cross pairs.
ImagePairSims aggregate_question_images(const PreparedImageSet& a, const PreparedImageSet& b,
                                        const TfidfIndex& ocr_index,
                                        const TfidfIndex& caption_index,
                                        ImageAggregation mode = ImageAggregation::concat_ocr_max_caption);

}  // namespace dupq
