#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "grag/util.hpp"

namespace grag::llm {

struct ChatRequest {
    std::string model;
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
    std::size_t max_output_tokens = 1024;
};

/// Cache/cache-key digest over (model, system, user, temperature).
std::string request_digest(const ChatRequest& request);

/// Per-run request defaults applied to every rendered prompt.
struct ChatDefaults {
    std::string model = "mock-model";
    double temperature = 0.0;
    std::size_t max_output_tokens = 1024;

    ChatRequest make_request(std::string system_text, std::string user_text) const {
        return ChatRequest{model, std::move(system_text), std::move(user_text), temperature,
                           max_output_tokens};
    }
};

/// Backend failure; `transient` failures are retried by the gateway.
class BackendError : public Error {
public:
    BackendError(std::string message, bool transient)
        : Error(Error::Kind::backend, std::move(message)), transient_(transient) {}
    bool transient() const noexcept { return transient_; }

private:
    bool transient_;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const ChatRequest& request) = 0;
    /// Number of complete() invocations that reached this backend.
    virtual std::size_t calls() const = 0;
};

struct MockOptions {
    std::filesystem::path fixtures_path;  // optional JSONL fixture file
    bool strict = false;                  // fixture miss is an error when true
};

/// Deterministic scripted backend. Fixture records map a request digest or a
/// scenario substring to a response; without a match it synthesizes a
/// deterministic response from the request text (strict mode errors instead).
class MockBackend : public Backend {
public:
    explicit MockBackend(MockOptions options = {});

    std::string name() const override { return "mock"; }
    std::string complete(const ChatRequest& request) override;
    std::size_t calls() const override { return calls_.load(); }

private:
    struct FixtureRule {
        std::string digest;    // exact digest match when non-empty
        std::string contains;  // substring-of-user-text match when non-empty
        std::string response;
    };

    MockOptions options_;
    std::vector<FixtureRule> rules_;
    std::atomic<std::size_t> calls_{0};
};

struct HttpOptions {
    std::string base_url;   // e.g. https://api.example.com/v1
    std::string api_key;
    std::string path = "/chat/completions";
    int timeout_seconds = 120;
};

/// Chat-completions HTTP backend (bearer auth). 429/5xx/transport failures
/// are transient; authentication failures are not.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpOptions options);

    std::string name() const override { return "http"; }
    std::string complete(const ChatRequest& request) override;
    std::size_t calls() const override { return calls_.load(); }

    /// Process-wide count of HTTP requests issued by any HttpBackend.
    static std::size_t network_calls();

private:
    HttpOptions options_;
    std::atomic<std::size_t> calls_{0};
};

struct GatewayOptions {
    int max_attempts = 3;
    int backoff_base_ms = 500;
    double backoff_multiplier = 2.0;
    double rate_limit_per_sec = 0.0;      // 0 disables the limiter
    std::filesystem::path cache_dir;      // empty disables the cache
};

/// Uniform access to a backend: token-bucket admission, exponential-backoff
/// retries for transient failures, and an on-disk response cache keyed by
/// request digest. Safe for concurrent use.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewayOptions options);

    /// One completion with retries; no cache involvement.
    std::string complete(const ChatRequest& request);

    /// Disk-cached completion. A corrupted cache entry degrades to a miss.
    std::string cached_complete(const ChatRequest& request);

    Backend& backend() { return *backend_; }
    std::size_t cache_hits() const { return cache_hits_.load(); }
    std::size_t cache_misses() const { return cache_misses_.load(); }

private:
    void admit();
    std::filesystem::path cache_file(const std::string& digest) const;

    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::mutex limiter_mutex_;
    double bucket_tokens_ = 0.0;
    std::chrono::steady_clock::time_point bucket_refill_;
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<std::size_t> cache_misses_{0};
};

/// Removes every cache entry below `cache_dir`; returns the number removed.
std::size_t purge_cache(const std::filesystem::path& cache_dir);

}  // namespace grag::llm
