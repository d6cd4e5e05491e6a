#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "grag/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>
#include <thread>

#include "grag/text.hpp"

namespace grag::llm {

using nlohmann::json;

std::string request_digest(const ChatRequest& request) {
    std::ostringstream buf;
    buf << request.model << '\x1f' << request.system_text << '\x1f' << request.user_text << '\x1f'
        << request.temperature;
    return util::sha256_hex(buf.str());
}

// ---------------------------------------------------------------------------
// Mock backend

MockBackend::MockBackend(MockOptions options) : options_(std::move(options)) {
    if (options_.fixtures_path.empty()) {
        return;
    }
    for (const auto& line : util::read_lines(options_.fixtures_path)) {
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("response")) {
            throw Error(Error::Kind::parse,
                        "bad fixture line in " + options_.fixtures_path.string() + ": " + line);
        }
        FixtureRule rule;
        rule.digest = record.value("digest", "");
        rule.contains = record.value("contains", "");
        rule.response = record.at("response").get<std::string>();
        rules_.push_back(std::move(rule));
    }
}

namespace {

// Capitalized word runs (up to three words) in reading order, deduplicated.
std::vector<std::string> capitalized_runs(const std::string& body, std::size_t cap) {
    auto spans = text::word_spans(body);
    std::vector<std::string> names;
    std::vector<std::string> seen;
    std::size_t i = 0;
    while (i < spans.size() && names.size() < cap) {
        auto word = [&](std::size_t k) {
            std::string w(body.substr(spans[k].start, spans[k].end - spans[k].start));
            while (!w.empty() && !std::isalnum(static_cast<unsigned char>(w.back()))) {
                w.pop_back();
            }
            while (!w.empty() && !std::isalnum(static_cast<unsigned char>(w.front()))) {
                w.erase(w.begin());
            }
            return w;
        };
        std::string first = word(i);
        if (first.size() < 2 || !std::isupper(static_cast<unsigned char>(first[0]))) {
            ++i;
            continue;
        }
        std::string run = first;
        std::size_t j = i + 1;
        while (j < spans.size() && j - i < 3) {
            std::string next = word(j);
            if (next.size() < 2 || !std::isupper(static_cast<unsigned char>(next[0]))) {
                break;
            }
            run += " " + next;
            ++j;
        }
        std::string key = text::normalize_for_match(run);
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(key);
            names.push_back(run);
        }
        i = j;
    }
    return names;
}

std::string section_between(const std::string& body, const std::string& begin,
                            const std::string& end) {
    auto from = body.find(begin);
    if (from == std::string::npos) {
        return "";
    }
    from += begin.size();
    auto to = body.find(end, from);
    if (to == std::string::npos) {
        to = body.size();
    }
    return body.substr(from, to - from);
}

std::string synth_extraction(const std::string& user_text) {
    const std::string body = section_between(user_text, "TEXT:\n", "\nRECORDS:");
    auto names = capitalized_runs(body, 8);
    static const char* kTypes[] = {"person", "organization", "location", "event", "concept"};
    std::ostringstream out;
    for (const auto& name : names) {
        const auto h = util::fnv1a64(text::normalize_for_match(name));
        const double confidence = 0.55 + 0.45 * static_cast<double>(h % 1000) / 999.0;
        out << "(\"entity\"|" << name << "|" << kTypes[h % 5] << "|" << name
            << " appears in the retrieved text.|" << util::format_fixed2(confidence) << ")\n";
    }
    for (std::size_t i = 0; i + 1 < names.size(); ++i) {
        out << "(\"relationship\"|" << names[i] << "|" << names[i + 1] << "|" << names[i]
            << " and " << names[i + 1] << " are mentioned together.|1)\n";
    }
    if (!names.empty()) {
        auto stop = body.find('.');
        std::string sentence = text::normalize_whitespace(
            stop == std::string::npos ? body.substr(0, 160) : body.substr(0, stop + 1));
        if (!sentence.empty()) {
            out << "(\"claim\"|" << names.front() << "|" << sentence << ")\n";
        }
    }
    if (names.empty()) {
        out << "(\"entity\"|Unnamed Topic|concept|No named entities were found.|0.55)\n";
    }
    return out.str();
}

std::string synth_summary(const std::string& user_text) {
    std::istringstream stream(user_text);
    std::string line;
    std::vector<std::string> members;
    while (std::getline(stream, line)) {
        if (line.rfind("- ", 0) == 0) {
            members.push_back(text::normalize_whitespace(line.substr(2)));
        }
    }
    std::ostringstream out;
    out << "This community covers " << members.size() << " item" << (members.size() == 1 ? "" : "s")
        << ": ";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i > 0) {
            out << "; ";
        }
        out << members[i];
    }
    return text::truncate_to_tokens(out.str(), 120);
}

std::string synth_answer(const std::string& user_text) {
    std::string context = section_between(user_text, "STRUCTURED CONTEXT: ", "\n\nQUESTION:");
    if (context.empty()) {
        context = section_between(user_text, "DOCUMENTS:\n", "\n\nQUESTION:");
    }
    if (context.empty()) {
        context = section_between(user_text, "---Data---\n\n", "\n\n---Question---");
    }
    if (context.empty()) {
        // No-document probe: the scripted backend has no knowledge of its own.
        return "I cannot answer the question because of the insufficient information in documents.";
    }
    return "Based on the provided information: " + text::truncate_to_tokens(context, 48);
}

}  // namespace

std::string MockBackend::complete(const ChatRequest& request) {
    calls_.fetch_add(1);
    const std::string digest = request_digest(request);
    for (const auto& rule : rules_) {
        if (!rule.digest.empty() && rule.digest == digest) {
            return rule.response;
        }
        if (!rule.contains.empty() && request.user_text.find(rule.contains) != std::string::npos) {
            return rule.response;
        }
    }
    if (options_.strict) {
        throw BackendError("mock fixture miss for key " + digest, false);
    }
    if (request.user_text.find("\nRECORDS:") != std::string::npos) {
        return synth_extraction(request.user_text);
    }
    if (request.user_text.find("\nSUMMARY:") != std::string::npos) {
        return synth_summary(request.user_text);
    }
    return synth_answer(request.user_text);
}

// ---------------------------------------------------------------------------
// HTTP backend

namespace {
std::atomic<std::size_t> g_network_calls{0};
}

HttpBackend::HttpBackend(HttpOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) {
        throw Error(Error::Kind::invalid_argument, "http backend needs a base URL");
    }
    if (options_.api_key.empty()) {
        throw Error(Error::Kind::invalid_argument,
                    "http backend needs a credential (set LLM_API_KEY)");
    }
}

std::size_t HttpBackend::network_calls() {
    return g_network_calls.load();
}

std::string HttpBackend::complete(const ChatRequest& request) {
    calls_.fetch_add(1);
    g_network_calls.fetch_add(1);

    std::string scheme_host = options_.base_url;
    std::string prefix;
    auto scheme_end = scheme_host.find("://");
    auto path_start = scheme_end == std::string::npos ? scheme_host.find('/')
                                                      : scheme_host.find('/', scheme_end + 3);
    if (path_start != std::string::npos) {
        prefix = scheme_host.substr(path_start);
        scheme_host = scheme_host.substr(0, path_start);
    }
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }

    json body;
    body["model"] = request.model;
    body["messages"] = json::array({
        json{{"role", "system"}, {"content", request.system_text}},
        json{{"role", "user"}, {"content", request.user_text}},
    });
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;

    httplib::Client client(scheme_host);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    httplib::Headers headers{{"Authorization", "Bearer " + options_.api_key}};

    auto result = client.Post(prefix + options_.path, headers, body.dump(), "application/json");
    if (!result) {
        throw BackendError("transport failure contacting " + options_.base_url + ": " +
                               httplib::to_string(result.error()),
                           true);
    }
    if (result->status == 401 || result->status == 403) {
        throw BackendError("authentication failure (HTTP " + std::to_string(result->status) + ")",
                           false);
    }
    if (result->status == 408 || result->status == 429 || result->status >= 500) {
        throw BackendError("transient backend failure (HTTP " + std::to_string(result->status) + ")",
                           true);
    }
    if (result->status != 200) {
        throw BackendError("backend rejected request (HTTP " + std::to_string(result->status) +
                               "): " + result->body.substr(0, 200),
                           false);
    }
    json payload = json::parse(result->body, nullptr, false);
    if (payload.is_discarded() || !payload.contains("choices") || payload["choices"].empty()) {
        throw BackendError("malformed completion response", false);
    }
    const auto& message = payload["choices"][0];
    if (message.contains("message") && message["message"].contains("content")) {
        return message["message"]["content"].get<std::string>();
    }
    if (message.contains("text")) {
        return message["text"].get<std::string>();
    }
    throw BackendError("completion response carries no content", false);
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
    if (!backend_) {
        throw Error(Error::Kind::invalid_argument, "gateway needs a backend");
    }
    bucket_tokens_ = 1.0;
    bucket_refill_ = std::chrono::steady_clock::now();
}

void Gateway::admit() {
    if (options_.rate_limit_per_sec <= 0.0) {
        return;
    }
    std::unique_lock<std::mutex> lock(limiter_mutex_);
    for (;;) {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - bucket_refill_).count();
        bucket_refill_ = now;
        // Capacity 1: admission is strictly serialized at the configured rate.
        bucket_tokens_ = std::min(1.0, bucket_tokens_ + elapsed * options_.rate_limit_per_sec);
        if (bucket_tokens_ >= 1.0) {
            bucket_tokens_ -= 1.0;
            return;
        }
        const double wait = (1.0 - bucket_tokens_) / options_.rate_limit_per_sec;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        lock.lock();
    }
}

std::string Gateway::complete(const ChatRequest& request) {
    if (request.user_text.empty()) {
        throw Error(Error::Kind::invalid_argument, "chat request user text must be non-empty");
    }
    if (request.temperature < 0.0) {
        throw Error(Error::Kind::invalid_argument, "temperature must be >= 0");
    }
    int attempt = 0;
    double delay_ms = options_.backoff_base_ms;
    for (;;) {
        ++attempt;
        admit();
        try {
            return backend_->complete(request);
        } catch (const BackendError& error) {
            if (!error.transient() || attempt >= options_.max_attempts) {
                throw;
            }
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
            delay_ms *= options_.backoff_multiplier;
        }
    }
}

std::filesystem::path Gateway::cache_file(const std::string& digest) const {
    return options_.cache_dir / (digest + ".json");
}

std::string Gateway::cached_complete(const ChatRequest& request) {
    if (options_.cache_dir.empty()) {
        return complete(request);
    }
    const std::string digest = request_digest(request);
    const auto path = cache_file(digest);
    if (std::filesystem::exists(path)) {
        try {
            json entry = json::parse(util::read_file(path));
            if (entry.value("key", "") == digest && entry.contains("response") &&
                entry["response"].is_string()) {
                cache_hits_.fetch_add(1);
                return entry["response"].get<std::string>();
            }
            throw Error(Error::Kind::parse, "cache entry key/shape mismatch");
        } catch (const std::exception& e) {
            std::cerr << "[grag] corrupt cache entry " << path.string() << " (" << e.what()
                      << "); refetching\n";
        }
    }
    cache_misses_.fetch_add(1);
    std::string response = complete(request);
    json entry;
    entry["key"] = digest;
    entry["model"] = request.model;
    entry["temperature"] = request.temperature;
    entry["response"] = response;
    entry["timestamp"] = static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    std::filesystem::create_directories(options_.cache_dir);
    util::atomic_write_file(path, entry.dump());
    return response;
}

std::size_t purge_cache(const std::filesystem::path& cache_dir) {
    if (cache_dir.empty() || !std::filesystem::exists(cache_dir)) {
        return 0;
    }
    std::size_t removed = 0;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            std::filesystem::remove(entry.path());
            ++removed;
        }
    }
    return removed;
}

}  // namespace grag::llm
