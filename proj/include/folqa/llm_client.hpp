#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "folqa/example.hpp"
#include "folqa/rng.hpp"

// Text-completion client: pluggable provider (HTTP endpoint, on-disk replay,
// scripted responder), an append-only JSON Lines cache keyed by request hash,
// bounded concurrency, and a per-minute request budget.

namespace folqa {

struct ProviderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ReplayMissError : ProviderError {
    using ProviderError::ProviderError;
};

struct CompletionRequest {
    std::string model;
    std::string prompt;
    int max_tokens = 512;
    double temperature = 0.0;  // greedy decoding
    std::vector<std::string> stop = {"Q:"};
};

inline json request_to_json(const CompletionRequest& r) {
    return {{"model", r.model},
            {"prompt", r.prompt},
            {"max_tokens", r.max_tokens},
            {"temperature", r.temperature},
            {"stop", r.stop}};
}

// Stable digest of the canonicalized request (sorted-key JSON).
inline std::string request_hash(const CompletionRequest& r) {
    std::uint64_t h = fnv1a64(request_to_json(r).dump());
    char buf[24];
    std::snprintf(buf, sizeof buf, "fnv64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct CompletionRecord {
    std::string hash;
    std::string request;  // canonical request JSON, checked on cache hits
    std::string completion;
    std::string provider;
    std::int64_t created_unix = 0;
    std::size_t prompt_tokens_est = 0;
    std::size_t completion_tokens_est = 0;
    bool skipped = false;
    std::string skip_reason;
};

inline json record_to_json(const CompletionRecord& r) {
    return {{"hash", r.hash},
            {"request", r.request},
            {"completion", r.completion},
            {"provider", r.provider},
            {"created_unix", r.created_unix},
            {"prompt_tokens_est", r.prompt_tokens_est},
            {"completion_tokens_est", r.completion_tokens_est},
            {"skipped", r.skipped},
            {"skip_reason", r.skip_reason}};
}

inline CompletionRecord record_from_json(const json& j) {
    CompletionRecord r;
    r.hash = j.at("hash").get<std::string>();
    r.request = j.at("request").get<std::string>();
    r.completion = j.at("completion").get<std::string>();
    r.provider = j.at("provider").get<std::string>();
    r.created_unix = j.at("created_unix").get<std::int64_t>();
    r.prompt_tokens_est = j.at("prompt_tokens_est").get<std::size_t>();
    r.completion_tokens_est = j.at("completion_tokens_est").get<std::size_t>();
    r.skipped = j.at("skipped").get<bool>();
    r.skip_reason = j.at("skip_reason").get<std::string>();
    return r;
}

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Deterministic responder for tests and offline runs.
class ScriptedProvider : public CompletionProvider {
public:
    using Fn = std::function<std::string(const CompletionRequest&)>;
    explicit ScriptedProvider(Fn fn) : fn_(std::move(fn)) {}

    std::string name() const override { return "scripted"; }
    std::string complete(const CompletionRequest& request) override {
        ++calls_;
        return fn_(request);
    }
    int calls() const { return calls_.load(); }

private:
    Fn fn_;
    std::atomic<int> calls_{0};
};

// Serves only what the cache already holds.
class ReplayProvider : public CompletionProvider {
public:
    std::string name() const override { return "replay"; }
    std::string complete(const CompletionRequest& request) override {
        throw ReplayMissError("replay cache has no record for request hash " + request_hash(request));
    }
};

struct HttpProviderConfig {
    std::string endpoint;  // e.g. http://localhost:8080
    std::string path = "/v1/completions";
    std::string credential_env;  // name of the env var holding the bearer token
    int max_retries = 3;
    int backoff_ms = 250;
    int timeout_s = 120;
};

// Generic completion endpoint: the request body carries prompt, max token
// count, temperature and stop sequences; the response carries the completion
// text as "completion" (or OpenAI-style choices[0].text).
class HttpProvider : public CompletionProvider {
public:
    explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty()) throw ProviderError("http provider requires an endpoint");
    }

    std::string name() const override { return "http"; }

    std::string complete(const CompletionRequest& request) override {
        httplib::Client client(config_.endpoint);
        client.set_connection_timeout(config_.timeout_s, 0);
        client.set_read_timeout(config_.timeout_s, 0);
        httplib::Headers headers;
        if (!config_.credential_env.empty()) {
            const char* token = std::getenv(config_.credential_env.c_str());
            if (!token)
                throw ProviderError("credential env var " + config_.credential_env + " is not set");
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
        std::string body = request_to_json(request).dump();

        std::string last_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
            auto res = client.Post(config_.path, headers, body, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw ProviderError("completion endpoint returned status " + std::to_string(res->status) + ": " +
                                    res->body);
            return parse_completion(res->body);
        }
        throw ProviderError("completion endpoint unreachable after " + std::to_string(config_.max_retries + 1) +
                            " attempts (" + last_error + ")");
    }

private:
    static std::string parse_completion(const std::string& body) {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded()) throw ProviderError("completion endpoint returned malformed JSON");
        if (j.contains("completion")) return j.at("completion").get<std::string>();
        if (j.contains("choices") && !j.at("choices").empty() && j.at("choices")[0].contains("text"))
            return j.at("choices")[0].at("text").get<std::string>();
        throw ProviderError("completion endpoint response carries no completion text");
    }

    HttpProviderConfig config_;
};

struct ClientLimits {
    int max_in_flight = 4;
    int per_minute = 0;          // 0 = unlimited
    std::size_t token_limit = 0; // 0 = no limit; otherwise prompt + budget must fit
};

// Cache-through completion client. At most one provider call per distinct
// request, bounded in-flight concurrency, and over-limit prompts turned into
// skipped records instead of provider calls.
class CompletionClient {
public:
    CompletionClient(std::shared_ptr<CompletionProvider> provider, std::filesystem::path cache_path,
                     ClientLimits limits = {})
        : provider_(std::move(provider)), cache_path_(std::move(cache_path)), limits_(limits) {
        load_cache();
    }

    CompletionRecord complete(const CompletionRequest& request) {
        std::string hash = request_hash(request);
        std::string canonical = request_to_json(request).dump();

        {
            std::unique_lock lock(mutex_);
            for (;;) {
                if (auto it = cache_.find(hash); it != cache_.end() && it->second.request == canonical)
                    return it->second;
                if (!pending_.count(hash)) break;
                pending_done_.wait(lock);
            }
            pending_.insert(hash);
        }

        CompletionRecord record;
        record.hash = hash;
        record.request = canonical;
        record.provider = provider_->name();
        record.prompt_tokens_est = estimate_tokens(request.prompt);
        try {
            if (limits_.token_limit > 0 &&
                record.prompt_tokens_est + static_cast<std::size_t>(request.max_tokens) > limits_.token_limit) {
                record.skipped = true;
                record.skip_reason = "prompt + completion budget exceeds the " +
                                     std::to_string(limits_.token_limit) + "-token limit";
            } else {
                FlightSlot slot(*this);
                record.completion = provider_->complete(request);
                record.completion_tokens_est = estimate_tokens(record.completion);
            }
        } catch (...) {
            std::unique_lock lock(mutex_);
            pending_.erase(hash);
            pending_done_.notify_all();
            throw;
        }
        record.created_unix =
            std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
                .count();

        std::unique_lock lock(mutex_);
        persist(record);
        cache_[hash] = record;
        pending_.erase(hash);
        pending_done_.notify_all();
        return record;
    }

    std::size_t cache_size() const {
        std::unique_lock lock(mutex_);
        return cache_.size();
    }

private:
    void load_cache() {
        std::ifstream in(cache_path_);
        if (!in) return;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                CompletionRecord r = record_from_json(json::parse(line));
                cache_[r.hash] = std::move(r);
            } catch (const std::exception& e) {
                throw ProviderError(cache_path_.string() + ":" + std::to_string(line_no) + ": bad cache record: " +
                                    e.what());
            }
        }
    }

    void persist(const CompletionRecord& record) {
        if (cache_path_.empty()) return;
        std::ofstream out(cache_path_, std::ios::app);
        if (!out) throw ProviderError("cannot append to cache " + cache_path_.string());
        out << record_to_json(record).dump() << "\n";
    }

    // in-flight bound plus a sliding one-minute request budget
    class FlightSlot {
    public:
        explicit FlightSlot(CompletionClient& client) : client_(client) {
            using clock = std::chrono::steady_clock;
            std::unique_lock lock(client_.throttle_mutex_);
            client_.in_flight_cv_.wait(lock, [&] { return client_.in_flight_ < client_.limits_.max_in_flight; });
            if (client_.limits_.per_minute > 0) {
                for (;;) {
                    auto now = clock::now();
                    auto& recent = client_.recent_;
                    while (!recent.empty() && now - recent.front() > std::chrono::minutes(1)) recent.pop_front();
                    if (static_cast<int>(recent.size()) < client_.limits_.per_minute) break;
                    auto wake = recent.front() + std::chrono::minutes(1);
                    lock.unlock();
                    std::this_thread::sleep_until(wake);
                    lock.lock();
                }
                client_.recent_.push_back(clock::now());
            }
            ++client_.in_flight_;
        }

        ~FlightSlot() {
            std::unique_lock lock(client_.throttle_mutex_);
            --client_.in_flight_;
            client_.in_flight_cv_.notify_one();
        }

    private:
        CompletionClient& client_;
    };

    std::shared_ptr<CompletionProvider> provider_;
    std::filesystem::path cache_path_;
    ClientLimits limits_;

    mutable std::mutex mutex_;
    std::map<std::string, CompletionRecord> cache_;
    std::set<std::string> pending_;
    std::condition_variable pending_done_;

    std::mutex throttle_mutex_;
    std::condition_variable in_flight_cv_;
    int in_flight_ = 0;
    std::deque<std::chrono::steady_clock::time_point> recent_;
};

}  // namespace folqa
