/*
 * Copyright 2026 The letz-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "letz/remote_scorer.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <thread>
#include <variant>

#include <httplib.h>
#include <json.hpp>

namespace letz {

using json = nlohmann::json;

namespace {

struct Endpoint {
    std::string base;  // scheme://host:port
    std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw ConfigError("scorer.endpoint must be an http:// URL, got '" + url + "'");
    const auto slash = url.find('/', scheme.size());
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

struct Failure {
    RemoteErrorKind kind;
    std::string message;
    bool retryable;
};

void set_timeouts(httplib::Client& client, int timeout_ms) {
    const auto t = std::chrono::milliseconds(timeout_ms);
    client.set_connection_timeout(t);
    client.set_read_timeout(t);
    client.set_write_timeout(t);
}

// One request. Returns the probabilities or the reason it failed.
std::variant<std::vector<double>, Failure> attempt(const RemoteScorerConfig& cfg, const Endpoint& ep,
                                                   const std::string& body, std::size_t expected) {
    httplib::Client client(ep.base);
    set_timeouts(client, cfg.timeout_ms);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(ep.path, body, "application/json");
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

    if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && elapsed >= cfg.timeout_ms * 9 / 10);
        if (timed_out) {
            return Failure{RemoteErrorKind::Timeout, "no response within " + std::to_string(cfg.timeout_ms) + " ms", true};
        }
        return Failure{RemoteErrorKind::Transport, httplib::to_string(err), true};
    }
    if (res->status < 200 || res->status >= 300) {
        return Failure{RemoteErrorKind::HttpStatus, "HTTP " + std::to_string(res->status), res->status >= 500};
    }

    json doc;
    try {
        doc = json::parse(res->body);
    } catch (const json::parse_error& e) {
        return Failure{RemoteErrorKind::Malformed, std::string("response is not JSON: ") + e.what(), false};
    }
    auto probs = doc.is_object() ? doc.find("probabilities") : doc.end();
    if (!doc.is_object() || probs == doc.end() || !probs->is_array()) {
        return Failure{RemoteErrorKind::Malformed, "response lacks a \"probabilities\" array", false};
    }
    if (probs->size() != expected) {
        return Failure{RemoteErrorKind::LengthMismatch,
                       "got " + std::to_string(probs->size()) + " probabilities for " + std::to_string(expected) +
                           " hypotheses",
                       false};
    }
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < probs->size(); ++i) {
        const auto& v = (*probs)[i];
        if (!v.is_number()) {
            return Failure{RemoteErrorKind::Malformed, "probabilities[" + std::to_string(i) + "] is not a number", false};
        }
        const double p = v.get<double>();
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            return Failure{RemoteErrorKind::OutOfRange,
                           "probabilities[" + std::to_string(i) + "] = " + v.dump() + " is outside [0,1]", false};
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::string_view to_string(RemoteErrorKind kind) noexcept {
    switch (kind) {
        case RemoteErrorKind::Transport: return "transport error";
        case RemoteErrorKind::Timeout: return "timeout";
        case RemoteErrorKind::HttpStatus: return "HTTP error";
        case RemoteErrorKind::Malformed: return "malformed response";
        case RemoteErrorKind::LengthMismatch: return "length mismatch";
        case RemoteErrorKind::OutOfRange: return "probability out of range";
    }
    return "unknown";
}

void RemoteScorerConfig::validate() const {
    parse_endpoint(endpoint);
    if (timeout_ms <= 0) throw ConfigError("scorer.timeout_ms must be positive");
    if (max_retries < 0) throw ConfigError("scorer.max_retries must be >= 0");
    if (backoff_ms < 0) throw ConfigError("scorer.backoff_ms must be >= 0");
}

std::vector<double> remote_score(const RemoteScorerConfig& cfg, std::string_view premise,
                                 const std::vector<std::string>& hypotheses) {
    cfg.validate();
    const Endpoint ep = parse_endpoint(cfg.endpoint);
    const std::string body = json{{"premise", premise}, {"hypotheses", hypotheses}}.dump();

    std::optional<Failure> last;
    int attempts = 0;
    for (int retry = 0; retry <= cfg.max_retries; ++retry) {
        if (retry > 0) std::this_thread::sleep_for(std::chrono::milliseconds(cfg.backoff_ms << (retry - 1)));
        ++attempts;
        auto result = attempt(cfg, ep, body, hypotheses.size());
        if (auto* probs = std::get_if<std::vector<double>>(&result)) return std::move(*probs);
        last = std::get<Failure>(std::move(result));
        if (!last->retryable) break;
    }
    throw RemoteScorerError(last->kind, attempts, cfg.endpoint + ": " + last->message);
}

RemoteScorer::RemoteScorer(RemoteScorerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<double> RemoteScorer::score(std::string_view premise, std::span<const Candidate> candidates) const {
    std::vector<std::string> hypotheses;
    hypotheses.reserve(candidates.size());
    for (const auto& c : candidates) hypotheses.push_back(c.hypothesis);
    return remote_score(cfg_, premise, hypotheses);
}

}  // namespace letz
