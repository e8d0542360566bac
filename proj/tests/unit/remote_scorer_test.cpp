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

#include <doctest.h>
#include <json.hpp>

#include <chrono>
#include <mutex>

#include "letz/remote_scorer.hpp"
#include "stub_server.hpp"

using namespace letz;
using testing::reply;
using testing::StubServer;

namespace {

RemoteScorerConfig config_for(const std::string& endpoint) {
    RemoteScorerConfig cfg;
    cfg.endpoint = endpoint;
    cfg.timeout_ms = 1000;
    cfg.max_retries = 2;
    cfg.backoff_ms = 10;
    return cfg;
}

RemoteErrorKind failure_kind(const RemoteScorerConfig& cfg, int* attempts = nullptr) {
    try {
        remote_score(cfg, "p", {"h1", "h2"});
    } catch (const RemoteScorerError& e) {
        if (attempts) *attempts = e.attempts();
        return e.kind();
    }
    FAIL("expected RemoteScorerError");
    return RemoteErrorKind::Transport;
}

}  // namespace

TEST_CASE("a well-formed reply is returned as is") {
    std::string seen;
    std::mutex mu;
    StubServer server([&](const std::string& body, httplib::Response& res) {
        std::lock_guard lock(mu);
        seen = body;
        res.set_content(R"({"probabilities":[0.25,1.0]})", "application/json");
    });
    CHECK(remote_score(config_for(server.endpoint()), "Sport am Fernseh.", {"h1", "h2"}) ==
          std::vector<double>{0.25, 1.0});
    const auto request = nlohmann::json::parse(seen);
    CHECK(request.at("premise") == "Sport am Fernseh.");
    CHECK(request.at("hypotheses") == nlohmann::json::array({"h1", "h2"}));
    CHECK(server.requests() == 1);
}

TEST_CASE("protocol violations fail without retrying") {
    SUBCASE("length mismatch") {
        StubServer server(reply(R"({"probabilities":[0.5]})"));
        int attempts = 0;
        CHECK(failure_kind(config_for(server.endpoint()), &attempts) == RemoteErrorKind::LengthMismatch);
        CHECK(attempts == 1);
        CHECK(server.requests() == 1);
    }
    SUBCASE("out of range") {
        StubServer server(reply(R"({"probabilities":[0.5,1.2]})"));
        CHECK(failure_kind(config_for(server.endpoint())) == RemoteErrorKind::OutOfRange);
        CHECK(server.requests() == 1);
    }
    SUBCASE("negative probability") {
        StubServer server(reply(R"({"probabilities":[-0.1,0.2]})"));
        CHECK(failure_kind(config_for(server.endpoint())) == RemoteErrorKind::OutOfRange);
    }
    SUBCASE("malformed bodies") {
        for (const char* body : {"not json", R"({"probs":[0.1,0.2]})", R"({"probabilities":["a","b"]})",
                                 R"([0.1,0.2])"}) {
            StubServer server(reply(body));
            CHECK(failure_kind(config_for(server.endpoint())) == RemoteErrorKind::Malformed);
        }
    }
    SUBCASE("4xx") {
        StubServer server([](const std::string&, httplib::Response& res) { res.status = 400; });
        CHECK(failure_kind(config_for(server.endpoint())) == RemoteErrorKind::HttpStatus);
        CHECK(server.requests() == 1);
    }
}

TEST_CASE("5xx is retried with backoff") {
    std::atomic<int> calls{0};
    StubServer server([&](const std::string&, httplib::Response& res) {
        if (++calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"probabilities":[0.1,0.9]})", "application/json");
    });
    auto cfg = config_for(server.endpoint());
    const auto start = std::chrono::steady_clock::now();
    CHECK(remote_score(cfg, "p", {"a", "b"}) == std::vector<double>{0.1, 0.9});
    const auto waited = std::chrono::steady_clock::now() - start;
    CHECK(server.requests() == 3);
    CHECK(waited >= std::chrono::milliseconds(30));  // 10 + 20

    calls = -100;
    int attempts = 0;
    CHECK(failure_kind(cfg, &attempts) == RemoteErrorKind::HttpStatus);
    CHECK(attempts == 3);
}

TEST_CASE("a slow server times out and is retried") {
    StubServer server([](const std::string&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
        res.set_content(R"({"probabilities":[0.1,0.9]})", "application/json");
    });
    auto cfg = config_for(server.endpoint());
    cfg.timeout_ms = 200;
    cfg.max_retries = 1;
    int attempts = 0;
    CHECK(failure_kind(cfg, &attempts) == RemoteErrorKind::Timeout);
    CHECK(attempts == 2);
}

TEST_CASE("connection refused is a transport error") {
    auto cfg = config_for(testing::dead_endpoint());
    cfg.max_retries = 1;
    int attempts = 0;
    CHECK(failure_kind(cfg, &attempts) == RemoteErrorKind::Transport);
    CHECK(attempts == 2);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(config_for("http://localhost:8080/score").validate());
    CHECK_NOTHROW(config_for("http://localhost:8080").validate());
    CHECK_THROWS_AS(config_for("https://localhost/score").validate(), ConfigError);
    CHECK_THROWS_AS(config_for("").validate(), ConfigError);
    auto cfg = config_for("http://localhost/score");
    cfg.timeout_ms = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = config_for("http://localhost/score");
    cfg.max_retries = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("RemoteScorer fills a score matrix") {
    StubServer server([](const std::string& body, httplib::Response& res) {
        const auto req = nlohmann::json::parse(body);
        nlohmann::json probs = nlohmann::json::array();
        for (const auto& h : req.at("hypotheses")) {
            probs.push_back(h.get<std::string>().find("Sport") != std::string::npos ? 0.9 : 0.1);
        }
        res.set_content(nlohmann::json{{"probabilities", probs}}.dump(), "application/json");
    });
    EvalDataset d;
    d.labels = LabelMap(std::vector<LabelClass>{{"Sports", "Sport", {}}, {"Travel", "Rees", {}}});
    d.examples = {{"eng", 0}, {"zwou", 1}, {"dräi", 0}};
    const RemoteScorer scorer(config_for(server.endpoint()));
    const auto m = score_matrix(d, HypothesisTemplate{}, scorer, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m.at(i, 0) == 0.9);
        CHECK(m.at(i, 1) == 0.1);
    }
    CHECK(server.requests() == 6);
}
