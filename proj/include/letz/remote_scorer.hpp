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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "letz/error.hpp"
#include "letz/zsc_eval.hpp"

namespace letz {

struct RemoteScorerConfig {
    /// http://host:port/path
    std::string endpoint;
    int timeout_ms = 10000;
    int max_retries = 2;
    /// First retry waits this long; each further retry doubles it.
    int backoff_ms = 100;

    void validate() const;
};

enum class RemoteErrorKind {
    Transport,       // connection refused/reset, retried
    Timeout,         // no response within timeout_ms, retried
    HttpStatus,      // non-2xx; 5xx retried, 4xx not
    Malformed,       // body is not {"probabilities": [numbers]}
    LengthMismatch,  // probabilities.size() != hypotheses.size()
    OutOfRange,      // a probability outside [0,1] or non-finite
};

std::string_view to_string(RemoteErrorKind kind) noexcept;

class RemoteScorerError : public Error {
public:
    RemoteScorerError(RemoteErrorKind kind, int attempts, const std::string& what)
        : Error(std::string(to_string(kind)) + " after " + std::to_string(attempts) + " attempt(s): " + what),
          kind_(kind),
          attempts_(attempts) {}

    RemoteErrorKind kind() const noexcept { return kind_; }
    int attempts() const noexcept { return attempts_; }

private:
    RemoteErrorKind kind_;
    int attempts_;
};

/// POSTs {"premise", "hypotheses"} and expects {"probabilities"} back, one
/// value in [0,1] per hypothesis. Transport failures, timeouts and 5xx are
/// retried up to max_retries times with exponential backoff; protocol
/// violations fail immediately.
std::vector<double> remote_score(const RemoteScorerConfig& cfg, std::string_view premise,
                                 const std::vector<std::string>& hypotheses);

class RemoteScorer final : public EntailmentScorer {
public:
    explicit RemoteScorer(RemoteScorerConfig cfg);
    std::vector<double> score(std::string_view premise, std::span<const Candidate> candidates) const override;
    std::string name() const override { return "remote"; }

private:
    RemoteScorerConfig cfg_;
};

}  // namespace letz
