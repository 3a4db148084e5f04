#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "radunc/detail/strings.hpp"
#include "radunc/judge.hpp"

namespace radunc {

struct RemoteJudgeConfig {
    std::string url;                 // http://host[:port]/path
    std::string prompt_template;     // contains {sentence_1} and {sentence_2}
    std::string bearer_token;        // optional
    int timeout_seconds = 30;
    int retries = 2;
    int retry_backoff_ms = 200;
};

/// Sends the filled prompt as {"prompt": ...} and expects {"text": ...} whose
/// text is exactly "sentence_1" or "sentence_2" (surrounding whitespace and
/// one pair of double quotes tolerated). Anything else is a RemoteFailure.
class RemoteJudge final : public Judge {
public:
    RemoteJudge(std::string judge_id, RemoteJudgeConfig cfg) : m_id(std::move(judge_id)), m_cfg(std::move(cfg)) {
        split_url(m_cfg.url, m_origin, m_path);
    }

    const std::string& id() const override { return m_id; }

    std::string render_prompt(const ComparisonRequest& request) const {
        std::string out = m_cfg.prompt_template;
        replace_all(out, "{sentence_1}", nlohmann::json(request.sentence_a).dump());
        replace_all(out, "{sentence_2}", nlohmann::json(request.sentence_b).dump());
        return out;
    }

    static Winner parse_response(std::string_view text) {
        auto s = radunc::detail::trim(text);
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
        if (s == "sentence_1") return Winner::A;
        if (s == "sentence_2") return Winner::B;
        throw Error(ErrorCode::RemoteFailure, "unexpected judge response '" + std::string(text) + "'");
    }

    JudgeOutcome compare(const ComparisonRequest& request) const override {
        radunc::detail::require_distinct(request);
        const std::string body = nlohmann::json{{"prompt", render_prompt(request)}}.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= m_cfg.retries; ++attempt) {
            if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(m_cfg.retry_backoff_ms * attempt));
            httplib::Client client(m_origin);
            client.set_connection_timeout(m_cfg.timeout_seconds, 0);
            client.set_read_timeout(m_cfg.timeout_seconds, 0);
            httplib::Headers headers;
            if (!m_cfg.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + m_cfg.bearer_token);
            auto res = client.Post(m_path, headers, body, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw Error(ErrorCode::RemoteFailure, "HTTP " + std::to_string(res->status) + " from " + m_cfg.url);
            }
            auto parsed = nlohmann::json::parse(res->body, nullptr, false);
            if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("text") || !parsed["text"].is_string()) {
                throw Error(ErrorCode::RemoteFailure, "malformed response body: " + res->body);
            }
            return {parse_response(parsed["text"].get<std::string>()), m_id};
        }
        throw Error(ErrorCode::RemoteFailure, last_error + " after " + std::to_string(m_cfg.retries + 1) + " attempts");
    }

private:
    static void replace_all(std::string& s, std::string_view from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, from.size(), to);
            pos += to.size();
        }
    }

    static void split_url(const std::string& url, std::string& origin, std::string& path) {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
            throw Error(ErrorCode::InvalidConfig, "remote judge url must start with http://, got '" + url + "'");
        }
        auto path_start = url.find('/', scheme_end + 3);
        origin = url.substr(0, path_start);
        path = path_start == std::string::npos ? "/" : url.substr(path_start);
    }

    std::string m_id;
    RemoteJudgeConfig m_cfg;
    std::string m_origin;
    std::string m_path;
};

} // namespace radunc
