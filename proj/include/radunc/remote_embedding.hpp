#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "radunc/error.hpp"
#include "radunc/expand.hpp"

namespace radunc {

/// Embedding service client: POST {"text": ...} and expect
/// {"embedding": [numbers]} of the configured length.
class RemoteEmbedding final : public EmbeddingProvider {
public:
    RemoteEmbedding(std::string url, std::size_t dimension, int timeout_seconds = 30)
        : m_dim(dimension), m_timeout(timeout_seconds) {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
            throw Error(ErrorCode::InvalidConfig, "embedding url must start with http://, got '" + url + "'");
        }
        auto path_start = url.find('/', scheme_end + 3);
        m_origin = url.substr(0, path_start);
        m_path = path_start == std::string::npos ? "/" : url.substr(path_start);
    }

    std::vector<double> embed(std::string_view text) const override {
        httplib::Client client(m_origin);
        client.set_connection_timeout(m_timeout, 0);
        client.set_read_timeout(m_timeout, 0);
        auto res = client.Post(m_path, nlohmann::json{{"text", std::string(text)}}.dump(), "application/json");
        if (!res) throw Error(ErrorCode::ProviderFailure, "transport error: " + httplib::to_string(res.error()));
        if (res->status != 200) throw Error(ErrorCode::ProviderFailure, "HTTP " + std::to_string(res->status));
        auto body = nlohmann::json::parse(res->body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("embedding") || !body["embedding"].is_array()) {
            throw Error(ErrorCode::ProviderFailure, "malformed embedding response");
        }
        std::vector<double> v;
        for (const auto& x : body["embedding"]) {
            if (!x.is_number()) throw Error(ErrorCode::ProviderFailure, "non-numeric embedding component");
            v.push_back(x.get<double>());
        }
        if (v.size() != m_dim) {
            throw Error(ErrorCode::ProviderFailure,
                        "embedding has length " + std::to_string(v.size()) + ", expected " + std::to_string(m_dim));
        }
        return v;
    }

    std::size_t dimension() const override { return m_dim; }

private:
    std::size_t m_dim;
    int m_timeout;
    std::string m_origin;
    std::string m_path;
};

} // namespace radunc
