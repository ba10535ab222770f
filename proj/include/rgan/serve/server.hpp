#pragma once

// HTTP front end for SessionStore.
//
//   POST /api/session                 {"n_pairs": 20, "seed": 7}  -> 201 {"id", "n_pairs"}
//   GET  /api/session/{id}/pair/{k}                                -> waveforms only
//   POST /api/session/{id}/answer     {"pair": k, "slot": 0|1}     -> 409 on repeat
//   GET  /api/session/{id}/results    [?format=csv]

#include <filesystem>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "rgan/serve/session.hpp"

namespace rgan {

inline int http_status(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::not_found: return 404;
    case ErrorCategory::conflict: return 409;
    case ErrorCategory::config:
    case ErrorCategory::validation:
    case ErrorCategory::format:
    case ErrorCategory::dimension: return 400;
    default: return 500;
    }
}

class BlindTestServer {
public:
    explicit BlindTestServer(SessionStore& store, std::optional<std::filesystem::path> static_dir = std::nullopt)
        : store_(store)
    {
        routes();
        if (static_dir) {
            if (!std::filesystem::is_directory(*static_dir))
                fail(ErrorCategory::config, "static directory '" + static_dir->string() + "' does not exist");
            server_.set_mount_point("/", static_dir->string());
        }
    }

    /// Binds an ephemeral port and returns it; pair with run().
    int bind_any(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }

    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }

    /// Blocks until stop().
    bool run() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    bool running() const { return server_.is_running(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    template <class F>
    void guarded(httplib::Response& res, F&& body)
    {
        try {
            body();
        } catch (const Error& e) {
            reply(res, http_status(e.category()), {{"error", std::string(category_name(e.category()))}, {"message", e.what()}});
        } catch (const nlohmann::json::exception& e) {
            reply(res, 400, {{"error", "format"}, {"message", e.what()}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
        }
    }

    static void reply(httplib::Response& res, int status, const nlohmann::json& body)
    {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static nlohmann::json body_json(const httplib::Request& req)
    {
        if (req.body.empty()) return nlohmann::json::object();
        auto j = nlohmann::json::parse(req.body);
        if (!j.is_object()) fail(ErrorCategory::format, "request body must be a JSON object");
        return j;
    }

    static std::size_t index_param(const std::string& s)
    {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            fail(ErrorCategory::not_found, "bad pair index '" + s + "'");
        }
    }

    void routes()
    {
        server_.Post("/api/session", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto j = body_json(req);
                const auto n = j.value("n_pairs", store_.session_pairs());
                std::optional<std::uint64_t> seed;
                if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
                const auto id = store_.create(n, seed);
                reply(res, 201, {{"id", id}, {"n_pairs", n}});
            });
        });
        server_.Get(R"(/api/session/([A-Za-z0-9]+)/pair/([^/]+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] { reply(res, 200, store_.pair_payload(req.matches[1], index_param(req.matches[2]))); });
                    });
        server_.Post(R"(/api/session/([A-Za-z0-9]+)/answer)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto j = body_json(req);
                if (!j.contains("pair") || !j.contains("slot"))
                    fail(ErrorCategory::validation, "answer needs 'pair' and 'slot'");
                reply(res, 200, store_.answer(req.matches[1], j.at("pair").get<std::size_t>(), j.at("slot").get<int>()));
            });
        });
        server_.Get(R"(/api/session/([A-Za-z0-9]+)/results)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                if (req.get_param_value("format") == "csv") {
                    res.status = 200;
                    res.set_content(store_.results_csv(req.matches[1]), "text/csv");
                } else {
                    reply(res, 200, store_.results(req.matches[1]));
                }
            });
        });
    }

    SessionStore& store_;
    httplib::Server server_;
};

} // namespace rgan
