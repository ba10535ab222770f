#pragma once

// Blind-test sessions with an append-only JSON-lines log. Pairs are never
// stored: a session is fully determined by its seed, so replaying the log
// rebuilds the same pairs and re-applies the recorded answers.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgan/eval/blindtest.hpp"
#include "rgan/gan/trainer.hpp"

namespace rgan {

/// Builds n pairs deterministically from a seed.
struct PairPool {
    std::string checkpoint_id;
    std::function<std::vector<BlindPair>(std::size_t n, std::uint64_t seed)> assemble;
};

/// Pool backed by a generator and the training traces of its class.
inline PairPool make_pair_pool(std::string checkpoint_id, std::shared_ptr<GanBundle> bundle,
                               std::vector<std::vector<double>> real)
{
    auto mu = std::make_shared<std::mutex>();
    auto pool = std::make_shared<std::vector<std::vector<double>>>(std::move(real));
    return {std::move(checkpoint_id), [bundle, pool, mu](std::size_t n, std::uint64_t seed) {
                Rng rng(seed);
                std::vector<std::vector<double>> gen;
                {
                    std::lock_guard lock(*mu);
                    gen = generate_normalized(*bundle, n, rng);
                }
                return assemble_pairs(*pool, gen, n, rng);
            }};
}

struct SessionResponse {
    int slot = 0;
    bool correct = false;
    std::string time;
};

struct BlindTestSession {
    std::string id;
    std::string checkpoint_id;
    std::uint64_t seed = 0;
    std::vector<BlindPair> pairs;
    std::map<std::size_t, SessionResponse> responses;
    mutable std::mutex mu;

    bool complete() const { return responses.size() == pairs.size(); }

    BlindScore score() const
    {
        BlindScore s;
        for (const auto& [k, r] : responses) {
            ++s.answered;
            s.correct += r.correct ? 1 : 0;
        }
        return s;
    }
};

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class SessionStore {
public:
    static constexpr std::size_t default_pairs = 20;
    static constexpr std::size_t display_points = 2048;

    SessionStore(PairPool pool, std::optional<std::filesystem::path> log_path = std::nullopt, std::uint64_t seed = 1)
        : pool_(std::move(pool)), log_path_(std::move(log_path)), seed_(seed)
    {
        if (log_path_ && std::filesystem::exists(*log_path_)) replay();
    }

    /// Returns the new session's id. Seed defaults to the store's next one.
    std::string create(std::optional<std::size_t> pairs = std::nullopt, std::optional<std::uint64_t> seed = std::nullopt)
    {
        std::unique_lock lock(mu_);
        const std::size_t n_pairs = pairs.value_or(session_pairs_);
        const std::uint64_t s = seed.value_or(derive_seed(seed_, 0, created_));
        auto session = build(n_pairs, s, created_);
        const auto id = session->id;
        append({{"op", "create"}, {"id", id}, {"n_pairs", n_pairs}, {"seed", s}, {"checkpoint", pool_.checkpoint_id}});
        sessions_[id] = std::move(session);
        ++created_;
        return id;
    }

    /// Pair count for sessions created without an explicit one.
    void set_session_pairs(std::size_t n)
    {
        if (n == 0) fail(ErrorCategory::config, "serve_pairs must be >= 1");
        session_pairs_ = n;
    }
    std::size_t session_pairs() const { return session_pairs_; }

    /// Waveforms only: no origin flag, scenario, or slot hint.
    nlohmann::json pair_payload(const std::string& id, std::size_t k) const
    {
        auto s = find(id);
        if (k >= s->pairs.size()) fail(ErrorCategory::not_found, "pair " + std::to_string(k) + " not in session " + id);
        std::lock_guard lock(s->mu);
        const auto& p = s->pairs[k];
        return {{"session", id},
                {"index", k},
                {"total", s->pairs.size()},
                {"answered", s->responses.count(k) != 0},
                {"samples", {downsample_for_display(p.slots[0], display_points),
                             downsample_for_display(p.slots[1], display_points)}}};
    }

    /// Records `slot` as the rater's pick for the simulated trace.
    nlohmann::json answer(const std::string& id, std::size_t k, int slot)
    {
        if (slot != 0 && slot != 1) fail(ErrorCategory::validation, "slot must be 0 or 1");
        auto s = find(id);
        if (k >= s->pairs.size()) fail(ErrorCategory::not_found, "pair " + std::to_string(k) + " not in session " + id);
        std::lock_guard lock(s->mu);
        if (s->responses.count(k)) fail(ErrorCategory::conflict, "pair " + std::to_string(k) + " already answered");
        SessionResponse r{slot, slot == s->pairs[k].real_slot, utc_timestamp()};
        {
            std::lock_guard log_lock(log_mu_);
            append_unlocked({{"op", "answer"}, {"id", id}, {"pair", k}, {"slot", slot}, {"time", r.time}});
        }
        s->responses[k] = r;
        const auto sc = s->score();
        return {{"recorded", true}, {"answered", sc.answered}, {"total", s->pairs.size()}};
    }

    /// Ground truth is included only once every pair is answered.
    nlohmann::json results(const std::string& id) const
    {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        const auto sc = s->score();
        nlohmann::json j{{"session", id},
                         {"checkpoint", s->checkpoint_id},
                         {"total", s->pairs.size()},
                         {"answered", sc.answered},
                         {"correct", sc.correct},
                         {"accuracy", sc.accuracy()},
                         {"complete", s->complete()}};
        if (s->complete()) {
            auto truth = nlohmann::json::array();
            for (const auto& p : s->pairs) truth.push_back(p.real_slot);
            j["real_slots"] = truth;
        }
        return j;
    }

    std::string results_csv(const std::string& id) const
    {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        std::ostringstream out;
        out << "pair,chosen_slot,correct" << (s->complete() ? ",real_slot" : "") << "\n";
        for (const auto& [k, r] : s->responses) {
            out << k << "," << r.slot << "," << (r.correct ? 1 : 0);
            if (s->complete()) out << "," << s->pairs[k].real_slot;
            out << "\n";
        }
        return out.str();
    }

    /// Ground truth for scripted clients in tests.
    int real_slot(const std::string& id, std::size_t k) const
    {
        auto s = find(id);
        if (k >= s->pairs.size()) fail(ErrorCategory::not_found, "pair out of range");
        return s->pairs[k].real_slot;
    }

    std::size_t pair_count(const std::string& id) const { return find(id)->pairs.size(); }

    std::vector<std::string> session_ids() const
    {
        std::shared_lock lock(mu_);
        std::vector<std::string> out;
        for (const auto& [id, s] : sessions_) out.push_back(id);
        return out;
    }

private:
    std::shared_ptr<BlindTestSession> find(const std::string& id) const
    {
        std::shared_lock lock(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) fail(ErrorCategory::not_found, "no session '" + id + "'");
        return it->second;
    }

    std::shared_ptr<BlindTestSession> build(std::size_t n_pairs, std::uint64_t seed, std::uint64_t ordinal) const
    {
        if (n_pairs == 0) fail(ErrorCategory::validation, "n_pairs must be >= 1");
        auto s = std::make_shared<BlindTestSession>();
        char buf[32];
        std::snprintf(buf, sizeof buf, "s%04llx%08llx", static_cast<unsigned long long>(ordinal & 0xffff),
                      static_cast<unsigned long long>(seed & 0xffffffffULL));
        s->id = buf;
        s->checkpoint_id = pool_.checkpoint_id;
        s->seed = seed;
        s->pairs = pool_.assemble(n_pairs, seed);
        return s;
    }

    void append(const nlohmann::json& rec)
    {
        std::lock_guard lock(log_mu_);
        append_unlocked(rec);
    }

    void append_unlocked(const nlohmann::json& rec)
    {
        if (!log_path_) return;
        std::ofstream f(*log_path_, std::ios::app);
        if (!f) fail(ErrorCategory::io, "cannot append to session log '" + log_path_->string() + "'");
        f << rec.dump() << "\n";
        f.flush();
        if (!f) fail(ErrorCategory::io, "session log write failed");
    }

    void replay()
    {
        std::ifstream f(*log_path_);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception&) {
                // A torn final line from a crash is dropped; anything earlier is corruption.
                if (f.peek() == std::char_traits<char>::eof()) break;
                fail(ErrorCategory::format, "session log line " + std::to_string(lineno) + " is not JSON");
            }
            const auto op = j.value("op", "");
            if (op == "create") {
                auto s = build(j.at("n_pairs").get<std::size_t>(), j.at("seed").get<std::uint64_t>(), created_);
                if (s->id != j.at("id").get<std::string>())
                    fail(ErrorCategory::format, "session log line " + std::to_string(lineno) + ": id mismatch");
                sessions_[s->id] = s;
                ++created_;
            } else if (op == "answer") {
                auto it = sessions_.find(j.at("id").get<std::string>());
                if (it == sessions_.end()) fail(ErrorCategory::format, "session log answers an unknown session");
                auto& s = *it->second;
                const auto k = j.at("pair").get<std::size_t>();
                const int slot = j.at("slot").get<int>();
                if (k >= s.pairs.size() || s.responses.count(k))
                    fail(ErrorCategory::format, "session log line " + std::to_string(lineno) + ": bad answer record");
                s.responses[k] = {slot, slot == s.pairs[k].real_slot, j.value("time", "")};
            } else {
                fail(ErrorCategory::format, "session log line " + std::to_string(lineno) + ": unknown op");
            }
        }
    }

    PairPool pool_;
    std::optional<std::filesystem::path> log_path_;
    std::uint64_t seed_;
    std::uint64_t created_ = 0;
    std::size_t session_pairs_ = default_pairs;
    mutable std::shared_mutex mu_;
    std::mutex log_mu_;
    std::map<std::string, std::shared_ptr<BlindTestSession>> sessions_;
};

} // namespace rgan
