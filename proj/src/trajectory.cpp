#include "tcg/trajectory.hpp"

#include <deque>
#include <istream>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

#include "tcg/engine.hpp"
#include "tcg/harness.hpp"
#include "tcg/match.hpp"
#include "tcg/observation.hpp"
#include "tcg/snapshot.hpp"

namespace tcg {

using json = nlohmann::json;

namespace {

VerifyReport fail(int line, std::string message) {
    VerifyReport r;
    r.ok = false;
    r.line = line;
    r.message = std::move(message);
    return r;
}

}  // namespace

VerifyReport verify_trajectory(std::istream& in, std::shared_ptr<const CardPool> pool) {
    std::string text;
    int line_no = 0;
    if (!std::getline(in, text)) return fail(1, "empty log");
    ++line_no;

    json header = json::parse(text, nullptr, false);
    if (header.is_discarded() || header.value("kind", "") != "header") return fail(1, "first line is not a header");
    if (header.value("log_version", 0) != kLogVersion)
        return fail(1, "unsupported log_version " + header.value("log_version", json()).dump());
    if (header.value("pool_version", "") != pool->pool_version)
        return fail(1, "log was written with pool_version " + header.value("pool_version", std::string("?")) +
                           ", pool is " + pool->pool_version);

    GameState s;
    std::array<HarnessConfig, 2> harness;
    try {
        const Deck d0 = deck_from_json(header.at("decks").at(0), *pool);
        const Deck d1 = deck_from_json(header.at("decks").at(1), *pool);
        const GameConfig config = config_from_json(header.at("config"));
        for (int i = 0; i < 2; ++i) harness[i] = harness_config_from_json(header.at("harness").at(i));
        s = setup_game(pool, d0, d1, derive_seed(header.at("seed").get<std::uint64_t>(), kGameSeedStream), config);
    } catch (const std::exception& e) {
        return fail(1, std::string("bad header: ") + e.what());
    }

    std::string hash = hash_hex(state_hash(s));
    if (header.value("post_state_hash", "") != hash) return fail(1, "initial state hash differs");

    std::deque<Event> expected(s.action_log.begin(), s.action_log.end());
    VerifyReport report;
    bool saw_result = false;

    while (std::getline(in, text)) {
        ++line_no;
        if (text.empty()) continue;
        if (saw_result) return fail(line_no, "records after the result");
        json rec = json::parse(text, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) return fail(line_no, "unparsable record");
        ++report.records;
        const std::string kind = rec.value("kind", "");
        const json& payload = rec.contains("payload") ? rec["payload"] : json();
        const int actor = rec.value("actor", -2);
        const int turn = rec.value("turn", -1);

        try {
            if (kind == "event") {
                if (expected.empty()) return fail(line_no, "unexpected event");
                const Event e = expected.front();
                expected.pop_front();
                if (e.text != payload.at("text").get<std::string>() || e.actor != actor || e.turn != turn)
                    return fail(line_no, "event differs from the engine's: expected '" + e.text + "'");
            } else {
                if (!expected.empty()) return fail(line_no, "missing event '" + expected.front().text + "'");
                if (kind == "observation" || kind == "query" || kind == "rejected" || kind == "action") {
                    if (s.finished()) return fail(line_no, "decision record after the game ended");
                    if (actor != s.acting_player() || turn != s.turn_number)
                        return fail(line_no, "record actor/turn does not match the acting player");
                }
                if (kind == "observation") {
                    if (payload != harness_observation(s, actor, harness[actor]))
                        return fail(line_no, "observation differs from the rebuilt one");
                } else if (kind == "query") {
                    auto q = parse_query_tool(payload.at("tool").get<std::string>());
                    if (!q || payload.at("answer") != answer_query(s, actor, *q, payload.at("arguments")))
                        return fail(line_no, "query answer differs");
                } else if (kind == "rejected") {
                    const json& call = payload.at("call");
                    if (!call.is_null()) {
                        ToolCall tc{call.at("tool").get<std::string>(), call.at("arguments")};
                        auto parsed = parse_tool_call(tc);
                        if (auto* a = std::get_if<ActionRequest>(&parsed)) {
                            if (!validate_action(s, actor, *a)) return fail(line_no, "logged rejection is a legal action");
                        }
                    }
                } else if (kind == "action") {
                    ToolCall tc{payload.at("tool").get<std::string>(), payload.at("arguments")};
                    const std::size_t before = s.action_log.size();
                    ApplyResult r = apply_tool_call(s, actor, tc);
                    if (!r.accepted) return fail(line_no, "action rejected on replay: " + r.rejection.message);
                    ++report.actions;
                    hash = hash_hex(state_hash(s));
                    expected.assign(s.action_log.begin() + static_cast<std::ptrdiff_t>(before), s.action_log.end());
                } else if (kind == "result") {
                    if (!s.finished()) return fail(line_no, "result record before the game ended");
                    json want = result_to_json(*s.result);
                    if (payload.at("winner") != want["winner"] || payload.at("reason") != want["reason"] ||
                        payload.at("turns") != s.turn_number)
                        return fail(line_no, "result differs");
                    saw_result = true;
                } else {
                    return fail(line_no, "unknown record kind '" + kind + "'");
                }
            }
        } catch (const std::exception& e) {
            return fail(line_no, std::string("malformed record: ") + e.what());
        }
        if (rec.value("post_state_hash", "") != hash) return fail(line_no, "post_state_hash mismatch");
    }
    if (!expected.empty()) return fail(line_no + 1, "log ends before event '" + expected.front().text + "'");
    if (!saw_result) return fail(line_no + 1, "log has no result record");
    report.line = line_no;
    return report;
}

std::string pretty_trajectory(std::istream& in) {
    std::ostringstream out;
    std::string text;
    json header;
    int section = -1;
    auto who = [&](int actor) -> std::string {
        if (actor < 0) return "engine";
        std::string name = "P" + std::to_string(actor);
        if (header.contains("agents")) name += " (" + header["agents"][actor].get<std::string>() + ")";
        return name;
    };
    while (std::getline(in, text)) {
        if (text.empty()) continue;
        json rec = json::parse(text, nullptr, false);
        if (rec.is_discarded()) continue;
        const std::string kind = rec.value("kind", "");
        if (kind == "header") {
            header = rec;
            out << "match " << rec.value("match_id", "") << "  seed " << rec.value("seed", 0ULL) << '\n';
            for (int i = 0; i < 2; ++i)
                out << "  P" << i << ": " << rec["agents"][i].get<std::string>() << " with "
                    << rec["decks"][i]["deck_id"].get<std::string>() << '\n';
            continue;
        }
        const int turn = rec.value("turn", 0);
        if (kind != "result" && turn != section) {
            section = turn;
            if (turn == 0) out << "\n=== Setup ===\n";
            else out << "\n=== Turn " << turn << " ===\n";
        }
        const json& p = rec["payload"];
        const int actor = rec.value("actor", -1);
        if (kind == "action") {
            std::string line = who(actor) + ": " + p["tool"].get<std::string>();
            std::string args;
            for (const auto& [k, v] : p["arguments"].items()) {
                if (!args.empty()) args += ", ";
                args += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
            }
            out << "  " << line << "(" << args << ")" << (p.value("fallback", false) ? "  [fallback]" : "") << '\n';
        } else if (kind == "event") {
            out << "      " << p["text"].get<std::string>() << '\n';
        } else if (kind == "rejected") {
            out << "  " << who(actor) << " invalid (" << p.value("code", "") << "): " << p.value("message", "") << '\n';
        } else if (kind == "query") {
            out << "  " << who(actor) << " queried " << p["tool"].get<std::string>() << '\n';
        } else if (kind == "result") {
            out << "\n=== Result ===\n";
            if (p["winner"].is_null()) out << "  draw";
            else out << "  winner " << who(p["winner"].get<int>());
            out << " by " << p["reason"].get<std::string>() << " after " << p["turns"].get<int>() << " turns\n";
        }
    }
    return out.str();
}

}  // namespace tcg
