#include "tcg/harness.hpp"

#include <variant>

#include "tcg/engine.hpp"
#include "tcg/observation.hpp"

namespace tcg {

using json = nlohmann::json;

std::string_view to_string(FallbackPolicy f) {
    return f == FallbackPolicy::PassTurn ? "pass_turn" : "uniform_random_legal";
}

std::optional<FallbackPolicy> parse_fallback_policy(std::string_view s) {
    if (s == "uniform_random_legal") return FallbackPolicy::UniformRandomLegal;
    if (s == "pass_turn") return FallbackPolicy::PassTurn;
    return std::nullopt;
}

std::string_view to_string(AgentReply::Status s) {
    switch (s) {
        case AgentReply::Status::Ok: return "ok";
        case AgentReply::Status::Malformed: return "malformed";
        case AgentReply::Status::Timeout: return "timeout";
        case AgentReply::Status::TransportError: return "transport_error";
    }
    return "?";
}

void HarnessConfig::validate() const {
    if (retry_limit < 0) throw ConfigError("retry_limit must be >= 0");
    if (history_budget < 0) throw ConfigError("history_budget must be >= 0");
    if (deadline_ms < 1) throw ConfigError("deadline_ms must be >= 1");
}

json harness_config_to_json(const HarnessConfig& c) {
    return {{"structured_observation", c.structured_observation},
            {"legal_action_masking", c.legal_action_masking},
            {"history_enabled", c.history_enabled},
            {"history_budget", c.history_budget},
            {"retry_limit", c.retry_limit},
            {"fallback_policy", std::string(to_string(c.fallback_policy))},
            {"deadline_ms", c.deadline_ms}};
}

HarnessConfig harness_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("harness config must be an object");
    HarnessConfig c;
    for (const auto& [key, v] : j.items()) {
        auto need = [&](bool ok, const char* what) {
            if (!ok) throw ConfigError("harness." + key + " must be " + what);
        };
        if (key == "structured_observation") {
            need(v.is_boolean(), "a boolean");
            c.structured_observation = v.get<bool>();
        } else if (key == "legal_action_masking") {
            need(v.is_boolean(), "a boolean");
            c.legal_action_masking = v.get<bool>();
        } else if (key == "history_enabled") {
            need(v.is_boolean(), "a boolean");
            c.history_enabled = v.get<bool>();
        } else if (key == "history_budget") {
            need(v.is_number_integer(), "an integer");
            c.history_budget = v.get<int>();
        } else if (key == "retry_limit") {
            need(v.is_number_integer(), "an integer");
            c.retry_limit = v.get<int>();
        } else if (key == "fallback_policy") {
            need(v.is_string(), "a string");
            auto f = parse_fallback_policy(v.get<std::string>());
            need(f.has_value(), "uniform_random_legal or pass_turn");
            c.fallback_policy = *f;
        } else if (key == "deadline_ms") {
            need(v.is_number_integer(), "an integer");
            c.deadline_ms = v.get<int>();
        } else {
            throw ConfigError("unknown harness key: " + key);
        }
    }
    c.validate();
    return c;
}

DecisionAccounting& DecisionAccounting::operator+=(const DecisionAccounting& o) {
    decisions += o.decisions;
    action_attempts += o.action_attempts;
    invalid_attempts += o.invalid_attempts;
    query_calls += o.query_calls;
    tool_calls += o.tool_calls;
    fallbacks += o.fallbacks;
    return *this;
}

json accounting_to_json(const DecisionAccounting& a) {
    json j = {{"decisions", a.decisions},
              {"action_attempts", a.action_attempts},
              {"invalid_attempts", a.invalid_attempts},
              {"query_calls", a.query_calls},
              {"tool_calls", a.tool_calls},
              {"fallbacks", a.fallbacks}};
    auto rate = compute_invalid_rate(a);
    j["invalid_rate"] = rate ? json(*rate) : json(nullptr);
    return j;
}

DecisionAccounting accounting_from_json(const json& j) {
    DecisionAccounting a;
    a.decisions = j.at("decisions").get<std::int64_t>();
    a.action_attempts = j.at("action_attempts").get<std::int64_t>();
    a.invalid_attempts = j.at("invalid_attempts").get<std::int64_t>();
    a.query_calls = j.at("query_calls").get<std::int64_t>();
    a.tool_calls = j.at("tool_calls").get<std::int64_t>();
    a.fallbacks = j.at("fallbacks").get<std::int64_t>();
    return a;
}

std::optional<double> compute_invalid_rate(const DecisionAccounting& a) {
    if (a.action_attempts == 0) return std::nullopt;
    return static_cast<double>(a.invalid_attempts) / static_cast<double>(a.action_attempts);
}

void manage_history(HistoryWindow& window, json step, const HarnessConfig& config) {
    if (!config.history_enabled || config.history_budget == 0) {
        window.clear();
        return;
    }
    window.push_back(std::move(step));
    while (window.size() > static_cast<std::size_t>(config.history_budget)) window.pop_front();
}

json harness_observation(const GameState& s, int viewer, const HarnessConfig& config) {
    json obs = build_observation(s, viewer, config.legal_action_masking);
    if (!config.structured_observation) return render_raw(obs);
    return obs;
}

json answer_query(const GameState& s, int viewer, QueryTool tool, const json& arguments) {
    switch (tool) {
        case QueryTool::QueryCard: {
            std::string name;
            if (arguments.is_object() && arguments.contains("card_name") && arguments["card_name"].is_string())
                name = arguments["card_name"].get<std::string>();
            const CardDef* d = s.pool->find_by_name(name);
            if (!d) d = s.pool->find(name);
            if (!d) return {{"found", false}, {"card_name", name}};
            return {{"found", true}, {"card", card_details(*d)}};
        }
        case QueryTool::QueryDiscard: {
            std::string who = "you";
            if (arguments.is_object() && arguments.contains("player") && arguments["player"].is_string())
                who = arguments["player"].get<std::string>();
            if (who != "you" && who != "opponent") return {{"found", false}, {"player", who}};
            const auto& pl = s.players[who == "you" ? viewer : opponent_of(viewer)];
            json cards = json::array();
            for (const auto& c : pl.discard) cards.push_back(card_summary(*c.def));
            return {{"found", true}, {"player", who}, {"cards", cards}};
        }
        case QueryTool::ActivateSkill:
            // Skills live in the external client's own state.
            return {{"found", false}, {"message", "skill library not available"}};
    }
    return {{"found", false}};
}

namespace {

json history_step(const GameState& s, const DecisionOutcome& out) {
    json events = json::array();
    for (std::size_t i = out.first_event; i < s.action_log.size(); ++i) events.push_back(s.action_log[i].text);
    return {{"step_id", out.step_id}, {"action", action_to_json(out.executed)}, {"events", events},
            {"fallback", out.fallback}};
}

ActionRequest fallback_action(Seat& seat, const std::vector<ActionRequest>& legal) {
    if (seat.config.fallback_policy == FallbackPolicy::PassTurn) {
        for (const auto& a : legal) {
            if (a.tool == Tool::PassTurn) return a;
        }
    }
    return legal[static_cast<std::size_t>(seat.rng.below(legal.size()))];
}

}  // namespace

DecisionOutcome decision_step(Seat& seat, GameState& s) {
    if (s.finished()) throw std::logic_error("decision_step on a finished game");
    DecisionOutcome out;
    out.player = s.acting_player();
    out.step_id = seat.next_step_id++;
    auto& acc = seat.accounting;
    ++acc.decisions;

    DecisionRequest req;
    req.match_id = seat.match_id;
    req.step_id = out.step_id;
    req.seat = out.player;
    req.observation = harness_observation(s, out.player, seat.config);
    req.history = json::array();
    for (const auto& h : seat.history) req.history.push_back(h);
    req.choosing_card = s.pending_choice.has_value();
    req.deadline_ms = seat.config.deadline_ms;
    out.observation = req.observation;

    int invalid_here = 0;
    int queries_here = 0;
    bool executed = false;
    while (!executed && invalid_here <= seat.config.retry_limit) {
        AgentReply reply = seat.agent->decide(req);

        if (reply.status == AgentReply::Status::Ok) {
            if (auto q = parse_query_tool(reply.call.tool); q && queries_here < kMaxQueriesPerDecision) {
                ++queries_here;
                ++acc.query_calls;
                ++acc.tool_calls;
                json answer = answer_query(s, out.player, *q, reply.call.arguments);
                out.queries.push_back({{"tool", reply.call.tool}, {"arguments", reply.call.arguments}, {"answer", answer}});
                req.feedback = {{"kind", "query_result"}, {"tool", reply.call.tool}, {"answer", answer}};
                continue;
            }
        }

        ++acc.action_attempts;
        ++acc.tool_calls;
        AttemptRecord rec;
        rec.attempt = req.attempt;
        if (reply.status == AgentReply::Status::Ok) rec.call = {{"tool", reply.call.tool}, {"arguments", reply.call.arguments}};

        if (reply.status != AgentReply::Status::Ok) {
            rec.status = std::string(to_string(reply.status));
            rec.code = rec.status;
            rec.message = reply.error;
        } else if (parse_query_tool(reply.call.tool)) {
            rec.status = "rejected";
            rec.code = "query_budget";
            rec.message = "at most " + std::to_string(kMaxQueriesPerDecision) + " queries per decision";
        } else {
            auto parsed = parse_tool_call(reply.call);
            if (auto* rej = std::get_if<Rejection>(&parsed)) {
                rec.status = "rejected";
                rec.code = std::string(to_string(rej->code));
                rec.message = rej->message;
            } else {
                const auto& a = std::get<ActionRequest>(parsed);
                ApplyResult r = apply_action(s, out.player, a);
                if (r.accepted) {
                    out.executed = a;
                    out.first_event = r.first_event;
                    executed = true;
                    break;
                }
                rec.status = "rejected";
                rec.code = std::string(to_string(r.rejection.code));
                rec.message = r.rejection.message;
            }
        }

        ++acc.invalid_attempts;
        ++invalid_here;
        req.feedback = {{"kind", "invalid"}, {"code", rec.code}, {"message", rec.message}};
        ++req.attempt;
        out.rejected.push_back(std::move(rec));
    }

    if (!executed) {
        const auto legal = legal_actions(s);
        out.executed = fallback_action(seat, legal);
        out.fallback = true;
        ++acc.fallbacks;
        ApplyResult r = apply_action(s, out.player, out.executed);
        if (!r.accepted) throw std::logic_error("fallback action rejected: " + r.rejection.message);
        out.first_event = r.first_event;
    }

    manage_history(seat.history, history_step(s, out), seat.config);
    return out;
}

}  // namespace tcg
