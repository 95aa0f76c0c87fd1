#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcg/action.hpp"
#include "tcg/rng.hpp"
#include "tcg/state.hpp"

namespace tcg {

enum class FallbackPolicy : std::uint8_t { UniformRandomLegal, PassTurn };
std::string_view to_string(FallbackPolicy f);
std::optional<FallbackPolicy> parse_fallback_policy(std::string_view s);

struct HarnessConfig {
    bool structured_observation = true;  // false: flat "path = value" text
    bool legal_action_masking = true;    // list available_actions
    bool history_enabled = true;
    int history_budget = 8;              // decision steps kept in the window
    int retry_limit = 3;
    FallbackPolicy fallback_policy = FallbackPolicy::UniformRandomLegal;
    int deadline_ms = 10000;  // per request, enforced by external agents

    void validate() const;  // throws ConfigError
    bool operator==(const HarnessConfig&) const = default;
};

nlohmann::json harness_config_to_json(const HarnessConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
HarnessConfig harness_config_from_json(const nlohmann::json& j);

// Invariant: invalid_attempts <= action_attempts <= tool_calls.
struct DecisionAccounting {
    std::int64_t decisions = 0;
    std::int64_t action_attempts = 0;
    std::int64_t invalid_attempts = 0;
    std::int64_t query_calls = 0;
    std::int64_t tool_calls = 0;  // action attempts + query calls
    std::int64_t fallbacks = 0;

    DecisionAccounting& operator+=(const DecisionAccounting& o);
    bool operator==(const DecisionAccounting&) const = default;
};
nlohmann::json accounting_to_json(const DecisionAccounting& a);
DecisionAccounting accounting_from_json(const nlohmann::json& j);

// invalid / attempts, or nullopt when there were no attempts.
std::optional<double> compute_invalid_rate(const DecisionAccounting& a);

using HistoryWindow = std::deque<nlohmann::json>;

// FIFO window of past decision steps. Disabled history (or a zero budget)
// keeps the window empty.
void manage_history(HistoryWindow& window, nlohmann::json step, const HarnessConfig& config);

// What an agent sees for one request.
struct DecisionRequest {
    std::string match_id;
    std::uint64_t step_id = 0;
    int seat = 0;
    nlohmann::json observation;  // structured object, or a string under raw rendering
    nlohmann::json history = nlohmann::json::array();
    bool choosing_card = false;
    int deadline_ms = 0;
    int attempt = 0;           // 0 for the first try of this decision
    nlohmann::json feedback;   // null, or the answer to the previous call
};

struct AgentReply {
    enum class Status : std::uint8_t { Ok, Malformed, Timeout, TransportError };
    Status status = Status::Ok;
    ToolCall call;
    std::string error;

    static AgentReply ok(ToolCall c) { return {Status::Ok, std::move(c), {}}; }
    static AgentReply failure(Status s, std::string why) { return {s, {}, std::move(why)}; }
};
std::string_view to_string(AgentReply::Status s);

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string kind() const = 0;
    // Called before every game; fixed-policy agents reset all state here.
    virtual void begin_game(std::uint64_t seed, int seat) {
        (void)seed;
        (void)seat;
    }
    virtual AgentReply decide(const DecisionRequest& request) = 0;
    virtual void end_game(const nlohmann::json& summary) { (void)summary; }
};

// One seat's harness: the agent, its configuration, and per-game state.
struct Seat {
    Agent* agent = nullptr;
    HarnessConfig config;
    DecisionAccounting accounting;
    HistoryWindow history;
    Rng rng;  // fallback draws
    std::string match_id;
    std::uint64_t next_step_id = 0;
};

inline constexpr int kMaxQueriesPerDecision = 8;

struct AttemptRecord {
    int attempt = 0;
    nlohmann::json call;  // {tool, arguments} as received, or null
    std::string status;   // reply status, "rejected", or "accepted"
    std::string code;
    std::string message;
};

struct DecisionOutcome {
    int player = 0;
    std::uint64_t step_id = 0;
    nlohmann::json observation;  // what the agent was shown (first request)
    ActionRequest executed;
    bool fallback = false;
    std::vector<AttemptRecord> rejected;  // invalid attempts, in order
    std::vector<nlohmann::json> queries;  // {tool, arguments, answer}
    std::size_t first_event = 0;
};

// Answers a query tool from the viewer's information set. Unknown cards give
// {"found": false}; queries never fail.
nlohmann::json answer_query(const GameState& s, int viewer, QueryTool tool, const nlohmann::json& arguments);

// Asks the acting player's agent for one action, answering query tools,
// retrying invalid attempts up to retry_limit and then executing the fallback.
// Only engine-accepted actions reach the state.
DecisionOutcome decision_step(Seat& seat, GameState& s);

// Observation as the agent sees it under `config`.
nlohmann::json harness_observation(const GameState& s, int viewer, const HarnessConfig& config);

}  // namespace tcg
