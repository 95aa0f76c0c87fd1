#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcg/harness.hpp"

namespace tcg {

// Per-tool sampling weights for the Heuristic agent, indexed by Tool.
struct HeuristicWeights {
    std::array<double, kToolCount> weight{};

    static HeuristicWeights defaults();
    static HeuristicWeights uniform();
    double of(Tool t) const { return weight[static_cast<std::size_t>(t)]; }
};
nlohmann::json weights_to_json(const HeuristicWeights& w);
// Overrides on top of the defaults; keys are tool names. Weights must be > 0.
HeuristicWeights weights_from_json(const nlohmann::json& j);

// The structured observation behind a request, whichever rendering it uses.
nlohmann::json request_observation(const DecisionRequest& request);

// Legal actions listed in an observation (empty when masking is off).
std::vector<ToolCall> listed_actions(const nlohmann::json& observation);

// Plausible tool calls built from the visible state alone, for agents that
// do not see the legal-action list. Many of them will be rejected.
std::vector<ToolCall> plausible_actions(const nlohmann::json& observation);

class RandomAgent : public Agent {
public:
    std::string kind() const override { return "random"; }
    void begin_game(std::uint64_t seed, int seat) override;
    AgentReply decide(const DecisionRequest& request) override;

private:
    Rng rng_;
};

class HeuristicAgent : public Agent {
public:
    explicit HeuristicAgent(HeuristicWeights w = HeuristicWeights::defaults()) : weights_(w) {}
    std::string kind() const override { return "heuristic"; }
    void begin_game(std::uint64_t seed, int seat) override;
    AgentReply decide(const DecisionRequest& request) override;

    // Greedy prompt answer: highest-HP Pokemon, energy matching unmet attack
    // costs; discard-style prompts give up the least valuable cards.
    static std::vector<int> greedy_choice(const nlohmann::json& observation);

private:
    HeuristicWeights weights_;
    Rng rng_;
};

// Replies come from a callback; used for tests and faulty-agent scripts.
class ScriptedAgent : public Agent {
public:
    using Script = std::function<AgentReply(const DecisionRequest&)>;
    explicit ScriptedAgent(Script script) : script_(std::move(script)) {}
    std::string kind() const override { return "scripted"; }
    AgentReply decide(const DecisionRequest& request) override { return script_(request); }

private:
    Script script_;
};

inline constexpr int kProtocolVersion = 1;

// Encodes a decision request as one protocol line (no trailing newline).
std::string encode_request(const DecisionRequest& request);
// Decodes a reply line; a step_id other than `expected_step` is malformed.
AgentReply decode_reply(const std::string& line, std::uint64_t expected_step);

// Speaks the line-delimited JSON protocol with a child process over stdio.
// Timeouts, broken pipes, and malformed replies surface as failed replies;
// the process is restarted on the next request after a timeout or crash.
class ExternalAgent : public Agent {
public:
    explicit ExternalAgent(std::vector<std::string> command);
    ~ExternalAgent() override;
    ExternalAgent(const ExternalAgent&) = delete;
    ExternalAgent& operator=(const ExternalAgent&) = delete;

    std::string kind() const override { return "external"; }
    AgentReply decide(const DecisionRequest& request) override;

    // Evolution phase: sends {phase: evolve, ...} and waits for an ack.
    // Returns false (with `error` set) on failure.
    bool evolve(int round, const std::vector<std::string>& trajectory_paths, const std::string& state_dir,
                int deadline_ms, std::string* error);

    std::int64_t messages_sent() const { return sent_; }

private:
    bool ensure_running(std::string* error);
    void stop();
    bool send_line(const std::string& line, std::string* error);
    // Reads one line within the deadline; returns false on timeout or EOF.
    bool read_line(int deadline_ms, std::string* line, AgentReply::Status* status, std::string* error);

    std::vector<std::string> command_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::int64_t sent_ = 0;
};

// How a participant is declared in manifests and on the command line.
struct AgentSpec {
    std::string id;
    std::string kind = "random";  // random | heuristic | external
    HeuristicWeights weights = HeuristicWeights::defaults();
    std::vector<std::string> command;  // external only

    bool operator==(const AgentSpec& o) const {
        return id == o.id && kind == o.kind && weights.weight == o.weights.weight && command == o.command;
    }
};
nlohmann::json agent_spec_to_json(const AgentSpec& s);
AgentSpec agent_spec_from_json(const nlohmann::json& j);
// Shorthand: "random", "heuristic", or "external:<command line>".
AgentSpec parse_agent_shorthand(const std::string& text);
std::unique_ptr<Agent> make_agent(const AgentSpec& spec);

}  // namespace tcg
