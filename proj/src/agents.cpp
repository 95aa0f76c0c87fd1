#include "tcg/agents.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <numeric>
#include <sstream>

#include "tcg/observation.hpp"

namespace tcg {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Weights

HeuristicWeights HeuristicWeights::defaults() {
    HeuristicWeights w;
    auto set = [&](Tool t, double v) { w.weight[static_cast<std::size_t>(t)] = v; };
    // Attack whenever possible and develop the board first; draw-heavy
    // trainers are rare picks because most games are lost by decking out.
    set(Tool::Attack, 50);
    set(Tool::EvolvePokemon, 10);
    set(Tool::PlayPokemon, 6);
    set(Tool::AttachEnergy, 5);
    set(Tool::UseTool, 4);
    set(Tool::PutStadium, 4);
    set(Tool::DiscardStadium, 4);
    set(Tool::UseStadium, 4);
    set(Tool::UseAbility, 4);
    set(Tool::UseSupporter, 1);
    set(Tool::UseItem, 1);
    set(Tool::Retreat, 1);
    set(Tool::PassTurn, 2);
    set(Tool::ChooseCard, 1);  // prompts are answered greedily, not sampled
    return w;
}

HeuristicWeights HeuristicWeights::uniform() {
    HeuristicWeights w;
    w.weight.fill(1.0);
    return w;
}

json weights_to_json(const HeuristicWeights& w) {
    json j = json::object();
    for (int i = 0; i < kToolCount; ++i) j[std::string(to_string(static_cast<Tool>(i)))] = w.weight[i];
    return j;
}

HeuristicWeights weights_from_json(const json& j) {
    HeuristicWeights w = HeuristicWeights::defaults();
    if (j.is_null()) return w;
    if (!j.is_object()) throw ConfigError("weights must be an object of tool -> weight");
    for (const auto& [key, v] : j.items()) {
        auto t = parse_tool(key);
        if (!t) throw ConfigError("weights: unknown tool '" + key + "'");
        if (!v.is_number() || v.get<double>() <= 0) throw ConfigError("weights." + key + " must be a positive number");
        w.weight[static_cast<std::size_t>(*t)] = v.get<double>();
    }
    return w;
}

// ---------------------------------------------------------------------------
// Observation helpers

json request_observation(const DecisionRequest& request) {
    if (request.observation.is_string()) return parse_raw(request.observation.get<std::string>());
    return request.observation;
}

std::vector<ToolCall> listed_actions(const json& obs) {
    std::vector<ToolCall> out;
    if (!obs.contains("available_actions")) return out;
    for (const auto& a : obs["available_actions"]) {
        out.push_back({a.at("tool").get<std::string>(), a.contains("arguments") ? a["arguments"] : json::object()});
    }
    return out;
}

namespace {

const json& field(const json& j, const char* key) {
    static const json null_value;
    if (!j.is_object()) return null_value;
    auto it = j.find(key);
    return it == j.end() ? null_value : *it;
}

std::string str(const json& j, const char* key) {
    const json& v = field(j, key);
    return v.is_string() ? v.get<std::string>() : std::string();
}

std::vector<json> own_pokemon(const json& obs) {
    std::vector<json> out;
    const json& you = field(field(obs, "public"), "you");
    if (field(you, "active").is_object()) out.push_back(field(you, "active"));
    if (field(you, "bench").is_array()) {
        for (const auto& b : field(you, "bench")) out.push_back(b);
    }
    return out;
}

const json* my_prompt(const json& obs) {
    const json& prompt = field(field(obs, "global"), "prompt");
    if (!prompt.is_object() || str(prompt, "chooser") != "you" || !field(prompt, "candidates").is_array()) return nullptr;
    return &prompt;
}

ToolCall choose(std::vector<int> indices) {
    std::sort(indices.begin(), indices.end());
    return {"choose_card", {{"chosen_cards", indices}}};
}

ToolCall random_selection(const json& prompt, Rng& rng) {
    const int n = static_cast<int>(prompt["candidates"].size());
    const int lo = std::clamp(field(prompt, "min_count").is_number() ? prompt["min_count"].get<int>() : 0, 0, n);
    const int hi = std::clamp(field(prompt, "max_count").is_number() ? prompt["max_count"].get<int>() : n, lo, n);
    const int count = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(count));
    return choose(std::move(idx));
}

std::size_t weighted_pick(const std::vector<double>& w, Rng& rng) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double x = rng.unit() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (x < w[i]) return i;
        x -= w[i];
    }
    return w.size() - 1;
}

ToolCall pass_call() { return {"pass_turn", json::object()}; }

}  // namespace

std::vector<ToolCall> plausible_actions(const json& obs) {
    std::vector<ToolCall> out;
    const std::string phase = str(field(obs, "global"), "phase");
    const json& hand = field(field(obs, "private"), "hand");
    const auto mine = own_pokemon(obs);
    const json& you = field(field(obs, "public"), "you");
    const bool have_active = field(you, "active").is_object();

    auto targeted = [&](const std::string& tool, const std::string& card) {
        for (const auto& pk : mine) {
            out.push_back({tool,
                           {{"source_card", card},
                            {"target_card", str(pk, "name")},
                            {"target_index", field(pk, "field_index")}}});
        }
    };

    std::vector<std::string> seen;
    if (hand.is_array()) {
        for (const auto& c : hand) {
            const std::string name = str(c, "name");
            if (std::find(seen.begin(), seen.end(), name) != seen.end()) continue;
            seen.push_back(name);
            const std::string sub = str(c, "subkind");
            if (sub == "Basic") {
                out.push_back({"play_pokemon", {{"source_card", name}, {"position", have_active ? "bench" : "active"}}});
            }
            if (phase == "Setup") continue;
            if (sub == "Stage1" || sub == "Stage2") targeted("evolve_pokemon", name);
            else if (sub == "BasicEnergy" || sub == "SpecialEnergy") targeted("attach_energy", name);
            else if (sub == "Tool") targeted("use_tool", name);
            else if (sub == "Item") out.push_back({"use_item", {{"source_card", name}}});
            else if (sub == "Supporter") out.push_back({"use_supporter", {{"source_card", name}}});
            else if (sub == "Stadium") out.push_back({"put_stadium", {{"source_card", name}}});
        }
    }
    if (phase == "Setup") {
        if (have_active) out.push_back(pass_call());
        return out;
    }
    if (have_active) {
        const json& act = you["active"];
        for (const auto& a : field(act, "attacks")) {
            out.push_back({"attack", {{"source_card", str(act, "name")}, {"attack_name", str(a, "name")}}});
        }
        if (field(you, "bench").is_array() && !you["bench"].empty())
            out.push_back({"retreat", {{"source_card", str(act, "name")}}});
    }
    for (const auto& pk : mine) {
        if (field(pk, "ability").is_object()) {
            out.push_back({"use_ability",
                           {{"source_card", str(pk, "name")},
                            {"source_index", field(pk, "field_index")},
                            {"ability_name", str(pk["ability"], "name")}}});
        }
    }
    const json& stadium = field(field(obs, "public"), "stadium");
    if (stadium.is_object()) out.push_back({"use_stadium", {{"source_card", str(stadium, "name")}}});
    out.push_back(pass_call());
    return out;
}

// ---------------------------------------------------------------------------
// Random

void RandomAgent::begin_game(std::uint64_t seed, int) { rng_ = Rng(seed); }

AgentReply RandomAgent::decide(const DecisionRequest& request) {
    const json obs = request_observation(request);
    auto listed = listed_actions(obs);
    if (!listed.empty()) return AgentReply::ok(listed[static_cast<std::size_t>(rng_.below(listed.size()))]);
    if (const json* prompt = my_prompt(obs)) return AgentReply::ok(random_selection(*prompt, rng_));
    auto plausible = plausible_actions(obs);
    return AgentReply::ok(plausible[static_cast<std::size_t>(rng_.below(plausible.size()))]);
}

// ---------------------------------------------------------------------------
// Heuristic

void HeuristicAgent::begin_game(std::uint64_t seed, int) { rng_ = Rng(seed); }

std::vector<int> HeuristicAgent::greedy_choice(const json& obs) {
    const json* prompt = my_prompt(obs);
    if (!prompt) return {};
    const json& cands = (*prompt)["candidates"];
    const int n = static_cast<int>(cands.size());
    const int lo = std::clamp((*prompt)["min_count"].get<int>(), 0, n);
    const int hi = std::clamp((*prompt)["max_count"].get<int>(), lo, n);
    const std::string reason = str(*prompt, "reason");
    const bool giving_up = reason.rfind("discard", 0) == 0 || reason == "retreat-discard";

    // Energy types the Active still needs for its attacks.
    std::vector<std::string> needed;
    const json& act = field(field(field(obs, "public"), "you"), "active");
    if (act.is_object()) {
        for (const auto& a : field(act, "attacks")) {
            for (const auto& t : field(a, "cost")) needed.push_back(t.get<std::string>());
        }
    }

    auto value = [&](const json& c) -> double {
        if (field(c, "pokemon").is_object()) return c["pokemon"].value("hp", 0);
        const json& card = field(c, "card");
        if (!card.is_object()) return 0;  // face down
        const std::string kind = str(card, "kind");
        if (kind == "Pokemon") return card.value("hp", 0);
        if (kind == "Energy") {
            for (const auto& t : field(card, "provides")) {
                if (std::find(needed.begin(), needed.end(), t.get<std::string>()) != needed.end()) return 100;
            }
            return 50;
        }
        return 30;
    };

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = value(cands[a]);
        const double vb = value(cands[b]);
        return giving_up ? va < vb : va > vb;
    });
    order.resize(static_cast<std::size_t>(giving_up ? lo : hi));
    std::sort(order.begin(), order.end());
    return order;
}

AgentReply HeuristicAgent::decide(const DecisionRequest& request) {
    const json obs = request_observation(request);
    if (my_prompt(obs)) return AgentReply::ok(choose(greedy_choice(obs)));
    auto options = listed_actions(obs);
    if (options.empty()) options = plausible_actions(obs);
    std::vector<double> w;
    w.reserve(options.size());
    for (const auto& o : options) {
        auto t = parse_tool(o.tool);
        w.push_back(t ? weights_.of(*t) : 0.0);
    }
    return AgentReply::ok(options[weighted_pick(w, rng_)]);
}

// ---------------------------------------------------------------------------
// Wire protocol

std::string encode_request(const DecisionRequest& r) {
    json j = {{"protocol", kProtocolVersion},
              {"type", "decision"},
              {"match_id", r.match_id},
              {"step_id", r.step_id},
              {"seat", r.seat},
              {"observation", r.observation},
              {"history", r.history},
              {"choosing_card", r.choosing_card},
              {"deadline_ms", r.deadline_ms},
              {"attempt", r.attempt},
              {"feedback", r.feedback}};
    return j.dump();
}

AgentReply decode_reply(const std::string& line, std::uint64_t expected_step) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return AgentReply::failure(AgentReply::Status::Malformed, "reply is not a JSON object");
    if (!j.contains("step_id") || !j["step_id"].is_number_unsigned())
        return AgentReply::failure(AgentReply::Status::Malformed, "reply lacks step_id");
    if (j["step_id"].get<std::uint64_t>() != expected_step)
        return AgentReply::failure(AgentReply::Status::Malformed,
                                   "step_id mismatch: expected " + std::to_string(expected_step) + ", got " +
                                       j["step_id"].dump());
    if (j.contains("error")) return AgentReply::failure(AgentReply::Status::Malformed, "client error: " + j["error"].dump());
    if (!j.contains("tool") || !j["tool"].is_string())
        return AgentReply::failure(AgentReply::Status::Malformed, "reply lacks a tool name");
    if (!j.contains("arguments") || !j["arguments"].is_object())
        return AgentReply::failure(AgentReply::Status::Malformed, "reply lacks an arguments object");
    return AgentReply::ok({j["tool"].get<std::string>(), j["arguments"]});
}

ExternalAgent::ExternalAgent(std::vector<std::string> command) : command_(std::move(command)) {
    if (command_.empty()) throw ConfigError("external agent needs a command");
}

ExternalAgent::~ExternalAgent() { stop(); }

void ExternalAgent::stop() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        ::kill(pid_, SIGTERM);
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
    buffer_.clear();
}

bool ExternalAgent::ensure_running(std::string* error) {
    if (pid_ > 0) return true;
    // A client that exits mid-write must not take the engine down with it.
    static const bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
        *error = std::string("pipe: ") + std::strerror(errno);
        return false;
    }
    std::vector<char*> argv;
    for (auto& a : command_) argv.push_back(a.data());
    argv.push_back(nullptr);
    const pid_t pid = ::fork();
    if (pid < 0) {
        *error = std::string("fork: ") + std::strerror(errno);
        return false;
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    pid_ = pid;
    return true;
}

bool ExternalAgent::send_line(const std::string& line, std::string* error) {
    const std::string msg = line + "\n";
    std::size_t off = 0;
    while (off < msg.size()) {
        const ssize_t n = ::write(to_child_, msg.data() + off, msg.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            *error = std::string("write: ") + std::strerror(errno);
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    ++sent_;
    return true;
}

bool ExternalAgent::read_line(int deadline_ms, std::string* line, AgentReply::Status* status, std::string* error) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(deadline_ms);
    for (;;) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            *line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return true;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            *status = AgentReply::Status::Timeout;
            *error = "no reply within " + std::to_string(deadline_ms) + " ms";
            return false;
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR) continue;
        if (rc == 0) continue;
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            *status = AgentReply::Status::TransportError;
            *error = "agent process closed its output";
            return false;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

AgentReply ExternalAgent::decide(const DecisionRequest& request) {
    std::string error;
    if (!ensure_running(&error)) return AgentReply::failure(AgentReply::Status::TransportError, error);
    if (!send_line(encode_request(request), &error)) {
        stop();
        return AgentReply::failure(AgentReply::Status::TransportError, error);
    }
    std::string line;
    AgentReply::Status status = AgentReply::Status::TransportError;
    if (!read_line(request.deadline_ms, &line, &status, &error)) {
        // A late reply would desynchronize the stream; start fresh next time.
        stop();
        return AgentReply::failure(status, error);
    }
    return decode_reply(line, request.step_id);
}

bool ExternalAgent::evolve(int round, const std::vector<std::string>& trajectory_paths, const std::string& state_dir,
                           int deadline_ms, std::string* error) {
    if (!ensure_running(error)) return false;
    json msg = {{"protocol", kProtocolVersion},
                {"type", "evolve"},
                {"phase", "evolve"},
                {"round", round},
                {"trajectory_paths", trajectory_paths},
                {"state_dir", state_dir}};
    if (!send_line(msg.dump(), error)) {
        stop();
        return false;
    }
    std::string line;
    AgentReply::Status status{};
    if (!read_line(deadline_ms, &line, &status, error)) {
        stop();
        return false;
    }
    json reply = json::parse(line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || reply.value("phase", "") != "evolve" ||
        reply.value("status", "") != "ok") {
        *error = "evolve not acknowledged: " + line;
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Specs

json agent_spec_to_json(const AgentSpec& s) {
    json j = {{"id", s.id}, {"kind", s.kind}};
    if (s.kind == "heuristic") j["weights"] = weights_to_json(s.weights);
    if (s.kind == "external") j["command"] = s.command;
    return j;
}

AgentSpec agent_spec_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("agent entry must be an object");
    AgentSpec s;
    for (const auto& [key, v] : j.items()) {
        if (key == "id") {
            if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError("agent id must be a non-empty string");
            s.id = v.get<std::string>();
        } else if (key == "kind") {
            if (!v.is_string()) throw ConfigError("agent kind must be a string");
            s.kind = v.get<std::string>();
        } else if (key == "weights") {
            s.weights = weights_from_json(v);
        } else if (key == "command") {
            if (!v.is_array() || v.empty()) throw ConfigError("agent command must be a non-empty array of strings");
            for (const auto& a : v) {
                if (!a.is_string()) throw ConfigError("agent command must be a non-empty array of strings");
                s.command.push_back(a.get<std::string>());
            }
        } else {
            throw ConfigError("unknown agent key: " + key);
        }
    }
    if (s.id.empty()) throw ConfigError("agent entry lacks an id");
    if (s.kind != "random" && s.kind != "heuristic" && s.kind != "external")
        throw ConfigError("agent kind must be random, heuristic or external (got '" + s.kind + "')");
    if (s.kind == "external" && s.command.empty()) throw ConfigError("external agent '" + s.id + "' needs a command");
    if (s.kind != "heuristic" && j.contains("weights")) throw ConfigError("weights only apply to heuristic agents");
    return s;
}

AgentSpec parse_agent_shorthand(const std::string& text) {
    AgentSpec s;
    s.id = text;
    if (text == "random" || text == "heuristic") {
        s.kind = text;
        return s;
    }
    const std::string prefix = "external:";
    if (text.rfind(prefix, 0) == 0) {
        s.kind = "external";
        s.id = "external";
        std::istringstream in(text.substr(prefix.size()));
        for (std::string word; in >> word;) s.command.push_back(word);
        if (s.command.empty()) throw ConfigError("external agent needs a command");
        return s;
    }
    throw ConfigError("unknown agent '" + text + "' (random, heuristic, or external:<command>)");
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec) {
    if (spec.kind == "random") return std::make_unique<RandomAgent>();
    if (spec.kind == "heuristic") return std::make_unique<HeuristicAgent>(spec.weights);
    if (spec.kind == "external") return std::make_unique<ExternalAgent>(spec.command);
    throw ConfigError("unknown agent kind '" + spec.kind + "'");
}

}  // namespace tcg
