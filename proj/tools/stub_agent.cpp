// Deterministic protocol client for tests: answers each decision with the
// first listed legal action and acknowledges evolve messages by appending a
// marker line to <state_dir>/notes.txt.
//
//   tcg_stub_agent [--garbage-every N] [--sleep-ms N] [--wrong-step] [--exit-after N] [--fail-evolve]
//
// --fail-evolve scribbles into the state directory and then reports failure.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "tcg/observation.hpp"

using json = nlohmann::json;

namespace {

json first_action(const json& request) {
    json obs = request["observation"];
    if (obs.is_string()) obs = tcg::parse_raw(obs.get<std::string>());
    if (obs.contains("available_actions") && !obs["available_actions"].empty()) return obs["available_actions"][0];
    const json& global = obs["global"];
    if (global.contains("prompt") && global["prompt"].contains("candidates")) {
        json chosen = json::array();
        for (int i = 0; i < global["prompt"]["min_count"].get<int>(); ++i) chosen.push_back(i);
        return {{"tool", "choose_card"}, {"arguments", {{"chosen_cards", chosen}}}};
    }
    return {{"tool", "pass_turn"}, {"arguments", json::object()}};
}

}  // namespace

int main(int argc, char** argv) {
    long garbage_every = 0;
    long sleep_ms = 0;
    long exit_after = 0;
    bool wrong_step = false;
    bool fail_evolve = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--garbage-every" && i + 1 < argc) garbage_every = std::atol(argv[++i]);
        else if (a == "--sleep-ms" && i + 1 < argc) sleep_ms = std::atol(argv[++i]);
        else if (a == "--exit-after" && i + 1 < argc) exit_after = std::atol(argv[++i]);
        else if (a == "--wrong-step") wrong_step = true;
        else if (a == "--fail-evolve") fail_evolve = true;
    }

    long decisions = 0;
    for (std::string line; std::getline(std::cin, line);) {
        json req = json::parse(line, nullptr, false);
        if (req.is_discarded() || !req.is_object()) {
            std::cout << json{{"error", "malformed request"}}.dump() << std::endl;
            continue;
        }
        if (req.value("type", "") == "evolve") {
            const std::string dir = req.value("state_dir", "");
            if (fail_evolve) {
                std::ofstream(dir + "/notes.txt", std::ios::app) << "half-written\n";
                std::cout << json{{"phase", "evolve"}, {"status", "error"}}.dump() << std::endl;
                continue;
            }
            std::ofstream(dir + "/notes.txt", std::ios::app) << "evolve round " << req.value("round", 0) << " ("
                                                             << req["trajectory_paths"].size() << " trajectories)\n";
            std::cout << json{{"phase", "evolve"}, {"status", "ok"}, {"round", req.value("round", 0)}}.dump() << std::endl;
            continue;
        }
        ++decisions;
        if (exit_after > 0 && decisions > exit_after) return 0;
        if (sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
        if (garbage_every > 0 && decisions % garbage_every == 0) {
            std::cout << "this is not json" << std::endl;
            continue;
        }
        json action = first_action(req);
        json reply = {{"step_id", req["step_id"].get<std::uint64_t>() + (wrong_step ? 1 : 0)},
                      {"tool", action["tool"]},
                      {"arguments", action["arguments"]}};
        std::cout << reply.dump() << std::endl;
    }
    return 0;
}
