#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "tcg/card.hpp"

namespace tcg {

// Trajectory logs are JSON lines. The first line is a header
//   {kind: "header", log_version, pool_version, match_id, seed, decks, config,
//    harness, agents, post_state_hash}
// followed by records {kind, turn, actor, payload, post_state_hash} with kind
// one of observation | query | rejected | action | event | result.
inline constexpr int kLogVersion = 1;

struct VerifyReport {
    bool ok = true;
    int line = 0;  // 1-based line of the first divergence
    std::string message;
    int records = 0;
    int actions = 0;
};

// Re-executes every action from the header's setup and checks each record:
// hashes, engine events, observations, query answers, and that logged
// rejections are still rejected.
VerifyReport verify_trajectory(std::istream& in, std::shared_ptr<const CardPool> pool);

// Turn-by-turn transcript: a "Setup" section, then one "Turn N" section per turn.
std::string pretty_trajectory(std::istream& in);

}  // namespace tcg
