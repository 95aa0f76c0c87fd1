#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "tcg/state.hpp"

namespace tcg {

inline constexpr int kSnapshotVersion = 1;

// Canonical structured form of a GameState. Object keys are emitted in sorted
// order, so dump() is byte-stable for equal states.
nlohmann::json state_to_json(const GameState& state, bool include_log = true);
GameState state_from_json(const nlohmann::json& j, std::shared_ptr<const CardPool> pool);

nlohmann::json config_to_json(const GameConfig& config);
GameConfig config_from_json(const nlohmann::json& j);

// FNV-1a 64 over the canonical snapshot without the action log.
std::uint64_t state_hash(const GameState& state);
std::string hash_hex(std::uint64_t h);

// True iff each player's cards across all zones are exactly their decklist.
bool card_conservation_check(const GameState& state);

// Structural invariants that must hold after every engine transition.
// Returns an empty string when all hold, otherwise a description.
std::string check_invariants(const GameState& state);

}  // namespace tcg
