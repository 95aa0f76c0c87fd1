#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcg/state.hpp"

namespace tcg {

inline constexpr int kObservationVersion = 1;

// The viewer's information set as versioned JSON:
//   obs_version, viewer,
//   private  — own hand, deck/prize counts,
//   public   — both boards, discards, stadium (the opponent's board stays
//              hidden during setup),
//   global   — turn, phase, acting player, choosing_card, prompt (only the
//              chooser sees its candidates),
//   opponent_last_turn_actions — public event texts,
//   available_actions — legal actions when `include_actions` and the viewer acts.
nlohmann::json build_observation(const GameState& s, int viewer, bool include_actions = true);

// Flat "path = value" lines carrying the same facts as the structured form.
std::string render_raw(const nlohmann::json& observation);
// Inverse of render_raw, used by built-in agents that receive the raw form.
nlohmann::json parse_raw(std::string_view text);

// Public event texts from the opponent's most recent turn.
std::vector<std::string> opponent_last_turn_actions(const GameState& s, int viewer);

// Card summary used in observations and query answers.
nlohmann::json card_summary(const CardDef& d);
// Full card text for query_card answers.
nlohmann::json card_details(const CardDef& d);

}  // namespace tcg
