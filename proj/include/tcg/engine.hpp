#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tcg/action.hpp"
#include "tcg/card.hpp"
#include "tcg/state.hpp"

namespace tcg {

// Coin flip for the first player, shuffles, mulligans, and Prize cards.
// Returns a state in Phase::Setup waiting for the first player to place
// Pokemon.
GameState setup_game(std::shared_ptr<const CardPool> pool,
                     const Deck& deck0,
                     const Deck& deck1,
                     std::uint64_t seed,
                     const GameConfig& config = {});

// Every fully-instantiated action the acting player may take. choose_card
// options are listed once per equivalence class of selections.
std::vector<ActionRequest> legal_actions(const GameState& s);

struct ApplyResult {
    bool accepted = false;
    Rejection rejection;
    std::size_t first_event = 0;  // index into action_log of the first new event

    explicit operator bool() const { return accepted; }
};

// Rule check without mutation.
std::optional<Rejection> validate_action(const GameState& s, int player, const ActionRequest& a);

// Validates and executes an action for `player`. On rejection the state is
// unchanged.
ApplyResult apply_action(GameState& s, int player, const ActionRequest& a);
ApplyResult apply_tool_call(GameState& s, int player, const ToolCall& call);

// Evaluates the win conditions on the current state. Setup never yields a result.
std::optional<GameResult> check_win(const GameState& s);

// Special-condition checks between turns, for the player whose turn ended
// (s.active_player) and the opponent. Exposed for direct testing.
void between_turns_upkeep(GameState& s);

// Runs queued engine tasks until input is needed or the game ends.
void settle(GameState& s);

// Queues `program` as an effect with the given controller and runs it.
// Used by card tests to exercise ops in isolation.
void run_program(GameState& s, ProgramId program, int controller, std::uint16_t source_pokemon,
                 EffectKind kind = EffectKind::Trainer);

// True iff `energy` (the Energy cards attached) can pay `cost`.
bool cost_satisfied(const std::vector<Card>& energy, const std::vector<EnergyType>& cost);

// Final damage from an attack of `base` damage, with Weakness and modifiers.
int attack_damage(const GameState& s, int attacker_owner, const PokemonInPlay& attacker,
                  const PokemonInPlay& defender, int base);

}  // namespace tcg
