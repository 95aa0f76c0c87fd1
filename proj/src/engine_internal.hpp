#pragma once

// Helpers shared by the rules engine and the effect interpreter.

#include <optional>
#include <string>
#include <vector>

#include "tcg/engine.hpp"
#include "tcg/state.hpp"

namespace tcg::detail {

// Returns the chosen uids, or nullopt after installing a prompt (the caller
// must suspend). Forced choices (every candidate required, or nothing to
// choose) resolve immediately without a prompt.
std::optional<std::vector<std::uint16_t>> ask(GameState& s,
                                              int chooser,
                                              std::vector<ChoiceCandidate> candidates,
                                              int min_count,
                                              int max_count,
                                              std::string reason);

Card take_card(std::vector<Card>& zone, std::uint16_t uid);
std::vector<ChoiceCandidate> card_candidates(const GameState& s, const std::vector<Card>& zone, const CardFilter& f);
std::vector<ChoiceCandidate> pokemon_candidates(const PlayerState& pl, bool bench_only);

std::string label(const PokemonInPlay& pk);
std::string player_tag(int p);

void finish(GameState& s, GameResult r);
void place_on_bench(GameState& s, int player, Card c);
void discard_pokemon(GameState& s, int owner, PokemonInPlay& pk);
// Swaps the Active with a benched Pokemon; the outgoing Active loses its conditions.
void switch_in(GameState& s, int player, std::uint16_t bench_id);
bool can_evolve_onto(const GameState& s, const PokemonInPlay& pk, const CardDef& evolution, bool skip_stage);
int damage_after_modifiers(const GameState& s, int attacker_owner, const PokemonInPlay& attacker,
                           const PokemonInPlay& defender, int base);

// Runs an effect task until it completes (true) or suspends on a prompt (false).
bool run_effect(GameState& s, task::RunEffect& t);

}  // namespace tcg::detail
