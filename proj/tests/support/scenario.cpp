#include "support/scenario.hpp"

#include <stdexcept>

#include "support/oracles.hpp"
#include "tcg/engine.hpp"

namespace tcg::testing {

GameState started_game(const std::string& deck0, const std::string& deck1, std::uint64_t seed) {
    return started_game(shipped_pool(), shipped_deck(deck0), shipped_deck(deck1), seed);
}

GameState started_game(std::shared_ptr<const CardPool> pool, const Deck& deck0, const Deck& deck1, std::uint64_t seed) {
    GameState s = setup_game(std::move(pool), deck0, deck1, seed);
    while (s.phase == Phase::Setup) {
        const auto legal = legal_actions(s);
        const ActionRequest* pick = &legal.back();  // pass when the Active is placed
        for (const auto& a : legal) {
            if (a.tool == Tool::PlayPokemon && a.position == Position::Active) {
                pick = &a;
                break;
            }
        }
        if (!apply_action(s, s.acting_player(), *pick)) throw std::runtime_error("setup action rejected");
    }
    return s;
}

Card take_card_anywhere(GameState& s, int player, const std::string& card_id) {
    auto& pl = s.players[player];
    for (auto* zone : {&pl.deck, &pl.hand, &pl.discard, &pl.prizes}) {
        for (auto it = zone->begin(); it != zone->end(); ++it) {
            if (it->def->card_id == card_id) {
                Card c = *it;
                zone->erase(it);
                return c;
            }
        }
    }
    throw std::runtime_error("player " + std::to_string(player) + " has no loose " + card_id);
}

void put_in_hand(GameState& s, int player, const std::string& card_id) {
    s.players[player].hand.push_back(take_card_anywhere(s, player, card_id));
}

void put_in_discard(GameState& s, int player, const std::string& card_id) {
    s.players[player].discard.push_back(take_card_anywhere(s, player, card_id));
}

void put_on_deck_top(GameState& s, int player, const std::string& card_id) {
    Card c = take_card_anywhere(s, player, card_id);
    s.players[player].deck.push_back(c);
}

namespace {

void discard_in_play(PlayerState& pl, PokemonInPlay& pk) {
    for (auto& c : pk.stack) pl.discard.push_back(c);
    for (auto& c : pk.energy) pl.discard.push_back(c);
    if (pk.tool) pl.discard.push_back(*pk.tool);
}

PokemonInPlay make_pokemon(GameState& s, int player, const std::string& card_id, int field_index) {
    PokemonInPlay pk;
    pk.stack.push_back(take_card_anywhere(s, player, card_id));
    pk.field_index = field_index;
    pk.entered_turn = 0;
    return pk;
}

}  // namespace

PokemonInPlay& set_active(GameState& s, int player, const std::string& card_id) {
    auto& pl = s.players[player];
    int index = 0;
    if (pl.active) {
        index = pl.active->field_index;
        discard_in_play(pl, *pl.active);
        pl.active.reset();
    } else {
        index = pl.free_field_index();
    }
    pl.active = make_pokemon(s, player, card_id, index);
    return *pl.active;
}

PokemonInPlay& add_bench(GameState& s, int player, const std::string& card_id) {
    auto& pl = s.players[player];
    const int index = pl.free_field_index();
    pl.bench.push_back(make_pokemon(s, player, card_id, index));
    return pl.bench.back();
}

void clear_bench(GameState& s, int player) {
    auto& pl = s.players[player];
    for (auto& b : pl.bench) discard_in_play(pl, b);
    pl.bench.clear();
}

void attach_energy(GameState& s, int player, PokemonInPlay& pk, const std::string& energy_id, int copies) {
    for (int i = 0; i < copies; ++i) pk.energy.push_back(take_card_anywhere(s, player, energy_id));
}

void empty_hand(GameState& s, int player) {
    auto& pl = s.players[player];
    pl.deck.insert(pl.deck.begin(), pl.hand.begin(), pl.hand.end());
    pl.hand.clear();
}

}  // namespace tcg::testing
