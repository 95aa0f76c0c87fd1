#include "tcg/state.hpp"

#include <algorithm>
#include <sstream>

namespace tcg {

std::string Rng::serialize() const {
    std::ostringstream out;
    out << engine_;
    return out.str();
}

Rng Rng::deserialize(const std::string& s) {
    Rng rng;
    std::istringstream in(s);
    in >> rng.engine_;
    if (!in) throw ConfigError("malformed rng state");
    return rng;
}

int PokemonInPlay::retreat_cost() const {
    const int cost = top().retreat_cost + (tool ? tool->def->tool.retreat_delta : 0);
    return std::max(0, cost);
}

void PokemonInPlay::set(Condition c) {
    // Asleep, Paralyzed, and Confused replace one another.
    if (c == Condition::Asleep || c == Condition::Paralyzed || c == Condition::Confused) {
        clear(Condition::Asleep);
        clear(Condition::Paralyzed);
        clear(Condition::Confused);
    }
    conditions |= static_cast<std::uint8_t>(1U << static_cast<int>(c));
}

PokemonInPlay* PlayerState::find(std::uint16_t id) {
    if (active && active->id() == id) return &*active;
    for (auto& p : bench) {
        if (p.id() == id) return &p;
    }
    return nullptr;
}

const PokemonInPlay* PlayerState::find(std::uint16_t id) const {
    return const_cast<PlayerState*>(this)->find(id);
}

const PokemonInPlay* PlayerState::find_by_field_index(int field_index) const {
    if (active && active->field_index == field_index) return &*active;
    for (const auto& p : bench) {
        if (p.field_index == field_index) return &p;
    }
    return nullptr;
}

int PlayerState::free_field_index() const {
    for (int i = 0;; ++i) {
        if (!find_by_field_index(i)) return i;
    }
}

namespace {

const CardDef* find_in(const std::vector<Card>& cards, std::uint16_t uid) {
    for (const auto& c : cards) {
        if (c.uid == uid) return c.def;
    }
    return nullptr;
}

const CardDef* find_in(const PokemonInPlay& p, std::uint16_t uid) {
    if (const auto* d = find_in(p.stack, uid)) return d;
    if (const auto* d = find_in(p.energy, uid)) return d;
    if (p.tool && p.tool->uid == uid) return p.tool->def;
    return nullptr;
}

}  // namespace

const CardDef* GameState::card_def(std::uint16_t uid) const {
    if (stadium && stadium->uid == uid) return stadium->def;
    for (const auto& pl : players) {
        for (const auto* zone : {&pl.deck, &pl.hand, &pl.discard, &pl.prizes}) {
            if (const auto* d = find_in(*zone, uid)) return d;
        }
        if (pl.active) {
            if (const auto* d = find_in(*pl.active, uid)) return d;
        }
        for (const auto& b : pl.bench) {
            if (const auto* d = find_in(b, uid)) return d;
        }
    }
    return nullptr;
}

PokemonInPlay* GameState::find_pokemon(std::uint16_t id, int* owner) {
    for (int p = 0; p < 2; ++p) {
        if (auto* pk = players[p].find(id)) {
            if (owner) *owner = p;
            return pk;
        }
    }
    return nullptr;
}

const PokemonInPlay* GameState::find_pokemon(std::uint16_t id, int* owner) const {
    return const_cast<GameState*>(this)->find_pokemon(id, owner);
}

void GameConfig::validate() const {
    if (turn_cap < 1) throw ConfigError("turn cap must be at least 1");
    if (max_actions_per_turn < 1) throw ConfigError("max actions per turn must be at least 1");
    if (prize_cards < 1 || prize_cards > 6) throw ConfigError("prize cards must be between 1 and 6");
    if (opening_hand < 1 || opening_hand + prize_cards > kDeckSize) throw ConfigError("invalid opening hand size");
}

}  // namespace tcg
