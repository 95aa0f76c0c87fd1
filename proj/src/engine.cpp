#include "tcg/engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "engine_internal.hpp"

namespace tcg {

namespace detail {

std::optional<std::vector<std::uint16_t>> ask(GameState& s,
                                              int chooser,
                                              std::vector<ChoiceCandidate> candidates,
                                              int min_count,
                                              int max_count,
                                              std::string reason) {
    if (s.choice_result) {
        auto r = std::move(*s.choice_result);
        s.choice_result.reset();
        return r;
    }
    const int n = static_cast<int>(candidates.size());
    max_count = std::clamp(max_count, 0, n);
    min_count = std::clamp(min_count, 0, max_count);
    if (max_count == 0) return std::vector<std::uint16_t>{};
    if (min_count == n) {
        std::vector<std::uint16_t> all;
        for (const auto& c : candidates) all.push_back(c.uid);
        return all;
    }
    s.pending_choice = ChoicePrompt{chooser, std::move(candidates), min_count, max_count, std::move(reason)};
    return std::nullopt;
}

Card take_card(std::vector<Card>& zone, std::uint16_t uid) {
    auto it = std::find_if(zone.begin(), zone.end(), [&](const Card& c) { return c.uid == uid; });
    if (it == zone.end()) throw EffectError("card " + std::to_string(uid) + " is not in the expected zone");
    Card c = *it;
    zone.erase(it);
    return c;
}

std::vector<ChoiceCandidate> card_candidates(const GameState&, const std::vector<Card>& zone, const CardFilter& f) {
    std::vector<const Card*> hits;
    for (const auto& c : zone) {
        if (f.matches(*c.def)) hits.push_back(&c);
    }
    // Sorted by card then uid, so candidate order never reveals deck order.
    std::sort(hits.begin(), hits.end(), [](const Card* a, const Card* b) {
        return std::pair(a->def->index, a->uid) < std::pair(b->def->index, b->uid);
    });
    std::vector<ChoiceCandidate> out;
    for (const auto* c : hits) out.push_back({c->uid, false, false});
    return out;
}

std::vector<ChoiceCandidate> pokemon_candidates(const PlayerState& pl, bool bench_only) {
    std::vector<ChoiceCandidate> out;
    if (!bench_only && pl.active) out.push_back({pl.active->id(), false, true});
    for (const auto& b : pl.bench) out.push_back({b.id(), false, true});
    return out;
}

std::string label(const PokemonInPlay& pk) { return pk.top().name + "#" + std::to_string(pk.field_index); }

std::string player_tag(int p) { return "P" + std::to_string(p); }

void finish(GameState& s, GameResult r) {
    s.result = r;
    s.phase = Phase::Finished;
    s.tasks.clear();
    s.pending_choice.reset();
    s.choice_result.reset();
    std::string text = "game over (" + std::string(to_string(r.reason)) + "): ";
    text += r.winner ? player_tag(*r.winner) + " wins" : std::string("draw");
    s.log(-1, std::move(text));
}

void place_on_bench(GameState& s, int player, Card c) {
    auto& pl = s.players[player];
    PokemonInPlay pk;
    pk.stack.push_back(c);
    pk.entered_turn = s.turn_number;
    pk.field_index = pl.free_field_index();
    pl.bench.push_back(std::move(pk));
}

void discard_pokemon(GameState& s, int owner, PokemonInPlay& pk) {
    auto& d = s.players[owner].discard;
    d.insert(d.end(), pk.stack.begin(), pk.stack.end());
    d.insert(d.end(), pk.energy.begin(), pk.energy.end());
    if (pk.tool) d.push_back(*pk.tool);
    pk.stack.clear();
    pk.energy.clear();
    pk.tool.reset();
}

void switch_in(GameState& s, int player, std::uint16_t bench_id) {
    auto& pl = s.players[player];
    auto it = std::find_if(pl.bench.begin(), pl.bench.end(), [&](const PokemonInPlay& p) { return p.id() == bench_id; });
    if (it == pl.bench.end()) throw EffectError("Pokemon " + std::to_string(bench_id) + " is not on the bench");
    if (!pl.active) {
        pl.active = std::move(*it);
        pl.bench.erase(it);
        return;
    }
    std::swap(*it, *pl.active);
    it->clear_all_conditions();
}

bool can_evolve_onto(const GameState& s, const PokemonInPlay& pk, const CardDef& evolution, bool skip_stage) {
    if (!evolution.evolves_from) return false;
    if (skip_stage) {
        if (evolution.subkind != CardSubkind::Stage2 || !pk.top().is_basic_pokemon()) return false;
        const CardDef* mid = s.pool->find_by_name(*evolution.evolves_from);
        if (!mid || !mid->evolves_from || *mid->evolves_from != pk.top().name) return false;
    } else if (*evolution.evolves_from != pk.top().name) {
        return false;
    }
    if (pk.entered_turn >= s.turn_number || pk.evolved_this_turn) return false;
    if (!s.config.evolve_on_first_turns && s.turn_number <= 2) return false;
    return true;
}

int damage_after_modifiers(const GameState& s, int attacker_owner, const PokemonInPlay& attacker,
                           const PokemonInPlay& defender, int base) {
    if (base <= 0) return 0;
    int dmg = base;
    if (attacker.tool) dmg += attacker.tool->def->tool.damage_dealt;
    for (const auto& m : s.players[attacker_owner].modifiers) {
        if (!m.taken && (m.pokemon == kNoCard || m.pokemon == attacker.id())) dmg += m.delta;
    }
    const auto& weak = defender.top().weakness;
    const auto& types = attacker.top().types;
    if (weak && std::find(types.begin(), types.end(), *weak) != types.end()) dmg *= 2;
    if (defender.tool) dmg += defender.tool->def->tool.damage_taken;
    for (const auto& m : s.players[opponent_of(attacker_owner)].modifiers) {
        if (m.taken && (m.pokemon == kNoCard || m.pokemon == defender.id())) dmg += m.delta;
    }
    return std::max(0, dmg);
}

}  // namespace detail

using namespace detail;

int attack_damage(const GameState& s, int attacker_owner, const PokemonInPlay& attacker,
                  const PokemonInPlay& defender, int base) {
    return damage_after_modifiers(s, attacker_owner, attacker, defender, base);
}

bool cost_satisfied(const std::vector<Card>& energy, const std::vector<EnergyType>& cost) {
    if (energy.size() < cost.size()) return false;
    std::vector<EnergyType> typed;
    for (auto t : cost) {
        if (t != EnergyType::Colorless) typed.push_back(t);
    }
    // Colorless slots accept anything, so only the typed slots need matching;
    // the size check above guarantees enough left over.
    std::vector<bool> used(energy.size(), false);
    std::function<bool(std::size_t)> assign = [&](std::size_t i) {
        if (i == typed.size()) return true;
        for (std::size_t j = 0; j < energy.size(); ++j) {
            if (used[j]) continue;
            const auto& p = energy[j].def->provides;
            if (std::find(p.begin(), p.end(), typed[i]) == p.end()) continue;
            used[j] = true;
            if (assign(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return assign(0);
}

namespace {

void draw_cards(PlayerState& pl, int n) {
    for (int i = 0; i < n && !pl.deck.empty(); ++i) {
        pl.hand.push_back(pl.deck.back());
        pl.deck.pop_back();
    }
}

bool has_basic(const std::vector<Card>& cards) {
    return std::any_of(cards.begin(), cards.end(), [](const Card& c) { return c.def->is_basic_pokemon(); });
}

std::vector<const PokemonInPlay*> own_pokemon(const PlayerState& pl) {
    std::vector<const PokemonInPlay*> out;
    if (pl.active) out.push_back(&*pl.active);
    for (const auto& b : pl.bench) out.push_back(&b);
    return out;
}

void push_front(GameState& s, std::initializer_list<Task> tasks) {
    for (auto it = std::rbegin(tasks); it != std::rend(tasks); ++it) s.tasks.push_front(*it);
}

void push_front(GameState& s, std::vector<Task> tasks) {
    for (auto it = tasks.rbegin(); it != tasks.rend(); ++it) s.tasks.push_front(std::move(*it));
}

bool attack_blocked_first_turn(const GameState& s) {
    return s.turn_number == 1 && !s.config.first_player_may_attack;
}

bool supporter_blocked_first_turn(const GameState& s) {
    return s.turn_number == 1 && !s.config.first_player_may_play_supporter;
}

// ---------------------------------------------------------------------------
// Tasks

bool run_begin_turn(GameState& s, const task::BeginTurn& t) {
    if (s.turn_number >= s.config.turn_cap) {
        finish(s, {std::nullopt, WinReason::TurnCap});
        return true;
    }
    ++s.turn_number;
    s.active_player = t.player;
    s.phase = Phase::TurnMain;
    auto& pl = s.players[t.player];
    pl.flags = {};
    for (auto& other : s.players) {
        if (other.active) other.active->evolved_this_turn = false;
        for (auto& b : other.bench) b.evolved_this_turn = false;
    }
    s.log(-1, "turn " + std::to_string(s.turn_number) + ": " + player_tag(t.player) + " to act");
    if (pl.deck.empty()) {
        s.log(t.player, player_tag(t.player) + " cannot draw from an empty deck");
        finish(s, {opponent_of(t.player), WinReason::DeckOut});
        return true;
    }
    draw_cards(pl, 1);
    s.log(t.player, player_tag(t.player) + " drew a card");
    return true;
}

bool run_end_turn(GameState& s) {
    s.phase = Phase::BetweenTurns;
    for (auto& pl : s.players) {
        std::erase_if(pl.modifiers, [&](const DamageModifier& m) { return m.expires_after_turn <= s.turn_number; });
    }
    s.log(s.active_player, player_tag(s.active_player) + " ended their turn");
    push_front(s, {task::Upkeep{}, task::ResolveKnockouts{}, task::BeginTurn{opponent_of(s.active_player)}});
    return true;
}

bool run_resolve_knockouts(GameState& s) {
    int owed[2] = {0, 0};
    bool any = false;
    for (int q : {opponent_of(s.active_player), s.active_player}) {
        auto& pl = s.players[q];
        auto knock_out = [&](PokemonInPlay& pk) {
            s.log(-1, player_tag(q) + "'s " + label(pk) + " was Knocked Out");
            owed[opponent_of(q)] += pk.top().prize_value;
            discard_pokemon(s, q, pk);
            any = true;
        };
        if (pl.active && pl.active->knocked_out()) {
            knock_out(*pl.active);
            pl.active.reset();
        }
        for (auto it = pl.bench.begin(); it != pl.bench.end();) {
            if (it->knocked_out()) {
                knock_out(*it);
                it = pl.bench.erase(it);
            } else {
                ++it;
            }
        }
    }
    if (!any) return true;
    std::vector<Task> next;
    for (int p : {s.active_player, opponent_of(s.active_player)}) {
        if (owed[p] > 0) next.push_back(task::TakePrizes{p, owed[p]});
    }
    next.push_back(task::CheckWin{});
    next.push_back(task::Promote{opponent_of(s.active_player)});
    next.push_back(task::Promote{s.active_player});
    push_front(s, std::move(next));
    return true;
}

bool run_take_prizes(GameState& s, const task::TakePrizes& t) {
    auto& pl = s.players[t.player];
    const int n = std::min<int>(t.count, static_cast<int>(pl.prizes.size()));
    if (n == 0) return true;
    std::vector<ChoiceCandidate> cands;
    for (const auto& c : pl.prizes) cands.push_back({c.uid, true, false});
    auto r = ask(s, t.player, std::move(cands), n, n, "take-prize");
    if (!r) return false;
    for (auto uid : *r) pl.hand.push_back(take_card(pl.prizes, uid));
    s.log(t.player, player_tag(t.player) + " took " + std::to_string(r->size()) + " Prize card(s)");
    return true;
}

bool run_promote(GameState& s, const task::Promote& t) {
    auto& pl = s.players[t.player];
    if (pl.active || pl.bench.empty()) return true;
    auto r = ask(s, t.player, pokemon_candidates(pl, true), 1, 1, "promote");
    if (!r) return false;
    switch_in(s, t.player, r->front());
    s.log(t.player, player_tag(t.player) + " promoted " + label(*pl.active) + " to the Active Spot");
    return true;
}

bool run_retreat(GameState& s, task::Retreat& t) {
    auto& pl = s.players[t.player];
    if (!pl.active) return true;
    if (t.stage == 0) {
        const int cost = pl.active->retreat_cost();
        if (cost > 0) {
            auto r = ask(s, t.player, card_candidates(s, pl.active->energy, {}), cost, cost, "retreat-discard");
            if (!r) return false;
            for (auto uid : *r) pl.discard.push_back(take_card(pl.active->energy, uid));
            s.log(t.player, player_tag(t.player) + " discarded " + std::to_string(r->size()) + " Energy to retreat");
        }
        t.stage = 1;
    }
    auto r = ask(s, t.player, pokemon_candidates(pl, true), 1, 1, "retreat-switch");
    if (!r) return false;
    const std::string old = label(*pl.active);
    switch_in(s, t.player, r->front());
    s.log(t.player, player_tag(t.player) + " retreated " + old + "; " + label(*pl.active) + " is now Active");
    return true;
}

// Returns false when the task suspended on a prompt.
bool run_task(GameState& s, Task& t) {
    return std::visit(
        [&](auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, task::SetupPlace>) {
                return true;
            } else if constexpr (std::is_same_v<T, task::BeginTurn>) {
                return run_begin_turn(s, x);
            } else if constexpr (std::is_same_v<T, task::EndTurn>) {
                return run_end_turn(s);
            } else if constexpr (std::is_same_v<T, task::Upkeep>) {
                between_turns_upkeep(s);
                return true;
            } else if constexpr (std::is_same_v<T, task::ResolveKnockouts>) {
                return run_resolve_knockouts(s);
            } else if constexpr (std::is_same_v<T, task::TakePrizes>) {
                return run_take_prizes(s, x);
            } else if constexpr (std::is_same_v<T, task::CheckWin>) {
                if (auto r = check_win(s)) finish(s, *r);
                return true;
            } else if constexpr (std::is_same_v<T, task::Promote>) {
                return run_promote(s, x);
            } else if constexpr (std::is_same_v<T, task::Retreat>) {
                return run_retreat(s, x);
            } else {
                return run_effect(s, x);
            }
        },
        t);
}

// ---------------------------------------------------------------------------
// Action checking

struct Resolved {
    int hand_pos = -1;
    std::uint16_t pokemon = kNoCard;
    int attack = -1;
    std::vector<std::uint16_t> chosen;
};

Rejection rule(std::string m) { return {RejectCode::RuleViolation, std::move(m)}; }

int find_in_hand(const PlayerState& pl, const std::string& ref) {
    for (std::size_t i = 0; i < pl.hand.size(); ++i) {
        const auto& d = *pl.hand[i].def;
        if (d.name == ref || d.card_id == ref) return static_cast<int>(i);
    }
    return -1;
}

bool names(const PokemonInPlay& pk, const std::string& ref) {
    return pk.top().name == ref || pk.top().card_id == ref;
}

std::optional<Rejection> find_own_pokemon(const PlayerState& pl, const std::string& ref, std::optional<int> index,
                                          const PokemonInPlay*& out) {
    std::vector<const PokemonInPlay*> hits;
    for (const auto* pk : own_pokemon(pl)) {
        if (names(*pk, ref) && (!index || pk->field_index == *index)) hits.push_back(pk);
    }
    if (hits.empty()) return Rejection{RejectCode::UnknownCard, "no Pokemon '" + ref + "' of yours in play"};
    if (hits.size() > 1)
        return Rejection{RejectCode::BadArgument, "'" + ref + "' is ambiguous; give its field index"};
    out = hits.front();
    return std::nullopt;
}

std::optional<Rejection> hand_card(const PlayerState& pl, const std::string& ref, Resolved& r) {
    r.hand_pos = find_in_hand(pl, ref);
    if (r.hand_pos < 0) return Rejection{RejectCode::UnknownCard, "card '" + ref + "' is not in your hand"};
    return std::nullopt;
}

std::optional<Rejection> check(const GameState& s, int player, const ActionRequest& a, Resolved& r) {
    if (s.finished()) return Rejection{RejectCode::WrongPhase, "the game is over"};
    if (player != s.acting_player()) return Rejection{RejectCode::WrongPhase, "it is not your turn to act"};

    if (s.pending_choice) {
        if (a.tool != Tool::ChooseCard)
            return Rejection{RejectCode::WrongPhase, "a card choice is pending; answer it with choose_card"};
        const auto& pr = *s.pending_choice;
        const int n = static_cast<int>(a.chosen_cards.size());
        if (n < pr.min_count || n > pr.max_count)
            return rule("choose between " + std::to_string(pr.min_count) + " and " + std::to_string(pr.max_count) +
                        " cards");
        std::set<int> seen;
        for (int i : a.chosen_cards) {
            if (i < 0 || i >= static_cast<int>(pr.candidates.size()))
                return Rejection{RejectCode::BadArgument, "chosen index " + std::to_string(i) + " is out of range"};
            if (!seen.insert(i).second)
                return Rejection{RejectCode::BadArgument, "chosen index " + std::to_string(i) + " repeated"};
            r.chosen.push_back(pr.candidates[i].uid);
        }
        return std::nullopt;
    }
    if (a.tool == Tool::ChooseCard) return Rejection{RejectCode::WrongPhase, "no card choice is pending"};

    const auto& pl = s.players[player];
    if (s.phase == Phase::Setup) {
        if (a.tool == Tool::PassTurn) {
            if (!pl.active) return rule("place an Active Pokemon before finishing setup");
            return std::nullopt;
        }
        if (a.tool != Tool::PlayPokemon)
            return Rejection{RejectCode::WrongPhase, "only play_pokemon and pass_turn are allowed during setup"};
    } else if (s.phase != Phase::TurnMain) {
        return Rejection{RejectCode::WrongPhase, "actions are only allowed during the main phase"};
    }
    if (s.phase == Phase::TurnMain && a.tool != Tool::PassTurn &&
        pl.flags.actions >= s.config.max_actions_per_turn)
        return rule("action limit for this turn reached; only pass_turn is allowed");

    auto target = [&](const PokemonInPlay*& pk) {
        auto rej = find_own_pokemon(pl, a.target_card, a.target_index, pk);
        if (!rej) r.pokemon = pk->id();
        return rej;
    };
    auto hand_kind = [&](CardSubkind want, const char* what) -> std::optional<Rejection> {
        if (auto rej = hand_card(pl, a.source_card, r)) return rej;
        if (pl.hand[r.hand_pos].def->subkind != want) return rule("'" + a.source_card + "' is not " + what);
        return std::nullopt;
    };

    switch (a.tool) {
        case Tool::PlayPokemon: {
            if (auto rej = hand_card(pl, a.source_card, r)) return rej;
            if (!pl.hand[r.hand_pos].def->is_basic_pokemon())
                return rule("'" + a.source_card + "' is not a Basic Pokemon");
            if (!a.position) return Rejection{RejectCode::MissingArgument, "missing argument 'position'"};
            if (*a.position == Position::Active) {
                if (pl.active) return rule("the Active Spot is already occupied");
            } else {
                if (!pl.active) return rule("place an Active Pokemon first");
                if (pl.bench.size() >= static_cast<std::size_t>(kBenchLimit)) return rule("your Bench is full");
            }
            return std::nullopt;
        }
        case Tool::EvolvePokemon: {
            if (auto rej = hand_card(pl, a.source_card, r)) return rej;
            const CardDef& evo = *pl.hand[r.hand_pos].def;
            if (!evo.is_evolution()) return rule("'" + a.source_card + "' is not an Evolution card");
            const PokemonInPlay* pk = nullptr;
            if (auto rej = target(pk)) return rej;
            if (*evo.evolves_from != pk->top().name)
                return rule(evo.name + " does not evolve from " + pk->top().name);
            if (!s.config.evolve_on_first_turns && s.turn_number <= 2)
                return rule("no evolving during either player's first turn");
            if (pk->entered_turn >= s.turn_number) return rule(label(*pk) + " came into play this turn");
            if (pk->evolved_this_turn) return rule(label(*pk) + " already evolved this turn");
            return std::nullopt;
        }
        case Tool::AttachEnergy: {
            if (auto rej = hand_card(pl, a.source_card, r)) return rej;
            if (!pl.hand[r.hand_pos].def->is_energy()) return rule("'" + a.source_card + "' is not an Energy card");
            if (pl.flags.energy_attached) return rule("energy already attached this turn");
            const PokemonInPlay* pk = nullptr;
            return target(pk);
        }
        case Tool::UseSupporter: {
            if (auto rej = hand_kind(CardSubkind::Supporter, "a Supporter")) return rej;
            if (pl.flags.supporter_played) return rule("a Supporter was already played this turn");
            if (supporter_blocked_first_turn(s)) return rule("the first player cannot play a Supporter on turn 1");
            return std::nullopt;
        }
        case Tool::UseItem:
            return hand_kind(CardSubkind::Item, "an Item");
        case Tool::UseTool: {
            if (auto rej = hand_kind(CardSubkind::Tool, "a Pokemon Tool")) return rej;
            const PokemonInPlay* pk = nullptr;
            if (auto rej = target(pk)) return rej;
            if (pk->tool) return rule(label(*pk) + " already has a Tool attached");
            return std::nullopt;
        }
        case Tool::PutStadium: {
            if (auto rej = hand_kind(CardSubkind::Stadium, "a Stadium")) return rej;
            if (pl.flags.stadium_played) return rule("a Stadium was already played this turn");
            if (s.stadium && s.stadium->def->name == pl.hand[r.hand_pos].def->name)
                return rule("a Stadium with the same name is already in play");
            return std::nullopt;
        }
        case Tool::DiscardStadium:
        case Tool::UseStadium: {
            if (!s.stadium) return rule("no Stadium is in play");
            const auto& d = *s.stadium->def;
            if (d.name != a.source_card && d.card_id != a.source_card)
                return Rejection{RejectCode::UnknownCard, "'" + a.source_card + "' is not the Stadium in play"};
            if (a.tool == Tool::DiscardStadium) {
                if (s.stadium_owner != player) return rule("you can only discard your own Stadium");
                if (pl.flags.stadium_played) return rule("a Stadium was already played this turn");
            } else {
                if (d.effect == kNoProgram) return rule(d.name + " has no effect to use");
                if (pl.flags.stadium_used) return rule("the Stadium was already used this turn");
            }
            return std::nullopt;
        }
        case Tool::UseAbility: {
            const PokemonInPlay* pk = nullptr;
            if (auto rej = find_own_pokemon(pl, a.source_card, a.source_index, pk)) return rej;
            r.pokemon = pk->id();
            const auto& ab = pk->top().ability;
            if (!ab || ab->effect == kNoProgram) return rule(label(*pk) + " has no Ability to use");
            if (!a.ability_name.empty() && a.ability_name != ab->name)
                return Rejection{RejectCode::UnknownCard, label(*pk) + " has no Ability '" + a.ability_name + "'"};
            if (pk->ability_used_turn == s.turn_number) return rule(ab->name + " was already used this turn");
            return std::nullopt;
        }
        case Tool::Retreat: {
            if (!pl.active || !names(*pl.active, a.source_card))
                return Rejection{RejectCode::UnknownCard, "'" + a.source_card + "' is not your Active Pokemon"};
            const auto& act = *pl.active;
            if (pl.flags.retreated) return rule("already retreated this turn");
            if (act.has(Condition::Asleep) || act.has(Condition::Paralyzed))
                return rule(label(act) + " cannot retreat while Asleep or Paralyzed");
            if (pl.bench.empty()) return rule("no Benched Pokemon to switch in");
            if (static_cast<int>(act.energy.size()) < act.retreat_cost()) return rule("not enough Energy to retreat");
            return std::nullopt;
        }
        case Tool::Attack: {
            if (!pl.active || !names(*pl.active, a.source_card))
                return Rejection{RejectCode::UnknownCard, "'" + a.source_card + "' is not your Active Pokemon"};
            const auto& act = *pl.active;
            const auto& attacks = act.top().attacks;
            for (std::size_t i = 0; i < attacks.size(); ++i) {
                if (attacks[i].name == a.attack_name) r.attack = static_cast<int>(i);
            }
            if (r.attack < 0)
                return Rejection{RejectCode::UnknownCard, label(act) + " has no attack '" + a.attack_name + "'"};
            if (attack_blocked_first_turn(s)) return rule("the first player cannot attack on turn 1");
            if (act.has(Condition::Asleep) || act.has(Condition::Paralyzed))
                return rule(label(act) + " cannot attack while Asleep or Paralyzed");
            if (!cost_satisfied(act.energy, attacks[r.attack].cost))
                return rule("not enough Energy for " + a.attack_name);
            return std::nullopt;
        }
        case Tool::PassTurn:
        case Tool::ChooseCard:
            return std::nullopt;
    }
    return rule("unsupported action");
}

task::RunEffect effect_task(EffectKind kind, ProgramId program, int controller, std::uint16_t source_card,
                            std::uint16_t source_pokemon) {
    task::RunEffect t;
    t.kind = kind;
    if (program != kNoProgram) t.frames.push_back({program, 0});
    t.ctx.controller = controller;
    t.ctx.source_card = source_card;
    t.ctx.source_pokemon = source_pokemon;
    return t;
}

// Effects outside attacks can still Knock Out Pokemon, so a check follows each.
void queue_effect(GameState& s, task::RunEffect t) {
    push_front(s, std::vector<Task>{std::move(t), task::ResolveKnockouts{}});
}

void execute(GameState& s, int p, const ActionRequest& a, const Resolved& r) {
    auto& pl = s.players[p];
    const std::string me = player_tag(p);
    if (s.phase == Phase::TurnMain && a.tool != Tool::ChooseCard) ++pl.flags.actions;
    auto from_hand = [&] {
        Card c = pl.hand[r.hand_pos];
        pl.hand.erase(pl.hand.begin() + r.hand_pos);
        return c;
    };
    auto active_id = [&] { return pl.active ? pl.active->id() : kNoCard; };

    switch (a.tool) {
        case Tool::PlayPokemon: {
            Card c = from_hand();
            const bool active = *a.position == Position::Active;
            if (active) {
                PokemonInPlay pk;
                pk.stack.push_back(c);
                pk.entered_turn = s.turn_number;
                pk.field_index = pl.free_field_index();
                pl.active = std::move(pk);
            } else {
                place_on_bench(s, p, c);
            }
            // Setup placements are face down until both players are done.
            if (s.phase == Phase::Setup)
                s.log(p, me + " placed a Basic Pokemon face down " + (active ? "as Active" : "on the Bench"));
            else
                s.log(p, me + " played " + c.def->name + " to the Bench");
            break;
        }
        case Tool::EvolvePokemon: {
            Card c = from_hand();
            auto* pk = pl.find(r.pokemon);
            const std::string before = label(*pk);
            pk->stack.push_back(c);
            pk->evolved_this_turn = true;
            pk->clear_all_conditions();
            s.log(p, me + " evolved " + before + " into " + c.def->name);
            break;
        }
        case Tool::AttachEnergy: {
            Card c = from_hand();
            auto* pk = pl.find(r.pokemon);
            pk->energy.push_back(c);
            pl.flags.energy_attached = true;
            s.log(p, me + " attached " + c.def->name + " to " + label(*pk));
            if (c.def->effect != kNoProgram)
                queue_effect(s, effect_task(EffectKind::OnAttach, c.def->effect, p, c.uid, pk->id()));
            break;
        }
        case Tool::UseSupporter:
        case Tool::UseItem: {
            Card c = from_hand();
            pl.discard.push_back(c);
            if (a.tool == Tool::UseSupporter) pl.flags.supporter_played = true;
            s.log(p, me + " played " + c.def->name);
            queue_effect(s, effect_task(EffectKind::Trainer, c.def->effect, p, c.uid, active_id()));
            break;
        }
        case Tool::UseTool: {
            Card c = from_hand();
            auto* pk = pl.find(r.pokemon);
            pk->tool = c;
            s.log(p, me + " attached " + c.def->name + " to " + label(*pk));
            break;
        }
        case Tool::PutStadium: {
            Card c = from_hand();
            if (s.stadium) {
                s.players[s.stadium_owner].discard.push_back(*s.stadium);
                s.log(p, s.stadium->def->name + " was discarded");
            }
            s.stadium = c;
            s.stadium_owner = p;
            pl.flags.stadium_played = true;
            s.log(p, me + " put " + c.def->name + " into play");
            break;
        }
        case Tool::DiscardStadium: {
            s.players[s.stadium_owner].discard.push_back(*s.stadium);
            s.log(p, me + " discarded " + s.stadium->def->name);
            s.stadium.reset();
            s.stadium_owner = -1;
            pl.flags.stadium_played = true;
            break;
        }
        case Tool::UseStadium: {
            pl.flags.stadium_used = true;
            s.log(p, me + " used " + s.stadium->def->name);
            queue_effect(s, effect_task(EffectKind::Stadium, s.stadium->def->effect, p, s.stadium->uid, active_id()));
            break;
        }
        case Tool::UseAbility: {
            auto* pk = pl.find(r.pokemon);
            pk->ability_used_turn = s.turn_number;
            s.log(p, me + "'s " + label(*pk) + " used " + pk->top().ability->name);
            queue_effect(s, effect_task(EffectKind::Ability, pk->top().ability->effect, p, pk->stack.back().uid, pk->id()));
            break;
        }
        case Tool::Retreat: {
            pl.flags.retreated = true;
            s.tasks.push_front(task::Retreat{p, 0});
            break;
        }
        case Tool::Attack: {
            auto& act = *pl.active;
            const auto& atk = act.top().attacks[r.attack];
            s.log(p, me + "'s " + label(act) + " used " + atk.name);
            std::vector<Task> next;
            bool proceeds = true;
            if (act.has(Condition::Confused)) {
                if (s.rng.coin()) {
                    s.log(-1, "confusion check: heads");
                } else {
                    act.damage_counters += 3;
                    s.log(-1, "confusion check: tails; " + label(act) + " hurt itself for 30 damage");
                    proceeds = false;
                }
            }
            if (proceeds) {
                auto t = effect_task(EffectKind::Attack, atk.effect, p, act.stack.back().uid, act.id());
                t.ctx.attack_index = r.attack;
                next.push_back(std::move(t));
            }
            next.push_back(task::ResolveKnockouts{});
            next.push_back(task::EndTurn{});
            push_front(s, std::move(next));
            break;
        }
        case Tool::PassTurn: {
            if (s.phase == Phase::Setup) {
                s.tasks.pop_front();
                s.log(p, me + " finished placing Pokemon");
                if (!s.tasks.empty() && std::holds_alternative<task::BeginTurn>(s.tasks.front())) {
                    for (int q : {0, 1}) {
                        std::string text = player_tag(q) + " revealed Active " + label(*s.players[q].active);
                        for (const auto& b : s.players[q].bench) text += ", Bench " + label(b);
                        s.log(q, std::move(text));
                    }
                }
            } else {
                s.tasks.push_front(task::EndTurn{});
            }
            break;
        }
        case Tool::ChooseCard: {
            const auto reason = s.pending_choice->reason;
            s.choice_result = r.chosen;
            s.pending_choice.reset();
            s.log(p, me + " chose " + std::to_string(r.chosen.size()) + " card(s) for " + reason);
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Legal-action generation. Kept separate from check() so the two can be
// cross-validated.

void choice_actions(const GameState& s, std::vector<ActionRequest>& out) {
    const auto& pr = *s.pending_choice;
    // Group interchangeable candidates: same card face up, or the same
    // Pokemon/face-down position.
    std::map<std::pair<int, int>, int> key_to_group;
    std::vector<std::vector<int>> groups;
    for (std::size_t i = 0; i < pr.candidates.size(); ++i) {
        const auto& c = pr.candidates[i];
        std::pair<int, int> key;
        if (c.pokemon || c.face_down) key = {1, static_cast<int>(i)};
        else key = {0, s.card_def(c.uid)->index};
        auto [it, fresh] = key_to_group.try_emplace(key, static_cast<int>(groups.size()));
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(static_cast<int>(i));
    }
    constexpr std::size_t kMaxChoiceActions = 4096;
    std::vector<int> take(groups.size(), 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t g, int total) {
        if (out.size() >= kMaxChoiceActions) return;
        if (g == groups.size()) {
            if (total < pr.min_count) return;
            ActionRequest a;
            a.tool = Tool::ChooseCard;
            for (std::size_t k = 0; k < groups.size(); ++k) {
                for (int j = 0; j < take[k]; ++j) a.chosen_cards.push_back(groups[k][j]);
            }
            std::sort(a.chosen_cards.begin(), a.chosen_cards.end());
            out.push_back(std::move(a));
            return;
        }
        for (int n = 0; n <= static_cast<int>(groups[g].size()) && total + n <= pr.max_count; ++n) {
            take[g] = n;
            rec(g + 1, total + n);
        }
        take[g] = 0;
    };
    rec(0, 0);
}

}  // namespace

void between_turns_upkeep(GameState& s) {
    const int ended = s.active_player;
    for (int p : {ended, opponent_of(ended)}) {
        auto& pl = s.players[p];
        if (!pl.active) continue;
        auto& a = *pl.active;
        const std::string who = player_tag(p) + "'s " + label(a);
        if (a.has(Condition::Poisoned)) {
            a.damage_counters += 1;
            s.log(-1, who + " took 10 Poison damage");
        }
        if (a.has(Condition::Burned)) {
            a.damage_counters += 2;
            if (s.rng.coin()) {
                a.clear(Condition::Burned);
                s.log(-1, who + " took 20 Burn damage; heads, the Burn is healed");
            } else {
                s.log(-1, who + " took 20 Burn damage; tails, still Burned");
            }
        }
        if (a.has(Condition::Asleep)) {
            if (s.rng.coin()) {
                a.clear(Condition::Asleep);
                s.log(-1, who + " woke up (heads)");
            } else {
                s.log(-1, who + " is still Asleep (tails)");
            }
        }
        if (p == ended && a.has(Condition::Paralyzed)) {
            a.clear(Condition::Paralyzed);
            s.log(-1, who + " is no longer Paralyzed");
        }
    }
}

std::optional<GameResult> check_win(const GameState& s) {
    if (s.result) return s.result;
    if (s.phase == Phase::Setup) return std::nullopt;
    bool wins[2];
    for (int p : {0, 1}) {
        wins[p] = s.players[p].prizes.empty() || s.players[opponent_of(p)].pokemon_in_play() == 0;
    }
    auto reason = [&](int p) {
        return s.players[p].prizes.empty() ? WinReason::AllPrizes : WinReason::NoPokemon;
    };
    if (wins[0] && wins[1]) {
        const bool prizes = s.players[0].prizes.empty() || s.players[1].prizes.empty();
        return GameResult{std::nullopt, prizes ? WinReason::AllPrizes : WinReason::NoPokemon};
    }
    for (int p : {0, 1}) {
        if (wins[p]) return GameResult{p, reason(p)};
    }
    return std::nullopt;
}

void settle(GameState& s) {
    while (!s.finished() && !s.pending_choice && !s.tasks.empty()) {
        if (const auto* sp = std::get_if<task::SetupPlace>(&s.tasks.front())) {
            s.active_player = sp->player;
            break;
        }
        Task t = std::move(s.tasks.front());
        s.tasks.pop_front();
        if (!run_task(s, t)) {
            if (!s.pending_choice) throw EffectError("task suspended without a prompt");
            s.tasks.push_front(std::move(t));
        }
    }
}

GameState setup_game(std::shared_ptr<const CardPool> pool,
                     const Deck& deck0,
                     const Deck& deck1,
                     std::uint64_t seed,
                     const GameConfig& config) {
    config.validate();
    GameState s;
    s.pool = std::move(pool);
    s.config = config;
    s.rng = Rng(seed);
    const Deck* decks[2] = {&deck0, &deck1};
    for (int p : {0, 1}) {
        auto& pl = s.players[p];
        const auto& cards = decks[p]->cards;
        if (cards.size() != static_cast<std::size_t>(kDeckSize)) throw DeckError("Total != 60");
        pl.deck_id = decks[p]->deck_id;
        for (std::size_t i = 0; i < cards.size(); ++i) {
            pl.deck.push_back({static_cast<std::uint16_t>(kDeckSize * p + i), cards[i]});
            pl.decklist.push_back(cards[i]->index);
        }
        std::sort(pl.decklist.begin(), pl.decklist.end());
        if (!has_basic(pl.deck)) throw DeckError("deck " + pl.deck_id + " has no Basic Pokemon");
    }

    s.first_player = s.rng.coin() ? 0 : 1;
    s.log(-1, "coin flip: " + player_tag(s.first_player) + " goes first");
    for (auto& pl : s.players) s.rng.shuffle(pl.deck);
    for (int p : {0, 1}) {
        auto& pl = s.players[p];
        draw_cards(pl, config.opening_hand);
        while (!has_basic(pl.hand)) {
            ++pl.mulligans;
            s.log(p, player_tag(p) + " revealed a hand with no Basic Pokemon and took a mulligan");
            pl.deck.insert(pl.deck.end(), pl.hand.begin(), pl.hand.end());
            pl.hand.clear();
            s.rng.shuffle(pl.deck);
            draw_cards(pl, config.opening_hand);
        }
    }
    for (int p : {0, 1}) {
        const int extra = s.players[opponent_of(p)].mulligans;
        if (extra > 0) {
            draw_cards(s.players[p], extra);
            s.log(p, player_tag(p) + " drew " + std::to_string(extra) + " extra card(s) for mulligans");
        }
    }
    for (auto& pl : s.players) {
        for (int i = 0; i < config.prize_cards; ++i) {
            pl.prizes.push_back(pl.deck.back());
            pl.deck.pop_back();
        }
    }
    s.phase = Phase::Setup;
    s.tasks = {task::SetupPlace{s.first_player}, task::SetupPlace{opponent_of(s.first_player)},
               task::BeginTurn{s.first_player}};
    s.active_player = s.first_player;
    return s;
}

std::vector<ActionRequest> legal_actions(const GameState& s) {
    std::vector<ActionRequest> out;
    if (s.finished()) return out;
    if (s.pending_choice) {
        choice_actions(s, out);
        return out;
    }
    const int p = s.active_player;
    const auto& pl = s.players[p];
    auto push = [&](ActionRequest a) {
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    };
    auto make = [](Tool t, const std::string& source) {
        ActionRequest a;
        a.tool = t;
        a.source_card = source;
        return a;
    };
    ActionRequest pass;
    pass.tool = Tool::PassTurn;

    if (s.phase == Phase::Setup) {
        for (const auto& c : pl.hand) {
            if (!c.def->is_basic_pokemon()) continue;
            auto a = make(Tool::PlayPokemon, c.def->name);
            if (!pl.active) {
                a.position = Position::Active;
                push(a);
            } else if (pl.bench.size() < static_cast<std::size_t>(kBenchLimit)) {
                a.position = Position::Bench;
                push(a);
            }
        }
        if (pl.active) push(pass);
        return out;
    }
    if (s.phase != Phase::TurnMain) return out;
    if (pl.flags.actions >= s.config.max_actions_per_turn) {
        push(pass);
        return out;
    }

    const auto own = own_pokemon(pl);
    auto targeted = [&](Tool t, const std::string& source, const PokemonInPlay& pk) {
        auto a = make(t, source);
        a.target_card = pk.top().name;
        a.target_index = pk.field_index;
        push(std::move(a));
    };
    std::set<std::string> seen;
    for (const auto& c : pl.hand) {
        const CardDef& d = *c.def;
        if (!seen.insert(d.name).second) continue;
        switch (d.subkind) {
            case CardSubkind::Basic:
                if (pl.bench.size() < static_cast<std::size_t>(kBenchLimit)) {
                    auto a = make(Tool::PlayPokemon, d.name);
                    a.position = Position::Bench;
                    push(std::move(a));
                }
                break;
            case CardSubkind::Stage1:
            case CardSubkind::Stage2:
                for (const auto* pk : own) {
                    if (can_evolve_onto(s, *pk, d, false)) targeted(Tool::EvolvePokemon, d.name, *pk);
                }
                break;
            case CardSubkind::BasicEnergy:
            case CardSubkind::SpecialEnergy:
                if (!pl.flags.energy_attached) {
                    for (const auto* pk : own) targeted(Tool::AttachEnergy, d.name, *pk);
                }
                break;
            case CardSubkind::Supporter:
                if (!pl.flags.supporter_played && !supporter_blocked_first_turn(s))
                    push(make(Tool::UseSupporter, d.name));
                break;
            case CardSubkind::Item:
                push(make(Tool::UseItem, d.name));
                break;
            case CardSubkind::Tool:
                for (const auto* pk : own) {
                    if (!pk->tool) targeted(Tool::UseTool, d.name, *pk);
                }
                break;
            case CardSubkind::Stadium:
                if (!pl.flags.stadium_played && !(s.stadium && s.stadium->def->name == d.name))
                    push(make(Tool::PutStadium, d.name));
                break;
        }
    }
    if (s.stadium) {
        const auto& d = *s.stadium->def;
        if (s.stadium_owner == p && !pl.flags.stadium_played) push(make(Tool::DiscardStadium, d.name));
        if (d.effect != kNoProgram && !pl.flags.stadium_used) push(make(Tool::UseStadium, d.name));
    }
    for (const auto* pk : own) {
        const auto& ab = pk->top().ability;
        if (!ab || ab->effect == kNoProgram || pk->ability_used_turn == s.turn_number) continue;
        auto a = make(Tool::UseAbility, pk->top().name);
        a.source_index = pk->field_index;
        a.ability_name = ab->name;
        push(std::move(a));
    }
    if (pl.active) {
        const auto& act = *pl.active;
        const bool immobile = act.has(Condition::Asleep) || act.has(Condition::Paralyzed);
        if (!pl.flags.retreated && !immobile && !pl.bench.empty() &&
            static_cast<int>(act.energy.size()) >= act.retreat_cost())
            push(make(Tool::Retreat, act.top().name));
        if (!immobile && !attack_blocked_first_turn(s)) {
            for (const auto& atk : act.top().attacks) {
                if (!cost_satisfied(act.energy, atk.cost)) continue;
                auto a = make(Tool::Attack, act.top().name);
                a.attack_name = atk.name;
                push(std::move(a));
            }
        }
    }
    push(pass);
    return out;
}

std::optional<Rejection> validate_action(const GameState& s, int player, const ActionRequest& a) {
    Resolved r;
    return check(s, player, a, r);
}

ApplyResult apply_action(GameState& s, int player, const ActionRequest& a) {
    ApplyResult res;
    res.first_event = s.action_log.size();
    Resolved r;
    if (auto rej = check(s, player, a, r)) {
        res.rejection = *rej;
        return res;
    }
    execute(s, player, a, r);
    settle(s);
    res.accepted = true;
    return res;
}

ApplyResult apply_tool_call(GameState& s, int player, const ToolCall& call) {
    auto parsed = parse_tool_call(call);
    if (auto* rej = std::get_if<Rejection>(&parsed)) {
        ApplyResult res;
        res.first_event = s.action_log.size();
        res.rejection = *rej;
        return res;
    }
    return apply_action(s, player, std::get<ActionRequest>(parsed));
}

void run_program(GameState& s, ProgramId program, int controller, std::uint16_t source_pokemon, EffectKind kind) {
    push_front(s, std::vector<Task>{effect_task(kind, program, controller, kNoCard, source_pokemon),
                                    task::ResolveKnockouts{}});
    settle(s);
}

}  // namespace tcg
