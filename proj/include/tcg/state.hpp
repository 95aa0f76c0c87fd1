#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tcg/card.hpp"
#include "tcg/rng.hpp"
#include "tcg/types.hpp"

namespace tcg {

inline int opponent_of(int player) { return 1 - player; }

// One physical card. uid is unique within a game (player p owns 60p..60p+59).
struct Card {
    std::uint16_t uid = kNoCard;
    const CardDef* def = nullptr;

    bool operator==(const Card& o) const { return uid == o.uid; }
};

struct PokemonInPlay {
    std::vector<Card> stack;  // bottom = Basic, back = current stage
    std::vector<Card> energy;
    std::optional<Card> tool;
    int damage_counters = 0;
    std::uint8_t conditions = 0;
    int entered_turn = 0;
    bool evolved_this_turn = false;
    int field_index = 0;
    int ability_used_turn = -1;

    // Stable identity while in play: uid of the bottom card.
    std::uint16_t id() const { return stack.front().uid; }
    const CardDef& top() const { return *stack.back().def; }
    int max_hp() const { return top().hp + (tool ? tool->def->tool.hp_bonus : 0); }
    int remaining_hp() const { return max_hp() - damage_counters * 10; }
    bool knocked_out() const { return damage_counters * 10 >= max_hp(); }
    int retreat_cost() const;

    bool has(Condition c) const { return (conditions >> static_cast<int>(c)) & 1U; }
    void set(Condition c);
    void clear(Condition c) { conditions &= static_cast<std::uint8_t>(~(1U << static_cast<int>(c))); }
    void clear_all_conditions() { conditions = 0; }
    int card_count() const { return static_cast<int>(stack.size() + energy.size() + (tool ? 1 : 0)); }
};

// A damage modifier from an effect. pokemon == kNoCard means player-wide.
struct DamageModifier {
    std::uint16_t pokemon = kNoCard;
    bool taken = true;
    int delta = 0;
    int expires_after_turn = 0;
};

struct TurnFlags {
    bool energy_attached = false;
    bool supporter_played = false;
    bool stadium_played = false;
    bool stadium_used = false;
    bool retreated = false;
    int actions = 0;
};

struct PlayerState {
    std::vector<Card> deck;  // back() is the top card
    std::vector<Card> hand;
    std::vector<Card> discard;
    std::vector<Card> prizes;
    std::optional<PokemonInPlay> active;
    std::vector<PokemonInPlay> bench;
    TurnFlags flags;
    std::vector<DamageModifier> modifiers;
    std::vector<int> decklist;  // sorted pool indices of the registered 60 cards
    std::string deck_id;
    int mulligans = 0;

    int pokemon_in_play() const { return (active ? 1 : 0) + static_cast<int>(bench.size()); }
    PokemonInPlay* find(std::uint16_t id);
    const PokemonInPlay* find(std::uint16_t id) const;
    const PokemonInPlay* find_by_field_index(int field_index) const;
    int free_field_index() const;
};

struct ChoiceCandidate {
    std::uint16_t uid = kNoCard;  // card uid, or a Pokemon's id() when `pokemon`
    bool face_down = false;
    bool pokemon = false;

    bool operator==(const ChoiceCandidate& o) const = default;
};

struct ChoicePrompt {
    int chooser = 0;
    std::vector<ChoiceCandidate> candidates;
    int min_count = 0;
    int max_count = 0;
    std::string reason;
};

enum class EffectKind : std::uint8_t { Trainer, Ability, Stadium, Attack, OnAttach };

struct EffectFrame {
    ProgramId program = kNoProgram;
    int pc = 0;
};

struct EffectContext {
    int controller = 0;
    std::uint16_t source_card = kNoCard;     // the card whose effect runs
    std::uint16_t source_pokemon = kNoCard;  // Pokemon the effect belongs to, if any
    std::uint16_t selected = kNoCard;        // bound by RequireChoice
    int last_selection = 0;
    int bonus_damage = 0;
    bool cancel_attack = false;
    int attack_index = -1;
    int stage = 0;  // multi-prompt ops keep their progress here
    std::vector<std::uint16_t> scratch;
};

namespace task {
struct SetupPlace {
    int player = 0;
};
struct BeginTurn {
    int player = 0;
};
struct EndTurn {};
struct Upkeep {};
struct ResolveKnockouts {};
struct TakePrizes {
    int player = 0;
    int count = 0;
};
struct CheckWin {};
struct Promote {
    int player = 0;
};
struct Retreat {
    int player = 0;
    int stage = 0;
};
struct RunEffect {
    EffectKind kind = EffectKind::Trainer;
    std::vector<EffectFrame> frames;
    EffectContext ctx;
};
}  // namespace task

using Task = std::variant<task::SetupPlace,
                          task::BeginTurn,
                          task::EndTurn,
                          task::Upkeep,
                          task::ResolveKnockouts,
                          task::TakePrizes,
                          task::CheckWin,
                          task::Promote,
                          task::Retreat,
                          task::RunEffect>;

struct GameResult {
    std::optional<int> winner;  // empty on a draw
    WinReason reason = WinReason::AllPrizes;

    double score(int player) const {
        if (!winner) return 0.5;
        return *winner == player ? 1.0 : 0.0;
    }
    bool operator==(const GameResult&) const = default;
};

struct GameConfig {
    int turn_cap = 200;
    bool first_player_may_attack = false;
    bool first_player_may_play_supporter = false;
    bool evolve_on_first_turns = false;
    int max_actions_per_turn = 128;
    int prize_cards = 6;
    int opening_hand = 7;

    void validate() const;
    bool operator==(const GameConfig&) const = default;
};

// Public record of something that happened. Texts never name cards that
// moved between hidden zones.
struct Event {
    int turn = 0;
    int actor = -1;  // -1: engine
    std::string text;
};

struct GameState {
    std::shared_ptr<const CardPool> pool;
    GameConfig config;
    std::array<PlayerState, 2> players;
    std::optional<Card> stadium;
    int stadium_owner = -1;
    int turn_number = 0;
    int active_player = 0;
    int first_player = 0;
    Phase phase = Phase::Setup;
    std::optional<ChoicePrompt> pending_choice;
    std::optional<std::vector<std::uint16_t>> choice_result;
    std::deque<Task> tasks;
    std::optional<GameResult> result;
    Rng rng;
    std::vector<Event> action_log;

    int acting_player() const { return pending_choice ? pending_choice->chooser : active_player; }
    bool finished() const { return phase == Phase::Finished; }

    // Locates a card anywhere in the game by uid.
    const CardDef* card_def(std::uint16_t uid) const;
    PokemonInPlay* find_pokemon(std::uint16_t id, int* owner = nullptr);
    const PokemonInPlay* find_pokemon(std::uint16_t id, int* owner = nullptr) const;
    void log(int actor, std::string text) { action_log.push_back({turn_number, actor, std::move(text)}); }
};

}  // namespace tcg
