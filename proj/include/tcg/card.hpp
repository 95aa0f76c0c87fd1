#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tcg/types.hpp"

namespace tcg {

struct CardDef;

// Index of an EffectProgram inside CardPool::programs; kNoProgram when absent.
using ProgramId = std::int32_t;
inline constexpr ProgramId kNoProgram = -1;

// Zones an effect op can read from or write to. `Attached` is the Energy
// attached to the Pokemon the effect originates from.
enum class Zone : std::uint8_t { Deck, Hand, Discard, Bench, Attached };

// Which Pokemon an op acts on. The *Choose selectors suspend the program with
// a ChoicePrompt; `Selected` reuses the Pokemon bound by a RequireChoice op;
// `Main` feeds the attack's main damage; `Player` is player-wide.
enum class Target : std::uint8_t {
    Self,
    OwnActive,
    OppActive,
    OwnChoose,
    OwnBenchChoose,
    OppChoose,
    OppBenchChoose,
    OppBenchAll,
    Selected,
    Main,
    Player
};

enum class Counter : std::uint8_t {
    OwnBench,
    OppBench,
    SelfEnergy,
    OppActiveEnergy,
    OwnHand,
    OppPrizesTaken,
    OwnPrizesTaken,
    SelfDamageCounters,
    OppActiveDamageCounters,
    LastSelection,
    OwnDiscardEnergy
};

enum class Duration : std::uint8_t { ThisTurn, NextOpponentTurn };

enum class Side : std::uint8_t { Self, Opponent, Source };

std::string_view to_string(Zone z);
std::string_view to_string(Target t);
std::string_view to_string(Counter c);
std::string_view to_string(Duration d);
std::string_view to_string(Side s);

struct CardFilter {
    std::optional<CardKind> kind;
    std::optional<CardSubkind> subkind;
    std::optional<EnergyType> type;
    std::optional<std::string> name;

    bool matches(const CardDef& card) const;
    bool empty() const { return !kind && !subkind && !type && !name; }
};

namespace op {

struct Draw {
    int count = 0;
};
struct DrawTo {
    int hand_size = 0;
};
struct SearchZone {
    Zone zone = Zone::Deck;
    CardFilter filter;
    int max = 1;
    int min = 0;
    Zone to = Zone::Hand;
    bool reveal = false;
};
struct MoveCards {
    Zone from = Zone::Hand;
    Zone to = Zone::Deck;
    CardFilter filter;
    bool all = false;
    int max = 1;
    int min = 0;
};
struct AttachEnergyFrom {
    Zone from = Zone::Deck;
    CardFilter filter;
    int max = 1;
    Target target = Target::Self;
};
struct Damage {
    int amount = 0;
    Target target = Target::OppActive;
};
struct DamagePerCount {
    int unit = 0;
    Counter counter = Counter::OwnBench;
    Target target = Target::Main;
};
struct Heal {
    int amount = 0;
    Target target = Target::Self;
};
struct Discard {
    Zone zone = Zone::Hand;
    CardFilter filter;
    bool all = false;
    int max = 1;
    int min = 0;
};
struct ApplyCondition {
    Condition condition = Condition::Asleep;
    Target target = Target::OppActive;
};
struct SwitchActive {
    Side side = Side::Self;
};
struct Shuffle {
    Zone zone = Zone::Deck;
};
struct CoinFlip {
    ProgramId heads = kNoProgram;
    ProgramId tails = kNoProgram;
};
struct ModifyDamage {
    bool taken = true;  // false: modifies damage dealt
    int delta = 0;
    Duration duration = Duration::ThisTurn;
    Target target = Target::Self;
};
struct RequireChoice {
    Target target = Target::OppChoose;
};
// Evolves a Basic in play straight to a Stage 2 from hand.
struct EvolveFromHand {};
struct EndEffect {
    bool cancel_attack = false;
};

}  // namespace op

using EffectOp = std::variant<op::Draw,
                              op::DrawTo,
                              op::SearchZone,
                              op::MoveCards,
                              op::AttachEnergyFrom,
                              op::Damage,
                              op::DamagePerCount,
                              op::Heal,
                              op::Discard,
                              op::ApplyCondition,
                              op::SwitchActive,
                              op::Shuffle,
                              op::CoinFlip,
                              op::ModifyDamage,
                              op::RequireChoice,
                              op::EvolveFromHand,
                              op::EndEffect>;

// Stable op-kind names, indexed by EffectOp::index().
std::string_view op_name(const EffectOp& op);
inline constexpr int kOpKindCount = static_cast<int>(std::variant_size_v<EffectOp>);
std::string_view op_kind_name(int index);

struct EffectProgram {
    std::vector<EffectOp> ops;
};

struct AttackDef {
    std::string name;
    std::vector<EnergyType> cost;
    int base_damage = 0;
    ProgramId effect = kNoProgram;
    std::string text;
};

struct AbilityDef {
    std::string name;
    ProgramId effect = kNoProgram;
    std::string text;
};

// Passive modifiers granted by a Pokemon Tool while attached.
struct ToolModifiers {
    int hp_bonus = 0;
    int damage_dealt = 0;
    int damage_taken = 0;
    int retreat_delta = 0;
};

struct CardDef {
    std::string card_id;
    std::string name;
    CardKind kind = CardKind::Trainer;
    CardSubkind subkind = CardSubkind::Item;
    std::optional<std::string> evolves_from;
    int hp = 0;
    std::vector<EnergyType> types;
    std::optional<EnergyType> weakness;
    int retreat_cost = 0;
    int prize_value = 1;
    std::vector<AttackDef> attacks;
    std::optional<AbilityDef> ability;
    // Trainer effect, Stadium activation, or Special Energy on-attach effect.
    ProgramId effect = kNoProgram;
    // Energy cards provide one unit of any one of these types.
    std::vector<EnergyType> provides;
    ToolModifiers tool;
    std::string rules_text;
    int index = -1;

    bool is_pokemon() const { return kind == CardKind::Pokemon; }
    bool is_basic_pokemon() const { return subkind == CardSubkind::Basic; }
    bool is_evolution() const { return subkind == CardSubkind::Stage1 || subkind == CardSubkind::Stage2; }
    bool is_energy() const { return kind == CardKind::Energy; }
    bool is_basic_energy() const { return subkind == CardSubkind::BasicEnergy; }
    bool is_trainer() const { return kind == CardKind::Trainer; }
    const AttackDef* find_attack(std::string_view attack_name) const;
};

// Immutable once built; games share one pool through a shared_ptr.
struct CardPool {
    std::string pool_version;
    std::vector<CardDef> cards;
    std::vector<EffectProgram> programs;
    std::unordered_map<std::string, int> by_id;
    std::unordered_map<std::string, int> by_name;

    const CardDef* find(std::string_view card_id) const;
    const CardDef* find_by_name(std::string_view name) const;
    const EffectProgram& program(ProgramId id) const;
};

enum class Archetype : std::uint8_t { CharizardLike, GardevoirLike, MiraidonLike, GholdengoLike, LugiaLike };
std::string_view to_string(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view s);

struct DeckEntry {
    std::string card_id;
    int count = 0;
};

struct DeckList {
    std::string pool_version;
    std::string deck_id;
    Archetype archetype = Archetype::CharizardLike;
    std::vector<DeckEntry> entries;
};

// A decklist resolved against a pool: 60 card references in list order.
struct Deck {
    std::string deck_id;
    Archetype archetype = Archetype::CharizardLike;
    std::vector<const CardDef*> cards;

    int count_kind(CardKind k) const;
};

// Input errors carry the location (syntax) or the offending card (semantic).
class PoolError : public std::runtime_error {
public:
    PoolError(const std::string& what, int line = 0, int column = 0, std::string card_id = {})
        : std::runtime_error(what), line_(line), column_(column), card_id_(std::move(card_id)) {}
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& card_id() const { return card_id_; }

private:
    int line_;
    int column_;
    std::string card_id_;
};

class DeckError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kPoolFormatVersion = "1";

std::shared_ptr<const CardPool> parse_card_pool(std::string_view document);
std::shared_ptr<const CardPool> load_card_pool(const std::string& path);

DeckList parse_decklist(std::string_view document);
DeckList load_decklist(const std::string& path);

Deck load_deck(const DeckList& list, const CardPool& pool);

// Number of ops of each kind used anywhere in the pool, indexed like EffectOp.
std::vector<int> op_usage(const CardPool& pool);

}  // namespace tcg
