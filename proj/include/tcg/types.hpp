#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tcg {

enum class EnergyType : std::uint8_t {
    Grass,
    Fire,
    Water,
    Lightning,
    Psychic,
    Fighting,
    Darkness,
    Metal,
    Colorless
};
inline constexpr int kEnergyTypeCount = 9;

enum class CardKind : std::uint8_t { Pokemon, Energy, Trainer };

enum class CardSubkind : std::uint8_t {
    // Pokemon
    Basic,
    Stage1,
    Stage2,
    // Energy
    BasicEnergy,
    SpecialEnergy,
    // Trainer
    Item,
    Supporter,
    Tool,
    Stadium
};

enum class Condition : std::uint8_t { Asleep, Paralyzed, Confused, Poisoned, Burned };
inline constexpr int kConditionCount = 5;

enum class Phase : std::uint8_t { Setup, TurnMain, BetweenTurns, Finished };

enum class WinReason : std::uint8_t { AllPrizes, NoPokemon, DeckOut, TurnCap };

inline constexpr int kBenchLimit = 5;
inline constexpr int kDeckSize = 60;
inline constexpr int kMaxCopies = 4;
inline constexpr std::uint16_t kNoCard = 0xFFFF;

std::string_view to_string(EnergyType t);
std::string_view to_string(CardKind k);
std::string_view to_string(CardSubkind s);
std::string_view to_string(Condition c);
std::string_view to_string(Phase p);
std::string_view to_string(WinReason r);

std::optional<EnergyType> parse_energy_type(std::string_view s);
std::optional<CardKind> parse_card_kind(std::string_view s);
std::optional<CardSubkind> parse_card_subkind(std::string_view s);
std::optional<Condition> parse_condition(std::string_view s);
std::optional<Phase> parse_phase(std::string_view s);
std::optional<WinReason> parse_win_reason(std::string_view s);

CardKind kind_of(CardSubkind s);

// Raised for malformed configuration or input files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an effect program refers to an object that does not exist.
// This signals a card-definition bug rather than an agent mistake.
class EffectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tcg
