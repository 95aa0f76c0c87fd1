#include "tcg/types.hpp"

#include <array>
#include <utility>

namespace tcg {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<std::string_view, E>, N>& table, std::string_view s) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, E>, N>& table, E value) {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::array<std::pair<std::string_view, EnergyType>, 9> kEnergyNames{{
    {"Grass", EnergyType::Grass},
    {"Fire", EnergyType::Fire},
    {"Water", EnergyType::Water},
    {"Lightning", EnergyType::Lightning},
    {"Psychic", EnergyType::Psychic},
    {"Fighting", EnergyType::Fighting},
    {"Darkness", EnergyType::Darkness},
    {"Metal", EnergyType::Metal},
    {"Colorless", EnergyType::Colorless},
}};

constexpr std::array<std::pair<std::string_view, CardKind>, 3> kKindNames{{
    {"Pokemon", CardKind::Pokemon},
    {"Energy", CardKind::Energy},
    {"Trainer", CardKind::Trainer},
}};

constexpr std::array<std::pair<std::string_view, CardSubkind>, 9> kSubkindNames{{
    {"Basic", CardSubkind::Basic},
    {"Stage1", CardSubkind::Stage1},
    {"Stage2", CardSubkind::Stage2},
    {"BasicEnergy", CardSubkind::BasicEnergy},
    {"SpecialEnergy", CardSubkind::SpecialEnergy},
    {"Item", CardSubkind::Item},
    {"Supporter", CardSubkind::Supporter},
    {"Tool", CardSubkind::Tool},
    {"Stadium", CardSubkind::Stadium},
}};

constexpr std::array<std::pair<std::string_view, Condition>, 5> kConditionNames{{
    {"Asleep", Condition::Asleep},
    {"Paralyzed", Condition::Paralyzed},
    {"Confused", Condition::Confused},
    {"Poisoned", Condition::Poisoned},
    {"Burned", Condition::Burned},
}};

constexpr std::array<std::pair<std::string_view, Phase>, 4> kPhaseNames{{
    {"Setup", Phase::Setup},
    {"TurnMain", Phase::TurnMain},
    {"BetweenTurns", Phase::BetweenTurns},
    {"Finished", Phase::Finished},
}};

constexpr std::array<std::pair<std::string_view, WinReason>, 4> kReasonNames{{
    {"AllPrizes", WinReason::AllPrizes},
    {"NoPokemon", WinReason::NoPokemon},
    {"DeckOut", WinReason::DeckOut},
    {"TurnCap", WinReason::TurnCap},
}};

}  // namespace

std::string_view to_string(EnergyType t) { return name_of(kEnergyNames, t); }
std::string_view to_string(CardKind k) { return name_of(kKindNames, k); }
std::string_view to_string(CardSubkind s) { return name_of(kSubkindNames, s); }
std::string_view to_string(Condition c) { return name_of(kConditionNames, c); }
std::string_view to_string(Phase p) { return name_of(kPhaseNames, p); }
std::string_view to_string(WinReason r) { return name_of(kReasonNames, r); }

std::optional<EnergyType> parse_energy_type(std::string_view s) { return lookup(kEnergyNames, s); }
std::optional<CardKind> parse_card_kind(std::string_view s) { return lookup(kKindNames, s); }
std::optional<CardSubkind> parse_card_subkind(std::string_view s) { return lookup(kSubkindNames, s); }
std::optional<Condition> parse_condition(std::string_view s) { return lookup(kConditionNames, s); }
std::optional<Phase> parse_phase(std::string_view s) { return lookup(kPhaseNames, s); }
std::optional<WinReason> parse_win_reason(std::string_view s) { return lookup(kReasonNames, s); }

CardKind kind_of(CardSubkind s) {
    switch (s) {
        case CardSubkind::Basic:
        case CardSubkind::Stage1:
        case CardSubkind::Stage2:
            return CardKind::Pokemon;
        case CardSubkind::BasicEnergy:
        case CardSubkind::SpecialEnergy:
            return CardKind::Energy;
        default:
            return CardKind::Trainer;
    }
}

}  // namespace tcg
