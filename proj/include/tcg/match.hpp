#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "tcg/card.hpp"
#include "tcg/harness.hpp"
#include "tcg/state.hpp"

namespace tcg {

struct MatchSpec {
    std::string match_id = "match";
    std::shared_ptr<const CardPool> pool;
    std::array<Deck, 2> decks;
    std::uint64_t seed = 0;
    GameConfig game;
    std::array<HarnessConfig, 2> harness;
    std::array<std::string, 2> agent_ids{"p0", "p1"};
};

struct MatchOutcome {
    GameResult result;
    int turns = 0;
    std::array<DecisionAccounting, 2> accounting;
    std::uint64_t final_hash = 0;
    std::int64_t decisions = 0;

    double score(int seat) const { return result.score(seat); }
};

struct LogOptions {
    std::ostream* out = nullptr;  // no trajectory when null
    bool observations = true;     // one observation record per decision
};

// Seed streams derived from MatchSpec::seed.
inline constexpr std::uint64_t kGameSeedStream = 0;
inline constexpr std::uint64_t kFallbackSeedStream = 2;  // + seat
inline constexpr std::uint64_t kAgentSeedStream = 4;     // + seat

// Upper bound on decisions per game; exceeding it is an engine bug.
inline constexpr std::int64_t kMaxDecisionsPerGame = 200000;

// Plays one game to completion. Agents are reset via begin_game first.
MatchOutcome play_match(const MatchSpec& spec, std::array<Agent*, 2> agents, const LogOptions& log = {});

// Decklist entries (card_id, count) in first-appearance order.
nlohmann::json deck_to_json(const Deck& deck);
Deck deck_from_json(const nlohmann::json& j, const CardPool& pool);

nlohmann::json result_to_json(const GameResult& r);

}  // namespace tcg
