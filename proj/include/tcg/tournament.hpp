#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcg/agents.hpp"
#include "tcg/card.hpp"
#include "tcg/harness.hpp"
#include "tcg/rating.hpp"
#include "tcg/state.hpp"

namespace tcg {

struct GameAssignment {
    int index = 0;
    int cycle = 0;   // rating period (round-robin) or round (anchored)
    int seat0 = 0;   // participant index playing first seat
    int seat1 = 0;
    int pair = 0;    // index of the unordered pair
    int game_in_pair = 0;
};

// C(n,2)*M games in M cycles; each cycle plays every pair once, and the
// lower-indexed participant takes seat 0 in even cycles. Throws
// std::invalid_argument for n < 2 or M < 1.
std::vector<GameAssignment> schedule_round_robin(int n, int games_per_pair);

enum class TournamentMode : std::uint8_t { RoundRobin, Anchored };
enum class EvolutionMechanism : std::uint8_t { None, Scripted, External };

struct AnchorSpec {
    AgentSpec agent;
    Rating rating;  // frozen on load
};

struct TournamentSpec {
    TournamentMode mode = TournamentMode::RoundRobin;
    std::vector<AgentSpec> participants;  // round robin
    std::vector<AnchorSpec> anchors;      // anchored
    AgentSpec evolving;                   // anchored
    EvolutionMechanism mechanism = EvolutionMechanism::None;
    std::string initial_state;            // optional directory copied to state_r0

    std::string mirror_deck;  // mirror mode when set
    std::vector<std::pair<std::string, std::string>> deck_pairs;  // cross-deck table otherwise

    int games_per_pair = 5;
    int rounds = 8;
    int games_per_anchor = 2;
    std::uint64_t master_seed = 0;

    std::string pool_path = "data/pool.json";
    std::string deck_dir = "data/decks";
    HarnessConfig harness;
    GameConfig game;
    int workers = 0;  // 0: hardware concurrency
    bool log_observations = false;
    int evolve_deadline_ms = 60000;

    void validate() const;  // throws ConfigError
};

// Manifest (JSON). Unknown keys are rejected with ConfigError. Relative
// pool/deck paths are resolved against `base_dir` when given.
TournamentSpec parse_manifest(const nlohmann::json& j, const std::string& base_dir = {});
TournamentSpec load_manifest(const std::string& path);
nlohmann::json manifest_to_json(const TournamentSpec& spec);

struct MatchRecord {
    std::string game_id;
    int cycle = 0;
    std::array<std::string, 2> agents;
    std::array<std::string, 2> decks;
    std::uint64_t seed = 0;
    std::array<double, 2> scores{0.5, 0.5};
    std::optional<int> winner;
    std::string reason;
    int turns = 0;
    std::array<DecisionAccounting, 2> accounting;
    std::string log_path;  // relative to the results directory
    std::string final_hash;
};
nlohmann::json record_to_json(const MatchRecord& r);
MatchRecord record_from_json(const nlohmann::json& j);

// Glicko table + head-to-head matrix (draws 0.5; null for unplayed pairs) +
// per-agent invalid rates and mean tool calls per game.
nlohmann::json aggregate_metrics(const std::vector<MatchRecord>& records,
                                 const std::vector<std::string>& ids,
                                 const RatingTable& ratings);

struct TournamentResult {
    std::vector<MatchRecord> records;
    RatingTable ratings;
    nlohmann::json metrics;
    std::vector<nlohmann::json> snapshots;      // anchored: one per round
    std::vector<nlohmann::json> evolution_log;  // anchored: one per round
    RatingTable anchors_before;                 // anchored
};

// Observer for progress output; called after each game.
using ProgressFn = std::function<void(const MatchRecord&, std::size_t done, std::size_t total)>;

// Runs the tournament and writes the results directory:
//   manifest.json, records.jsonl, ratings.json, metrics.json, games/*.jsonl,
//   and for anchored runs snapshots.json, evolution.jsonl, state/state_rK/.
// Files are written atomically. With empty `results_dir` nothing is written.
TournamentResult run_tournament(const TournamentSpec& spec, const std::string& results_dir,
                                const ProgressFn& progress = {});

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace tcg
