#pragma once

// Shared test oracles: shipped-data loaders, the hidden-information leak
// checks, the legal-action completeness check, and a random-play fuzzer.

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcg/action.hpp"
#include "tcg/card.hpp"
#include "tcg/rng.hpp"
#include "tcg/state.hpp"

namespace tcg::testing {

std::string data_dir();
std::shared_ptr<const CardPool> shipped_pool();
Deck shipped_deck(const std::string& deck_id);
const std::vector<std::string>& shipped_deck_ids();

// Names of every card that has been in a public zone (boards, attachments,
// discards, stadium) or was named by a search reveal, accumulated over a game.
class PublicNames {
public:
    void observe(const GameState& s);
    bool contains(const std::string& name) const { return names_.count(name) > 0; }

private:
    std::set<std::string> names_;
    std::size_t log_seen_ = 0;
};

// Strict oracle: the viewer's observation (minus event texts) must not change
// when the hidden cards are shuffled among hidden positions: the opponent's
// hand, deck and prizes jointly, and the viewer's own deck and prizes (unless
// the viewer is currently choosing from their deck). Returns "" when it holds.
// `view` defaults to the real observation builder; tests substitute leaky ones.
using ViewFn = std::function<nlohmann::json(const GameState&, int)>;
std::string leak_check_permutation(const GameState& s, int viewer, Rng& rng, int trials = 1, const ViewFn& view = {});

// Event texts in the observation may only name cards that are public by now.
std::string leak_check_texts(const GameState& s, int viewer, const PublicNames& pub);

// Both of the above plus a string-containment check: no card_id that exists
// only in the opponent's hidden zones appears in the serialized observation.
std::string leak_check(const GameState& s, int viewer, Rng& rng, const PublicNames& pub);

// Candidate instantiations built independently of legal_actions: every
// hand card with every tool, targets, attacks (including foreign attack
// names), abilities, retreat, stadium actions, and pass.
std::vector<ActionRequest> candidate_universe(const GameState& s);

struct CompletenessReport {
    std::string error;  // empty when the state passes
    int listed = 0;
    int rejected_candidates = 0;
};

// Every listed action executes on a clone (with invariants intact); every
// universe candidate is accepted iff it is listed and rejected candidates
// leave the state untouched. For pending choices: counts, ranges, duplicates.
CompletenessReport check_completeness(const GameState& s);

struct FuzzOptions {
    int games = 100;
    std::uint64_t seed = 1;
    int leak_every = 1;           // leak-check every n-th decision (0: never)
    int completeness_every = 0;   // completeness-check every n-th decision (0: never)
    bool cross_decks = true;      // alternate mirror and cross-deck pairings
    GameConfig config;
    // Optional per-state hook; return non-empty to record a failure.
    std::function<std::string(const GameState&)> hook;
};

struct FuzzReport {
    long games = 0;
    long finished = 0;
    long steps = 0;
    long accepted_then_failed = 0;  // a listed action was rejected or threw
    long conservation_failures = 0;
    long invariant_failures = 0;
    long leak_failures = 0;
    long leak_checks = 0;
    long completeness_failures = 0;
    long completeness_checks = 0;
    long hook_failures = 0;
    std::vector<std::string> errors;  // first few failure descriptions
};

// Random-policy games driven directly against the engine.
FuzzReport fuzz_random_games(const FuzzOptions& options);

// States sampled from random games: one every `stride` decisions.
std::vector<GameState> sample_states(int count, std::uint64_t seed, int stride = 7);

}  // namespace tcg::testing
