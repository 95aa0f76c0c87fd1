#include "tcg/match.hpp"

#include <ostream>
#include <stdexcept>

#include "tcg/engine.hpp"
#include "tcg/rng.hpp"
#include "tcg/snapshot.hpp"
#include "tcg/trajectory.hpp"

namespace tcg {

using json = nlohmann::json;

json deck_to_json(const Deck& deck) {
    json entries = json::array();
    for (const CardDef* c : deck.cards) {
        if (!entries.empty() && entries.back()[0] == c->card_id) {
            entries.back()[1] = entries.back()[1].get<int>() + 1;
        } else {
            entries.push_back(json::array({c->card_id, 1}));
        }
    }
    return {{"deck_id", deck.deck_id}, {"archetype", std::string(to_string(deck.archetype))}, {"entries", entries}};
}

Deck deck_from_json(const json& j, const CardPool& pool) {
    DeckList list;
    list.deck_id = j.at("deck_id").get<std::string>();
    auto arch = parse_archetype(j.at("archetype").get<std::string>());
    if (!arch) throw DeckError("unknown archetype in log");
    list.archetype = *arch;
    for (const auto& e : j.at("entries")) list.entries.push_back({e.at(0).get<std::string>(), e.at(1).get<int>()});
    return load_deck(list, pool);
}

json result_to_json(const GameResult& r) {
    return {{"winner", r.winner ? json(*r.winner) : json(nullptr)}, {"reason", std::string(to_string(r.reason))}};
}

namespace {

class Writer {
public:
    explicit Writer(const LogOptions& opt) : out_(opt.out) {}

    void line(const json& j) {
        if (out_) *out_ << j.dump() << '\n';
    }
    void record(const char* kind, int turn, int actor, json payload, std::uint64_t hash) {
        if (!out_) return;
        line({{"kind", kind}, {"turn", turn}, {"actor", actor}, {"payload", std::move(payload)}, {"post_state_hash", hash_hex(hash)}});
    }
    bool enabled() const { return out_ != nullptr; }

private:
    std::ostream* out_;
};

}  // namespace

MatchOutcome play_match(const MatchSpec& spec, std::array<Agent*, 2> agents, const LogOptions& log) {
    for (const auto& h : spec.harness) h.validate();
    GameState s = setup_game(spec.pool, spec.decks[0], spec.decks[1], derive_seed(spec.seed, kGameSeedStream), spec.game);

    std::array<Seat, 2> seats;
    for (int i = 0; i < 2; ++i) {
        seats[i].agent = agents[i];
        seats[i].config = spec.harness[i];
        seats[i].rng = Rng(derive_seed(spec.seed, kFallbackSeedStream + static_cast<std::uint64_t>(i)));
        seats[i].match_id = spec.match_id;
        agents[i]->begin_game(derive_seed(spec.seed, kAgentSeedStream + static_cast<std::uint64_t>(i)), i);
    }

    Writer w(log);
    std::uint64_t hash = w.enabled() ? state_hash(s) : 0;
    if (w.enabled()) {
        w.line({{"kind", "header"},
                {"log_version", kLogVersion},
                {"pool_version", spec.pool->pool_version},
                {"match_id", spec.match_id},
                {"seed", spec.seed},
                {"decks", json::array({deck_to_json(spec.decks[0]), deck_to_json(spec.decks[1])})},
                {"config", config_to_json(spec.game)},
                {"harness", json::array({harness_config_to_json(spec.harness[0]), harness_config_to_json(spec.harness[1])})},
                {"agents", spec.agent_ids},
                {"post_state_hash", hash_hex(hash)}});
        // Setup events (coin flip, mulligans) precede the first decision.
        for (const auto& e : s.action_log) w.record("event", e.turn, e.actor, {{"text", e.text}}, hash);
    }

    MatchOutcome outcome;
    while (!s.finished()) {
        if (++outcome.decisions > kMaxDecisionsPerGame) throw std::logic_error("game exceeded the decision limit");
        const int p = s.acting_player();
        const int turn = s.turn_number;
        DecisionOutcome d = decision_step(seats[p], s);
        if (!w.enabled()) continue;
        if (log.observations) w.record("observation", turn, p, d.observation, hash);
        for (auto& q : d.queries) w.record("query", turn, p, std::move(q), hash);
        for (const auto& r : d.rejected) {
            w.record("rejected", turn, p,
                     {{"attempt", r.attempt}, {"call", r.call}, {"status", r.status}, {"code", r.code}, {"message", r.message}},
                     hash);
        }
        hash = state_hash(s);
        json action = action_to_json(d.executed);
        action["fallback"] = d.fallback;
        w.record("action", turn, p, std::move(action), hash);
        for (std::size_t i = d.first_event; i < s.action_log.size(); ++i) {
            const auto& e = s.action_log[i];
            w.record("event", e.turn, e.actor, {{"text", e.text}}, hash);
        }
    }

    outcome.result = *s.result;
    outcome.turns = s.turn_number;
    outcome.accounting = {seats[0].accounting, seats[1].accounting};
    outcome.final_hash = state_hash(s);

    json summary = result_to_json(outcome.result);
    summary["turns"] = outcome.turns;
    summary["accounting"] = json::array({accounting_to_json(outcome.accounting[0]), accounting_to_json(outcome.accounting[1])});
    w.record("result", s.turn_number, -1, summary, outcome.final_hash);
    for (int i = 0; i < 2; ++i) {
        json mine = summary;
        mine["seat"] = i;
        agents[i]->end_game(mine);
    }
    return outcome;
}

}  // namespace tcg
