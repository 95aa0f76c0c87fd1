#include "tcg/snapshot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace tcg {

using json = nlohmann::json;

namespace {

json card_json(const Card& c) { return json::array({c.uid, c.def->card_id}); }

json cards_json(const std::vector<Card>& cards) {
    json out = json::array();
    for (const auto& c : cards) out.push_back(card_json(c));
    return out;
}

json pokemon_json(const PokemonInPlay& p) {
    return {
        {"stack", cards_json(p.stack)},
        {"energy", cards_json(p.energy)},
        {"tool", p.tool ? card_json(*p.tool) : json(nullptr)},
        {"damage_counters", p.damage_counters},
        {"conditions", p.conditions},
        {"entered_turn", p.entered_turn},
        {"evolved_this_turn", p.evolved_this_turn},
        {"field_index", p.field_index},
        {"ability_used_turn", p.ability_used_turn},
    };
}

json ctx_json(const EffectContext& c) {
    return {
        {"controller", c.controller},       {"source_card", c.source_card}, {"source_pokemon", c.source_pokemon},
        {"selected", c.selected},           {"last_selection", c.last_selection},
        {"bonus_damage", c.bonus_damage},   {"cancel_attack", c.cancel_attack},
        {"attack_index", c.attack_index},   {"stage", c.stage},
        {"scratch", c.scratch},
    };
}

json task_json(const Task& t) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, task::SetupPlace>) {
                return {{"task", "setup_place"}, {"player", x.player}};
            } else if constexpr (std::is_same_v<T, task::BeginTurn>) {
                return {{"task", "begin_turn"}, {"player", x.player}};
            } else if constexpr (std::is_same_v<T, task::EndTurn>) {
                return {{"task", "end_turn"}};
            } else if constexpr (std::is_same_v<T, task::Upkeep>) {
                return {{"task", "upkeep"}};
            } else if constexpr (std::is_same_v<T, task::ResolveKnockouts>) {
                return {{"task", "resolve_knockouts"}};
            } else if constexpr (std::is_same_v<T, task::TakePrizes>) {
                return {{"task", "take_prizes"}, {"player", x.player}, {"count", x.count}};
            } else if constexpr (std::is_same_v<T, task::CheckWin>) {
                return {{"task", "check_win"}};
            } else if constexpr (std::is_same_v<T, task::Promote>) {
                return {{"task", "promote"}, {"player", x.player}};
            } else if constexpr (std::is_same_v<T, task::Retreat>) {
                return {{"task", "retreat"}, {"player", x.player}, {"stage", x.stage}};
            } else {
                json frames = json::array();
                for (const auto& f : x.frames) frames.push_back(json::array({f.program, f.pc}));
                return {{"task", "run_effect"},
                        {"kind", static_cast<int>(x.kind)},
                        {"frames", frames},
                        {"ctx", ctx_json(x.ctx)}};
            }
        },
        t);
}

json player_json(const PlayerState& p, const CardPool& pool) {
    json modifiers = json::array();
    for (const auto& m : p.modifiers)
        modifiers.push_back({{"pokemon", m.pokemon}, {"taken", m.taken}, {"delta", m.delta},
                             {"expires_after_turn", m.expires_after_turn}});
    json decklist = json::array();
    for (int idx : p.decklist) decklist.push_back(pool.cards[static_cast<std::size_t>(idx)].card_id);
    json bench = json::array();
    for (const auto& b : p.bench) bench.push_back(pokemon_json(b));
    return {
        {"deck", cards_json(p.deck)},
        {"hand", cards_json(p.hand)},
        {"discard", cards_json(p.discard)},
        {"prizes", cards_json(p.prizes)},
        {"active", p.active ? pokemon_json(*p.active) : json(nullptr)},
        {"bench", bench},
        {"flags",
         {{"energy_attached", p.flags.energy_attached},
          {"supporter_played", p.flags.supporter_played},
          {"stadium_played", p.flags.stadium_played},
          {"stadium_used", p.flags.stadium_used},
          {"retreated", p.flags.retreated},
          {"actions", p.flags.actions}}},
        {"modifiers", modifiers},
        {"decklist", decklist},
        {"deck_id", p.deck_id},
        {"mulligans", p.mulligans},
    };
}

class Reader {
public:
    explicit Reader(const CardPool& pool) : pool_(pool) {}

    Card card(const json& j) const {
        const CardDef* def = pool_.find(j.at(1).get<std::string>());
        if (!def) throw ConfigError("snapshot references unknown card '" + j.at(1).get<std::string>() + "'");
        return {j.at(0).get<std::uint16_t>(), def};
    }
    std::vector<Card> cards(const json& j) const {
        std::vector<Card> out;
        for (const auto& c : j) out.push_back(card(c));
        return out;
    }
    PokemonInPlay pokemon(const json& j) const {
        PokemonInPlay p;
        p.stack = cards(j.at("stack"));
        p.energy = cards(j.at("energy"));
        if (!j.at("tool").is_null()) p.tool = card(j.at("tool"));
        p.damage_counters = j.at("damage_counters").get<int>();
        p.conditions = j.at("conditions").get<std::uint8_t>();
        p.entered_turn = j.at("entered_turn").get<int>();
        p.evolved_this_turn = j.at("evolved_this_turn").get<bool>();
        p.field_index = j.at("field_index").get<int>();
        p.ability_used_turn = j.at("ability_used_turn").get<int>();
        return p;
    }
    PlayerState player(const json& j) const {
        PlayerState p;
        p.deck = cards(j.at("deck"));
        p.hand = cards(j.at("hand"));
        p.discard = cards(j.at("discard"));
        p.prizes = cards(j.at("prizes"));
        if (!j.at("active").is_null()) p.active = pokemon(j.at("active"));
        for (const auto& b : j.at("bench")) p.bench.push_back(pokemon(b));
        const auto& f = j.at("flags");
        p.flags.energy_attached = f.at("energy_attached").get<bool>();
        p.flags.supporter_played = f.at("supporter_played").get<bool>();
        p.flags.stadium_played = f.at("stadium_played").get<bool>();
        p.flags.stadium_used = f.at("stadium_used").get<bool>();
        p.flags.retreated = f.at("retreated").get<bool>();
        p.flags.actions = f.at("actions").get<int>();
        for (const auto& m : j.at("modifiers"))
            p.modifiers.push_back({m.at("pokemon").get<std::uint16_t>(), m.at("taken").get<bool>(),
                                   m.at("delta").get<int>(), m.at("expires_after_turn").get<int>()});
        for (const auto& id : j.at("decklist")) {
            const CardDef* def = pool_.find(id.get<std::string>());
            if (!def) throw ConfigError("snapshot decklist references unknown card");
            p.decklist.push_back(def->index);
        }
        p.deck_id = j.at("deck_id").get<std::string>();
        p.mulligans = j.at("mulligans").get<int>();
        return p;
    }
    EffectContext ctx(const json& j) const {
        EffectContext c;
        c.controller = j.at("controller").get<int>();
        c.source_card = j.at("source_card").get<std::uint16_t>();
        c.source_pokemon = j.at("source_pokemon").get<std::uint16_t>();
        c.selected = j.at("selected").get<std::uint16_t>();
        c.last_selection = j.at("last_selection").get<int>();
        c.bonus_damage = j.at("bonus_damage").get<int>();
        c.cancel_attack = j.at("cancel_attack").get<bool>();
        c.attack_index = j.at("attack_index").get<int>();
        c.stage = j.at("stage").get<int>();
        c.scratch = j.at("scratch").get<std::vector<std::uint16_t>>();
        return c;
    }
    Task task_from(const json& j) const {
        const std::string name = j.at("task").get<std::string>();
        if (name == "setup_place") return task::SetupPlace{j.at("player").get<int>()};
        if (name == "begin_turn") return task::BeginTurn{j.at("player").get<int>()};
        if (name == "end_turn") return task::EndTurn{};
        if (name == "upkeep") return task::Upkeep{};
        if (name == "resolve_knockouts") return task::ResolveKnockouts{};
        if (name == "take_prizes") return task::TakePrizes{j.at("player").get<int>(), j.at("count").get<int>()};
        if (name == "check_win") return task::CheckWin{};
        if (name == "promote") return task::Promote{j.at("player").get<int>()};
        if (name == "retreat") return task::Retreat{j.at("player").get<int>(), j.at("stage").get<int>()};
        if (name == "run_effect") {
            task::RunEffect r;
            r.kind = static_cast<EffectKind>(j.at("kind").get<int>());
            for (const auto& f : j.at("frames")) r.frames.push_back({f.at(0).get<ProgramId>(), f.at(1).get<int>()});
            r.ctx = ctx(j.at("ctx"));
            return r;
        }
        throw ConfigError("unknown task '" + name + "' in snapshot");
    }

private:
    const CardPool& pool_;
};

}  // namespace

json config_to_json(const GameConfig& c) {
    return {
        {"turn_cap", c.turn_cap},
        {"first_player_may_attack", c.first_player_may_attack},
        {"first_player_may_play_supporter", c.first_player_may_play_supporter},
        {"evolve_on_first_turns", c.evolve_on_first_turns},
        {"max_actions_per_turn", c.max_actions_per_turn},
        {"prize_cards", c.prize_cards},
        {"opening_hand", c.opening_hand},
    };
}

GameConfig config_from_json(const json& j) {
    GameConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "turn_cap") c.turn_cap = value.get<int>();
        else if (key == "first_player_may_attack") c.first_player_may_attack = value.get<bool>();
        else if (key == "first_player_may_play_supporter") c.first_player_may_play_supporter = value.get<bool>();
        else if (key == "evolve_on_first_turns") c.evolve_on_first_turns = value.get<bool>();
        else if (key == "max_actions_per_turn") c.max_actions_per_turn = value.get<int>();
        else if (key == "prize_cards") c.prize_cards = value.get<int>();
        else if (key == "opening_hand") c.opening_hand = value.get<int>();
        else throw ConfigError("unknown game config key '" + key + "'");
    }
    c.validate();
    return c;
}

json state_to_json(const GameState& s, bool include_log) {
    json tasks = json::array();
    for (const auto& t : s.tasks) tasks.push_back(task_json(t));
    json prompt = nullptr;
    if (s.pending_choice) {
        json cands = json::array();
        for (const auto& c : s.pending_choice->candidates) cands.push_back(json::array({c.uid, c.face_down, c.pokemon}));
        prompt = {{"chooser", s.pending_choice->chooser},
                  {"candidates", cands},
                  {"min_count", s.pending_choice->min_count},
                  {"max_count", s.pending_choice->max_count},
                  {"reason", s.pending_choice->reason}};
    }
    json result = nullptr;
    if (s.result) {
        result = {{"winner", s.result->winner ? json(*s.result->winner) : json(nullptr)},
                  {"reason", std::string(to_string(s.result->reason))}};
    }
    json out = {
        {"snapshot_version", kSnapshotVersion},
        {"pool_version", s.pool->pool_version},
        {"config", config_to_json(s.config)},
        {"players", json::array({player_json(s.players[0], *s.pool), player_json(s.players[1], *s.pool)})},
        {"stadium", s.stadium ? card_json(*s.stadium) : json(nullptr)},
        {"stadium_owner", s.stadium_owner},
        {"turn_number", s.turn_number},
        {"active_player", s.active_player},
        {"first_player", s.first_player},
        {"phase", std::string(to_string(s.phase))},
        {"pending_choice", prompt},
        {"choice_result", s.choice_result ? json(*s.choice_result) : json(nullptr)},
        {"tasks", tasks},
        {"result", result},
        {"rng", s.rng.serialize()},
    };
    if (include_log) {
        json log = json::array();
        for (const auto& e : s.action_log) log.push_back(json::array({e.turn, e.actor, e.text}));
        out["action_log"] = log;
    }
    return out;
}

GameState state_from_json(const json& j, std::shared_ptr<const CardPool> pool) {
    if (j.at("snapshot_version").get<int>() != kSnapshotVersion) throw ConfigError("unsupported snapshot version");
    if (j.at("pool_version").get<std::string>() != pool->pool_version) throw ConfigError("pool version mismatch");
    Reader r(*pool);
    GameState s;
    s.config = config_from_json(j.at("config"));
    s.players[0] = r.player(j.at("players").at(0));
    s.players[1] = r.player(j.at("players").at(1));
    if (!j.at("stadium").is_null()) s.stadium = r.card(j.at("stadium"));
    s.stadium_owner = j.at("stadium_owner").get<int>();
    s.turn_number = j.at("turn_number").get<int>();
    s.active_player = j.at("active_player").get<int>();
    s.first_player = j.at("first_player").get<int>();
    auto phase = parse_phase(j.at("phase").get<std::string>());
    if (!phase) throw ConfigError("unknown phase in snapshot");
    s.phase = *phase;
    if (!j.at("pending_choice").is_null()) {
        const auto& p = j.at("pending_choice");
        ChoicePrompt prompt;
        prompt.chooser = p.at("chooser").get<int>();
        for (const auto& c : p.at("candidates"))
            prompt.candidates.push_back({c.at(0).get<std::uint16_t>(), c.at(1).get<bool>(), c.at(2).get<bool>()});
        prompt.min_count = p.at("min_count").get<int>();
        prompt.max_count = p.at("max_count").get<int>();
        prompt.reason = p.at("reason").get<std::string>();
        s.pending_choice = std::move(prompt);
    }
    if (!j.at("choice_result").is_null()) s.choice_result = j.at("choice_result").get<std::vector<std::uint16_t>>();
    for (const auto& t : j.at("tasks")) s.tasks.push_back(r.task_from(t));
    if (!j.at("result").is_null()) {
        GameResult res;
        const auto& w = j.at("result").at("winner");
        if (!w.is_null()) res.winner = w.get<int>();
        auto reason = parse_win_reason(j.at("result").at("reason").get<std::string>());
        if (!reason) throw ConfigError("unknown result reason in snapshot");
        res.reason = *reason;
        s.result = res;
    }
    s.rng = Rng::deserialize(j.at("rng").get<std::string>());
    if (j.contains("action_log")) {
        for (const auto& e : j.at("action_log"))
            s.action_log.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<std::string>()});
    }
    s.pool = std::move(pool);
    return s;
}

std::uint64_t state_hash(const GameState& state) {
    const std::string text = state_to_json(state, false).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void collect(const std::vector<Card>& cards, std::vector<int>& out) {
    for (const auto& c : cards) out.push_back(c.def->index);
}

void collect(const PokemonInPlay& p, std::vector<int>& out) {
    collect(p.stack, out);
    collect(p.energy, out);
    if (p.tool) out.push_back(p.tool->def->index);
}

}  // namespace

bool card_conservation_check(const GameState& state) {
    for (int p = 0; p < 2; ++p) {
        const auto& pl = state.players[p];
        std::vector<int> seen;
        seen.reserve(kDeckSize);
        collect(pl.deck, seen);
        collect(pl.hand, seen);
        collect(pl.discard, seen);
        collect(pl.prizes, seen);
        if (pl.active) collect(*pl.active, seen);
        for (const auto& b : pl.bench) collect(b, seen);
        if (state.stadium && state.stadium_owner == p) seen.push_back(state.stadium->def->index);
        std::sort(seen.begin(), seen.end());
        if (seen != pl.decklist) return false;
    }
    return true;
}

std::string check_invariants(const GameState& s) {
    if (!card_conservation_check(s)) return "card conservation violated";
    if (s.result.has_value() != (s.phase == Phase::Finished)) return "result set iff phase is Finished";
    if (s.turn_number > s.config.turn_cap) return "turn number beyond cap";
    if (s.pending_choice) {
        const auto& c = *s.pending_choice;
        if (c.min_count < 0 || c.min_count > c.max_count ||
            c.max_count > static_cast<int>(c.candidates.size()))
            return "malformed choice prompt";
    }
    for (int p = 0; p < 2; ++p) {
        const auto& pl = s.players[p];
        if (pl.bench.size() > static_cast<std::size_t>(kBenchLimit)) return "bench over limit";
        if (pl.prizes.size() > static_cast<std::size_t>(s.config.prize_cards)) return "too many prizes";
        std::vector<int> indices;
        auto check_pokemon = [&](const PokemonInPlay& pk) -> std::string {
            if (pk.has(Condition::Asleep) + pk.has(Condition::Paralyzed) + pk.has(Condition::Confused) > 1)
                return "exclusive conditions coexist";
            for (std::size_t i = 1; i < pk.stack.size(); ++i) {
                const auto& from = pk.stack[i].def->evolves_from;
                if (!from) return "evolution stack out of order";
                if (*from == pk.stack[i - 1].def->name) continue;
                // A Stage 2 placed directly on its line's Basic.
                const CardDef* mid = s.pool->find_by_name(*from);
                if (!mid || !mid->evolves_from || *mid->evolves_from != pk.stack[i - 1].def->name)
                    return "evolution stack out of order";
            }
            if (s.tasks.empty() && !s.pending_choice && !s.finished() && pk.knocked_out())
                return "Knocked Out Pokemon left in play";
            indices.push_back(pk.field_index);
            return {};
        };
        if (pl.active) {
            if (auto e = check_pokemon(*pl.active); !e.empty()) return e;
        }
        for (const auto& b : pl.bench) {
            if (auto e = check_pokemon(b); !e.empty()) return e;
            if (b.conditions != 0) return "benched Pokemon with a Special Condition";
        }
        std::sort(indices.begin(), indices.end());
        if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) return "duplicate field index";
    }
    return {};
}

}  // namespace tcg
