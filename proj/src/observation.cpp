#include "tcg/observation.hpp"

#include "tcg/engine.hpp"

namespace tcg {

using json = nlohmann::json;

namespace {

json types_json(const std::vector<EnergyType>& types) {
    json out = json::array();
    for (auto t : types) out.push_back(std::string(to_string(t)));
    return out;
}

json names_json(const std::vector<Card>& cards) {
    json out = json::array();
    for (const auto& c : cards) out.push_back(c.def->name);
    return out;
}

json pokemon_json(const GameState& s, const PokemonInPlay& pk, bool own) {
    const CardDef& top = pk.top();
    json j = {
        {"name", top.name},
        {"card_id", top.card_id},
        {"field_index", pk.field_index},
        {"stage", std::string(to_string(top.subkind))},
        {"types", types_json(top.types)},
        {"hp", pk.remaining_hp()},
        {"max_hp", pk.max_hp()},
        {"damage", pk.damage_counters * 10},
        {"energy", names_json(pk.energy)},
        {"tool", pk.tool ? json(pk.tool->def->name) : json(nullptr)},
        {"retreat_cost", pk.retreat_cost()},
        {"prize_value", top.prize_value},
        {"evolved_this_turn", pk.evolved_this_turn},
    };
    j["weakness"] = top.weakness ? json(std::string(to_string(*top.weakness))) : json(nullptr);
    json conditions = json::array();
    for (int c = 0; c < kConditionCount; ++c) {
        if (pk.has(static_cast<Condition>(c))) conditions.push_back(std::string(to_string(static_cast<Condition>(c))));
    }
    j["conditions"] = conditions;
    json attacks = json::array();
    for (const auto& a : top.attacks) {
        json aj = {{"name", a.name}, {"cost", types_json(a.cost)}, {"damage", a.base_damage}, {"text", a.text}};
        if (own) aj["affordable"] = cost_satisfied(pk.energy, a.cost);
        attacks.push_back(std::move(aj));
    }
    j["attacks"] = attacks;
    if (top.ability) {
        json ab = {{"name", top.ability->name}, {"text", top.ability->text}};
        if (own) ab["used_this_turn"] = pk.ability_used_turn == s.turn_number;
        j["ability"] = ab;
    }
    return j;
}

json board_json(const GameState& s, int p, bool own, bool hidden) {
    const auto& pl = s.players[p];
    json j = {
        {"deck_id", pl.deck_id},
        {"deck_count", pl.deck.size()},
        {"hand_count", pl.hand.size()},
        {"prizes_remaining", pl.prizes.size()},
        {"discard", names_json(pl.discard)},
        {"mulligans", pl.mulligans},
    };
    if (hidden) {
        // Setup placements are face down.
        j["board_hidden"] = true;
        j["pokemon_in_play"] = pl.pokemon_in_play();
        return j;
    }
    j["active"] = pl.active ? pokemon_json(s, *pl.active, own) : json(nullptr);
    json bench = json::array();
    for (const auto& b : pl.bench) bench.push_back(pokemon_json(s, b, own));
    j["bench"] = bench;
    return j;
}

json candidate_json(const GameState& s, int viewer, const ChoiceCandidate& c, int index) {
    json j = {{"index", index}};
    if (c.face_down) {
        j["face_down"] = true;
        return j;
    }
    if (c.pokemon) {
        int owner = 0;
        const auto* pk = s.find_pokemon(c.uid, &owner);
        j["pokemon"] = {{"name", pk->top().name},
                        {"field_index", pk->field_index},
                        {"owner", owner == viewer ? "you" : "opponent"},
                        {"hp", pk->remaining_hp()},
                        {"energy_count", pk->energy.size()}};
        return j;
    }
    j["card"] = card_summary(*s.card_def(c.uid));
    return j;
}

int turn_owner(const GameState& s, int turn) { return (turn % 2 == 1) ? s.first_player : opponent_of(s.first_player); }

}  // namespace

json card_summary(const CardDef& d) {
    json j = {{"card_id", d.card_id},
              {"name", d.name},
              {"kind", std::string(to_string(d.kind))},
              {"subkind", std::string(to_string(d.subkind))}};
    if (d.is_pokemon()) j["hp"] = d.hp;
    if (d.evolves_from) j["evolves_from"] = *d.evolves_from;
    if (d.is_energy()) j["provides"] = types_json(d.provides);
    return j;
}

json card_details(const CardDef& d) {
    json j = card_summary(d);
    if (d.is_pokemon()) {
        j["types"] = types_json(d.types);
        j["weakness"] = d.weakness ? json(std::string(to_string(*d.weakness))) : json(nullptr);
        j["retreat_cost"] = d.retreat_cost;
        j["prize_value"] = d.prize_value;
        json attacks = json::array();
        for (const auto& a : d.attacks) {
            attacks.push_back({{"name", a.name}, {"cost", types_json(a.cost)}, {"damage", a.base_damage}, {"text", a.text}});
        }
        j["attacks"] = attacks;
        if (d.ability) j["ability"] = {{"name", d.ability->name}, {"text", d.ability->text}};
    }
    if (!d.rules_text.empty()) j["text"] = d.rules_text;
    return j;
}

std::vector<std::string> opponent_last_turn_actions(const GameState& s, int viewer) {
    const int opp = opponent_of(viewer);
    int last = 0;
    for (int t = s.turn_number; t >= 1; --t) {
        if (turn_owner(s, t) == opp) {
            last = t;
            break;
        }
    }
    std::vector<std::string> out;
    if (last == 0) return out;
    for (const auto& e : s.action_log) {
        if (e.turn == last) out.push_back(e.text);
    }
    return out;
}

json build_observation(const GameState& s, int viewer, bool include_actions) {
    const auto& me = s.players[viewer];
    const int opp = opponent_of(viewer);
    json hand = json::array();
    for (const auto& c : me.hand) hand.push_back(card_summary(*c.def));

    json obs;
    obs["obs_version"] = kObservationVersion;
    obs["viewer"] = viewer;
    obs["private"] = {{"hand", hand}, {"deck_count", me.deck.size()}, {"prizes_remaining", me.prizes.size()}};

    const bool setup = s.phase == Phase::Setup;
    json pub;
    pub["you"] = board_json(s, viewer, true, false);
    pub["opponent"] = board_json(s, opp, false, setup);
    if (s.stadium) {
        pub["stadium"] = {{"name", s.stadium->def->name},
                          {"owner", s.stadium_owner == viewer ? "you" : "opponent"},
                          {"text", s.stadium->def->rules_text}};
    } else {
        pub["stadium"] = nullptr;
    }
    obs["public"] = pub;

    json global = {
        {"turn", s.turn_number},
        {"turn_cap", s.config.turn_cap},
        {"phase", std::string(to_string(s.phase))},
        {"first_player", s.first_player == viewer ? "you" : "opponent"},
        {"acting_player", s.acting_player() == viewer ? "you" : "opponent"},
        {"choosing_card", s.pending_choice && s.pending_choice->chooser == viewer},
    };
    if (s.phase == Phase::TurnMain && s.active_player == viewer) {
        const auto& f = me.flags;
        global["turn_flags"] = {{"energy_attached", f.energy_attached},
                                {"supporter_played", f.supporter_played},
                                {"stadium_played", f.stadium_played},
                                {"stadium_used", f.stadium_used},
                                {"retreated", f.retreated},
                                {"actions_taken", f.actions}};
    }
    if (s.pending_choice) {
        const auto& pr = *s.pending_choice;
        json prompt = {{"chooser", pr.chooser == viewer ? "you" : "opponent"}, {"reason", pr.reason}};
        if (pr.chooser == viewer) {
            prompt["min_count"] = pr.min_count;
            prompt["max_count"] = pr.max_count;
            json cands = json::array();
            for (std::size_t i = 0; i < pr.candidates.size(); ++i)
                cands.push_back(candidate_json(s, viewer, pr.candidates[i], static_cast<int>(i)));
            prompt["candidates"] = cands;
        }
        global["prompt"] = prompt;
    }
    if (s.result) {
        global["result"] = {{"winner", s.result->winner ? json(*s.result->winner == viewer ? "you" : "opponent")
                                                        : json(nullptr)},
                            {"reason", std::string(to_string(s.result->reason))}};
    }
    obs["global"] = global;
    obs["opponent_last_turn_actions"] = opponent_last_turn_actions(s, viewer);

    if (include_actions) {
        json actions = json::array();
        if (!s.finished() && s.acting_player() == viewer) {
            for (const auto& a : legal_actions(s)) actions.push_back(action_to_json(a));
        }
        obs["available_actions"] = actions;
    }
    return obs;
}

namespace {

void flatten(const json& j, const std::string& path, std::string& out) {
    if (j.is_object()) {
        if (j.empty()) {
            out += path + " = {}\n";
            return;
        }
        for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
    } else if (j.is_array()) {
        if (j.empty()) {
            out += path + " = []\n";
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    } else {
        out += path + " = " + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
    }
}

}  // namespace

std::string render_raw(const json& observation) {
    std::string out;
    flatten(observation, "", out);
    return out;
}

json parse_raw(std::string_view text) {
    json root = json::object();
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        const std::size_t eq = line.find(" = ");
        if (eq == std::string_view::npos) continue;
        const std::string_view path = line.substr(0, eq);
        const std::string value_text(line.substr(eq + 3));

        json value;
        if (value_text == "{}") {
            value = json::object();
        } else if (value_text == "[]") {
            value = json::array();
        } else {
            value = json::parse(value_text, nullptr, false);
            if (value.is_discarded() || value.is_string() || value.is_structured()) value = value_text;
        }

        json* node = &root;
        std::size_t i = 0;
        while (i < path.size()) {
            if (path[i] == '.') {
                ++i;
            } else if (path[i] == '[') {
                const std::size_t close = path.find(']', i);
                const auto idx = static_cast<std::size_t>(std::stoul(std::string(path.substr(i + 1, close - i - 1))));
                if (!node->is_array()) *node = json::array();
                while (node->size() <= idx) node->push_back(nullptr);
                node = &(*node)[idx];
                i = close + 1;
            } else {
                std::size_t stop = path.find_first_of(".[", i);
                if (stop == std::string_view::npos) stop = path.size();
                if (!node->is_object()) *node = json::object();
                node = &(*node)[std::string(path.substr(i, stop - i))];
                i = stop;
            }
        }
        *node = std::move(value);
    }
    return root;
}

}  // namespace tcg
