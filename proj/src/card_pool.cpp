#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tcg/card.hpp"

namespace tcg {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kZoneNames{"deck", "hand", "discard", "bench", "attached"};
constexpr std::array<std::string_view, 11> kTargetNames{"self",       "own_active",       "opp_active", "own_choose",
                                                        "own_bench_choose", "opp_choose", "opp_bench_choose",
                                                        "opp_bench_all", "selected",  "main",  "player"};
constexpr std::array<std::string_view, 11> kCounterNames{
    "own_bench",        "opp_bench",          "self_energy",          "opp_active_energy",
    "own_hand",         "opp_prizes_taken",   "own_prizes_taken",     "self_damage_counters",
    "opp_active_damage_counters", "last_selection", "own_discard_energy"};
constexpr std::array<std::string_view, 2> kDurationNames{"this_turn", "next_opponent_turn"};
constexpr std::array<std::string_view, 3> kSideNames{"self", "opponent", "source"};
constexpr std::array<std::string_view, kOpKindCount> kOpNames{
    "draw",   "draw_to",         "search",         "move",         "attach_energy_from", "damage",
    "damage_per_count", "heal",  "discard",        "apply_condition", "switch_active",   "shuffle",
    "coin_flip", "modify_damage", "require_choice", "evolve_from_hand", "end"};
constexpr std::array<std::string_view, 5> kArchetypeNames{"Charizard-like", "Gardevoir-like", "Miraidon-like",
                                                          "Gholdengo-like", "Lugia-like"};

template <std::size_t N>
int index_of(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<int>(i);
    }
    return -1;
}

// Maps a byte offset in `doc` to a 1-based (line, column).
std::pair<int, int> line_col(std::string_view doc, std::size_t offset) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < offset && i < doc.size(); ++i) {
        if (doc[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json parse_document(std::string_view document) {
    try {
        return json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(document, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << "syntax error at line " << line << ", column " << col << ": " << e.what();
        throw PoolError(msg.str(), line, col);
    }
}

class CardParser {
public:
    explicit CardParser(CardPool& pool) : pool_(pool) {}

    void parse_card(const json& j) {
        if (!j.is_object()) fail("card entry is not an object");
        card_id_ = j.value("card_id", std::string{});
        if (card_id_.empty()) fail("card entry without card_id");
        check_keys(j, {"card_id", "name", "subkind", "evolves_from", "hp", "types", "weakness", "retreat_cost",
                       "prize_value", "attacks", "ability", "effect", "provides", "tool", "rules_text"});

        CardDef card;
        card.card_id = card_id_;
        card.name = require_string(j, "name");
        auto subkind = parse_card_subkind(require_string(j, "subkind"));
        if (!subkind) fail("unknown subkind");
        card.subkind = *subkind;
        card.kind = kind_of(*subkind);
        if (j.contains("evolves_from")) card.evolves_from = require_string(j, "evolves_from");
        card.hp = j.value("hp", 0);
        card.retreat_cost = j.value("retreat_cost", 0);
        card.prize_value = j.value("prize_value", 1);
        card.rules_text = j.value("rules_text", std::string{});
        if (j.contains("types")) card.types = parse_types(j.at("types"));
        if (j.contains("weakness")) card.weakness = parse_type(j.at("weakness"));
        if (j.contains("provides")) card.provides = parse_types(j.at("provides"));

        const bool is_attack_context = true;
        if (j.contains("attacks")) {
            if (!j.at("attacks").is_array()) fail("attacks must be an array");
            std::set<std::string> names;
            for (const auto& a : j.at("attacks")) {
                check_keys(a, {"name", "cost", "damage", "effect", "text"});
                AttackDef attack;
                attack.name = require_string(a, "name");
                if (!names.insert(attack.name).second) fail("duplicate attack name '" + attack.name + "'");
                attack.cost = a.contains("cost") ? parse_types(a.at("cost")) : std::vector<EnergyType>{};
                attack.base_damage = a.value("damage", 0);
                if (attack.base_damage < 0 || attack.base_damage % 10 != 0)
                    fail("attack '" + attack.name + "' damage must be a non-negative multiple of 10");
                if (a.contains("effect")) attack.effect = parse_program(a.at("effect"), is_attack_context);
                attack.text = a.value("text", std::string{});
                card.attacks.push_back(std::move(attack));
            }
        }
        if (j.contains("ability")) {
            const auto& a = j.at("ability");
            check_keys(a, {"name", "effect", "text"});
            AbilityDef ability;
            ability.name = require_string(a, "name");
            if (!a.contains("effect")) fail("ability without effect");
            ability.effect = parse_program(a.at("effect"), false);
            ability.text = a.value("text", std::string{});
            card.ability = std::move(ability);
        }
        if (j.contains("effect")) card.effect = parse_program(j.at("effect"), false);
        if (j.contains("tool")) {
            const auto& t = j.at("tool");
            check_keys(t, {"hp_bonus", "damage_dealt", "damage_taken", "retreat_delta"});
            card.tool.hp_bonus = t.value("hp_bonus", 0);
            card.tool.damage_dealt = t.value("damage_dealt", 0);
            card.tool.damage_taken = t.value("damage_taken", 0);
            card.tool.retreat_delta = t.value("retreat_delta", 0);
        }
        validate(card);
        card.index = static_cast<int>(pool_.cards.size());
        if (!pool_.by_id.emplace(card.card_id, card.index).second) fail("duplicate card_id");
        if (!pool_.by_name.emplace(card.name, card.index).second) fail("duplicate card name '" + card.name + "'");
        pool_.cards.push_back(std::move(card));
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw PoolError("card '" + card_id_ + "': " + what, 0, 0, card_id_);
    }

private:
    void validate(const CardDef& card) const {
        if (card.is_pokemon()) {
            if (card.hp <= 0 || card.hp % 10 != 0) fail("Pokemon hp must be a positive multiple of 10");
            if (card.attacks.empty() && !card.ability) fail("Pokemon needs an attack or an ability");
            if (card.is_evolution() && (!card.evolves_from || card.evolves_from->empty()))
                fail(std::string(to_string(card.subkind)) + " without evolves_from");
            if (card.is_basic_pokemon() && card.evolves_from) fail("Basic Pokemon with evolves_from");
            if (card.types.empty()) fail("Pokemon without a type");
            if (card.retreat_cost < 0) fail("negative retreat_cost");
            if (card.prize_value < 1) fail("prize_value must be at least 1");
            if (card.effect != kNoProgram) fail("Pokemon cards carry effects on attacks or abilities only");
        } else {
            if (card.hp != 0 || !card.attacks.empty() || card.ability || card.evolves_from)
                fail("only Pokemon may have hp, attacks, abilities, or evolves_from");
        }
        if (card.is_energy()) {
            if (card.provides.empty()) fail("Energy without provides");
            if (card.is_basic_energy() && card.effect != kNoProgram) fail("Basic Energy cannot carry an effect");
        }
        if (card.is_trainer()) {
            const bool needs_effect = card.subkind == CardSubkind::Item || card.subkind == CardSubkind::Supporter;
            if (needs_effect && card.effect == kNoProgram) fail("Item/Supporter without effect");
            if (card.subkind == CardSubkind::Tool && card.effect != kNoProgram) fail("Tools use passive modifiers");
        }
    }

    ProgramId parse_program(const json& j, bool attack_context) {
        if (!j.is_array()) fail("effect program must be an array of ops");
        if (++depth_ > 8) fail("effect program nested too deeply");
        EffectProgram program;
        for (const auto& o : j) program.ops.push_back(parse_op(o, attack_context));
        --depth_;
        pool_.programs.push_back(std::move(program));
        return static_cast<ProgramId>(pool_.programs.size() - 1);
    }

    EffectOp parse_op(const json& o, bool attack_context) {
        if (!o.is_object() || !o.contains("op")) fail("effect op must be an object with an 'op' field");
        const std::string name = o.at("op").get<std::string>();
        const int kind = index_of(kOpNames, name);
        if (kind < 0) fail("unknown effect op '" + name + "'");
        auto count_range = [&](auto& x) {
            x.all = o.value("all", false);
            x.max = o.value("max", 1);
            x.min = o.value("min", 0);
            if (x.min < 0 || x.max < x.min) fail("op '" + name + "' has min > max");
        };
        switch (kind) {
            case 0: {
                check_keys(o, {"op", "count"});
                op::Draw d{require_int(o, "count")};
                if (d.count < 0) fail("negative draw count");
                return d;
            }
            case 1: {
                check_keys(o, {"op", "hand_size"});
                return op::DrawTo{require_int(o, "hand_size")};
            }
            case 2: {
                check_keys(o, {"op", "zone", "filter", "max", "min", "to", "reveal"});
                op::SearchZone s;
                s.zone = parse_zone(o.value("zone", "deck"));
                s.filter = parse_filter(o.value("filter", json::object()));
                s.max = o.value("max", 1);
                s.min = o.value("min", 0);
                s.to = parse_zone(o.value("to", "hand"));
                s.reveal = o.value("reveal", false);
                if (s.zone != Zone::Deck && s.zone != Zone::Discard) fail("search reads deck or discard");
                if (s.to != Zone::Hand && s.to != Zone::Bench && s.to != Zone::Discard)
                    fail("search writes hand, bench, or discard");
                if (s.to == Zone::Bench) require_basic_filter(s.filter);
                if (s.min < 0 || s.max < s.min) fail("search has min > max");
                return s;
            }
            case 3: {
                check_keys(o, {"op", "from", "to", "filter", "all", "max", "min"});
                op::MoveCards m;
                m.from = parse_zone(require_string(o, "from"));
                m.to = parse_zone(require_string(o, "to"));
                m.filter = parse_filter(o.value("filter", json::object()));
                count_range(m);
                if (m.from == m.to) fail("move with identical zones");
                if (m.from == Zone::Bench || m.from == Zone::Attached || m.to == Zone::Attached)
                    fail("move works between hand, deck, discard, and bench");
                if (m.to == Zone::Bench) require_basic_filter(m.filter);
                return m;
            }
            case 4: {
                check_keys(o, {"op", "from", "filter", "max", "target"});
                op::AttachEnergyFrom a;
                a.from = parse_zone(o.value("from", "deck"));
                a.filter = parse_filter(o.value("filter", json::object()));
                a.max = o.value("max", 1);
                a.target = parse_target(o.value("target", "self"));
                if (a.filter.kind != CardKind::Energy && !a.filter.subkind)
                    fail("attach_energy_from filter must select Energy");
                require_own_pokemon_target(a.target);
                return a;
            }
            case 5: {
                check_keys(o, {"op", "amount", "target"});
                op::Damage d{require_int(o, "amount"), parse_target(o.value("target", "opp_active"))};
                if (d.amount < 0 || d.amount % 10 != 0) fail("damage must be a non-negative multiple of 10");
                require_pokemon_target(d.target);
                return d;
            }
            case 6: {
                check_keys(o, {"op", "unit", "counter", "target"});
                op::DamagePerCount d;
                d.unit = require_int(o, "unit");
                d.counter = parse_counter(require_string(o, "counter"));
                d.target = parse_target(o.value("target", "main"));
                if (d.unit < 0 || d.unit % 10 != 0) fail("damage unit must be a non-negative multiple of 10");
                if (d.target == Target::Main && !attack_context) fail("main-damage target outside an attack");
                if (d.target != Target::Main) require_pokemon_target(d.target);
                return d;
            }
            case 7: {
                check_keys(o, {"op", "amount", "target"});
                op::Heal h{require_int(o, "amount"), parse_target(o.value("target", "self"))};
                if (h.amount < 0 || h.amount % 10 != 0) fail("heal must be a non-negative multiple of 10");
                require_pokemon_target(h.target);
                return h;
            }
            case 8: {
                check_keys(o, {"op", "zone", "filter", "all", "max", "min"});
                op::Discard d;
                d.zone = parse_zone(o.value("zone", "hand"));
                d.filter = parse_filter(o.value("filter", json::object()));
                count_range(d);
                if (d.zone != Zone::Hand && d.zone != Zone::Attached) fail("discard reads hand or attached");
                return d;
            }
            case 9: {
                check_keys(o, {"op", "condition", "target"});
                auto c = parse_condition(require_string(o, "condition"));
                if (!c) fail("unknown condition");
                op::ApplyCondition a{*c, parse_target(o.value("target", "opp_active"))};
                if (a.target != Target::OppActive && a.target != Target::OwnActive && a.target != Target::Self)
                    fail("conditions apply to an Active Pokemon");
                return a;
            }
            case 10: {
                check_keys(o, {"op", "side"});
                const int side = index_of(kSideNames, require_string(o, "side"));
                if (side < 0) fail("unknown side");
                return op::SwitchActive{static_cast<Side>(side)};
            }
            case 11: {
                check_keys(o, {"op", "zone"});
                op::Shuffle s{parse_zone(o.value("zone", "deck"))};
                if (s.zone != Zone::Deck) fail("only the deck can be shuffled");
                return s;
            }
            case 12: {
                check_keys(o, {"op", "heads", "tails"});
                op::CoinFlip c;
                c.heads = parse_program(o.value("heads", json::array()), attack_context);
                c.tails = parse_program(o.value("tails", json::array()), attack_context);
                return c;
            }
            case 13: {
                check_keys(o, {"op", "taken", "delta", "duration", "target"});
                op::ModifyDamage m;
                m.taken = o.value("taken", true);
                m.delta = require_int(o, "delta");
                const int d = index_of(kDurationNames, o.value("duration", "this_turn"));
                if (d < 0) fail("unknown duration");
                m.duration = static_cast<Duration>(d);
                m.target = parse_target(o.value("target", "self"));
                if (m.delta % 10 != 0) fail("damage modifier must be a multiple of 10");
                if (m.target != Target::Self && m.target != Target::Player && m.target != Target::OwnActive &&
                    m.target != Target::Selected)
                    fail("damage modifiers target self, own_active, selected, or player");
                return m;
            }
            case 14: {
                check_keys(o, {"op", "target"});
                op::RequireChoice r{parse_target(require_string(o, "target"))};
                if (r.target != Target::OwnChoose && r.target != Target::OwnBenchChoose &&
                    r.target != Target::OppChoose && r.target != Target::OppBenchChoose)
                    fail("require_choice needs a *_choose target");
                return r;
            }
            case 15:
                check_keys(o, {"op"});
                return op::EvolveFromHand{};
            case 16:
                check_keys(o, {"op", "cancel_attack"});
                return op::EndEffect{o.value("cancel_attack", false)};
        }
        fail("unreachable op kind");
    }

    void require_basic_filter(const CardFilter& f) const {
        if (f.subkind != CardSubkind::Basic) fail("bench destination requires a Basic Pokemon filter");
    }
    void require_pokemon_target(Target t) const {
        if (t == Target::Main || t == Target::Player) fail("op needs a Pokemon target");
    }
    void require_own_pokemon_target(Target t) const {
        if (t != Target::Self && t != Target::OwnActive && t != Target::OwnChoose && t != Target::OwnBenchChoose &&
            t != Target::Selected)
            fail("energy attaches to the player's own Pokemon");
    }

    CardFilter parse_filter(const json& f) const {
        if (!f.is_object()) fail("filter must be an object");
        check_keys(f, {"kind", "subkind", "type", "name"});
        CardFilter filter;
        if (f.contains("kind")) {
            filter.kind = parse_card_kind(f.at("kind").get<std::string>());
            if (!filter.kind) fail("unknown filter kind");
        }
        if (f.contains("subkind")) {
            filter.subkind = parse_card_subkind(f.at("subkind").get<std::string>());
            if (!filter.subkind) fail("unknown filter subkind");
        }
        if (f.contains("type")) filter.type = parse_type(f.at("type"));
        if (f.contains("name")) filter.name = f.at("name").get<std::string>();
        return filter;
    }

    Zone parse_zone(const std::string& s) const {
        const int z = index_of(kZoneNames, s);
        if (z < 0) fail("unknown zone '" + s + "'");
        return static_cast<Zone>(z);
    }
    Target parse_target(const std::string& s) const {
        const int t = index_of(kTargetNames, s);
        if (t < 0) fail("unknown target '" + s + "'");
        return static_cast<Target>(t);
    }
    Counter parse_counter(const std::string& s) const {
        const int c = index_of(kCounterNames, s);
        if (c < 0) fail("unknown counter '" + s + "'");
        return static_cast<Counter>(c);
    }
    EnergyType parse_type(const json& j) const {
        if (!j.is_string()) fail("energy type must be a string");
        auto t = parse_energy_type(j.get<std::string>());
        if (!t) fail("unknown energy type '" + j.get<std::string>() + "'");
        return *t;
    }
    std::vector<EnergyType> parse_types(const json& j) const {
        if (!j.is_array()) fail("expected an array of energy types");
        std::vector<EnergyType> out;
        for (const auto& t : j) out.push_back(parse_type(t));
        return out;
    }
    std::string require_string(const json& j, const char* key) const {
        if (!j.contains(key) || !j.at(key).is_string()) fail(std::string("missing string field '") + key + "'");
        return j.at(key).get<std::string>();
    }
    int require_int(const json& j, const char* key) const {
        if (!j.contains(key) || !j.at(key).is_number_integer())
            fail(std::string("missing integer field '") + key + "'");
        return j.at(key).get<int>();
    }
    void check_keys(const json& j, std::initializer_list<std::string_view> allowed) const {
        if (!j.is_object()) fail("expected an object");
        for (const auto& [key, value] : j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail("unknown field '" + key + "'");
        }
    }

    CardPool& pool_;
    std::string card_id_;
    int depth_ = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(Zone z) { return kZoneNames[static_cast<int>(z)]; }
std::string_view to_string(Target t) { return kTargetNames[static_cast<int>(t)]; }
std::string_view to_string(Counter c) { return kCounterNames[static_cast<int>(c)]; }
std::string_view to_string(Duration d) { return kDurationNames[static_cast<int>(d)]; }
std::string_view to_string(Side s) { return kSideNames[static_cast<int>(s)]; }
std::string_view to_string(Archetype a) { return kArchetypeNames[static_cast<int>(a)]; }

std::optional<Archetype> parse_archetype(std::string_view s) {
    const int i = index_of(kArchetypeNames, s);
    if (i < 0) return std::nullopt;
    return static_cast<Archetype>(i);
}

std::string_view op_name(const EffectOp& op) { return kOpNames[op.index()]; }
std::string_view op_kind_name(int index) { return kOpNames.at(static_cast<std::size_t>(index)); }

bool CardFilter::matches(const CardDef& card) const {
    if (kind && card.kind != *kind) return false;
    if (subkind && card.subkind != *subkind) return false;
    if (type) {
        const auto& pool = card.is_energy() ? card.provides : card.types;
        if (std::find(pool.begin(), pool.end(), *type) == pool.end()) return false;
    }
    if (name && card.name != *name) return false;
    return true;
}

const AttackDef* CardDef::find_attack(std::string_view attack_name) const {
    for (const auto& a : attacks) {
        if (a.name == attack_name) return &a;
    }
    return nullptr;
}

const CardDef* CardPool::find(std::string_view card_id) const {
    auto it = by_id.find(std::string(card_id));
    return it == by_id.end() ? nullptr : &cards[it->second];
}

const CardDef* CardPool::find_by_name(std::string_view name) const {
    auto it = by_name.find(std::string(name));
    return it == by_name.end() ? nullptr : &cards[it->second];
}

const EffectProgram& CardPool::program(ProgramId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= programs.size())
        throw EffectError("program id " + std::to_string(id) + " out of range");
    return programs[static_cast<std::size_t>(id)];
}

std::shared_ptr<const CardPool> parse_card_pool(std::string_view document) {
    const json doc = parse_document(document);
    if (!doc.is_object()) throw PoolError("card pool must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "pool_version" && key != "cards" && key != "description")
            throw PoolError("unknown top-level field '" + key + "'");
    }
    if (!doc.contains("pool_version") || !doc.at("pool_version").is_string())
        throw PoolError("missing pool_version");
    if (!doc.contains("cards") || !doc.at("cards").is_array()) throw PoolError("missing cards array");

    auto pool = std::make_shared<CardPool>();
    pool->pool_version = doc.at("pool_version").get<std::string>();
    CardParser parser(*pool);
    for (const auto& card : doc.at("cards")) {
        try {
            parser.parse_card(card);
        } catch (const json::exception& e) {
            parser.fail(std::string("malformed field: ") + e.what());
        }
    }
    for (const auto& card : pool->cards) {
        if (card.evolves_from) {
            const CardDef* base = pool->find_by_name(*card.evolves_from);
            const bool ok = base && base->is_pokemon() &&
                            ((card.subkind == CardSubkind::Stage1 && base->subkind == CardSubkind::Basic) ||
                             (card.subkind == CardSubkind::Stage2 && base->subkind == CardSubkind::Stage1));
            if (!ok)
                throw PoolError("card '" + card.card_id + "': evolves_from '" + *card.evolves_from +
                                    "' does not name a Pokemon one stage below",
                                0, 0, card.card_id);
        }
    }
    return pool;
}

std::shared_ptr<const CardPool> load_card_pool(const std::string& path) { return parse_card_pool(read_file(path)); }

DeckList parse_decklist(std::string_view document) {
    const json doc = parse_document(document);
    DeckList list;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key != "pool_version" && key != "deck_id" && key != "archetype" && key != "entries" &&
                key != "description")
                throw DeckError("unknown decklist field '" + key + "'");
        }
        list.pool_version = doc.at("pool_version").get<std::string>();
        list.deck_id = doc.at("deck_id").get<std::string>();
        auto archetype = parse_archetype(doc.at("archetype").get<std::string>());
        if (!archetype) throw DeckError("unknown archetype in deck '" + list.deck_id + "'");
        list.archetype = *archetype;
        for (const auto& e : doc.at("entries")) {
            list.entries.push_back({e.at("card_id").get<std::string>(), e.at("count").get<int>()});
        }
    } catch (const json::exception& e) {
        throw DeckError(std::string("malformed decklist: ") + e.what());
    }
    return list;
}

DeckList load_decklist(const std::string& path) { return parse_decklist(read_file(path)); }

Deck load_deck(const DeckList& list, const CardPool& pool) {
    if (!list.pool_version.empty() && list.pool_version != pool.pool_version)
        throw DeckError("deck '" + list.deck_id + "' targets pool_version " + list.pool_version + " but pool is " +
                        pool.pool_version);
    Deck deck;
    deck.deck_id = list.deck_id;
    deck.archetype = list.archetype;
    int total = 0;
    bool has_basic = false;
    std::unordered_map<std::string, int> per_name;
    for (const auto& entry : list.entries) {
        const CardDef* card = pool.find(entry.card_id);
        if (!card) throw DeckError("deck '" + list.deck_id + "': unknown card_id '" + entry.card_id + "'");
        if (entry.count <= 0) throw DeckError("deck '" + list.deck_id + "': non-positive count for " + entry.card_id);
        per_name[card->name] += entry.count;
        if (!card->is_basic_energy() && per_name[card->name] > kMaxCopies)
            throw DeckError("deck '" + list.deck_id + "': more than 4 copies of '" + card->name + "'");
        has_basic = has_basic || card->is_basic_pokemon();
        total += entry.count;
        for (int i = 0; i < entry.count; ++i) deck.cards.push_back(card);
    }
    if (total != kDeckSize)
        throw DeckError("deck '" + list.deck_id + "': Total != 60 (has " + std::to_string(total) + ")");
    if (!has_basic) throw DeckError("deck '" + list.deck_id + "': no Basic Pokemon");
    return deck;
}

int Deck::count_kind(CardKind k) const {
    return static_cast<int>(std::count_if(cards.begin(), cards.end(), [k](const CardDef* c) { return c->kind == k; }));
}

std::vector<int> op_usage(const CardPool& pool) {
    std::vector<int> usage(kOpKindCount, 0);
    for (const auto& program : pool.programs) {
        for (const auto& op : program.ops) ++usage[op.index()];
    }
    return usage;
}

}  // namespace tcg
