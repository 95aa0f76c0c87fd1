#include <algorithm>

#include "engine_internal.hpp"

namespace tcg::detail {

namespace {

enum class Step { Next, Suspend, Stop };

using Ids = std::vector<std::uint16_t>;

struct Runner {
    GameState& s;
    task::RunEffect& t;

    EffectContext& ctx() { return t.ctx; }
    int ctrl() const { return t.ctx.controller; }
    PlayerState& me() { return s.players[ctrl()]; }
    PlayerState& opp() { return s.players[opponent_of(ctrl())]; }
    std::string tag() const { return player_tag(t.ctx.controller); }

    PokemonInPlay& source() {
        if (ctx().source_pokemon == kNoCard) throw EffectError("effect has no source Pokemon");
        auto* pk = me().find(ctx().source_pokemon);
        if (!pk) throw EffectError("source Pokemon is no longer in play");
        return *pk;
    }

    PokemonInPlay& pokemon(std::uint16_t id) {
        auto* pk = s.find_pokemon(id);
        if (!pk) throw EffectError("Pokemon " + std::to_string(id) + " is not in play");
        return *pk;
    }

    // Pokemon ids for a target selector; nullopt when a prompt was installed.
    std::optional<Ids> targets(Target target, const char* reason) {
        switch (target) {
            case Target::Self:
                return Ids{source().id()};
            case Target::OwnActive:
                if (!me().active) throw EffectError("no own Active Pokemon");
                return Ids{me().active->id()};
            case Target::OppActive:
                if (!opp().active) throw EffectError("no opposing Active Pokemon");
                return Ids{opp().active->id()};
            case Target::OwnChoose:
                return ask(s, ctrl(), pokemon_candidates(me(), false), 1, 1, reason);
            case Target::OwnBenchChoose:
                return ask(s, ctrl(), pokemon_candidates(me(), true), 1, 1, reason);
            case Target::OppChoose:
                return ask(s, ctrl(), pokemon_candidates(opp(), false), 1, 1, reason);
            case Target::OppBenchChoose:
                return ask(s, ctrl(), pokemon_candidates(opp(), true), 1, 1, reason);
            case Target::OppBenchAll: {
                Ids out;
                for (const auto& b : opp().bench) out.push_back(b.id());
                return out;
            }
            case Target::Selected:
                if (ctx().selected == kNoCard) return Ids{};
                pokemon(ctx().selected);
                return Ids{ctx().selected};
            case Target::Main:
            case Target::Player:
                break;
        }
        throw EffectError("target '" + std::string(to_string(target)) + "' is not valid for this op");
    }

    bool target_available(Target target) {
        switch (target) {
            case Target::OwnBenchChoose: return !me().bench.empty();
            case Target::OppBenchChoose: return !opp().bench.empty();
            case Target::Selected: return ctx().selected != kNoCard;
            default: return true;
        }
    }

    std::vector<Card>& zone(Zone z) {
        switch (z) {
            case Zone::Deck: return me().deck;
            case Zone::Hand: return me().hand;
            case Zone::Discard: return me().discard;
            case Zone::Attached: return source().energy;
            case Zone::Bench: break;
        }
        throw EffectError("zone '" + std::string(to_string(z)) + "' cannot hold loose cards");
    }

    void deliver(Card c, Zone to) {
        switch (to) {
            case Zone::Bench:
                if (!c.def->is_basic_pokemon()) throw EffectError(c.def->name + " cannot be put onto the Bench");
                place_on_bench(s, ctrl(), c);
                return;
            case Zone::Attached:
                source().energy.push_back(c);
                return;
            default:
                zone(to).push_back(c);
        }
    }

    int count(Counter c) {
        switch (c) {
            case Counter::OwnBench: return static_cast<int>(me().bench.size());
            case Counter::OppBench: return static_cast<int>(opp().bench.size());
            case Counter::SelfEnergy: return static_cast<int>(source().energy.size());
            case Counter::OppActiveEnergy: return opp().active ? static_cast<int>(opp().active->energy.size()) : 0;
            case Counter::OwnHand: return static_cast<int>(me().hand.size());
            case Counter::OppPrizesTaken: return s.config.prize_cards - static_cast<int>(opp().prizes.size());
            case Counter::OwnPrizesTaken: return s.config.prize_cards - static_cast<int>(me().prizes.size());
            case Counter::SelfDamageCounters: return source().damage_counters;
            case Counter::OppActiveDamageCounters: return opp().active ? opp().active->damage_counters : 0;
            case Counter::LastSelection: return ctx().last_selection;
            case Counter::OwnDiscardEnergy:
                return static_cast<int>(std::count_if(me().discard.begin(), me().discard.end(),
                                                      [](const Card& x) { return x.def->is_energy(); }));
        }
        return 0;
    }

    static std::string names_of(const std::vector<Card>& cards) {
        std::string out;
        for (const auto& c : cards) {
            if (!out.empty()) out += ", ";
            out += c.def->name;
        }
        return out;
    }

    // ---- ops ----

    Step exec(const op::Draw& o) {
        const int n = std::min<int>(o.count, static_cast<int>(me().deck.size()));
        for (int i = 0; i < n; ++i) {
            me().hand.push_back(me().deck.back());
            me().deck.pop_back();
        }
        s.log(ctrl(), tag() + " drew " + std::to_string(n) + " card(s)");
        return Step::Next;
    }

    Step exec(const op::DrawTo& o) {
        const int need = std::max(0, o.hand_size - static_cast<int>(me().hand.size()));
        return exec(op::Draw{need});
    }

    Step exec(const op::SearchZone& o) {
        auto& src = zone(o.zone);
        int max = o.max;
        if (o.to == Zone::Bench) max = std::min<int>(max, kBenchLimit - static_cast<int>(me().bench.size()));
        auto r = ask(s, ctrl(), card_candidates(s, src, o.filter), o.min, max,
                     o.zone == Zone::Deck ? "search-deck" : "search-discard");
        if (!r) return Step::Suspend;
        std::vector<Card> moved;
        for (auto uid : *r) moved.push_back(take_card(src, uid));
        for (const auto& c : moved) deliver(c, o.to);
        if (o.zone == Zone::Deck) s.rng.shuffle(me().deck);
        ctx().last_selection = static_cast<int>(moved.size());
        const bool visible = o.reveal || o.to == Zone::Bench || o.to == Zone::Discard || o.zone == Zone::Discard;
        std::string text = tag() + " searched their " + std::string(to_string(o.zone)) + " and put " +
                           std::to_string(moved.size()) + " card(s) into their " + std::string(to_string(o.to));
        if (visible && !moved.empty()) text += ": " + names_of(moved);
        s.log(ctrl(), std::move(text));
        return Step::Next;
    }

    Step exec(const op::MoveCards& o) {
        auto& src = zone(o.from);
        auto cands = card_candidates(s, src, o.filter);
        Ids chosen;
        if (o.all) {
            for (const auto& c : cands) chosen.push_back(c.uid);
        } else {
            int max = o.max;
            if (o.to == Zone::Bench) max = std::min<int>(max, kBenchLimit - static_cast<int>(me().bench.size()));
            auto r = ask(s, ctrl(), std::move(cands), o.min, max, "move-cards");
            if (!r) return Step::Suspend;
            chosen = std::move(*r);
        }
        std::vector<Card> moved;
        for (auto uid : chosen) moved.push_back(take_card(src, uid));
        for (const auto& c : moved) deliver(c, o.to);
        ctx().last_selection = static_cast<int>(moved.size());
        auto is_public = [](Zone z) { return z == Zone::Discard || z == Zone::Bench || z == Zone::Attached; };
        std::string text = tag() + " moved " + std::to_string(moved.size()) + " card(s) from their " +
                           std::string(to_string(o.from)) + " to their " + std::string(to_string(o.to));
        if (is_public(o.from) && is_public(o.to) && !moved.empty()) text += ": " + names_of(moved);
        else if (is_public(o.to) && !moved.empty()) text += ": " + names_of(moved);
        s.log(ctrl(), std::move(text));
        return Step::Next;
    }

    Step exec(const op::AttachEnergyFrom& o) {
        auto& src = zone(o.from);
        if (ctx().stage == 0) {
            if (!target_available(o.target)) return Step::Next;
            std::vector<ChoiceCandidate> cands;
            for (const auto& c : card_candidates(s, src, o.filter)) {
                if (s.card_def(c.uid)->is_energy()) cands.push_back(c);
            }
            auto r = ask(s, ctrl(), std::move(cands), o.max, o.max, "attach-energy-select");
            if (!r) return Step::Suspend;
            if (r->empty()) {
                if (o.from == Zone::Deck) s.rng.shuffle(me().deck);
                return Step::Next;
            }
            ctx().scratch = std::move(*r);
            ctx().stage = 1;
        }
        auto tg = targets(o.target, "attach-energy-target");
        if (!tg) return Step::Suspend;
        if (tg->empty()) throw EffectError("no Pokemon to attach Energy to");
        auto& pk = pokemon(tg->front());
        std::vector<Card> moved;
        for (auto uid : ctx().scratch) moved.push_back(take_card(src, uid));
        pk.energy.insert(pk.energy.end(), moved.begin(), moved.end());
        if (o.from == Zone::Deck) s.rng.shuffle(me().deck);
        s.log(ctrl(), tag() + " attached " + names_of(moved) + " from their " + std::string(to_string(o.from)) +
                          " to " + label(pk));
        return Step::Next;
    }

    void put_damage(const Ids& ids, int amount) {
        for (auto id : ids) {
            auto& pk = pokemon(id);
            pk.damage_counters += amount / 10;
            s.log(ctrl(), label(pk) + " took " + std::to_string(amount) + " damage from an effect");
        }
    }

    Step exec(const op::Damage& o) {
        if (o.target == Target::Main) {
            ctx().bonus_damage += o.amount;
            return Step::Next;
        }
        auto tg = targets(o.target, "damage-target");
        if (!tg) return Step::Suspend;
        put_damage(*tg, o.amount);
        return Step::Next;
    }

    Step exec(const op::DamagePerCount& o) {
        if (o.target == Target::Main) {
            ctx().bonus_damage += o.unit * count(o.counter);
            return Step::Next;
        }
        if (ctx().stage == 0) {
            ctx().scratch = {static_cast<std::uint16_t>(o.unit * count(o.counter))};
            ctx().stage = 1;
        }
        auto tg = targets(o.target, "damage-target");
        if (!tg) return Step::Suspend;
        put_damage(*tg, ctx().scratch.front());
        return Step::Next;
    }

    Step exec(const op::Heal& o) {
        auto tg = targets(o.target, "heal-target");
        if (!tg) return Step::Suspend;
        for (auto id : *tg) {
            auto& pk = pokemon(id);
            const int healed = std::min(pk.damage_counters, o.amount / 10);
            pk.damage_counters -= healed;
            s.log(ctrl(), label(pk) + " was healed by " + std::to_string(healed * 10));
        }
        return Step::Next;
    }

    Step exec(const op::Discard& o) {
        auto& src = zone(o.zone);
        auto cands = card_candidates(s, src, o.filter);
        Ids chosen;
        if (o.all) {
            for (const auto& c : cands) chosen.push_back(c.uid);
        } else {
            auto r = ask(s, ctrl(), std::move(cands), o.min, o.max,
                         o.zone == Zone::Attached ? "discard-energy" : "discard-hand");
            if (!r) return Step::Suspend;
            chosen = std::move(*r);
        }
        std::vector<Card> moved;
        for (auto uid : chosen) moved.push_back(take_card(src, uid));
        me().discard.insert(me().discard.end(), moved.begin(), moved.end());
        ctx().last_selection = static_cast<int>(moved.size());
        std::string text = tag() + " discarded " + std::to_string(moved.size()) + " card(s)";
        if (!moved.empty()) text += ": " + names_of(moved);
        s.log(ctrl(), std::move(text));
        return Step::Next;
    }

    Step exec(const op::ApplyCondition& o) {
        auto tg = targets(o.target, "condition-target");
        if (!tg) return Step::Suspend;
        for (auto id : *tg) {
            int owner = 0;
            auto* pk = s.find_pokemon(id, &owner);
            if (!pk) throw EffectError("condition target left play");
            // Special Conditions only exist on the Active Spot.
            if (!s.players[owner].active || s.players[owner].active->id() != id) continue;
            pk->set(o.condition);
            s.log(ctrl(), label(*pk) + " is now " + std::string(to_string(o.condition)));
        }
        return Step::Next;
    }

    Step exec(const op::SwitchActive& o) {
        if (o.side == Side::Source) {
            const auto id = source().id();
            if (me().active && me().active->id() == id) return Step::Next;
            switch_in(s, ctrl(), id);
            s.log(ctrl(), tag() + " switched " + label(*me().active) + " into the Active Spot");
            return Step::Next;
        }
        const int who = o.side == Side::Self ? ctrl() : opponent_of(ctrl());
        auto r = ask(s, ctrl(), pokemon_candidates(s.players[who], true), 1, 1,
                     o.side == Side::Self ? "switch-own" : "switch-opponent");
        if (!r) return Step::Suspend;
        if (r->empty()) return Step::Next;
        switch_in(s, who, r->front());
        s.log(ctrl(), player_tag(who) + "'s " + label(*s.players[who].active) + " was switched into the Active Spot");
        return Step::Next;
    }

    Step exec(const op::Shuffle& o) {
        s.rng.shuffle(zone(o.zone));
        s.log(ctrl(), tag() + " shuffled their " + std::string(to_string(o.zone)));
        return Step::Next;
    }

    Step exec(const op::CoinFlip& o) {
        const bool heads = s.rng.coin();
        s.log(ctrl(), std::string("coin flip: ") + (heads ? "heads" : "tails"));
        const ProgramId next = heads ? o.heads : o.tails;
        // The caller advances this frame's pc before the branch runs.
        if (next != kNoProgram) pending_branch = next;
        return Step::Next;
    }

    Step exec(const op::ModifyDamage& o) {
        const int expires = s.turn_number + (o.duration == Duration::ThisTurn ? 0 : 1);
        const char* what = o.taken ? "damage taken" : "damage dealt";
        if (o.target == Target::Player) {
            me().modifiers.push_back({kNoCard, o.taken, o.delta, expires});
            s.log(ctrl(), tag() + "'s Pokemon: " + what + " " + std::to_string(o.delta));
            return Step::Next;
        }
        auto tg = targets(o.target, "modifier-target");
        if (!tg) return Step::Suspend;
        for (auto id : *tg) {
            int owner = 0;
            auto* pk = s.find_pokemon(id, &owner);
            if (!pk) throw EffectError("modifier target left play");
            s.players[owner].modifiers.push_back({id, o.taken, o.delta, expires});
            s.log(ctrl(), label(*pk) + ": " + what + " " + std::to_string(o.delta));
        }
        return Step::Next;
    }

    Step exec(const op::RequireChoice& o) {
        auto tg = targets(o.target, "select-target");
        if (!tg) return Step::Suspend;
        ctx().selected = tg->empty() ? kNoCard : tg->front();
        return Step::Next;
    }

    Step exec(const op::EvolveFromHand&) {
        if (ctx().stage == 0) {
            std::vector<ChoiceCandidate> cands;
            CardFilter stage2;
            stage2.subkind = CardSubkind::Stage2;
            for (const auto& c : card_candidates(s, me().hand, stage2)) {
                const CardDef& evo = *s.card_def(c.uid);
                bool any = false;
                for (const auto& cand : pokemon_candidates(me(), false)) {
                    any = any || can_evolve_onto(s, *me().find(cand.uid), evo, true);
                }
                if (any) cands.push_back(c);
            }
            auto r = ask(s, ctrl(), std::move(cands), 1, 1, "evolve-select");
            if (!r) return Step::Suspend;
            if (r->empty()) return Step::Next;
            ctx().scratch = std::move(*r);
            ctx().stage = 1;
        }
        const CardDef& evo = *s.card_def(ctx().scratch.front());
        std::vector<ChoiceCandidate> bases;
        for (const auto& cand : pokemon_candidates(me(), false)) {
            if (can_evolve_onto(s, *me().find(cand.uid), evo, true)) bases.push_back(cand);
        }
        auto r = ask(s, ctrl(), std::move(bases), 1, 1, "evolve-target");
        if (!r) return Step::Suspend;
        if (r->empty()) throw EffectError("evolution target vanished");
        auto& pk = pokemon(r->front());
        const std::string before = label(pk);
        pk.stack.push_back(take_card(me().hand, ctx().scratch.front()));
        pk.evolved_this_turn = true;
        pk.clear_all_conditions();
        s.log(ctrl(), tag() + " evolved " + before + " directly into " + evo.name);
        return Step::Next;
    }

    Step exec(const op::EndEffect& o) {
        ctx().cancel_attack = ctx().cancel_attack || o.cancel_attack;
        return Step::Stop;
    }

    ProgramId pending_branch = kNoProgram;
};

void resolve_main_damage(GameState& s, const EffectContext& ctx) {
    auto& me = s.players[ctx.controller];
    auto& opp = s.players[opponent_of(ctx.controller)];
    if (!me.active || me.active->id() != ctx.source_pokemon || !opp.active) return;
    const auto& atk = me.active->top().attacks.at(ctx.attack_index);
    const int base = atk.base_damage + ctx.bonus_damage;
    const int dmg = damage_after_modifiers(s, ctx.controller, *me.active, *opp.active, base);
    if (dmg <= 0) return;
    opp.active->damage_counters += dmg / 10;
    s.log(ctx.controller, label(*me.active) + " did " + std::to_string(dmg) + " damage to " + label(*opp.active));
}

}  // namespace

bool run_effect(GameState& s, task::RunEffect& t) {
    Runner run{s, t};
    while (!t.frames.empty()) {
        if (s.finished()) return true;
        const std::size_t fi = t.frames.size() - 1;
        const auto& program = s.pool->program(t.frames[fi].program);
        if (t.frames[fi].pc >= static_cast<int>(program.ops.size())) {
            t.frames.pop_back();
            continue;
        }
        const EffectOp& op = program.ops[t.frames[fi].pc];
        const Step step = std::visit([&](const auto& o) { return run.exec(o); }, op);
        if (step == Step::Suspend) return false;
        if (step == Step::Stop) {
            t.frames.clear();
            break;
        }
        t.frames[fi].pc += 1;
        t.ctx.stage = 0;
        t.ctx.scratch.clear();
        if (run.pending_branch != kNoProgram) {
            t.frames.push_back({run.pending_branch, 0});
            run.pending_branch = kNoProgram;
        }
    }
    if (t.kind == EffectKind::Attack && t.ctx.attack_index >= 0 && !t.ctx.cancel_attack && !s.finished())
        resolve_main_damage(s, t.ctx);
    return true;
}

}  // namespace tcg::detail
