#include <algorithm>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "support/scenario.hpp"
#include "tcg/engine.hpp"
#include "tcg/snapshot.hpp"

namespace tcg {
namespace {

using namespace tcg::testing;

constexpr const char* kRulesPool = R"({
  "pool_version": "rules",
  "cards": [
    {"card_id": "mon", "name": "Mon", "subkind": "Basic", "hp": 60, "types": ["Fire"], "weakness": "Water",
     "retreat_cost": 1, "attacks": [{"name": "Hit", "cost": ["Colorless"], "damage": 60}]},
    {"card_id": "mon-2", "name": "Mon Two", "subkind": "Stage1", "evolves_from": "Mon", "hp": 90, "types": ["Fire"],
     "retreat_cost": 1, "attacks": [{"name": "Hit Harder", "cost": ["Fire", "Colorless"], "damage": 90}]},
    {"card_id": "pal", "name": "Pal", "subkind": "Basic", "hp": 100, "types": ["Water"], "weakness": "Fire",
     "retreat_cost": 2, "attacks": [{"name": "Splash", "cost": ["Water"], "damage": 30}]},
    {"card_id": "wee", "name": "Wee", "subkind": "Basic", "hp": 50, "types": ["Grass"],
     "retreat_cost": 0, "attacks": [{"name": "Tap", "cost": [], "damage": 10}]},
    {"card_id": "mon-ex", "name": "Mon ex", "subkind": "Basic", "hp": 60, "types": ["Fire"], "prize_value": 2,
     "retreat_cost": 1, "attacks": [{"name": "Hit", "cost": ["Colorless"], "damage": 60}]},
    {"card_id": "fire", "name": "Fire Energy", "subkind": "BasicEnergy", "provides": ["Fire"]},
    {"card_id": "water", "name": "Water Energy", "subkind": "BasicEnergy", "provides": ["Water"]},
    {"card_id": "chat", "name": "Chat", "subkind": "Supporter", "effect": [{"op": "draw", "count": 1}]},
    {"card_id": "draw-two", "name": "Draw Two", "subkind": "Item", "effect": [{"op": "draw", "count": 2}]}
  ]
})";

std::shared_ptr<const CardPool> rules_pool() {
    static auto pool = parse_card_pool(kRulesPool);
    return pool;
}

Deck rules_deck() {
    Deck d;
    d.deck_id = "rules";
    auto add = [&](const char* id, int n) {
        for (int i = 0; i < n; ++i) d.cards.push_back(rules_pool()->find(id));
    };
    add("mon", 8);
    add("mon-2", 4);
    add("pal", 8);
    add("wee", 4);
    add("mon-ex", 2);
    add("fire", 12);
    add("water", 12);
    add("chat", 6);
    add("draw-two", 4);
    return d;
}

bool has_tool(const std::vector<ActionRequest>& v, Tool t) {
    return std::any_of(v.begin(), v.end(), [&](const ActionRequest& a) { return a.tool == t; });
}

ActionRequest make(Tool t, std::string source = {}) {
    ActionRequest a;
    a.tool = t;
    a.source_card = std::move(source);
    return a;
}

ActionRequest attack(const std::string& who, const std::string& name) {
    auto a = make(Tool::Attack, who);
    a.attack_name = name;
    return a;
}

ActionRequest choose(std::vector<int> idx) {
    auto a = make(Tool::ChooseCard);
    a.chosen_cards = std::move(idx);
    return a;
}

// Passes turns until `player` is active in TurnMain.
void pass_until(GameState& s, int player) {
    while (s.active_player != player || s.phase != Phase::TurnMain) {
        ASSERT_FALSE(s.finished());
        ASSERT_TRUE(apply_action(s, s.acting_player(), make(Tool::PassTurn)));
    }
}

class Rules : public ::testing::Test {
protected:
    void SetUp() override {
        s = started_game(rules_pool(), rules_deck(), rules_deck(), 5);
        p = s.active_player;
        o = opponent_of(p);
    }
    GameState s;
    int p = 0;
    int o = 1;
};

// ----------------------------------------------------------------- setup

TEST(Setup, CountsForAnySeed) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const GameState s = setup_game(shipped_pool(), shipped_deck("gardevoir-like"), shipped_deck("miraidon-like"), seed);
        for (int p : {0, 1}) {
            const auto& pl = s.players[p];
            const int bonus = s.players[opponent_of(p)].mulligans;
            EXPECT_EQ(pl.hand.size(), static_cast<std::size_t>(7 + bonus));
            EXPECT_EQ(pl.prizes.size(), 6u);
            EXPECT_EQ(pl.deck.size(), static_cast<std::size_t>(60 - 7 - 6 - bonus));
            EXPECT_TRUE(std::any_of(pl.hand.begin(), pl.hand.end(), [](const Card& c) { return c.def->is_basic_pokemon(); }));
        }
        EXPECT_EQ(s.phase, Phase::Setup);
        EXPECT_EQ(s.active_player, s.first_player);
        EXPECT_TRUE(card_conservation_check(s));
    }
}

TEST(Setup, PlacementsComeOutOfTheHand) {
    GameState s = setup_game(shipped_pool(), shipped_deck("miraidon-like"), shipped_deck("miraidon-like"), 3);
    const std::size_t deck0 = s.players[0].deck.size();
    const std::size_t hand0 = s.players[0].hand.size();
    s = started_game("miraidon-like", "miraidon-like", 3);
    EXPECT_EQ(s.players[0].deck.size(), deck0 - (s.active_player == 0 ? 1 : 0));  // the first player drew
    EXPECT_EQ(s.players[0].hand.size() + 1, hand0 + (s.active_player == 0 ? 1 : 0));
    EXPECT_EQ(s.turn_number, 1);
    EXPECT_EQ(s.active_player, s.first_player);
}

TEST(Setup, FirstPlayerComesFromTheSeededCoin) {
    int firsts[2] = {0, 0};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const GameState s = setup_game(rules_pool(), rules_deck(), rules_deck(), seed);
        ++firsts[s.first_player];
        EXPECT_EQ(s.first_player, setup_game(rules_pool(), rules_deck(), rules_deck(), seed).first_player);
    }
    EXPECT_GT(firsts[0], 60);
    EXPECT_GT(firsts[1], 60);
}

TEST(Setup, MulliganWithSingleBasic) {
    Deck lonely;
    lonely.deck_id = "lonely";
    lonely.cards.push_back(rules_pool()->find("mon"));
    while (lonely.cards.size() < 60) lonely.cards.push_back(rules_pool()->find("fire"));
    // Seed search for a game where the only Basic starts outside the opening 7.
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const GameState s = setup_game(rules_pool(), lonely, rules_deck(), seed);
        if (s.players[0].mulligans == 0) continue;
        EXPECT_EQ(s.players[1].hand.size(), static_cast<std::size_t>(7 + s.players[0].mulligans));
        EXPECT_EQ(s.players[0].hand.size(), 7u);
        EXPECT_EQ(s.players[0].hand.end() - std::find_if(s.players[0].hand.begin(), s.players[0].hand.end(),
                                                         [](const Card& c) { return c.def->card_id == "mon"; }) > 0,
                  true);
        int logged = 0;
        for (const auto& e : s.action_log) logged += e.text.find("mulligan") != std::string::npos && e.actor == 0;
        EXPECT_EQ(logged, s.players[0].mulligans);
        EXPECT_TRUE(card_conservation_check(s));
        return;
    }
    FAIL() << "no mulligan seed found";
}

TEST(Setup, SameSeedSameHash) {
    const auto a = setup_game(shipped_pool(), shipped_deck("lugia-like"), shipped_deck("gholdengo-like"), 99);
    const auto b = setup_game(shipped_pool(), shipped_deck("lugia-like"), shipped_deck("gholdengo-like"), 99);
    EXPECT_EQ(state_hash(a), state_hash(b));
}

TEST(Setup, OnlyPlacementDuringSetup) {
    GameState s = setup_game(rules_pool(), rules_deck(), rules_deck(), 1);
    const auto legal = legal_actions(s);
    for (const auto& a : legal) EXPECT_EQ(a.tool, Tool::PlayPokemon);  // no pass before an Active
    EXPECT_FALSE(apply_action(s, s.acting_player(), make(Tool::PassTurn)));
    auto r = apply_action(s, opponent_of(s.acting_player()), legal.front());
    EXPECT_FALSE(r);
    EXPECT_EQ(r.rejection.code, RejectCode::WrongPhase);
}

// ----------------------------------------------------------------- first turn

TEST_F(Rules, FirstPlayerCannotAttackOrPlaySupporterOnTurnOne) {
    set_active(s, p, "mon");
    attach_energy(s, p, *s.players[p].active, "fire");
    put_in_hand(s, p, "chat");
    ASSERT_EQ(s.turn_number, 1);
    const auto legal = legal_actions(s);
    EXPECT_FALSE(has_tool(legal, Tool::Attack));
    EXPECT_FALSE(has_tool(legal, Tool::UseSupporter));
    EXPECT_TRUE(has_tool(legal, Tool::UseItem) || std::none_of(s.players[p].hand.begin(), s.players[p].hand.end(),
                                                                 [](const Card& c) { return c.def->card_id == "draw-two"; }));
    const auto r = apply_action(s, p, attack("Mon", "Hit"));
    EXPECT_FALSE(r);
    EXPECT_EQ(r.rejection.code, RejectCode::RuleViolation);
    EXPECT_FALSE(apply_action(s, p, make(Tool::UseSupporter, "Chat")));
}

TEST_F(Rules, SecondPlayerMayAttackOnTheirFirstTurn) {
    pass_until(s, o);
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    put_in_hand(s, o, "chat");
    const auto legal = legal_actions(s);
    EXPECT_TRUE(has_tool(legal, Tool::Attack));
    EXPECT_TRUE(has_tool(legal, Tool::UseSupporter));
}

TEST_F(Rules, FirstTurnRulesAreConfigurable) {
    GameConfig c;
    c.first_player_may_attack = true;
    c.first_player_may_play_supporter = true;
    s.config = c;
    set_active(s, p, "mon");
    attach_energy(s, p, *s.players[p].active, "fire");
    put_in_hand(s, p, "chat");
    const auto legal = legal_actions(s);
    EXPECT_TRUE(has_tool(legal, Tool::Attack));
    EXPECT_TRUE(has_tool(legal, Tool::UseSupporter));
}

TEST_F(Rules, NoEvolutionDuringFirstTurnsOrOnEntryTurn) {
    set_active(s, p, "mon");
    put_in_hand(s, p, "mon-2");
    put_in_hand(s, p, "mon-2");
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::EvolvePokemon));
    pass_until(s, o);
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::EvolvePokemon));
    pass_until(s, p);
    ASSERT_EQ(s.turn_number, 3);
    // The Active has been in play since setup; a Mon benched now is fresh.
    put_in_hand(s, p, "mon");
    auto bench = make(Tool::PlayPokemon, "Mon");
    bench.position = Position::Bench;
    ASSERT_TRUE(apply_action(s, p, bench));
    const auto legal = legal_actions(s);
    int evolves = 0;
    for (const auto& a : legal) {
        if (a.tool != Tool::EvolvePokemon) continue;
        ++evolves;
        EXPECT_EQ(a.target_index, s.players[p].active->field_index);
    }
    EXPECT_EQ(evolves, 1);
    auto evo = make(Tool::EvolvePokemon, "Mon Two");
    evo.target_card = "Mon";
    evo.target_index = s.players[p].bench.back().field_index;
    const auto r = apply_action(s, p, evo);
    EXPECT_FALSE(r);
    EXPECT_NE(r.rejection.message.find("came into play this turn"), std::string::npos);
}

// ----------------------------------------------------------------- per-turn limits

TEST_F(Rules, EnergyOncePerTurn) {
    pass_until(s, o);
    set_active(s, o, "mon");
    put_in_hand(s, o, "fire");
    put_in_hand(s, o, "fire");
    auto a = make(Tool::AttachEnergy, "Fire Energy");
    a.target_card = "Mon";
    ASSERT_TRUE(apply_action(s, o, a));
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::AttachEnergy));
    const auto h = state_hash(s);
    const auto r = apply_action(s, o, a);
    EXPECT_FALSE(r);
    EXPECT_NE(r.rejection.message.find("energy already attached"), std::string::npos) << r.rejection.message;
    EXPECT_EQ(state_hash(s), h);
    pass_until(s, p);
    pass_until(s, o);
    EXPECT_TRUE(has_tool(legal_actions(s), Tool::AttachEnergy));  // flags reset at turn start
}

TEST_F(Rules, SupporterOncePerTurn) {
    pass_until(s, o);
    put_in_hand(s, o, "chat");
    put_in_hand(s, o, "chat");
    ASSERT_TRUE(apply_action(s, o, make(Tool::UseSupporter, "Chat")));
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::UseSupporter));
    EXPECT_FALSE(apply_action(s, o, make(Tool::UseSupporter, "Chat")));
}

TEST_F(Rules, RetreatPaysCostOncePerTurn) {
    pass_until(s, o);
    clear_bench(s, o);
    set_active(s, o, "pal");
    add_bench(s, o, "wee");
    attach_energy(s, o, *s.players[o].active, "water", 3);
    ASSERT_TRUE(has_tool(legal_actions(s), Tool::Retreat));
    ASSERT_TRUE(apply_action(s, o, make(Tool::Retreat, "Pal")));
    ASSERT_TRUE(s.pending_choice);
    EXPECT_EQ(s.pending_choice->reason, "retreat-discard");
    EXPECT_EQ(s.pending_choice->min_count, 2);
    EXPECT_EQ(s.pending_choice->max_count, 2);
    ASSERT_TRUE(apply_action(s, o, choose({0, 2})));
    if (s.pending_choice) ASSERT_TRUE(apply_action(s, o, choose({0})));  // pick the new Active
    EXPECT_EQ(s.players[o].active->top().card_id, "wee");
    ASSERT_EQ(s.players[o].bench.size(), 1u);
    EXPECT_EQ(s.players[o].bench[0].energy.size(), 1u);
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::Retreat));
    EXPECT_TRUE(card_conservation_check(s));
}

TEST_F(Rules, RetreatNeedsEnergyAndABench) {
    pass_until(s, o);
    clear_bench(s, o);
    set_active(s, o, "pal");
    attach_energy(s, o, *s.players[o].active, "water", 2);
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::Retreat));  // no bench
    add_bench(s, o, "wee");
    EXPECT_TRUE(has_tool(legal_actions(s), Tool::Retreat));
    s.players[o].discard.push_back(s.players[o].active->energy.back());
    s.players[o].active->energy.pop_back();
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::Retreat));  // cost 2, one Energy
    EXPECT_TRUE(card_conservation_check(s));
}

TEST_F(Rules, AsleepOrParalyzedBlocksAttackAndRetreat) {
    pass_until(s, o);
    clear_bench(s, o);
    set_active(s, o, "mon");
    add_bench(s, o, "wee");
    attach_energy(s, o, *s.players[o].active, "fire", 2);
    for (Condition c : {Condition::Asleep, Condition::Paralyzed}) {
        GameState t = s;
        t.players[o].active->set(c);
        const auto legal = legal_actions(t);
        EXPECT_FALSE(has_tool(legal, Tool::Attack)) << to_string(c);
        EXPECT_FALSE(has_tool(legal, Tool::Retreat)) << to_string(c);
        EXPECT_TRUE(has_tool(legal, Tool::PassTurn));
    }
    EXPECT_TRUE(has_tool(legal_actions(s), Tool::Attack));
}

TEST_F(Rules, AttackNeedsItsCost) {
    pass_until(s, o);
    set_active(s, o, "pal");
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::Attack));
    attach_energy(s, o, *s.players[o].active, "fire");
    EXPECT_FALSE(has_tool(legal_actions(s), Tool::Attack));  // Splash needs Water
    attach_energy(s, o, *s.players[o].active, "water");
    EXPECT_TRUE(has_tool(legal_actions(s), Tool::Attack));
}

TEST(CostSatisfied, ColorlessIsAWildcard) {
    auto pool = rules_pool();
    const Card fire{0, pool->find("fire")};
    const Card water{1, pool->find("water")};
    using E = EnergyType;
    EXPECT_TRUE(cost_satisfied({fire, water}, {E::Fire, E::Colorless}));
    EXPECT_TRUE(cost_satisfied({water, fire}, {E::Fire, E::Colorless}));
    EXPECT_FALSE(cost_satisfied({water, water}, {E::Fire, E::Colorless}));
    EXPECT_FALSE(cost_satisfied({fire}, {E::Fire, E::Colorless}));
    EXPECT_TRUE(cost_satisfied({}, {}));
}

TEST_F(Rules, PassAlwaysLegalInMainPhase) {
    for (int i = 0; i < 6; ++i) {
        EXPECT_TRUE(has_tool(legal_actions(s), Tool::PassTurn));
        ASSERT_TRUE(apply_action(s, s.active_player, make(Tool::PassTurn)));
    }
}

// ----------------------------------------------------------------- damage, KO, prizes

TEST_F(Rules, WeaknessDoublesDamage) {
    pass_until(s, o);
    set_active(s, o, "pal");
    set_active(s, p, "mon");
    EXPECT_EQ(attack_damage(s, o, *s.players[o].active, *s.players[p].active, 30), 60);
    EXPECT_EQ(attack_damage(s, p, *s.players[p].active, *s.players[o].active, 30), 60);  // Pal is weak to Fire
    set_active(s, p, "wee");
    EXPECT_EQ(attack_damage(s, o, *s.players[o].active, *s.players[p].active, 30), 30);
    EXPECT_EQ(attack_damage(s, o, *s.players[o].active, *s.players[p].active, 0), 0);
}

TEST_F(Rules, WeaknessAppliedByAttack) {
    pass_until(s, o);
    set_active(s, o, "pal");
    attach_energy(s, o, *s.players[o].active, "water");
    set_active(s, p, "mon-ex");  // not weak: takes 30
    add_bench(s, p, "wee");
    ASSERT_TRUE(apply_action(s, o, attack("Pal", "Splash")));
    EXPECT_EQ(s.players[p].active->damage_counters, 3);
}

TEST_F(Rules, KnockOutTakesAPrize) {
    pass_until(s, o);
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    set_active(s, p, "wee");  // 50 HP, no weakness
    if (s.players[p].bench.empty()) add_bench(s, p, "pal");
    const std::size_t discard = s.players[p].discard.size();
    ASSERT_TRUE(apply_action(s, o, attack("Mon", "Hit")));
    ASSERT_TRUE(s.pending_choice);
    EXPECT_EQ(s.pending_choice->chooser, o);
    EXPECT_EQ(s.pending_choice->reason, "take-prize");
    EXPECT_EQ(s.pending_choice->min_count, 1);
    for (const auto& c : s.pending_choice->candidates) EXPECT_TRUE(c.face_down);
    const std::size_t hand = s.players[o].hand.size();
    ASSERT_TRUE(apply_action(s, o, choose({3})));
    EXPECT_EQ(s.players[o].prizes.size(), 5u);
    EXPECT_EQ(s.players[o].hand.size(), hand + 1);
    EXPECT_EQ(s.players[p].discard.size(), discard + 1);  // Wee had no attachments
    // The defender promotes a new Active.
    if (s.pending_choice) {
        EXPECT_EQ(s.pending_choice->reason, "promote");
        ASSERT_TRUE(apply_action(s, p, choose({0})));
    }
    EXPECT_TRUE(s.players[p].active.has_value());
    EXPECT_TRUE(card_conservation_check(s));
    EXPECT_EQ(check_invariants(s), "");
}

TEST_F(Rules, KnockOutDiscardsAttachments) {
    pass_until(s, o);
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    set_active(s, p, "mon");
    attach_energy(s, p, *s.players[p].active, "fire", 2);
    if (s.players[p].bench.empty()) add_bench(s, p, "pal");
    const std::size_t discard = s.players[p].discard.size();
    ASSERT_TRUE(apply_action(s, o, attack("Mon", "Hit")));
    EXPECT_EQ(s.players[p].discard.size(), discard + 3);
}

TEST_F(Rules, MultiPrizePokemonGivesTwo) {
    pass_until(s, o);
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    set_active(s, p, "mon-ex");
    if (s.players[p].bench.empty()) add_bench(s, p, "pal");
    ASSERT_TRUE(apply_action(s, o, attack("Mon", "Hit")));
    ASSERT_TRUE(s.pending_choice);
    EXPECT_EQ(s.pending_choice->min_count, 2);
    EXPECT_EQ(s.pending_choice->max_count, 2);
    ASSERT_TRUE(apply_action(s, o, choose({0, 1})));
    EXPECT_EQ(s.players[o].prizes.size(), 4u);
}

// ----------------------------------------------------------------- win conditions

TEST_F(Rules, LastPrizeWins) {
    pass_until(s, o);
    auto& pl = s.players[o];
    while (pl.prizes.size() > 1) {
        pl.discard.push_back(pl.prizes.back());
        pl.prizes.pop_back();
    }
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    set_active(s, p, "wee");
    if (s.players[p].bench.empty()) add_bench(s, p, "pal");
    ASSERT_TRUE(apply_action(s, o, attack("Mon", "Hit")));
    if (s.pending_choice) ASSERT_TRUE(apply_action(s, o, choose({0})));
    ASSERT_TRUE(s.finished());
    EXPECT_EQ(s.result->winner, o);
    EXPECT_EQ(s.result->reason, WinReason::AllPrizes);
    EXPECT_TRUE(legal_actions(s).empty());
    EXPECT_EQ(check_win(s), s.result);
}

TEST_F(Rules, NoPokemonLeftWins) {
    pass_until(s, o);
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    clear_bench(s, p);
    set_active(s, p, "wee");
    ASSERT_TRUE(apply_action(s, o, attack("Mon", "Hit")));
    if (s.pending_choice) ASSERT_TRUE(apply_action(s, o, choose({0})));
    ASSERT_TRUE(s.finished());
    EXPECT_EQ(s.result->winner, o);
    EXPECT_EQ(s.result->reason, WinReason::NoPokemon);
    EXPECT_EQ(s.result->score(o) + s.result->score(p), 1.0);
}

TEST_F(Rules, DeckOutAtTurnStart) {
    auto& pl = s.players[o];
    pl.discard.insert(pl.discard.end(), pl.deck.begin(), pl.deck.end());
    pl.deck.clear();
    ASSERT_TRUE(apply_action(s, p, make(Tool::PassTurn)));
    ASSERT_TRUE(s.finished());
    EXPECT_EQ(s.result->winner, p);
    EXPECT_EQ(s.result->reason, WinReason::DeckOut);
}

TEST_F(Rules, TurnCapIsADraw) {
    s.config.turn_cap = 4;
    while (!s.finished()) ASSERT_TRUE(apply_action(s, s.acting_player(), make(Tool::PassTurn)));
    EXPECT_EQ(s.turn_number, 4);
    EXPECT_FALSE(s.result->winner);
    EXPECT_EQ(s.result->reason, WinReason::TurnCap);
    EXPECT_EQ(s.result->score(0), 0.5);
    EXPECT_EQ(s.result->score(1), 0.5);
}

TEST(CheckWin, NoneDuringSetupOrOngoingPlay) {
    GameState s = setup_game(rules_pool(), rules_deck(), rules_deck(), 4);
    EXPECT_FALSE(check_win(s));
    s = started_game(rules_pool(), rules_deck(), rules_deck(), 4);
    EXPECT_FALSE(check_win(s));
}

TEST(CheckWin, PrizesBeforeNoPokemon) {
    GameState s = started_game(rules_pool(), rules_deck(), rules_deck(), 4);
    auto& pl = s.players[0];
    pl.discard.insert(pl.discard.end(), pl.prizes.begin(), pl.prizes.end());
    pl.prizes.clear();
    auto r = check_win(s);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->winner, 0);
    EXPECT_EQ(r->reason, WinReason::AllPrizes);
}

// ----------------------------------------------------------------- upkeep

TEST_F(Rules, PoisonKnocksOutInUpkeep) {
    pass_until(s, o);
    set_active(s, o, "wee");
    s.players[o].active->damage_counters = 4;
    s.players[o].active->set(Condition::Poisoned);
    if (s.players[o].bench.empty()) add_bench(s, o, "pal");
    const std::size_t prizes = s.players[p].prizes.size();
    ASSERT_TRUE(apply_action(s, o, make(Tool::PassTurn)));
    // The opponent takes a prize for the Poison Knock Out.
    ASSERT_TRUE(s.pending_choice);
    EXPECT_EQ(s.pending_choice->reason, "take-prize");
    ASSERT_TRUE(apply_action(s, p, choose({0})));
    EXPECT_EQ(s.players[p].prizes.size(), prizes - 1);
    if (s.pending_choice) ASSERT_TRUE(apply_action(s, o, choose({0})));
    EXPECT_NE(s.players[o].active->top().card_id, "wee");
}

TEST_F(Rules, PoisonAddsOneCounter) {
    set_active(s, p, "pal");
    s.players[p].active->set(Condition::Poisoned);
    between_turns_upkeep(s);
    EXPECT_EQ(s.players[p].active->damage_counters, 1);
    EXPECT_TRUE(s.players[p].active->has(Condition::Poisoned));
}

TEST_F(Rules, BurnAddsTwoCountersThenFlips) {
    set_active(s, p, "pal");
    s.players[p].active->set(Condition::Burned);
    Rng predict = s.rng;
    const bool heads = predict.coin();
    between_turns_upkeep(s);
    EXPECT_EQ(s.players[p].active->damage_counters, 2);
    EXPECT_EQ(s.players[p].active->has(Condition::Burned), !heads);
}

TEST_F(Rules, AsleepWakesOnHeads) {
    set_active(s, p, "pal");
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        GameState t = s;
        t.rng = Rng(seed);
        t.players[p].active->set(Condition::Asleep);
        Rng predict(seed);
        const bool heads = predict.coin();
        between_turns_upkeep(t);
        EXPECT_EQ(t.players[p].active->has(Condition::Asleep), !heads) << "seed " << seed;
    }
}

TEST_F(Rules, ParalysisClearsAtEndOfOwnersTurn) {
    set_active(s, o, "pal");
    s.players[o].active->set(Condition::Paralyzed);
    set_active(s, p, "pal");
    s.players[p].active->set(Condition::Paralyzed);
    ASSERT_EQ(s.active_player, p);
    between_turns_upkeep(s);
    EXPECT_FALSE(s.players[p].active->has(Condition::Paralyzed));
    EXPECT_TRUE(s.players[o].active->has(Condition::Paralyzed));
}

TEST_F(Rules, NoConditionsNoChange) {
    const auto h = state_hash(s);
    const auto log = s.action_log.size();
    between_turns_upkeep(s);
    EXPECT_EQ(state_hash(s), h);
    EXPECT_EQ(s.action_log.size(), log);
}

// ----------------------------------------------------------------- rejections

TEST_F(Rules, RejectionsLeaveStateUnchanged) {
    const auto h = state_hash(s);
    struct Case {
        ToolCall call;
        RejectCode code;
    };
    const std::vector<Case> cases{
        {{"fly_away", {}}, RejectCode::UnknownTool},
        {{"attack", {{"source_card", "Mon"}}}, RejectCode::MissingArgument},
        {{"pass_turn", {{"source_card", "Mon"}}}, RejectCode::ExtraArgument},
        {{"attack", {{"source_card", 7}, {"attack_name", "Hit"}}}, RejectCode::BadArgument},
        {{"use_item", {{"source_card", "Nonexistent"}}}, RejectCode::UnknownCard},
        {{"choose_card", {{"chosen_cards", {0}}}}, RejectCode::WrongPhase},
    };
    for (const auto& c : cases) {
        const auto r = apply_tool_call(s, p, c.call);
        EXPECT_FALSE(r) << c.call.tool;
        EXPECT_EQ(r.rejection.code, c.code) << c.call.tool << ": " << r.rejection.message;
        EXPECT_FALSE(r.rejection.message.empty());
        EXPECT_EQ(state_hash(s), h);
    }
    const auto r = apply_action(s, o, make(Tool::PassTurn));
    EXPECT_FALSE(r);
    EXPECT_EQ(r.rejection.code, RejectCode::WrongPhase);
}

TEST_F(Rules, PendingChoiceOnlyAllowsChooseCard) {
    pass_until(s, o);
    set_active(s, o, "mon");
    attach_energy(s, o, *s.players[o].active, "fire");
    set_active(s, p, "wee");
    if (s.players[p].bench.empty()) add_bench(s, p, "pal");
    ASSERT_TRUE(apply_action(s, o, attack("Mon", "Hit")));
    ASSERT_TRUE(s.pending_choice);
    for (const auto& a : legal_actions(s)) EXPECT_EQ(a.tool, Tool::ChooseCard);
    EXPECT_EQ(apply_action(s, o, make(Tool::PassTurn)).rejection.code, RejectCode::WrongPhase);
    EXPECT_FALSE(apply_action(s, o, choose({})));
    EXPECT_FALSE(apply_action(s, o, choose({6})));
}

// ----------------------------------------------------------------- properties

TEST(Determinism, SameActionsSameHash) {
    auto run = [] {
        GameState s = setup_game(shipped_pool(), shipped_deck("charizard-like"), shipped_deck("gardevoir-like"), 31);
        Rng rng(8);
        while (!s.finished()) {
            const auto legal = legal_actions(s);
            apply_action(s, s.acting_player(), legal[rng.below(legal.size())]);
        }
        return state_hash(s);
    };
    EXPECT_EQ(run(), run());
}

TEST(Soundness, RandomGamesAcrossAllDecks) {
    FuzzOptions opt;
    opt.games = 40;
    opt.seed = 5150;
    opt.leak_every = 0;
    const auto rep = fuzz_random_games(opt);
    EXPECT_EQ(rep.finished, 40);
    EXPECT_EQ(rep.accepted_then_failed, 0) << (rep.errors.empty() ? "" : rep.errors[0]);
    EXPECT_EQ(rep.conservation_failures, 0);
    EXPECT_EQ(rep.invariant_failures, 0);
}

TEST(Completeness, SampledStates) {
    const auto states = sample_states(150, 606);
    int rejected = 0;
    for (const auto& s : states) {
        const auto rep = check_completeness(s);
        ASSERT_EQ(rep.error, "") << "state at turn " << s.turn_number;
        rejected += rep.rejected_candidates;
    }
    EXPECT_GT(rejected, 1000);
}

TEST(Completeness, UniverseAgreesWithListAfterSetup) {
    GameState s = started_game(rules_pool(), rules_deck(), rules_deck(), 12);
    const auto universe = candidate_universe(s);
    const auto listed = legal_actions(s);
    int accepted_unlisted = 0;
    for (const auto& a : universe) {
        const bool in = std::find(listed.begin(), listed.end(), a) != listed.end();
        accepted_unlisted += !in && !validate_action(s, s.acting_player(), a);
    }
    EXPECT_EQ(accepted_unlisted, 0);
    for (const auto& a : listed) {
        EXPECT_NE(std::find(universe.begin(), universe.end(), a), universe.end()) << describe(a);
    }
}

}  // namespace
}  // namespace tcg
