#include <algorithm>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "support/scenario.hpp"
#include "tcg/agents.hpp"
#include "tcg/engine.hpp"
#include "tcg/harness.hpp"
#include "tcg/match.hpp"
#include "tcg/snapshot.hpp"

namespace tcg {
namespace {

using json = nlohmann::json;
using namespace tcg::testing;

AgentReply garbage() { return AgentReply::ok({"flail_wildly", json::object()}); }

AgentReply first_listed(const DecisionRequest& r) {
    return AgentReply::ok(listed_actions(request_observation(r)).front());
}

struct Fixture : ::testing::Test {
    void SetUp() override {
        s = started_game("charizard-like", "gardevoir-like", 21);
        seat.match_id = "m";
        seat.rng = Rng(5);
    }
    DecisionOutcome step(ScriptedAgent::Script script) {
        agent = std::make_unique<ScriptedAgent>(std::move(script));
        seat.agent = agent.get();
        return decision_step(seat, s);
    }
    GameState s;
    Seat seat;
    std::unique_ptr<ScriptedAgent> agent;
};

using Harness = Fixture;

TEST_F(Harness, HappyPath) {
    const auto legal = legal_actions(s);
    const auto out = step(first_listed);
    EXPECT_EQ(out.executed, legal.front());
    EXPECT_FALSE(out.fallback);
    EXPECT_TRUE(out.rejected.empty());
    EXPECT_EQ(seat.accounting.decisions, 1);
    EXPECT_EQ(seat.accounting.action_attempts, 1);
    EXPECT_EQ(seat.accounting.invalid_attempts, 0);
    EXPECT_EQ(seat.accounting.tool_calls, 1);
}

TEST_F(Harness, GarbageTwiceThenLegal) {
    seat.config.retry_limit = 3;
    int calls = 0;
    std::vector<int> attempts;
    json last_feedback;
    const auto out = step([&](const DecisionRequest& r) {
        attempts.push_back(r.attempt);
        last_feedback = r.feedback;
        ++calls;
        if (calls == 1) return garbage();
        if (calls == 2) return AgentReply::failure(AgentReply::Status::Malformed, "not json");
        return first_listed(r);
    });
    EXPECT_EQ(seat.accounting.invalid_attempts, 2);
    EXPECT_EQ(seat.accounting.action_attempts, 3);
    EXPECT_FALSE(out.fallback);
    EXPECT_EQ(out.executed, legal_actions(started_game("charizard-like", "gardevoir-like", 21)).front());
    EXPECT_EQ(attempts, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(last_feedback["kind"], "invalid");
    ASSERT_EQ(out.rejected.size(), 2u);
    EXPECT_EQ(out.rejected[0].code, "unknown_tool");
    EXPECT_EQ(out.rejected[1].code, "malformed");
}

TEST_F(Harness, AlwaysGarbageFallsBackToRandomLegal) {
    seat.config.retry_limit = 2;
    seat.config.fallback_policy = FallbackPolicy::UniformRandomLegal;
    const auto legal = legal_actions(s);
    const auto out = step([](const DecisionRequest&) { return garbage(); });
    EXPECT_EQ(seat.accounting.invalid_attempts, 3);
    EXPECT_EQ(seat.accounting.action_attempts, 3);
    EXPECT_EQ(seat.accounting.fallbacks, 1);
    EXPECT_TRUE(out.fallback);
    EXPECT_NE(std::find(legal.begin(), legal.end(), out.executed), legal.end());
}

TEST_F(Harness, ZeroRetriesMeansOneAttempt) {
    seat.config.retry_limit = 0;
    step([](const DecisionRequest&) { return garbage(); });
    EXPECT_EQ(seat.accounting.action_attempts, 1);
    EXPECT_EQ(seat.accounting.fallbacks, 1);
}

TEST_F(Harness, PassFallback) {
    seat.config.retry_limit = 0;
    seat.config.fallback_policy = FallbackPolicy::PassTurn;
    const int before = s.turn_number;
    const auto out = step([](const DecisionRequest&) { return garbage(); });
    EXPECT_EQ(out.executed.tool, Tool::PassTurn);
    EXPECT_GT(s.turn_number, before);
}

TEST_F(Harness, PassFallbackDuringPromptPicksALegalChoice) {
    GameState t = s;
    for (const auto& st : sample_states(300, 1, 3)) {
        if (st.pending_choice) {
            t = st;
            break;
        }
    }
    ASSERT_TRUE(t.pending_choice);
    s = t;
    seat.config.retry_limit = 0;
    seat.config.fallback_policy = FallbackPolicy::PassTurn;
    const auto legal = legal_actions(s);
    const auto out = step([](const DecisionRequest&) { return garbage(); });
    EXPECT_EQ(out.executed.tool, Tool::ChooseCard);
    EXPECT_NE(std::find(legal.begin(), legal.end(), out.executed), legal.end());
}

TEST_F(Harness, IllegalButWellFormedIsInvalid) {
    const auto h = state_hash(s);
    seat.config.retry_limit = 0;
    seat.config.fallback_policy = FallbackPolicy::PassTurn;
    const auto out = step([](const DecisionRequest&) {
        return AgentReply::ok({"attack", {{"source_card", "Nobody"}, {"attack_name", "Nothing"}}});
    });
    ASSERT_EQ(out.rejected.size(), 1u);
    EXPECT_EQ(out.rejected[0].code, "unknown_card");
    EXPECT_NE(state_hash(s), h);  // only the fallback pass changed the state
}

TEST_F(Harness, QueriesAreAnsweredAndCounted) {
    std::vector<json> feedback;
    int calls = 0;
    const auto out = step([&](const DecisionRequest& r) {
        feedback.push_back(r.feedback);
        switch (calls++) {
            case 0: return AgentReply::ok({"query_card", {{"card_name", "Emberkit"}}});
            case 1: return AgentReply::ok({"query_card", {{"card_name", "Definitely Not A Card"}}});
            case 2: return AgentReply::ok({"query_discard", {{"player", "opponent"}}});
            case 3: return AgentReply::ok({"activate_skill", {{"skill", "x"}}});
            default: return first_listed(r);
        }
    });
    EXPECT_EQ(seat.accounting.query_calls, 4);
    EXPECT_EQ(seat.accounting.action_attempts, 1);
    EXPECT_EQ(seat.accounting.invalid_attempts, 0);
    EXPECT_EQ(seat.accounting.tool_calls, 5);
    ASSERT_EQ(out.queries.size(), 4u);
    EXPECT_TRUE(out.queries[0]["answer"]["found"].get<bool>());
    EXPECT_EQ(out.queries[0]["answer"]["card"]["hp"], 70);
    EXPECT_FALSE(out.queries[1]["answer"]["found"].get<bool>());
    EXPECT_TRUE(out.queries[2]["answer"]["cards"].is_array());
    EXPECT_EQ(feedback[1]["kind"], "query_result");
}

TEST_F(Harness, QueryBudgetPerDecision) {
    seat.config.retry_limit = 1;
    seat.config.fallback_policy = FallbackPolicy::PassTurn;
    const auto out = step([](const DecisionRequest&) { return AgentReply::ok({"query_card", {{"card_name", "Emberkit"}}}); });
    EXPECT_EQ(seat.accounting.query_calls, kMaxQueriesPerDecision);
    EXPECT_EQ(seat.accounting.invalid_attempts, 2);
    EXPECT_EQ(seat.accounting.tool_calls, seat.accounting.action_attempts + seat.accounting.query_calls);
    EXPECT_EQ(out.rejected[0].code, "query_budget");
    EXPECT_TRUE(out.fallback);
}

TEST_F(Harness, HistoryCarriesPreviousSteps) {
    seat.config.history_budget = 2;
    std::vector<std::size_t> sizes;
    auto script = [&](const DecisionRequest& r) {
        sizes.push_back(r.history.size());
        return AgentReply::ok({"pass_turn", json::object()});
    };
    agent = std::make_unique<ScriptedAgent>(script);
    seat.agent = agent.get();
    for (int i = 0; i < 4; ++i) {
        decision_step(seat, s);
        // Let the opponent pass too.
        ASSERT_TRUE(apply_action(s, s.acting_player(), ActionRequest{}));
    }
    EXPECT_EQ(sizes, (std::vector<std::size_t>{0, 1, 2, 2}));
    ASSERT_EQ(seat.history.size(), 2u);
    EXPECT_EQ(seat.history.back()["step_id"], 3);
    EXPECT_EQ(seat.history.back()["action"]["tool"], "pass_turn");
    EXPECT_FALSE(seat.history.back()["events"].empty());
}

TEST_F(Harness, NoHistoryKeepsObservationAndActions) {
    seat.config.history_enabled = false;
    std::vector<json> seen;
    auto script = [&](const DecisionRequest& r) {
        seen.push_back(r.history);
        EXPECT_TRUE(request_observation(r).contains("available_actions"));
        return AgentReply::ok({"pass_turn", json::object()});
    };
    agent = std::make_unique<ScriptedAgent>(script);
    seat.agent = agent.get();
    for (int i = 0; i < 3; ++i) {
        decision_step(seat, s);
        ASSERT_TRUE(apply_action(s, s.acting_player(), ActionRequest{}));
    }
    for (const auto& h : seen) EXPECT_TRUE(h.empty());
    EXPECT_TRUE(seat.history.empty());
}

TEST_F(Harness, RawObservationWhenUnstructured) {
    seat.config.structured_observation = false;
    step([](const DecisionRequest& r) {
        EXPECT_TRUE(r.observation.is_string());
        return first_listed(r);  // agents recover the structured form
    });
    EXPECT_EQ(seat.accounting.invalid_attempts, 0);
}

TEST_F(Harness, MaskingOffStillEnforcesRules) {
    seat.config.legal_action_masking = false;
    seat.config.retry_limit = 1;
    seat.config.fallback_policy = FallbackPolicy::PassTurn;
    const auto out = step([](const DecisionRequest& r) {
        EXPECT_FALSE(request_observation(r).contains("available_actions"));
        if (r.attempt == 0) return AgentReply::ok({"retreat", {{"source_card", "No Such Pokemon"}}});
        return AgentReply::ok({"pass_turn", json::object()});
    });
    EXPECT_EQ(seat.accounting.invalid_attempts, 1);
    EXPECT_EQ(out.executed.tool, Tool::PassTurn);
    EXPECT_FALSE(out.fallback);
}

// ----------------------------------------------------------------- history window

TEST(ManageHistory, FifoEviction) {
    HarnessConfig c;
    c.history_budget = 3;
    HistoryWindow w;
    for (int i = 1; i <= 4; ++i) manage_history(w, i, c);
    EXPECT_EQ(std::vector<json>(w.begin(), w.end()), (std::vector<json>{2, 3, 4}));
}

TEST(ManageHistory, DisabledStaysEmpty) {
    HarnessConfig c;
    c.history_enabled = false;
    HistoryWindow w;
    for (int i = 0; i < 5; ++i) manage_history(w, i, c);
    EXPECT_TRUE(w.empty());
}

TEST(ManageHistory, ZeroBudgetBehavesAsDisabled) {
    HarnessConfig c;
    c.history_budget = 0;
    HistoryWindow w{json(1)};
    manage_history(w, 2, c);
    EXPECT_TRUE(w.empty());
}

// ----------------------------------------------------------------- rates and config

TEST(InvalidRate, Arithmetic) {
    DecisionAccounting a;
    EXPECT_FALSE(compute_invalid_rate(a));
    a.action_attempts = 60;
    a.invalid_attempts = 2;
    EXPECT_NEAR(*compute_invalid_rate(a), 0.0333, 1e-4);
    a.invalid_attempts = 0;
    EXPECT_EQ(*compute_invalid_rate(a), 0.0);
    EXPECT_TRUE(accounting_to_json(DecisionAccounting{})["invalid_rate"].is_null());
}

TEST(InvalidRate, ScriptedOneInTen) {
    // Every tenth reply is garbage: 1 invalid per 9 valid.
    long n = 0;
    ScriptedAgent faulty([&](const DecisionRequest& r) {
        if (++n % 10 == 0) return garbage();
        return first_listed(r);
    });
    RandomAgent other;
    MatchSpec spec;
    spec.pool = shipped_pool();
    spec.decks = {shipped_deck("lugia-like"), shipped_deck("lugia-like")};
    DecisionAccounting total;
    for (std::uint64_t g = 0; total.action_attempts < 10000; ++g) {
        spec.seed = g;
        const auto out = play_match(spec, {&faulty, &other});
        total += out.accounting[0];
    }
    EXPECT_NEAR(*compute_invalid_rate(total), 0.100, 0.001);
    EXPECT_EQ(total.tool_calls, total.action_attempts + total.query_calls);
}

TEST(HarnessConfig, Validation) {
    HarnessConfig c;
    EXPECT_NO_THROW(c.validate());
    c.retry_limit = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = HarnessConfig{};
    c.history_budget = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(harness_config_from_json({{"retry_limt", 3}}), ConfigError);
    EXPECT_THROW(harness_config_from_json({{"fallback_policy", "give_up"}}), ConfigError);
}

TEST(HarnessConfig, JsonRoundTrip) {
    HarnessConfig c;
    c.structured_observation = false;
    c.legal_action_masking = false;
    c.history_budget = 4;
    c.retry_limit = 1;
    c.fallback_policy = FallbackPolicy::PassTurn;
    EXPECT_EQ(harness_config_from_json(harness_config_to_json(c)), c);
    EXPECT_EQ(harness_config_from_json(json::object()), HarnessConfig{});
    EXPECT_EQ(parse_fallback_policy("uniform_random_legal"), FallbackPolicy::UniformRandomLegal);
}

TEST(Accounting, InvariantsHoldThroughAMatch) {
    int n = 0;
    ScriptedAgent chaotic([&](const DecisionRequest& r) {
        switch (++n % 7) {
            case 0: return garbage();
            case 1: return AgentReply::ok({"query_discard", {{"player", "you"}}});
            case 2: return AgentReply::failure(AgentReply::Status::Timeout, "slow");
            default: return first_listed(r);
        }
    });
    HeuristicAgent other;
    MatchSpec spec;
    spec.pool = shipped_pool();
    spec.decks = {shipped_deck("gholdengo-like"), shipped_deck("miraidon-like")};
    spec.seed = 8;
    const auto out = play_match(spec, {&chaotic, &other});
    for (const auto& a : out.accounting) {
        EXPECT_LE(a.invalid_attempts, a.action_attempts);
        EXPECT_LE(a.action_attempts, a.tool_calls);
        EXPECT_EQ(a.tool_calls, a.action_attempts + a.query_calls);
    }
    EXPECT_GT(out.accounting[0].query_calls, 0);
    EXPECT_GT(out.accounting[0].invalid_attempts, 0);
}

}  // namespace
}  // namespace tcg
