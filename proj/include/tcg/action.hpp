#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace tcg {

// Game-action tools. Query tools (query_card, query_discard, activate_skill)
// never reach the engine; the harness answers them.
enum class Tool : std::uint8_t {
    Attack,
    PlayPokemon,
    EvolvePokemon,
    AttachEnergy,
    UseSupporter,
    UseItem,
    UseTool,
    PutStadium,
    DiscardStadium,
    UseStadium,
    UseAbility,
    Retreat,
    ChooseCard,
    PassTurn
};
inline constexpr int kToolCount = 14;

enum class QueryTool : std::uint8_t { QueryCard, QueryDiscard, ActivateSkill };

enum class Position : std::uint8_t { Active, Bench };

std::string_view to_string(Tool t);
std::optional<Tool> parse_tool(std::string_view s);
std::optional<QueryTool> parse_query_tool(std::string_view s);
std::string_view to_string(QueryTool t);

struct ActionRequest {
    Tool tool = Tool::PassTurn;
    std::string source_card;
    std::optional<int> source_index;
    std::string target_card;
    std::optional<int> target_index;
    std::string attack_name;
    std::string ability_name;
    std::optional<Position> position;
    std::vector<int> chosen_cards;

    bool operator==(const ActionRequest&) const = default;
};

enum class RejectCode : std::uint8_t {
    UnknownTool,
    MissingArgument,
    ExtraArgument,
    BadArgument,
    UnknownCard,
    RuleViolation,
    WrongPhase
};
std::string_view to_string(RejectCode c);

struct Rejection {
    RejectCode code = RejectCode::RuleViolation;
    std::string message;
};

// A raw tool call as produced by an agent: a name plus a JSON argument object.
struct ToolCall {
    std::string tool;
    nlohmann::json arguments = nlohmann::json::object();
};

// Schema validation: exactly the required arguments (plus the optional
// disambiguation indices) with the right JSON types.
std::variant<ActionRequest, Rejection> parse_tool_call(const ToolCall& call);

nlohmann::json arguments_json(const ActionRequest& a);
nlohmann::json action_to_json(const ActionRequest& a);  // {"tool", "arguments"}
ToolCall to_tool_call(const ActionRequest& a);
// Human-readable one-liner, e.g. attack(source_card=Emberkit, attack_name=Scratch).
std::string describe(const ActionRequest& a);

}  // namespace tcg
