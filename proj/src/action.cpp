#include "tcg/action.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace tcg {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, kToolCount> kToolNames{
    "attack",      "play_pokemon",    "evolve_pokemon", "attach_energy", "use_supporter",
    "use_item",    "use_tool",        "put_stadium",    "discard_stadium", "use_stadium",
    "use_ability", "retreat",         "choose_card",    "pass_turn"};

constexpr std::array<std::string_view, 3> kQueryNames{"query_card", "query_discard", "activate_skill"};

struct ArgSchema {
    std::vector<std::string_view> required;
    std::vector<std::string_view> optional;
};

const ArgSchema& schema_for(Tool t) {
    static const std::array<ArgSchema, kToolCount> schemas{{
        {{"source_card", "attack_name"}, {}},
        {{"source_card", "position"}, {}},
        {{"source_card", "target_card"}, {"target_index"}},
        {{"source_card", "target_card"}, {"target_index"}},
        {{"source_card"}, {}},
        {{"source_card"}, {}},
        {{"source_card", "target_card"}, {"target_index"}},
        {{"source_card"}, {}},
        {{"source_card"}, {}},
        {{"source_card"}, {}},
        {{"source_card"}, {"source_index", "ability_name"}},
        {{"source_card"}, {}},
        {{"chosen_cards"}, {}},
        {{}, {}},
    }};
    return schemas[static_cast<int>(t)];
}

}  // namespace

std::string_view to_string(Tool t) { return kToolNames[static_cast<int>(t)]; }
std::string_view to_string(QueryTool t) { return kQueryNames[static_cast<int>(t)]; }

std::optional<Tool> parse_tool(std::string_view s) {
    for (int i = 0; i < kToolCount; ++i) {
        if (kToolNames[i] == s) return static_cast<Tool>(i);
    }
    return std::nullopt;
}

std::optional<QueryTool> parse_query_tool(std::string_view s) {
    for (int i = 0; i < 3; ++i) {
        if (kQueryNames[i] == s) return static_cast<QueryTool>(i);
    }
    return std::nullopt;
}

std::string_view to_string(RejectCode c) {
    switch (c) {
        case RejectCode::UnknownTool: return "unknown_tool";
        case RejectCode::MissingArgument: return "missing_argument";
        case RejectCode::ExtraArgument: return "extra_argument";
        case RejectCode::BadArgument: return "bad_argument";
        case RejectCode::UnknownCard: return "unknown_card";
        case RejectCode::RuleViolation: return "rule_violation";
        case RejectCode::WrongPhase: return "wrong_phase";
    }
    return "?";
}

std::variant<ActionRequest, Rejection> parse_tool_call(const ToolCall& call) {
    auto tool = parse_tool(call.tool);
    if (!tool) return Rejection{RejectCode::UnknownTool, "unknown tool '" + call.tool + "'"};
    const json& args = call.arguments.is_null() ? json::object() : call.arguments;
    if (!args.is_object()) return Rejection{RejectCode::BadArgument, "arguments must be an object"};

    const auto& schema = schema_for(*tool);
    for (auto name : schema.required) {
        if (!args.contains(name))
            return Rejection{RejectCode::MissingArgument, "missing argument '" + std::string(name) + "'"};
    }
    for (const auto& [key, value] : args.items()) {
        const bool known = std::find(schema.required.begin(), schema.required.end(), key) != schema.required.end() ||
                           std::find(schema.optional.begin(), schema.optional.end(), key) != schema.optional.end();
        if (!known) return Rejection{RejectCode::ExtraArgument, "unexpected argument '" + key + "'"};
    }

    ActionRequest a;
    a.tool = *tool;
    auto get_string = [&](const char* key, std::string& out) -> std::optional<Rejection> {
        if (!args.contains(key)) return std::nullopt;
        if (!args.at(key).is_string())
            return Rejection{RejectCode::BadArgument, std::string("argument '") + key + "' must be a string"};
        out = args.at(key).get<std::string>();
        return std::nullopt;
    };
    auto get_int = [&](const char* key, std::optional<int>& out) -> std::optional<Rejection> {
        if (!args.contains(key)) return std::nullopt;
        if (!args.at(key).is_number_integer())
            return Rejection{RejectCode::BadArgument, std::string("argument '") + key + "' must be an integer"};
        out = args.at(key).get<int>();
        return std::nullopt;
    };
    if (auto r = get_string("source_card", a.source_card)) return *r;
    if (auto r = get_string("target_card", a.target_card)) return *r;
    if (auto r = get_string("attack_name", a.attack_name)) return *r;
    if (auto r = get_string("ability_name", a.ability_name)) return *r;
    if (auto r = get_int("source_index", a.source_index)) return *r;
    if (auto r = get_int("target_index", a.target_index)) return *r;
    if (args.contains("position")) {
        const auto& p = args.at("position");
        if (p == "active") a.position = Position::Active;
        else if (p == "bench") a.position = Position::Bench;
        else return Rejection{RejectCode::BadArgument, "position must be 'active' or 'bench'"};
    }
    if (args.contains("chosen_cards")) {
        const auto& c = args.at("chosen_cards");
        if (!c.is_array()) return Rejection{RejectCode::BadArgument, "chosen_cards must be an array of indices"};
        for (const auto& x : c) {
            if (!x.is_number_integer())
                return Rejection{RejectCode::BadArgument, "chosen_cards must be an array of indices"};
            a.chosen_cards.push_back(x.get<int>());
        }
    }
    return a;
}

json arguments_json(const ActionRequest& a) {
    json args = json::object();
    const auto& schema = schema_for(a.tool);
    auto wants = [&](std::string_view key) {
        return std::find(schema.required.begin(), schema.required.end(), key) != schema.required.end() ||
               std::find(schema.optional.begin(), schema.optional.end(), key) != schema.optional.end();
    };
    if (wants("source_card")) args["source_card"] = a.source_card;
    if (wants("target_card")) args["target_card"] = a.target_card;
    if (wants("attack_name")) args["attack_name"] = a.attack_name;
    if (wants("ability_name") && !a.ability_name.empty()) args["ability_name"] = a.ability_name;
    if (wants("source_index") && a.source_index) args["source_index"] = *a.source_index;
    if (wants("target_index") && a.target_index) args["target_index"] = *a.target_index;
    if (wants("position")) args["position"] = a.position == Position::Active ? "active" : "bench";
    if (wants("chosen_cards")) args["chosen_cards"] = a.chosen_cards;
    return args;
}

json action_to_json(const ActionRequest& a) {
    return {{"tool", std::string(to_string(a.tool))}, {"arguments", arguments_json(a)}};
}

ToolCall to_tool_call(const ActionRequest& a) { return {std::string(to_string(a.tool)), arguments_json(a)}; }

std::string describe(const ActionRequest& a) {
    std::string out(to_string(a.tool));
    out += '(';
    bool first = true;
    for (const auto& [key, value] : arguments_json(a).items()) {
        if (!first) out += ", ";
        first = false;
        out += key;
        out += '=';
        out += value.is_string() ? value.get<std::string>() : value.dump();
    }
    out += ')';
    return out;
}

}  // namespace tcg
