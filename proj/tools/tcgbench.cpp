// tcgbench: play single games, run tournaments, replay and validate.
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tcg/agents.hpp"
#include "tcg/card.hpp"
#include "tcg/match.hpp"
#include "tcg/snapshot.hpp"
#include "tcg/tournament.hpp"
#include "tcg/trajectory.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

#ifndef TCG_DATA_DIR
#define TCG_DATA_DIR "data"
#endif

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

struct HarnessFlags {
    bool no_structured = false;
    bool no_mask = false;
    bool no_history = false;
    std::optional<int> history_budget;
    std::optional<int> retry_limit;
    std::optional<std::string> fallback;

    void add(CLI::App* app) {
        app->add_flag("--no-structured-obs", no_structured, "Raw flat observation rendering");
        app->add_flag("--no-action-mask", no_mask, "Hide the legal-action list from agents");
        app->add_flag("--no-history", no_history, "Send no decision history");
        app->add_option("--history-budget", history_budget, "Decision steps kept in the history window");
        app->add_option("--retry-limit", retry_limit, "Retries after an invalid attempt before fallback");
        app->add_option("--fallback", fallback, "Fallback policy: uniform_random_legal or pass_turn");
    }

    void apply(tcg::HarnessConfig& h) const {
        if (no_structured) h.structured_observation = false;
        if (no_mask) h.legal_action_masking = false;
        if (no_history) h.history_enabled = false;
        if (history_budget) h.history_budget = *history_budget;
        if (retry_limit) h.retry_limit = *retry_limit;
        if (fallback) {
            auto f = tcg::parse_fallback_policy(*fallback);
            if (!f) throw tcg::ConfigError("--fallback must be uniform_random_legal or pass_turn");
            h.fallback_policy = *f;
        }
        h.validate();
    }
};

std::string default_pool() { return std::string(TCG_DATA_DIR) + "/pool.json"; }
std::string default_deck_dir() { return std::string(TCG_DATA_DIR) + "/decks"; }

tcg::Deck resolve_deck(const std::string& arg, const std::string& deck_dir, const tcg::CardPool& pool) {
    std::string path = arg;
    if (!fs::exists(path)) path = (fs::path(deck_dir) / (arg + ".json")).string();
    if (!fs::exists(path)) throw tcg::ConfigError("deck '" + arg + "' not found (looked in " + deck_dir + ")");
    try {
        return tcg::load_deck(tcg::load_decklist(path), pool);
    } catch (const std::exception& e) {
        throw tcg::ConfigError("deck " + path + ": " + e.what());
    }
}

std::shared_ptr<const tcg::CardPool> load_pool(const std::string& path) {
    try {
        return tcg::load_card_pool(path);
    } catch (const tcg::PoolError& e) {
        std::string where;
        if (e.line() > 0) where = " (line " + std::to_string(e.line()) + ", column " + std::to_string(e.column()) + ")";
        if (!e.card_id().empty()) where += " [card " + e.card_id() + "]";
        throw tcg::ConfigError("card pool " + path + ": " + e.what() + where);
    } catch (const std::exception& e) {
        throw tcg::ConfigError("card pool " + path + ": " + e.what());
    }
}

json rate_or_null(const tcg::DecisionAccounting& a) {
    auto r = tcg::compute_invalid_rate(a);
    return r ? json(*r) : json(nullptr);
}

// ---------------------------------------------------------------------------

struct PlayArgs {
    std::string pool = default_pool();
    std::string deck_dir = default_deck_dir();
    std::string deck_a = "charizard-like";
    std::string deck_b;
    std::string agent_a = "random";
    std::string agent_b = "random";
    std::uint64_t seed = 1;
    std::string log = "trajectory.jsonl";
    int turn_cap = 200;
    bool no_log_observations = false;
    HarnessFlags harness;
};

int cmd_play(const PlayArgs& a) {
    auto pool = load_pool(a.pool);
    tcg::MatchSpec m;
    m.pool = pool;
    m.decks = {resolve_deck(a.deck_a, a.deck_dir, *pool), resolve_deck(a.deck_b.empty() ? a.deck_a : a.deck_b, a.deck_dir, *pool)};
    m.seed = a.seed;
    m.game.turn_cap = a.turn_cap;
    m.game.validate();
    tcg::HarnessConfig h;
    a.harness.apply(h);
    m.harness = {h, h};
    const auto spec_a = tcg::parse_agent_shorthand(a.agent_a);
    const auto spec_b = tcg::parse_agent_shorthand(a.agent_b);
    m.agent_ids = {spec_a.id, spec_b.id};
    m.match_id = "play-" + std::to_string(a.seed);
    auto agent_a = tcg::make_agent(spec_a);
    auto agent_b = tcg::make_agent(spec_b);

    std::ostringstream log;
    tcg::LogOptions opt;
    opt.out = a.log.empty() ? nullptr : &log;
    opt.observations = !a.no_log_observations;
    const auto o = tcg::play_match(m, {agent_a.get(), agent_b.get()}, opt);
    if (!a.log.empty()) tcg::write_file_atomic(a.log, log.str());

    json line = {{"winner", o.result.winner ? json(*o.result.winner) : json(nullptr)},
                 {"reason", std::string(tcg::to_string(o.result.reason))},
                 {"turns", o.turns},
                 {"invalid_rates", {rate_or_null(o.accounting[0]), rate_or_null(o.accounting[1])}},
                 {"tool_calls", {o.accounting[0].tool_calls, o.accounting[1].tool_calls}},
                 {"final_hash", tcg::hash_hex(o.final_hash)}};
    std::cout << line.dump() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct TournamentArgs {
    std::string manifest;
    std::string out = "results";
    std::optional<int> workers;
    bool quiet = false;
    HarnessFlags harness;
};

void print_ratings(const json& metrics) {
    std::cout << std::left << std::setw(24) << "agent" << std::right << std::setw(9) << "mu" << std::setw(9) << "phi"
              << std::setw(10) << "sigma" << std::setw(7) << "games" << std::setw(9) << "invalid" << std::setw(11)
              << "tool/game" << '\n';
    for (const auto& a : metrics["agents"]) {
        const json& r = a.contains("rating") ? a["rating"] : json::object();
        std::cout << std::left << std::setw(24) << a["id"].get<std::string>() << std::right << std::fixed
                  << std::setprecision(1) << std::setw(9) << r.value("mu", 0.0) << std::setw(9) << r.value("phi", 0.0)
                  << std::setprecision(4) << std::setw(10) << r.value("sigma", 0.0) << std::setw(7)
                  << a["games"].get<int>() << std::setprecision(3) << std::setw(9)
                  << (a["invalid_rate"].is_null() ? 0.0 : a["invalid_rate"].get<double>()) << std::setprecision(1)
                  << std::setw(11) << (a["mean_tool_calls"].is_null() ? 0.0 : a["mean_tool_calls"].get<double>())
                  << '\n';
    }
}

void print_matrix(const json& metrics) {
    const auto& ids = metrics["ids"];
    std::cout << "\nhead-to-head (row score vs column)\n" << std::setw(6) << "";
    for (std::size_t j = 0; j < ids.size(); ++j) std::cout << std::setw(6) << j;
    std::cout << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::cout << std::setw(6) << i;
        for (const auto& cell : metrics["head_to_head"][i]) {
            if (cell.is_null()) std::cout << std::setw(6) << "-";
            else std::cout << std::setw(6) << std::fixed << std::setprecision(2) << cell.get<double>();
        }
        std::cout << "   " << ids[i].get<std::string>() << '\n';
    }
}

int cmd_tournament(const TournamentArgs& a) {
    auto spec = tcg::load_manifest(a.manifest);
    a.harness.apply(spec.harness);
    if (a.workers) spec.workers = *a.workers;
    spec.validate();
    tcg::ProgressFn progress;
    if (!a.quiet) {
        progress = [](const tcg::MatchRecord& r, std::size_t done, std::size_t total) {
            if (done % 10 == 0 || done == total)
                std::cerr << "[" << done << "/" << total << "] " << r.game_id << " " << r.reason << "\n";
        };
    }
    const auto res = tcg::run_tournament(spec, a.out, progress);
    std::cout << res.records.size() << " games written to " << a.out << "\n\n";
    print_ratings(res.metrics);
    if (spec.mode == tcg::TournamentMode::RoundRobin) print_matrix(res.metrics);
    else {
        std::cout << "\nround snapshots (" << spec.evolving.id << ")\n";
        for (const auto& s : res.snapshots)
            std::cout << "  round " << s["round"] << ": mu " << std::fixed << std::setprecision(1) << s["mu"].get<double>()
                      << "  phi " << s["phi"].get<double>() << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_replay(const std::string& mode, const std::string& path, const std::string& pool_path) {
    std::ifstream in(path);
    if (!in) throw tcg::ConfigError("cannot read log " + path);
    if (mode == "pretty") {
        std::cout << tcg::pretty_trajectory(in);
        return 0;
    }
    auto pool = load_pool(pool_path);
    const auto rep = tcg::verify_trajectory(in, pool);
    if (!rep.ok) {
        std::cout << "FAIL line " << rep.line << ": " << rep.message << '\n';
        return kExitVerify;
    }
    std::cout << "OK " << rep.records << " records, " << rep.actions << " actions verified\n";
    return 0;
}

int cmd_validate(const std::string& pool_path, const std::string& deck_dir, const std::vector<std::string>& decks) {
    auto pool = load_pool(pool_path);
    std::cout << "pool " << pool_path << ": " << pool->cards.size() << " cards, pool_version " << pool->pool_version << '\n';
    const auto usage = tcg::op_usage(*pool);
    std::cout << "effect ops used:";
    for (int i = 0; i < tcg::kOpKindCount; ++i) std::cout << ' ' << tcg::op_kind_name(i) << '=' << usage[i];
    std::cout << '\n';

    std::vector<std::string> paths = decks;
    if (paths.empty() && fs::is_directory(deck_dir)) {
        for (const auto& e : fs::directory_iterator(deck_dir)) {
            if (e.path().extension() == ".json") paths.push_back(e.path().string());
        }
        std::sort(paths.begin(), paths.end());
    }
    for (const auto& p : paths) {
        const auto deck = resolve_deck(p, deck_dir, *pool);
        std::cout << "deck " << deck.deck_id << " (" << tcg::to_string(deck.archetype)
                  << "): " << deck.count_kind(tcg::CardKind::Pokemon) << " Pokemon / "
                  << deck.count_kind(tcg::CardKind::Trainer) << " Trainer / " << deck.count_kind(tcg::CardKind::Energy)
                  << " Energy\n";
    }
    return 0;
}

int cmd_report(const std::string& dir) {
    const fs::path root(dir);
    std::ifstream records_in(root / "records.jsonl");
    std::ifstream ratings_in(root / "ratings.json");
    if (!records_in || !ratings_in) throw tcg::ConfigError(dir + " is not a results directory");
    std::vector<tcg::MatchRecord> records;
    for (std::string line; std::getline(records_in, line);) {
        if (!line.empty()) records.push_back(tcg::record_from_json(json::parse(line)));
    }
    const auto ratings = tcg::RatingTable::from_json(json::parse(ratings_in));
    std::vector<std::string> ids;
    for (const auto& e : ratings.entries()) ids.push_back(e.id);
    const json metrics = tcg::aggregate_metrics(records, ids, ratings);
    std::cout << records.size() << " games\n\n";
    print_ratings(metrics);
    print_matrix(metrics);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tcgbench: trading-card-game engine and agent evaluation harness"};
    app.require_subcommand(1);

    PlayArgs play;
    auto* play_cmd = app.add_subcommand("play", "Play one game and write its trajectory log");
    play_cmd->add_option("--pool", play.pool, "Card pool file")->capture_default_str();
    play_cmd->add_option("--deck-dir", play.deck_dir, "Directory of decklists")->capture_default_str();
    play_cmd->add_option("--deck-a", play.deck_a, "Deck id or path for seat 0")->capture_default_str();
    play_cmd->add_option("--deck-b", play.deck_b, "Deck for seat 1 (default: mirror of --deck-a)");
    play_cmd->add_option("--agent-a", play.agent_a, "random | heuristic | external:<command>")->capture_default_str();
    play_cmd->add_option("--agent-b", play.agent_b, "random | heuristic | external:<command>")->capture_default_str();
    play_cmd->add_option("--seed", play.seed, "Master seed")->capture_default_str();
    play_cmd->add_option("--log", play.log, "Trajectory log path (empty: no log)")->capture_default_str();
    play_cmd->add_option("--turn-cap", play.turn_cap, "Turn cap (draw when exceeded)")->capture_default_str();
    play_cmd->add_flag("--no-log-observations", play.no_log_observations, "Omit observation records from the log");
    play.harness.add(play_cmd);

    TournamentArgs tour;
    auto* tour_cmd = app.add_subcommand("tournament", "Run a round-robin or anchored tournament from a manifest");
    tour_cmd->add_option("manifest", tour.manifest, "Tournament manifest (JSON)")->required();
    tour_cmd->add_option("--out", tour.out, "Results directory")->capture_default_str();
    tour_cmd->add_option("--workers", tour.workers, "Parallel games (round robin)");
    tour_cmd->add_flag("--quiet", tour.quiet, "No progress output");
    tour.harness.add(tour_cmd);

    std::string replay_mode;
    std::string replay_log;
    std::string replay_pool = default_pool();
    auto* replay_cmd = app.add_subcommand("replay", "Verify or pretty-print a trajectory log");
    replay_cmd->add_option("mode", replay_mode, "verify | pretty")->required()->check(CLI::IsMember({"verify", "pretty"}));
    replay_cmd->add_option("log", replay_log, "Trajectory log")->required();
    replay_cmd->add_option("--pool", replay_pool, "Card pool file")->capture_default_str();

    std::string validate_pool = default_pool();
    std::string validate_deck_dir = default_deck_dir();
    std::vector<std::string> validate_decks;
    auto* validate_cmd = app.add_subcommand("validate", "Validate the card pool and decklists");
    validate_cmd->add_option("--pool", validate_pool, "Card pool file")->capture_default_str();
    validate_cmd->add_option("--deck-dir", validate_deck_dir, "Directory of decklists")->capture_default_str();
    validate_cmd->add_option("--deck", validate_decks, "Specific decklists (default: all in --deck-dir)");

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "Summarize a tournament results directory");
    report_cmd->add_option("results", report_dir, "Results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*play_cmd) return cmd_play(play);
        if (*tour_cmd) return cmd_tournament(tour);
        if (*replay_cmd) return cmd_replay(replay_mode, replay_log, replay_pool);
        if (*validate_cmd) return cmd_validate(validate_pool, validate_deck_dir, validate_decks);
        if (*report_cmd) return cmd_report(report_dir);
    } catch (const tcg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const tcg::PoolError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const tcg::DeckError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
