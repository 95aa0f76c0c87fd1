#include "tcg/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tcg/match.hpp"
#include "tcg/snapshot.hpp"

namespace tcg {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::vector<GameAssignment> schedule_round_robin(int n, int games_per_pair) {
    if (n < 2) throw std::invalid_argument("round robin needs at least 2 participants");
    if (games_per_pair < 1) throw std::invalid_argument("games per pair must be at least 1");
    std::vector<GameAssignment> out;
    out.reserve(static_cast<std::size_t>(n * (n - 1) / 2 * games_per_pair));
    for (int cycle = 0; cycle < games_per_pair; ++cycle) {
        int pair = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j, ++pair) {
                GameAssignment g;
                g.index = static_cast<int>(out.size());
                g.cycle = cycle;
                g.pair = pair;
                g.game_in_pair = cycle;
                g.seat0 = cycle % 2 == 0 ? i : j;
                g.seat1 = cycle % 2 == 0 ? j : i;
                out.push_back(g);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Manifest

void TournamentSpec::validate() const {
    harness.validate();
    game.validate();
    if (mirror_deck.empty() == deck_pairs.empty())
        throw ConfigError("give exactly one of 'deck' (mirror) or 'deck_pairs'");
    if (workers < 0) throw ConfigError("workers must be >= 0");
    std::set<std::string> ids;
    auto unique = [&](const std::string& id) {
        if (!ids.insert(id).second) throw ConfigError("duplicate agent id '" + id + "'");
    };
    if (mode == TournamentMode::RoundRobin) {
        if (participants.size() < 2) throw ConfigError("round robin needs at least 2 participants");
        if (games_per_pair < 1) throw ConfigError("games_per_pair must be >= 1");
        for (const auto& p : participants) unique(p.id);
    } else {
        if (anchors.empty()) throw ConfigError("anchored mode needs at least one anchor");
        if (rounds < 1) throw ConfigError("rounds must be >= 1");
        if (games_per_anchor < 1) throw ConfigError("games_per_anchor must be >= 1");
        if (evolving.id.empty()) throw ConfigError("anchored mode needs an evolving agent");
        unique(evolving.id);
        for (const auto& a : anchors) unique(a.agent.id);
        if (mechanism == EvolutionMechanism::External && evolving.kind != "external")
            throw ConfigError("the external evolution mechanism needs an external evolving agent");
    }
}

namespace {

std::string resolve(const std::string& base, const std::string& path) {
    if (base.empty() || path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base) / path).lexically_normal().string();
}

template <typename T>
T get_as(const json& v, const std::string& key, const char* what) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("manifest key '" + key + "' must be " + what);
    }
}

std::string_view to_string(EvolutionMechanism m) {
    switch (m) {
        case EvolutionMechanism::None: return "none";
        case EvolutionMechanism::Scripted: return "scripted";
        case EvolutionMechanism::External: return "external";
    }
    return "?";
}

}  // namespace

TournamentSpec parse_manifest(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
    TournamentSpec s;
    bool have_mode = false;
    for (const auto& [key, v] : j.items()) {
        if (key == "mode") {
            const auto m = get_as<std::string>(v, key, "a string");
            if (m == "round_robin") s.mode = TournamentMode::RoundRobin;
            else if (m == "anchored") s.mode = TournamentMode::Anchored;
            else throw ConfigError("mode must be round_robin or anchored");
            have_mode = true;
        } else if (key == "participants") {
            if (!v.is_array()) throw ConfigError("participants must be an array");
            for (const auto& p : v) s.participants.push_back(agent_spec_from_json(p));
        } else if (key == "anchors") {
            if (!v.is_array()) throw ConfigError("anchors must be an array");
            for (const auto& a : v) {
                if (!a.is_object() || !a.contains("rating")) throw ConfigError("each anchor needs a rating");
                json agent = a;
                agent.erase("rating");
                AnchorSpec spec{agent_spec_from_json(agent), {}};
                try {
                    spec.rating = rating_from_json(a["rating"]);
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("anchor rating: ") + e.what());
                }
                spec.rating.frozen = true;
                s.anchors.push_back(std::move(spec));
            }
        } else if (key == "evolving") {
            s.evolving = agent_spec_from_json(v);
        } else if (key == "evolution") {
            const auto m = get_as<std::string>(v, key, "a string");
            if (m == "none") s.mechanism = EvolutionMechanism::None;
            else if (m == "scripted") s.mechanism = EvolutionMechanism::Scripted;
            else if (m == "external") s.mechanism = EvolutionMechanism::External;
            else throw ConfigError("evolution must be none, scripted or external");
        } else if (key == "initial_state") {
            s.initial_state = resolve(base_dir, get_as<std::string>(v, key, "a string"));
        } else if (key == "deck") {
            s.mirror_deck = get_as<std::string>(v, key, "a string");
        } else if (key == "deck_pairs") {
            if (!v.is_array() || v.empty()) throw ConfigError("deck_pairs must be a non-empty array of [deck, deck]");
            for (const auto& p : v) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
                    throw ConfigError("deck_pairs entries must be [deck, deck]");
                s.deck_pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
            }
        } else if (key == "games_per_pair") {
            s.games_per_pair = get_as<int>(v, key, "an integer");
        } else if (key == "rounds") {
            s.rounds = get_as<int>(v, key, "an integer");
        } else if (key == "games_per_anchor") {
            s.games_per_anchor = get_as<int>(v, key, "an integer");
        } else if (key == "master_seed") {
            if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw ConfigError("master_seed must be a non-negative integer");
            s.master_seed = v.get<std::uint64_t>();
        } else if (key == "pool") {
            s.pool_path = get_as<std::string>(v, key, "a string");
        } else if (key == "deck_dir") {
            s.deck_dir = get_as<std::string>(v, key, "a string");
        } else if (key == "harness") {
            s.harness = harness_config_from_json(v);
        } else if (key == "game") {
            try {
                s.game = config_from_json(v);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError(std::string("game config: ") + e.what());
            }
        } else if (key == "workers") {
            s.workers = get_as<int>(v, key, "an integer");
        } else if (key == "log_observations") {
            s.log_observations = get_as<bool>(v, key, "a boolean");
        } else if (key == "evolve_deadline_ms") {
            s.evolve_deadline_ms = get_as<int>(v, key, "an integer");
        } else {
            throw ConfigError("unknown manifest key: " + key);
        }
    }
    if (!have_mode) throw ConfigError("manifest lacks 'mode'");
    s.pool_path = resolve(base_dir, s.pool_path);
    s.deck_dir = resolve(base_dir, s.deck_dir);
    s.validate();
    return s;
}

TournamentSpec load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read manifest " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("manifest " + path + " is not valid JSON");
    return parse_manifest(j, fs::path(path).parent_path().string());
}

json manifest_to_json(const TournamentSpec& s) {
    json j;
    j["mode"] = s.mode == TournamentMode::RoundRobin ? "round_robin" : "anchored";
    if (s.mode == TournamentMode::RoundRobin) {
        j["participants"] = json::array();
        for (const auto& p : s.participants) j["participants"].push_back(agent_spec_to_json(p));
        j["games_per_pair"] = s.games_per_pair;
    } else {
        j["anchors"] = json::array();
        for (const auto& a : s.anchors) {
            json e = agent_spec_to_json(a.agent);
            Rating r = a.rating;
            e["rating"] = {{"mu", r.mu}, {"phi", r.phi}, {"sigma", r.sigma}};
            j["anchors"].push_back(e);
        }
        j["evolving"] = agent_spec_to_json(s.evolving);
        j["evolution"] = std::string(to_string(s.mechanism));
        if (!s.initial_state.empty()) j["initial_state"] = s.initial_state;
        j["rounds"] = s.rounds;
        j["games_per_anchor"] = s.games_per_anchor;
        j["evolve_deadline_ms"] = s.evolve_deadline_ms;
    }
    if (!s.mirror_deck.empty()) {
        j["deck"] = s.mirror_deck;
    } else {
        j["deck_pairs"] = json::array();
        for (const auto& [a, b] : s.deck_pairs) j["deck_pairs"].push_back({a, b});
    }
    j["master_seed"] = s.master_seed;
    j["pool"] = s.pool_path;
    j["deck_dir"] = s.deck_dir;
    j["harness"] = harness_config_to_json(s.harness);
    j["game"] = config_to_json(s.game);
    j["workers"] = s.workers;
    j["log_observations"] = s.log_observations;
    return j;
}

// ---------------------------------------------------------------------------
// Records and metrics

json record_to_json(const MatchRecord& r) {
    return {{"game_id", r.game_id},
            {"cycle", r.cycle},
            {"agents", r.agents},
            {"decks", r.decks},
            {"seed", r.seed},
            {"scores", r.scores},
            {"winner", r.winner ? json(*r.winner) : json(nullptr)},
            {"reason", r.reason},
            {"turns", r.turns},
            {"accounting", json::array({accounting_to_json(r.accounting[0]), accounting_to_json(r.accounting[1])})},
            {"log", r.log_path},
            {"final_hash", r.final_hash}};
}

MatchRecord record_from_json(const json& j) {
    MatchRecord r;
    r.game_id = j.at("game_id").get<std::string>();
    r.cycle = j.at("cycle").get<int>();
    r.agents = j.at("agents").get<std::array<std::string, 2>>();
    r.decks = j.at("decks").get<std::array<std::string, 2>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.scores = j.at("scores").get<std::array<double, 2>>();
    if (!j.at("winner").is_null()) r.winner = j["winner"].get<int>();
    r.reason = j.at("reason").get<std::string>();
    r.turns = j.at("turns").get<int>();
    for (int i = 0; i < 2; ++i) r.accounting[i] = accounting_from_json(j.at("accounting").at(i));
    r.log_path = j.value("log", "");
    r.final_hash = j.value("final_hash", "");
    return r;
}

json aggregate_metrics(const std::vector<MatchRecord>& records, const std::vector<std::string>& ids,
                       const RatingTable& ratings) {
    const std::size_t n = ids.size();
    auto index_of = [&](const std::string& id) -> std::size_t {
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) throw std::invalid_argument("record names unknown agent '" + id + "'");
        return static_cast<std::size_t>(it - ids.begin());
    };
    std::vector<std::vector<double>> points(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<int>> games(n, std::vector<int>(n, 0));
    std::vector<DecisionAccounting> acc(n);
    std::vector<int> played(n, 0);
    std::vector<double> score(n, 0.0);

    for (const auto& r : records) {
        const std::size_t a = index_of(r.agents[0]);
        const std::size_t b = index_of(r.agents[1]);
        points[a][b] += r.scores[0];
        points[b][a] += r.scores[1];
        ++games[a][b];
        ++games[b][a];
        for (int seat = 0; seat < 2; ++seat) {
            const std::size_t i = seat == 0 ? a : b;
            acc[i] += r.accounting[seat];
            ++played[i];
            score[i] += r.scores[seat];
        }
    }

    json matrix = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            row.push_back(games[i][j] > 0 ? json(points[i][j] / games[i][j]) : json(nullptr));
        }
        matrix.push_back(row);
    }

    json agents = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json a = {{"id", ids[i]}, {"games", played[i]}};
        if (ratings.contains(ids[i])) a["rating"] = rating_to_json(ratings.at(ids[i]));
        const auto rate = compute_invalid_rate(acc[i]);
        a["invalid_rate"] = rate ? json(*rate) : json(nullptr);
        const double g = played[i] > 0 ? static_cast<double>(played[i]) : 1.0;
        a["mean_tool_calls"] = played[i] ? json(static_cast<double>(acc[i].tool_calls) / g) : json(nullptr);
        a["mean_action_attempts"] = played[i] ? json(static_cast<double>(acc[i].action_attempts) / g) : json(nullptr);
        a["mean_query_calls"] = played[i] ? json(static_cast<double>(acc[i].query_calls) / g) : json(nullptr);
        a["score_rate"] = played[i] ? json(score[i] / g) : json(nullptr);
        a["accounting"] = accounting_to_json(acc[i]);
        agents.push_back(a);
    }
    return {{"games", records.size()}, {"ids", ids}, {"agents", agents}, {"head_to_head", matrix}};
}

// ---------------------------------------------------------------------------
// Execution

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
    }
    fs::rename(tmp, p);
}

namespace {

class DeckCache {
public:
    DeckCache(std::shared_ptr<const CardPool> pool, std::string dir) : pool_(std::move(pool)), dir_(std::move(dir)) {}
    const Deck& get(const std::string& id) {
        auto it = decks_.find(id);
        if (it != decks_.end()) return it->second;
        try {
            return decks_.emplace(id, load_deck(load_decklist((fs::path(dir_) / (id + ".json")).string()), *pool_))
                .first->second;
        } catch (const std::exception& e) {
            throw ConfigError("deck '" + id + "': " + e.what());
        }
    }

private:
    std::shared_ptr<const CardPool> pool_;
    std::string dir_;
    std::map<std::string, Deck> decks_;
};

std::pair<std::string, std::string> decks_for(const TournamentSpec& spec, int k) {
    if (!spec.mirror_deck.empty()) return {spec.mirror_deck, spec.mirror_deck};
    return spec.deck_pairs[static_cast<std::size_t>(k) % spec.deck_pairs.size()];
}

std::string game_name(int index, const std::string& a, const std::string& b) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "g%05d", index);
    return std::string(buf) + "-" + a + "-vs-" + b;
}

struct GameJob {
    std::string game_id;
    int cycle = 0;
    std::array<const AgentSpec*, 2> specs{};
    std::array<std::string, 2> decks;
    std::uint64_t seed = 0;
};

MatchRecord run_job(const GameJob& job, const TournamentSpec& spec, std::shared_ptr<const CardPool> pool,
                    DeckCache& decks, std::mutex& deck_mu, std::array<Agent*, 2> agents, const std::string& results_dir) {
    MatchSpec m;
    m.match_id = job.game_id;
    m.pool = pool;
    {
        std::lock_guard<std::mutex> lock(deck_mu);
        m.decks = {decks.get(job.decks[0]), decks.get(job.decks[1])};
    }
    m.seed = job.seed;
    m.game = spec.game;
    m.harness = {spec.harness, spec.harness};
    m.agent_ids = {job.specs[0]->id, job.specs[1]->id};

    std::ostringstream log;
    LogOptions opt;
    opt.out = results_dir.empty() ? nullptr : &log;
    opt.observations = spec.log_observations;
    const MatchOutcome o = play_match(m, agents, opt);

    MatchRecord r;
    r.game_id = job.game_id;
    r.cycle = job.cycle;
    r.agents = m.agent_ids;
    r.decks = job.decks;
    r.seed = job.seed;
    r.scores = {o.score(0), o.score(1)};
    r.winner = o.result.winner;
    r.reason = std::string(to_string(o.result.reason));
    r.turns = o.turns;
    r.accounting = o.accounting;
    r.final_hash = hash_hex(o.final_hash);
    if (!results_dir.empty()) {
        r.log_path = "games/" + job.game_id + ".jsonl";
        write_file_atomic((fs::path(results_dir) / r.log_path).string(), log.str());
    }
    return r;
}

// Runs independent jobs with fresh agents on a worker pool; results keep job order.
std::vector<MatchRecord> run_parallel(const std::vector<GameJob>& jobs, const TournamentSpec& spec,
                                      std::shared_ptr<const CardPool> pool, DeckCache& decks,
                                      const std::string& results_dir, const ProgressFn& progress) {
    std::vector<MatchRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex deck_mu;
    std::mutex progress_mu;
    std::exception_ptr failure;
    std::mutex failure_mu;

    unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers) : std::thread::hardware_concurrency();
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                auto a0 = make_agent(*jobs[i].specs[0]);
                auto a1 = make_agent(*jobs[i].specs[1]);
                out[i] = run_job(jobs[i], spec, pool, decks, deck_mu, {a0.get(), a1.get()}, results_dir);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
                return;
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mu);
                progress(out[i], d, jobs.size());
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string records_jsonl(const std::vector<MatchRecord>& records) {
    std::string s;
    for (const auto& r : records) s += record_to_json(r).dump() + "\n";
    return s;
}

void copy_dir(const fs::path& from, const fs::path& to) {
    fs::remove_all(to);
    fs::create_directories(to);
    if (fs::exists(from)) fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

// Scripted mechanism: one line per round in notes.txt.
void scripted_evolve(const fs::path& dir, int round, const std::vector<MatchRecord>& games, const std::string& id) {
    double points = 0;
    for (const auto& g : games) points += g.agents[0] == id ? g.scores[0] : g.scores[1];
    std::ofstream out(dir / "notes.txt", std::ios::app);
    out << "round " << round << ": " << games.size() << " games, " << points << " points\n";
    if (!out) throw std::runtime_error("cannot append to " + (dir / "notes.txt").string());
}

TournamentResult run_round_robin(const TournamentSpec& spec, std::shared_ptr<const CardPool> pool, DeckCache& decks,
                                 const std::string& results_dir, const ProgressFn& progress) {
    const int n = static_cast<int>(spec.participants.size());
    const auto schedule = schedule_round_robin(n, spec.games_per_pair);
    std::vector<GameJob> jobs;
    for (const auto& g : schedule) {
        GameJob job;
        job.specs = {&spec.participants[g.seat0], &spec.participants[g.seat1]};
        job.game_id = game_name(g.index, job.specs[0]->id, job.specs[1]->id);
        job.cycle = g.cycle;
        auto [d0, d1] = decks_for(spec, g.game_in_pair);
        job.decks = {d0, d1};
        job.seed = derive_seed(derive_seed(spec.master_seed, static_cast<std::uint64_t>(g.pair)),
                               static_cast<std::uint64_t>(g.game_in_pair));
        jobs.push_back(std::move(job));
    }

    TournamentResult res;
    res.records = run_parallel(jobs, spec, pool, decks, results_dir, progress);

    for (const auto& p : spec.participants) res.ratings.add(p.id);
    for (int cycle = 0; cycle < spec.games_per_pair; ++cycle) {
        std::vector<RatingTable::Result> period;
        for (const auto& r : res.records) {
            if (r.cycle == cycle) period.push_back({r.agents[0], r.agents[1], r.scores[0]});
        }
        res.ratings.apply_period(period);
    }
    std::vector<std::string> ids;
    for (const auto& p : spec.participants) ids.push_back(p.id);
    res.metrics = aggregate_metrics(res.records, ids, res.ratings);
    return res;
}

TournamentResult run_anchored(const TournamentSpec& spec, std::shared_ptr<const CardPool> pool, DeckCache& decks,
                              const std::string& results_dir, const ProgressFn& progress) {
    TournamentResult res;
    res.ratings.add(spec.evolving.id);
    for (const auto& a : spec.anchors) res.ratings.add(a.agent.id, a.rating);
    for (const auto& a : spec.anchors) res.anchors_before.add(a.agent.id, a.rating);

    const fs::path state_root = results_dir.empty() ? fs::path() : fs::path(results_dir) / "state";
    auto state_dir = [&](int r) { return state_root / ("state_r" + std::to_string(r)); };
    if (!results_dir.empty()) {
        if (spec.initial_state.empty()) copy_dir(fs::path(), state_dir(0));
        else copy_dir(spec.initial_state, state_dir(0));
    }

    // The evolving agent persists across all rounds; anchors are fresh per game.
    std::unique_ptr<Agent> evolving = make_agent(spec.evolving);
    std::mutex deck_mu;
    const std::size_t total = static_cast<std::size_t>(spec.rounds) * spec.anchors.size() * spec.games_per_anchor;
    std::size_t done = 0;
    int game_index = 0;

    for (int round = 1; round <= spec.rounds; ++round) {
        std::vector<MatchRecord> round_records;
        const std::uint64_t round_seed = derive_seed(spec.master_seed, 0x10000ULL + static_cast<std::uint64_t>(round));
        for (std::size_t ai = 0; ai < spec.anchors.size(); ++ai) {
            for (int k = 0; k < spec.games_per_anchor; ++k) {
                const AgentSpec* anchor = &spec.anchors[ai].agent;
                const bool evolving_first = k % 2 == 0;
                GameJob job;
                job.specs = evolving_first ? std::array<const AgentSpec*, 2>{&spec.evolving, anchor}
                                           : std::array<const AgentSpec*, 2>{anchor, &spec.evolving};
                job.game_id = game_name(game_index++, job.specs[0]->id, job.specs[1]->id);
                job.cycle = round;
                auto [d0, d1] = decks_for(spec, k);
                job.decks = {d0, d1};
                job.seed = derive_seed(round_seed, ai * static_cast<std::uint64_t>(spec.games_per_anchor) + k);
                auto opponent = make_agent(*anchor);
                std::array<Agent*, 2> agents = evolving_first ? std::array<Agent*, 2>{evolving.get(), opponent.get()}
                                                              : std::array<Agent*, 2>{opponent.get(), evolving.get()};
                round_records.push_back(run_job(job, spec, pool, decks, deck_mu, agents, results_dir));
                if (progress) progress(round_records.back(), ++done, total);
            }
        }

        std::vector<RatingTable::Result> period;
        for (const auto& r : round_records) period.push_back({r.agents[0], r.agents[1], r.scores[0]});
        res.ratings.apply_period(period);
        json snap = rating_to_json(res.ratings.at(spec.evolving.id));
        snap["round"] = round;
        snap["games"] = round_records.size();
        res.snapshots.push_back(snap);

        // Evolution hook between rounds, on a fresh copy of the previous state.
        json entry = {{"round", round}, {"mechanism", std::string(to_string(spec.mechanism))}};
        if (!results_dir.empty()) {
            copy_dir(state_dir(round - 1), state_dir(round));
            std::string error;
            try {
                if (spec.mechanism == EvolutionMechanism::Scripted) {
                    scripted_evolve(state_dir(round), round, round_records, spec.evolving.id);
                } else if (spec.mechanism == EvolutionMechanism::External) {
                    std::vector<std::string> paths;
                    for (const auto& r : round_records)
                        paths.push_back(fs::absolute(fs::path(results_dir) / r.log_path).string());
                    auto* ext = dynamic_cast<ExternalAgent*>(evolving.get());
                    if (!ext->evolve(round, paths, fs::absolute(state_dir(round)).string(), spec.evolve_deadline_ms, &error))
                        throw std::runtime_error(error);
                }
                entry["status"] = "ok";
            } catch (const std::exception& e) {
                copy_dir(state_dir(round - 1), state_dir(round));
                entry["status"] = "rolled_back";
                entry["error"] = e.what();
            }
        }
        res.evolution_log.push_back(entry);
        res.records.insert(res.records.end(), round_records.begin(), round_records.end());
        if (!results_dir.empty()) {
            // Persist progress after every round so an abort keeps completed work.
            write_file_atomic((fs::path(results_dir) / "records.jsonl").string(), records_jsonl(res.records));
        }
    }

    std::vector<std::string> ids{spec.evolving.id};
    for (const auto& a : spec.anchors) ids.push_back(a.agent.id);
    res.metrics = aggregate_metrics(res.records, ids, res.ratings);
    return res;
}

}  // namespace

TournamentResult run_tournament(const TournamentSpec& spec, const std::string& results_dir, const ProgressFn& progress) {
    spec.validate();
    std::shared_ptr<const CardPool> pool;
    try {
        pool = load_card_pool(spec.pool_path);
    } catch (const std::exception& e) {
        throw ConfigError("card pool " + spec.pool_path + ": " + e.what());
    }
    DeckCache decks(pool, spec.deck_dir);
    // Resolve every deck before any game starts.
    if (!spec.mirror_deck.empty()) decks.get(spec.mirror_deck);
    for (const auto& [a, b] : spec.deck_pairs) {
        decks.get(a);
        decks.get(b);
    }

    if (!results_dir.empty()) {
        fs::create_directories(fs::path(results_dir) / "games");
        write_file_atomic((fs::path(results_dir) / "manifest.json").string(), manifest_to_json(spec).dump(2) + "\n");
    }

    TournamentResult res = spec.mode == TournamentMode::RoundRobin
                               ? run_round_robin(spec, pool, decks, results_dir, progress)
                               : run_anchored(spec, pool, decks, results_dir, progress);

    if (!results_dir.empty()) {
        const fs::path dir(results_dir);
        write_file_atomic((dir / "records.jsonl").string(), records_jsonl(res.records));
        write_file_atomic((dir / "ratings.json").string(), res.ratings.to_json().dump(2) + "\n");
        write_file_atomic((dir / "metrics.json").string(), res.metrics.dump(2) + "\n");
        if (spec.mode == TournamentMode::Anchored) {
            write_file_atomic((dir / "snapshots.json").string(), json(res.snapshots).dump(2) + "\n");
            std::string log;
            for (const auto& e : res.evolution_log) log += e.dump() + "\n";
            write_file_atomic((dir / "evolution.jsonl").string(), log);
            write_file_atomic((dir / "anchors_before.json").string(), res.anchors_before.to_json().dump(2) + "\n");
        }
    }
    return res;
}

}  // namespace tcg
