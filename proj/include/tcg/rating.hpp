#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tcg {

// Glicko-2 on the display scale (mu 1500, phi 350 for a new player).
inline constexpr double kGlickoScale = 173.7178;
inline constexpr double kDefaultTau = 0.5;
inline constexpr double kVolatilityTolerance = 1e-6;
inline constexpr int kVolatilityMaxIterations = 100;

struct Rating {
    double mu = 1500.0;
    double phi = 350.0;
    double sigma = 0.06;
    bool frozen = false;
    int games = 0;

    bool operator==(const Rating&) const = default;
};

struct RatedGame {
    Rating opponent;
    double score = 0.5;  // 1 win, 0.5 draw, 0 loss
};

double glicko_g(double phi_internal);

// Probability that `player` beats `opponent`.
double expected_score(const Rating& player, const Rating& opponent);

// One rating period. An empty period only inflates phi; frozen ratings are
// returned unchanged. Throws std::runtime_error if the volatility iteration
// fails to converge.
Rating update_period(const Rating& player, const std::vector<RatedGame>& games, double tau = kDefaultTau);

struct RatingEntry {
    std::string id;
    Rating rating;
};

// Ratings keyed by participant id, in insertion order.
class RatingTable {
public:
    void add(const std::string& id, Rating r = {});
    bool contains(const std::string& id) const;
    const Rating& at(const std::string& id) const;
    const std::vector<RatingEntry>& entries() const { return entries_; }

    struct Result {
        std::string a;
        std::string b;
        double score_a = 0.5;
    };
    // Applies one period: every participant is updated against the
    // pre-period ratings of its opponents. Participants without games get
    // the empty-period inflation; frozen ones never change.
    void apply_period(const std::vector<Result>& results, double tau = kDefaultTau);

    nlohmann::json to_json() const;
    static RatingTable from_json(const nlohmann::json& j);

private:
    Rating& mut(const std::string& id);
    std::vector<RatingEntry> entries_;
};

nlohmann::json rating_to_json(const Rating& r);
Rating rating_from_json(const nlohmann::json& j);

}  // namespace tcg
