#include "tcg/rating.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcg {

using json = nlohmann::json;

double glicko_g(double phi) { return 1.0 / std::sqrt(1.0 + 3.0 * phi * phi / (std::numbers::pi * std::numbers::pi)); }

double expected_score(const Rating& player, const Rating& opponent) {
    const double mu = (player.mu - 1500.0) / kGlickoScale;
    const double mu_j = (opponent.mu - 1500.0) / kGlickoScale;
    const double phi_j = opponent.phi / kGlickoScale;
    return 1.0 / (1.0 + std::exp(-glicko_g(phi_j) * (mu - mu_j)));
}

namespace {

// New volatility via the Illinois variant of regula falsi.
double new_volatility(double phi, double sigma, double v, double delta, double tau) {
    const double a = std::log(sigma * sigma);
    auto f = [&](double x) {
        const double ex = std::exp(x);
        const double d = phi * phi + v + ex;
        return ex * (delta * delta - phi * phi - v - ex) / (2.0 * d * d) - (x - a) / (tau * tau);
    };
    double A = a;
    double B;
    if (delta * delta > phi * phi + v) {
        B = std::log(delta * delta - phi * phi - v);
    } else {
        int k = 1;
        while (f(a - k * tau) < 0) {
            if (++k > kVolatilityMaxIterations) throw std::runtime_error("volatility bracket search did not converge");
        }
        B = a - k * tau;
    }
    double fA = f(A);
    double fB = f(B);
    // Written so that a NaN interval never counts as converged.
    for (int i = 0; !(std::fabs(B - A) <= kVolatilityTolerance); ++i) {
        if (i >= kVolatilityMaxIterations) throw std::runtime_error("volatility iteration did not converge");
        const double C = A + (A - B) * fA / (fB - fA);
        const double fC = f(C);
        if (fC * fB <= 0) {
            A = B;
            fA = fB;
        } else {
            fA /= 2.0;
        }
        B = C;
        fB = fC;
    }
    return std::exp(A / 2.0);
}

}  // namespace

Rating update_period(const Rating& player, const std::vector<RatedGame>& games, double tau) {
    if (player.frozen) return player;
    const double mu = (player.mu - 1500.0) / kGlickoScale;
    const double phi = player.phi / kGlickoScale;
    Rating out = player;

    if (games.empty()) {
        out.phi = std::sqrt(phi * phi + player.sigma * player.sigma) * kGlickoScale;
        return out;
    }

    double v_inv = 0.0;
    double sum = 0.0;
    for (const auto& g : games) {
        const double mu_j = (g.opponent.mu - 1500.0) / kGlickoScale;
        const double g_j = glicko_g(g.opponent.phi / kGlickoScale);
        const double e = 1.0 / (1.0 + std::exp(-g_j * (mu - mu_j)));
        v_inv += g_j * g_j * e * (1.0 - e);
        sum += g_j * (g.score - e);
    }
    const double v = 1.0 / v_inv;
    const double delta = v * sum;
    const double sigma = new_volatility(phi, player.sigma, v, delta, tau);
    const double phi_star = std::sqrt(phi * phi + sigma * sigma);
    const double phi_new = 1.0 / std::sqrt(1.0 / (phi_star * phi_star) + 1.0 / v);
    const double mu_new = mu + phi_new * phi_new * sum;

    out.mu = mu_new * kGlickoScale + 1500.0;
    out.phi = phi_new * kGlickoScale;
    out.sigma = sigma;
    out.games += static_cast<int>(games.size());
    return out;
}

void RatingTable::add(const std::string& id, Rating r) {
    if (contains(id)) throw std::invalid_argument("duplicate rating id '" + id + "'");
    entries_.push_back({id, r});
}

bool RatingTable::contains(const std::string& id) const {
    for (const auto& e : entries_) {
        if (e.id == id) return true;
    }
    return false;
}

const Rating& RatingTable::at(const std::string& id) const {
    for (const auto& e : entries_) {
        if (e.id == id) return e.rating;
    }
    throw std::out_of_range("no rating for '" + id + "'");
}

Rating& RatingTable::mut(const std::string& id) { return const_cast<Rating&>(at(id)); }

void RatingTable::apply_period(const std::vector<Result>& results, double tau) {
    std::vector<std::vector<RatedGame>> games(entries_.size());
    auto index_of = [&](const std::string& id) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].id == id) return i;
        }
        throw std::out_of_range("no rating for '" + id + "'");
    };
    for (const auto& r : results) {
        const std::size_t a = index_of(r.a);
        const std::size_t b = index_of(r.b);
        games[a].push_back({entries_[b].rating, r.score_a});
        games[b].push_back({entries_[a].rating, 1.0 - r.score_a});
    }
    std::vector<Rating> next;
    next.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) next.push_back(update_period(entries_[i].rating, games[i], tau));
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].rating = next[i];
}

json rating_to_json(const Rating& r) {
    return {{"mu", r.mu}, {"phi", r.phi}, {"sigma", r.sigma}, {"frozen", r.frozen}, {"games", r.games}};
}

Rating rating_from_json(const json& j) {
    Rating r;
    r.mu = j.at("mu").get<double>();
    r.phi = j.at("phi").get<double>();
    r.sigma = j.value("sigma", 0.06);
    r.frozen = j.value("frozen", false);
    r.games = j.value("games", 0);
    if (!(r.phi > 0) || !(r.sigma > 0)) throw std::invalid_argument("rating needs phi > 0 and sigma > 0");
    return r;
}

json RatingTable::to_json() const {
    json arr = json::array();
    for (const auto& e : entries_) {
        json j = rating_to_json(e.rating);
        j["id"] = e.id;
        arr.push_back(j);
    }
    return arr;
}

RatingTable RatingTable::from_json(const json& j) {
    RatingTable t;
    for (const auto& e : j) t.add(e.at("id").get<std::string>(), rating_from_json(e));
    return t;
}

}  // namespace tcg
