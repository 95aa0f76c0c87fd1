#pragma once

#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

namespace tcg::testing {

// Independent transcription of the published eight-step Glicko-2 procedure,
// solving for the new volatility with the Illinois variant of regula falsi.
struct Oracle {
    double mu, phi, sigma;
};

inline Oracle oracle_update(Oracle p, const std::vector<std::tuple<double, double, double>>& games, double tau) {
    const double k = 173.7178;
    const double m = (p.mu - 1500) / k, f = p.phi / k;
    if (games.empty()) return {p.mu, std::sqrt(f * f + p.sigma * p.sigma) * k, p.sigma};
    double vinv = 0, dsum = 0;
    for (auto [mu_j, phi_j, s] : games) {
        const double mj = (mu_j - 1500) / k, fj = phi_j / k;
        const double g = 1 / std::sqrt(1 + 3 * fj * fj / (std::numbers::pi * std::numbers::pi));
        const double e = 1 / (1 + std::exp(-g * (m - mj)));
        vinv += g * g * e * (1 - e);
        dsum += g * (s - e);
    }
    const double v = 1 / vinv, delta = v * dsum;
    const double a = std::log(p.sigma * p.sigma);
    auto fn = [&](double x) {
        const double ex = std::exp(x);
        return ex * (delta * delta - f * f - v - ex) / (2 * std::pow(f * f + v + ex, 2)) - (x - a) / (tau * tau);
    };
    double A = a, B;
    if (delta * delta > f * f + v) {
        B = std::log(delta * delta - f * f - v);
    } else {
        int n = 1;
        while (fn(a - n * tau) < 0) ++n;
        B = a - n * tau;
    }
    double fa = fn(A), fb = fn(B);
    while (std::fabs(B - A) > 1e-9) {
        const double C = A + (A - B) * fa / (fb - fa), fc = fn(C);
        if (fc * fb <= 0) {
            A = B;
            fa = fb;
        } else {
            fa /= 2;
        }
        B = C;
        fb = fc;
    }
    const double sigma2 = std::exp(A / 2);
    const double fstar = std::sqrt(f * f + sigma2 * sigma2);
    const double f2 = 1 / std::sqrt(1 / (fstar * fstar) + 1 / v);
    const double m2 = m + f2 * f2 * dsum;
    return {m2 * k + 1500, f2 * k, sigma2};
}

}  // namespace tcg::testing
