#pragma once

#include "flows.hpp"
#include "odeint.hpp"
#include <limits>
#include <utility>

namespace g2flow {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed-form (f_t, h_t) for the contact family, initial condition (a, 1):
///
///   RHF: f = a u^{-3/26}, h = u^{5/26},  u = 1 - 13 a^2 t,      t < 1/(13a^2)
///   RL1: f = a v^{-3/10}, h = v^{1/10},  v = 1 + 25 a^2 t / 2,  t > -2/(25a^2)
///   RL2: f = a w^{-1/6},  h = w^{1/6},   w = 1 + 15 a^2 t,      t > -1/(15a^2)
///   NGF: f = a u^{1/2},   h = u^{1/2},   u = 1 - 9 a^2 t / 4,   t < 4/(9a^2)
struct ClosedSolution {
    FlowKind kind;
    double a;
    double t_min, t_max;
    double scale_rate;  // d(scale)/dt
    double f_exp, h_exp;

    double scale(double t) const { return 1.0 + scale_rate * t; }

    bool inside(double t) const { return t > t_min && t < t_max; }

    std::pair<double, double> eval(double t) const {
        if (!inside(t)) throw std::out_of_range("outside solution lifespan");
        double s = scale(t);
        return {a * std::pow(s, f_exp), std::pow(s, h_exp)};
    }
    double volume_factor(double t) const {
        auto [f, h] = eval(t);
        return f * std::pow(h, 6);
    }
    /// Time derivatives of the metric coefficient functions (f^2, h^2).
    std::pair<double, double> metric_coeff_rates(double t) const {
        if (!inside(t)) throw std::out_of_range("outside solution lifespan");
        double s = scale(t);
        double df2 = a * a * 2 * f_exp * scale_rate * std::pow(s, 2 * f_exp - 1);
        double dh2 = 2 * h_exp * scale_rate * std::pow(s, 2 * h_exp - 1);
        return {df2, dh2};
    }
    /// Singular endpoint of the lifespan (finite end where scale -> 0).
    double singular_time() const { return scale_rate < 0 ? t_max : t_min; }
};

inline ClosedSolution closed_solution(FlowKind kind, double a) {
    if (!(a > 0)) throw std::invalid_argument("closed_solution requires a > 0");
    ClosedSolution s;
    s.kind = kind;
    s.a = a;
    switch (kind) {
    case FlowKind::RHF:
        s.scale_rate = -13 * a * a;
        s.f_exp = -3.0 / 26;
        s.h_exp = 5.0 / 26;
        s.t_min = -kInf;
        s.t_max = 1.0 / (13 * a * a);
        break;
    case FlowKind::RL1:
        s.scale_rate = 12.5 * a * a;
        s.f_exp = -3.0 / 10;
        s.h_exp = 1.0 / 10;
        s.t_min = -2.0 / (25 * a * a);
        s.t_max = kInf;
        break;
    case FlowKind::RL2:
        s.scale_rate = 15 * a * a;
        s.f_exp = -1.0 / 6;
        s.h_exp = 1.0 / 6;
        s.t_min = -1.0 / (15 * a * a);
        s.t_max = kInf;
        break;
    case FlowKind::NGF:
        s.scale_rate = -2.25 * a * a;
        s.f_exp = 0.5;
        s.h_exp = 0.5;
        s.t_min = -kInf;
        s.t_max = 4.0 / (9 * a * a);
        break;
    }
    return s;
}

/// Λ(t) along the closed solutions. K bounds the transversal curvature
/// (zero for a flat transversal distribution); c0 is the collapsed constant
/// multiplying the f^4/h^8 scaling (|Rm|^2, |∇T|^2 and |T|^4 all share it).
/// The K-term exponents follow the reference displays per flow.
inline double lambda_profile(FlowKind kind, double a, double K, double c0, double t) {
    if (K < 0) throw std::invalid_argument("K must be nonnegative");
    ClosedSolution s = closed_solution(kind, a);
    if (!s.inside(t)) throw std::out_of_range("outside solution lifespan");
    double u = s.scale(t);
    double kexp = 0;
    switch (kind) {
    case FlowKind::RHF: kexp = -10.0 / 13; break;
    case FlowKind::RL1: kexp = -2.0 / 5; break;
    case FlowKind::RL2: kexp = -2.0 / 3; break; // 1/h^4 with h = w^{1/6}
    case FlowKind::NGF: kexp = -2.0 / 5; break;
    }
    double a4 = a * a * a * a;
    return std::sqrt(K * K * std::pow(u, kexp) + c0 * a4 * std::pow(u, -2.0));
}

enum class SingType { I, IIa, IIb, III };

inline const char* sing_type_name(SingType t) {
    switch (t) {
    case SingType::I: return "I";
    case SingType::IIa: return "IIa";
    case SingType::IIb: return "IIb";
    case SingType::III: return "III";
    }
    return "?";
}

struct SingularityReport {
    double tau = kInf;
    SingType type = SingType::I;
    double sup_estimate = 0; // max over samples of (τ-t)Λ resp. tΛ
    double exponent = 0;     // fitted growth exponent of Λ
};

/// Classify a singularity from Λ samples.
///
/// Finite τ: fit log Λ against log(τ-t) over the last decade of distances;
/// exponent >= -1 (tolerance 0.05) means (τ-t)Λ stays bounded: Type I, else
/// IIa. Infinite τ: fit against log t over the last decade; tΛ bounded
/// (exponent <= -1 + 0.05) means Type III, else IIb.
inline SingularityReport classify(const std::vector<std::pair<double, double>>& samples, double tau) {
    constexpr double kTol = 0.05;
    constexpr size_t kMinSamples = 16;
    SingularityReport rep;
    rep.tau = tau;

    std::vector<std::pair<double, double>> pts; // (abscissa, lambda)
    if (std::isfinite(tau)) {
        for (auto& [t, lam] : samples) {
            double s = tau - t;
            if (s > 0 && lam > 0) pts.emplace_back(s, lam);
        }
    } else {
        for (auto& [t, lam] : samples)
            if (t > 0 && lam > 0) pts.emplace_back(t, lam);
    }
    if (pts.empty()) throw std::runtime_error("insufficient resolution");

    double sup = 0;
    for (auto& [x, lam] : pts) sup = std::max(sup, x * lam);
    rep.sup_estimate = sup;

    // fitting decade: nearest to the singular end
    double lo, hi;
    if (std::isfinite(tau)) {
        double smin = kInf;
        for (auto& [x, lam] : pts) smin = std::min(smin, x);
        lo = smin;
        hi = 10 * smin;
    } else {
        double tmax = 0;
        for (auto& [x, lam] : pts) tmax = std::max(tmax, x);
        lo = tmax / 10;
        hi = tmax;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = 0;
    for (auto& [x, lam] : pts) {
        if (x < lo || x > hi) continue;
        double lx = std::log(x), ly = std::log(lam);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < kMinSamples) throw std::runtime_error("insufficient resolution");
    double dm = static_cast<double>(m);
    double slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    rep.exponent = slope;

    if (std::isfinite(tau))
        rep.type = (slope >= -1.0 - kTol) ? SingType::I : SingType::IIa;
    else
        rep.type = (slope <= -1.0 + kTol) ? SingType::III : SingType::IIb;
    return rep;
}

/// Log-spaced Λ samples of a profile approaching its singular end, ready for
/// classify(). For finite τ the abscissa decades run toward τ; for τ = ∞
/// they run toward t_hi.
inline std::vector<std::pair<double, double>> profile_samples(FlowKind kind, double a, double K,
                                                              double c0) {
    ClosedSolution s = closed_solution(kind, a);
    std::vector<std::pair<double, double>> out;
    const int per_decade = 24, decades = 8;
    if (std::isfinite(s.t_max) || std::isfinite(s.t_min)) {
        double tau = s.singular_time();
        double span = std::isfinite(s.t_max) ? (std::isfinite(s.t_min) ? s.t_max - s.t_min : s.t_max)
                                             : -s.t_min;
        double base = 0.5 * std::abs(span ? span : 1.0);
        for (int d = 0; d < decades; ++d)
            for (int i = 0; i < per_decade; ++i) {
                double dist = base * std::pow(10.0, -d - static_cast<double>(i) / per_decade);
                double t = tau - (std::isfinite(s.t_max) && tau == s.t_max ? dist : -dist);
                if (!s.inside(t)) continue;
                out.emplace_back(t, lambda_profile(kind, a, K, c0, t));
            }
        // classify() needs τ from the caller; keep samples only
    } else {
        for (int d = 0; d < decades; ++d)
            for (int i = 0; i < per_decade; ++i) {
                double t = std::pow(10.0, d + static_cast<double>(i) / per_decade);
                out.emplace_back(t, lambda_profile(kind, a, K, c0, t));
            }
    }
    return out;
}

struct ContinuityReport {
    double sup_dgdt = 0;
    bool uniformly_continuous = false;
    std::string note;
};

/// Uniform continuity of the evolving metrics on [t0, t1] within the
/// lifespan closure, via the bounded-derivative criterion on the metric
/// coefficient functions f^2 and h^2. An endpoint equal to the singular
/// time probes the one-sided limit.
inline ContinuityReport continuity_report(FlowKind kind, double a, double t0, double t1) {
    ClosedSolution s = closed_solution(kind, a);
    if (t1 < t0) throw std::invalid_argument("empty interval");
    ContinuityReport rep;
    double tsing = s.singular_time();

    auto rate_sup = [&](double t) -> double {
        auto [df2, dh2] = s.metric_coeff_rates(t);
        return std::max(std::abs(df2), std::abs(dh2));
    };
    // |d(f^2)/dt| and |d(h^2)/dt| are monotone in the scale variable, so the
    // sup over the interval sits at an endpoint; probe both with a safe nudge
    // off infinite or singular ends.
    double eps = 1e-6 * std::max(std::abs(tsing), 1.0 / (a * a));
    double lo = std::isfinite(t0) ? t0 : tsing - 1e6; // derivative decays away from tsing
    double hi = std::isfinite(t1) ? t1 : tsing + 1e6;
    bool touches_singularity = std::isfinite(tsing) &&
                               (std::abs(lo - tsing) < eps || std::abs(hi - tsing) < eps);
    bool unbounded_limit = false;
    if (touches_singularity) {
        // limit of the rates as t -> tsing: bounded iff every nonconstant
        // coefficient has scale power 2*exp - 1 >= 0
        unbounded_limit = (s.f_exp != 0 && 2 * s.f_exp - 1 < 0) || (s.h_exp != 0 && 2 * s.h_exp - 1 < 0);
    }
    double probe_lo = std::abs(lo - tsing) < eps ? (tsing < hi ? tsing + eps : tsing - eps) : lo;
    double probe_hi = std::abs(hi - tsing) < eps ? (tsing > lo ? tsing - eps : tsing + eps) : hi;
    double sup = std::max(rate_sup(probe_lo), rate_sup(probe_hi));

    if (touches_singularity && unbounded_limit) {
        rep.sup_dgdt = kInf;
        rep.uniformly_continuous = false;
        rep.note = "metric coefficient derivative blows up at the singular time";
    } else {
        rep.sup_dgdt = sup;
        rep.uniformly_continuous = std::isfinite(sup);
        if (touches_singularity)
            rep.note = "bounded metric derivative up to the singular time";
    }
    return rep;
}

/// G2-Einstein-Hilbert functional ratio F(φ_t)/F(φ_0) along the RL1 closed
/// solution, computed from first principles through the tensor engine:
/// both values are (-1/2 |T|^2 + 1/6 |VT|^2) * volfactor at the closed-form
/// parameters.
inline double eh_evolution(double a, double t) {
    static FrameAlgebra<double> frame = FrameAlgebra<double>::heisenberg();
    ClosedSolution s = closed_solution(FlowKind::RL1, a);
    auto density = [&](double f, double h) {
        G2Data<double> G = build_ccy(frame, f, h);
        return functionals(G).EH;
    };
    auto [f, h] = s.eval(t);
    return density(f, h) / density(a, 1.0);
}

/// Least-squares slope of log|y| against log(x).
inline double fit_log_exponent(const std::vector<std::pair<double, double>>& xy) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = 0;
    for (auto& [x, y] : xy) {
        if (!(x > 0) || y == 0) continue;
        double lx = std::log(x), ly = std::log(std::abs(y));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw std::runtime_error("insufficient resolution");
    double dm = static_cast<double>(m);
    return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

} // namespace g2flow
