#pragma once

#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

namespace g2flow {

struct Diagnostics {
    double volfactor = 0;
    double normT2 = 0;
    double trT = 0;
    double lambda = 0;
    double eh_density = 0;
};

enum class Termination { ReachedEnd, BlowUp, StepUnderflow };

inline const char* termination_name(Termination t) {
    switch (t) {
    case Termination::ReachedEnd: return "ReachedEnd";
    case Termination::BlowUp: return "BlowUp";
    case Termination::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

/// Sampled solution of a reduced flow: times are strictly monotone in the
/// integration direction and every state is componentwise positive.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> derivs; // rhs at each sample (for dense output)
    std::vector<Diagnostics> diags;
    Termination status = Termination::ReachedEnd;
    double t_est = 0; // final accepted time (blow-up estimate when status != ReachedEnd)

    /// Cubic Hermite interpolation on the accepted mesh.
    std::vector<double> at(double t) const {
        if (times.size() < 2) return states.at(0);
        size_t lo = 0, hi = times.size() - 1;
        bool fwd = times.back() > times.front();
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if ((times[mid] <= t) == fwd) lo = mid; else hi = mid;
        }
        double h = times[hi] - times[lo];
        double s = (t - times[lo]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        std::vector<double> y(states[lo].size());
        for (size_t i = 0; i < y.size(); ++i)
            y[i] = h00 * states[lo][i] + h * h10 * derivs[lo][i] + h01 * states[hi][i] +
                   h * h11 * derivs[hi][i];
        return y;
    }
};

struct IntegrateSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double state_cap = 1e8;   // blow-up threshold on states and Λ
    double step_floor = 1e-14; // relative accepted-step floor
    size_t max_steps = 4000000;
    double fixed_step = 0; // > 0 disables adaptivity (order tests)
};

using Rhs = std::function<std::vector<double>(const std::vector<double>&)>;
using DiagFn = std::function<Diagnostics(const std::vector<double>&)>;

/// Embedded Dormand-Prince 5(4) pair with PI step control, forward or
/// backward in time. Stops with BlowUp when a state component or Λ exceeds
/// the cap, with StepUnderflow when the accepted step degenerates.
inline Trajectory integrate(const Rhs& rhs, std::vector<double> y0, double t0, double t1,
                            const IntegrateSettings& set = {}, const DiagFn& diag = {}) {
    static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
    static const double B4[7] = {5179.0 / 57600,     0,           7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    if (set.rtol <= 0 || set.atol <= 0) throw std::invalid_argument("tolerances must be positive");
    const size_t n = y0.size();
    std::vector<double> f0 = rhs(y0);
    for (double v : f0)
        if (!std::isfinite(v)) throw std::invalid_argument("invalid initial state");
    for (double v : y0)
        if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("invalid initial state");

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double ynorm = 0, fnorm = 0;
    for (size_t i = 0; i < n; ++i) {
        ynorm = std::max(ynorm, std::abs(y0[i]));
        fnorm = std::max(fnorm, std::abs(f0[i]));
    }
    double h = dir * std::min(std::abs(t1 - t0),
                              0.01 * (1.0 + ynorm) / (1.0 + fnorm));
    if (set.fixed_step > 0) h = dir * set.fixed_step;

    Trajectory tr;
    auto push = [&](double t, const std::vector<double>& y, const std::vector<double>& f) {
        tr.times.push_back(t);
        tr.states.push_back(y);
        tr.derivs.push_back(f);
        if (diag) tr.diags.push_back(diag(y));
    };
    double t = t0;
    std::vector<double> y = y0, f = f0;
    push(t, y, f);

    double err_prev = 1.0;
    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> ytmp(n), y5(n), y4(n);

    for (size_t step = 0; step < set.max_steps; ++step) {
        if (dir * (t - t1) >= 0) {
            tr.status = Termination::ReachedEnd;
            tr.t_est = t;
            return tr;
        }
        if (dir * (t + h - t1) > 0) h = t1 - t;
        if (std::abs(h) < set.step_floor * std::max(1.0, std::abs(t))) {
            tr.status = Termination::StepUnderflow;
            tr.t_est = t;
            return tr;
        }

        k[0] = f;
        bool bad = false;
        for (int s = 1; s < 7 && !bad; ++s) {
            for (size_t i = 0; i < n; ++i) {
                double acc = 0;
                for (int j = 0; j < s; ++j) acc += A[s][j] * k[static_cast<size_t>(j)][i];
                ytmp[i] = y[i] + h * acc;
                if (!(ytmp[i] > 0) || !std::isfinite(ytmp[i])) bad = true;
            }
            (void)c;
            if (!bad) {
                k[static_cast<size_t>(s)] = rhs(ytmp);
                for (double v : k[static_cast<size_t>(s)])
                    if (!std::isfinite(v)) bad = true;
            }
        }

        double err = 0;
        if (!bad) {
            for (size_t i = 0; i < n; ++i) {
                double a5 = 0, a4 = 0;
                for (int j = 0; j < 7; ++j) {
                    a5 += B5[j] * k[static_cast<size_t>(j)][i];
                    a4 += B4[j] * k[static_cast<size_t>(j)][i];
                }
                y5[i] = y[i] + h * a5;
                y4[i] = y[i] + h * a4;
                if (!(y5[i] > 0) || !std::isfinite(y5[i])) bad = true;
                double sc = set.atol + set.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                double e = (y5[i] - y4[i]) / sc;
                err += e * e;
            }
            err = std::sqrt(err / static_cast<double>(n));
        }

        if (set.fixed_step > 0) {
            if (bad) {
                tr.status = Termination::StepUnderflow;
                tr.t_est = t;
                return tr;
            }
        } else if (bad || err > 1.0) {
            double fac = bad ? 0.25 : std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= std::min(fac, 0.9);
            err_prev = 1.0;
            continue;
        }

        // accepted
        t += h;
        y = y5;
        f = rhs(y); // FSAL not reused; one extra evaluation keeps this simple
        push(t, y, f);

        bool blow = false;
        for (double v : y)
            if (std::abs(v) > set.state_cap) blow = true;
        if (diag && std::abs(tr.diags.back().lambda) > set.state_cap) blow = true;
        if (blow) {
            tr.status = Termination::BlowUp;
            tr.t_est = t;
            return tr;
        }

        if (set.fixed_step > 0) {
            h = dir * set.fixed_step;
        } else {
            double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.7 / 5.0) *
                         std::pow(std::max(err_prev, 1e-16), 0.4 / 5.0);
            h *= std::min(5.0, std::max(0.2, fac));
            err_prev = std::max(err, 1e-16);
        }
    }
    tr.status = Termination::StepUnderflow;
    tr.t_est = t;
    return tr;
}

struct SweepItem {
    std::vector<double> y0;
    bool ok = false;
    Trajectory trajectory;
    std::string error;
};

/// Independent integrations over a grid of initial states; per-item failures
/// are collected, not fatal. Items run concurrently (the right-hand sides
/// are pure).
inline std::vector<SweepItem> sweep(const Rhs& rhs, const std::vector<std::vector<double>>& grid,
                                    double t0, double t1, const IntegrateSettings& set = {},
                                    const DiagFn& diag = {}) {
    if (grid.empty()) throw std::invalid_argument("empty sweep grid");
    std::vector<std::future<SweepItem>> futs;
    futs.reserve(grid.size());
    for (const auto& y0 : grid) {
        futs.push_back(std::async(std::launch::async, [&, y0]() {
            SweepItem item;
            item.y0 = y0;
            try {
                item.trajectory = integrate(rhs, y0, t0, t1, set, diag);
                item.ok = true;
            } catch (const std::exception& e) {
                item.error = e.what();
            }
            return item;
        }));
    }
    std::vector<SweepItem> out;
    out.reserve(grid.size());
    for (auto& fu : futs) out.push_back(fu.get());
    return out;
}

} // namespace g2flow
