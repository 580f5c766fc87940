#include "chaoslink/chaos.hpp"

#include <cmath>

#include "chaoslink/lyapunov_core.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chaoslink::chaos {

namespace {

void require_finite_input(const State& s) {
    for (double v : s)
        if (!std::isfinite(v)) throw invalid_input("non-finite state component");
}

double* param_field(SystemParams& p, const std::string& name) {
    if (name == "a") return &p.a;
    if (name == "b") return &p.b;
    if (name == "c") return &p.c;
    if (name == "d") return &p.d;
    if (name == "e") return &p.e;
    if (name == "r") return &p.r;
    return nullptr;
}

}  // namespace

State derivative(const State& s, const SystemParams& p) {
    require_finite_input(s);
    double x5s = p.x5_coupling == X5Coupling::stable_negative ? -s[4] : s[4];
    return {
        p.a * (s[1] - s[0]) + s[3] + x5s - s[5],
        p.c * s[0] - s[1] - s[0] * s[2],
        -p.b * s[2] + s[0] * s[1],
        p.d * s[3] - s[1] * s[2],
        p.e * s[5] + s[2] * s[1],
        p.r * s[0],
    };
}

Mat6 jacobian(const State& s, const SystemParams& p) {
    require_finite_input(s);
    double x5s = p.x5_coupling == X5Coupling::stable_negative ? -1.0 : 1.0;
    return {
        -p.a,        p.a,   0.0,   1.0, x5s, -1.0,  //
        p.c - s[2],  -1.0,  -s[0], 0.0, 0.0, 0.0,   //
        s[1],        s[0],  -p.b,  0.0, 0.0, 0.0,   //
        0.0,         -s[2], -s[1], p.d, 0.0, 0.0,   //
        0.0,         s[2],  s[1],  0.0, 0.0, p.e,   //
        p.r,         0.0,   0.0,   0.0, 0.0, 0.0,
    };
}

State integrate_step(const State& s, const SystemParams& p, const IntegratorConfig& cfg) {
    if (cfg.h <= 0.0) throw invalid_input("integrator step must be > 0");
    require_finite_input(s);
    State out = detail::rk4_step([&](const State& y) { return derivative(y, p); }, s, cfg.h);
    detail::check_finite(out, 1);
    return out;
}

std::vector<State> generate_trajectory(const State& init, const SystemParams& p,
                                       const IntegratorConfig& cfg, std::size_t n_steps) {
    if (n_steps < 1) throw invalid_input("trajectory needs at least one step");
    if (cfg.h <= 0.0) throw invalid_input("integrator step must be > 0");
    require_finite_input(init);
    std::vector<State> out;
    out.reserve(n_steps);
    State x = init;
    auto f = [&](const State& y) { return derivative(y, p); };
    for (std::size_t i = 0; i < n_steps; ++i) {
        x = detail::rk4_step(f, x, cfg.h);
        detail::check_finite(x, i + 1);
        out.push_back(x);
    }
    return out;
}

LyapunovReport lyapunov_spectrum(const State& init, const SystemParams& p,
                                 const IntegratorConfig& cfg, std::size_t transient,
                                 std::size_t total, std::size_t ortho_interval) {
    require_finite_input(init);
    return lyapunov_core([&](const State& y) { return derivative(y, p); },
                         [&](const State& y) { return jacobian(y, p); }, init, cfg.h, transient,
                         total, ortho_interval);
}

namespace {

BifurcationPoint scan_point(double value, const std::string& name, const State& init,
                            SystemParams params, const IntegratorConfig& cfg,
                            std::size_t transient, std::size_t record) {
    *param_field(params, name) = value;
    BifurcationPoint pt;
    pt.param_value = value;
    auto f = [&](const State& y) { return derivative(y, params); };
    try {
        State x = init;
        for (std::size_t i = 0; i < transient; ++i) {
            x = detail::rk4_step(f, x, cfg.h);
            detail::check_finite(x, i + 1);
        }
        // Stream the record window, flagging samples strictly above both neighbors.
        double prev2 = 0.0, prev1 = 0.0;
        for (std::size_t i = 0; i < record; ++i) {
            x = detail::rk4_step(f, x, cfg.h);
            detail::check_finite(x, transient + i + 1);
            double v = x[0];
            if (i >= 2 && prev1 > prev2 && prev1 > v) pt.maxima.push_back(prev1);
            prev2 = prev1;
            prev1 = v;
        }
    } catch (const divergence_error&) {
        pt.maxima.clear();
        pt.diverged = true;
    }
    return pt;
}

}  // namespace

BifurcationScan bifurcation_scan(const std::string& param_name, const std::vector<double>& grid,
                                 const State& init, const SystemParams& p,
                                 const IntegratorConfig& cfg, std::size_t transient,
                                 std::size_t record, Exec exec) {
    if (grid.empty()) throw invalid_input("bifurcation grid is empty");
    if (record < 1) throw invalid_input("record window must be >= 1 step");
    if (cfg.h <= 0.0) throw invalid_input("integrator step must be > 0");
    {
        SystemParams probe = p;
        if (!param_field(probe, param_name))
            throw invalid_input("unknown parameter name: " + param_name);
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw invalid_input("grid values must be strictly increasing");
    require_finite_input(init);

    BifurcationScan scan;
    scan.param_name = param_name;
    scan.points.resize(grid.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(grid.size()); ++i)
            scan.points[i] = scan_point(grid[i], param_name, init, p, cfg, transient, record);
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i)
            scan.points[i] = scan_point(grid[i], param_name, init, p, cfg, transient, record);
    }
    return scan;
}

}  // namespace chaoslink::chaos
