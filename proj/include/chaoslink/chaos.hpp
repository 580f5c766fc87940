#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "chaoslink/common.hpp"

namespace chaoslink::chaos {

using State = std::array<double, 6>;   // (x1..x6)
using Mat6 = std::array<double, 36>;   // row-major 6x6

// Sign of the x5 term in dx1. With the positive coupling the linear
// x1->x6->x5->x1 loop has characteristic polynomial l^3+10l^2+3l-24, whose
// real root ~ +1.33 makes every trajectory escape to infinity in finite time
// (t ~ 6-9 from any key-range start) -- useless as a keystream source. The
// negative coupling flips the polynomial to l^3+10l^2+3l+24 (Routh-Hurwitz
// stable), giving the bounded hyperchaotic attractor with two positive
// Lyapunov exponents that everything downstream relies on. The divergent
// variant stays selectable for side-by-side diagnostics only.
enum class X5Coupling { stable_negative, legacy_positive };

struct SystemParams {
    double a = 10.0;
    double b = 8.0 / 3.0;
    double c = 28.0;
    double d = -1.0;
    double e = 8.0;
    double r = 3.0;
    X5Coupling x5_coupling = X5Coupling::stable_negative;
};

struct IntegratorConfig {
    double h = 0.001;  // fixed-step RK4
};

struct LyapunovReport {
    std::array<double, 6> exponents{};  // sorted descending
    std::size_t transient_steps = 0;
    std::size_t total_steps = 0;
};

struct BifurcationPoint {
    double param_value = 0.0;
    std::vector<double> maxima;  // local maxima of x1 over the record window
    bool diverged = false;
};

struct BifurcationScan {
    std::string param_name;
    std::vector<BifurcationPoint> points;
};

State derivative(const State& s, const SystemParams& p);
Mat6 jacobian(const State& s, const SystemParams& p);

// Constant everywhere: the nonlinear terms cancel out of the trace.
inline double jacobian_trace(const SystemParams& p) { return -p.a - 1.0 - p.b + p.d; }

State integrate_step(const State& s, const SystemParams& p, const IntegratorConfig& cfg);

// n_steps states; element k is integrate_step applied k+1 times to init.
std::vector<State> generate_trajectory(const State& init, const SystemParams& p,
                                       const IntegratorConfig& cfg, std::size_t n_steps);

// Tangent-space method: propagate an orthonormal frame alongside the state,
// re-orthonormalize (modified Gram-Schmidt) every ortho_interval steps, and
// average the log stretch factors over the post-transient window.
// `total` counts all steps including the transient.
LyapunovReport lyapunov_spectrum(const State& init, const SystemParams& p,
                                 const IntegratorConfig& cfg, std::size_t transient,
                                 std::size_t total, std::size_t ortho_interval = 10);

// For each grid value of the named parameter (one of "a","b","c","d","e","r"):
// integrate `transient` steps from init, then record local maxima of x1 over
// `record` steps. Divergence at a point sets its flag instead of failing the scan.
BifurcationScan bifurcation_scan(const std::string& param_name, const std::vector<double>& grid,
                                 const State& init, const SystemParams& p,
                                 const IntegratorConfig& cfg, std::size_t transient,
                                 std::size_t record, Exec exec = Exec::parallel);

}  // namespace chaoslink::chaos
