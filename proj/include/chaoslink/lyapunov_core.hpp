#pragma once

// Generic tangent-space Lyapunov estimator over a 6-dim flow. Exposed as a
// template so the algorithm can be validated on systems with analytically
// known spectra (e.g. decoupled linear systems) in addition to the real one.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "chaoslink/chaos.hpp"
#include "chaoslink/common.hpp"

namespace chaoslink::chaos {

namespace detail {

inline void check_finite(const State& s, std::size_t step) {
    for (double v : s)
        if (!std::isfinite(v) || std::abs(v) > 1e100) throw divergence_error(step);
}

template <class Deriv>
State rk4_step(Deriv&& f, const State& s, double h) {
    State k1 = f(s), t{};
    for (int i = 0; i < 6; ++i) t[i] = s[i] + 0.5 * h * k1[i];
    State k2 = f(t);
    for (int i = 0; i < 6; ++i) t[i] = s[i] + 0.5 * h * k2[i];
    State k3 = f(t);
    for (int i = 0; i < 6; ++i) t[i] = s[i] + h * k3[i];
    State k4 = f(t);
    State out{};
    for (int i = 0; i < 6; ++i)
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

inline Mat6 matmul(const Mat6& A, const Mat6& B) {
    Mat6 C{};
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) {
            double a = A[6 * i + k];
            for (int j = 0; j < 6; ++j) C[6 * i + j] += a * B[6 * k + j];
        }
    return C;
}

// Modified Gram-Schmidt over the columns; returns the log of each column's
// residual norm (the diagonal of R in the QR factorization).
inline void orthonormalize(Mat6& Q, std::array<double, 6>& log_r) {
    for (int j = 0; j < 6; ++j) {
        double col[6];
        for (int i = 0; i < 6; ++i) col[i] = Q[6 * i + j];
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < 6; ++i) dot += Q[6 * i + k] * col[i];
            for (int i = 0; i < 6; ++i) col[i] -= dot * Q[6 * i + k];
        }
        double norm = 0.0;
        for (int i = 0; i < 6; ++i) norm += col[i] * col[i];
        norm = std::sqrt(std::max(norm, 1e-300));
        log_r[j] = std::log(norm);
        for (int i = 0; i < 6; ++i) Q[6 * i + j] = col[i] / norm;
    }
}

}  // namespace detail

// `total` counts all steps including the transient; stretch factors are
// accumulated over the (total - transient) post-transient steps.
template <class Deriv, class Jac>
LyapunovReport lyapunov_core(Deriv&& f, Jac&& jac, const State& init, double h,
                             std::size_t transient, std::size_t total,
                             std::size_t ortho_interval = 10) {
    if (h <= 0.0) throw invalid_input("integrator step must be > 0");
    if (ortho_interval == 0) throw invalid_input("re-orthonormalization interval must be > 0");
    if (total <= transient) throw invalid_input("total steps must exceed transient steps");
    if (total < 10 * ortho_interval)
        throw invalid_input("total steps below 10x the re-orthonormalization interval");

    State x = init;
    detail::check_finite(x, 0);
    for (std::size_t i = 0; i < transient; ++i) {
        x = detail::rk4_step(f, x, h);
        detail::check_finite(x, i + 1);
    }

    Mat6 Q{};
    for (int i = 0; i < 6; ++i) Q[6 * i + i] = 1.0;
    std::array<double, 6> sums{};
    std::array<double, 6> log_r{};
    std::size_t since_ortho = 0;

    for (std::size_t i = transient; i < total; ++i) {
        // One RK4 step of state and tangent frame together; the frame update is
        // the exact Jacobian of the discrete RK4 map (chain rule over substages).
        State k1 = f(x), t{};
        Mat6 K1 = detail::matmul(jac(x), Q);
        Mat6 tmp{};
        for (int n = 0; n < 6; ++n) t[n] = x[n] + 0.5 * h * k1[n];
        for (int n = 0; n < 36; ++n) tmp[n] = Q[n] + 0.5 * h * K1[n];
        State k2 = f(t);
        Mat6 K2 = detail::matmul(jac(t), tmp);
        for (int n = 0; n < 6; ++n) t[n] = x[n] + 0.5 * h * k2[n];
        for (int n = 0; n < 36; ++n) tmp[n] = Q[n] + 0.5 * h * K2[n];
        State k3 = f(t);
        Mat6 K3 = detail::matmul(jac(t), tmp);
        for (int n = 0; n < 6; ++n) t[n] = x[n] + h * k3[n];
        for (int n = 0; n < 36; ++n) tmp[n] = Q[n] + h * K3[n];
        State k4 = f(t);
        Mat6 K4 = detail::matmul(jac(t), tmp);
        for (int n = 0; n < 6; ++n)
            x[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        for (int n = 0; n < 36; ++n)
            Q[n] += h / 6.0 * (K1[n] + 2.0 * K2[n] + 2.0 * K3[n] + K4[n]);
        detail::check_finite(x, i + 1);

        if (++since_ortho == ortho_interval || i + 1 == total) {
            detail::orthonormalize(Q, log_r);
            for (int n = 0; n < 6; ++n) sums[n] += log_r[n];
            since_ortho = 0;
        }
    }

    LyapunovReport rep;
    double span = static_cast<double>(total - transient) * h;
    for (int n = 0; n < 6; ++n) rep.exponents[n] = sums[n] / span;
    std::sort(rep.exponents.begin(), rep.exponents.end(), std::greater<>());
    rep.transient_steps = transient;
    rep.total_steps = total;
    return rep;
}

}  // namespace chaoslink::chaos
