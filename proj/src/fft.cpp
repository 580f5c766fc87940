#include "chaoslink/fft.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace chaoslink::dsp {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// In-place iterative Cooley-Tukey over a power-of-two length.
void fft_pow2(std::vector<cplx>& a, bool inverse) {
    std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {  // bit-reversal permutation
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // Twiddle table for the largest stage; smaller stages stride through it.
    std::vector<cplx> tw(n / 2);
    double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = sign * two_pi * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = {std::cos(ang), std::sin(ang)};
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * tw[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Bluestein: expresses an arbitrary-length DFT as a convolution, evaluated at
// a padded power-of-two size. k*k is reduced mod 2n before the angle is formed
// so chirp phases stay accurate for large n.
std::vector<cplx> bluestein(const std::vector<cplx>& x, bool inverse) {
    std::size_t n = x.size();
    double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    for (std::size_t k = 0; k < n; ++k) {
        b[k] = std::conj(chirp[k]);
        if (k) b[m - k] = b[k];
    }
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k] / static_cast<double>(m);
    return out;
}

}  // namespace

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<cplx> fft(std::vector<cplx> x) {
    if (x.empty()) throw invalid_input("fft input is empty");
    if (x.size() == 1) return x;
    if (is_pow2(x.size())) {
        fft_pow2(x, false);
        return x;
    }
    return bluestein(x, false);
}

std::vector<cplx> ifft(std::vector<cplx> x) {
    if (x.empty()) throw invalid_input("ifft input is empty");
    std::size_t n = x.size();
    if (n == 1) return x;
    if (is_pow2(n)) {
        fft_pow2(x, true);
        for (auto& v : x) v /= static_cast<double>(n);
        return x;
    }
    x = bluestein(x, true);
    for (auto& v : x) v /= static_cast<double>(n);
    return x;
}

}  // namespace chaoslink::dsp
