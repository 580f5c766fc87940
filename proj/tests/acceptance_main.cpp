// Acceptance gate: one line per criterion, exit 0 only if every one passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "chaoslink/chaos.hpp"
#include "chaoslink/cipher.hpp"
#include "chaoslink/fft.hpp"
#include "chaoslink/metrics.hpp"
#include "chaoslink/ofdm.hpp"
#include "testutil.hpp"

using namespace chaoslink;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

img::BitVec random_bits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    img::BitVec b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

// ---- 1: cipher roundtrip --------------------------------------------------
Outcome criterion_roundtrip() {
    Outcome out;
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;
    cipher::CipherOptions opt;

    auto t0 = Clock::now();
    auto big = testutil::synthetic_image(256, 256, 0);
    auto enc = cipher::encrypt(big, opt, params, cfg);
    auto dec = cipher::decrypt(enc.cipher, enc.bundle, params);
    double big_ms = ms_since(t0);
    out.require(dec.pixels == big.pixels, "256x256 roundtrip mismatch");
    out.require(big_ms < 2000.0, "256x256 roundtrip took " + std::to_string(big_ms) + " ms");

    for (int n : {8, 2}) {
        auto im = testutil::synthetic_image(n, n, 1);
        auto e = cipher::encrypt(im, opt, params, cfg);
        out.require(cipher::decrypt(e.cipher, e.bundle, params).pixels == im.pixels,
                    std::to_string(n) + "x" + std::to_string(n) + " roundtrip mismatch");
    }
    return out;
}

// ---- 2: hyperchaos via the Lyapunov spectrum ------------------------------
Outcome criterion_lyapunov() {
    Outcome out;
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;  // h = 0.001
    chaos::State init{1, 1, 1, 1, 1, 1};
    auto t0 = Clock::now();
    auto rep = chaos::lyapunov_spectrum(init, params, cfg, 10000, 200000);
    double took = ms_since(t0);

    int positive = 0;
    for (double e : rep.exponents)
        if (e > 0.05) ++positive;
    out.require(positive >= 2, "expected >= 2 clearly positive exponents, got " +
                                   std::to_string(positive));
    double sum = 0.0;
    for (double e : rep.exponents) sum += e;
    double expected = -(params.a + 1.0 + params.b - params.d);  // divergence trace
    out.require(std::abs(sum - expected) <= 0.05 * std::abs(expected),
                "exponent sum " + std::to_string(sum) + " vs trace " + std::to_string(expected));
    out.require(took < 30000.0, "spectrum took " + std::to_string(took) + " ms");
    return out;
}

// ---- 3: modem against the Gray-QPSK analytic curve ------------------------
Outcome criterion_modem() {
    Outcome out;
    ofdm::OfdmConfig cfg;
    auto t0 = Clock::now();

    auto payload = random_bits(1'000'000, 0xBEEF);
    for (double ebn0 : {0.0, 2.0, 4.0, 6.0, 8.0}) {
        ofdm::ChannelModel ch{ofdm::snr_db_from_ebn0(ebn0, ofdm::Mapping::qpsk),
                              0x5151 + static_cast<std::uint64_t>(ebn0 * 16)};
        auto res = ofdm::transmit_bits(payload, cfg, ch);
        double p = ofdm::qpsk_ber_theory(ebn0);
        double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(payload.size()));
        if (std::abs(res.report.ber - p) >= 3.0 * sigma)
            out.require(false, "ber off at Eb/N0 = " + std::to_string(ebn0) + " dB (measured " +
                                   std::to_string(res.report.ber) + ", theory " +
                                   std::to_string(p) + ")");
    }

    ofdm::ChannelModel clean;
    out.require(ofdm::transmit_bits(payload, cfg, clean).report.bit_errors == 0,
                "noiseless link not error free");

    auto sweep = ofdm::ber_sweep(random_bits(400'000, 77), cfg, {5, 10, 20, 30}, 3);
    for (std::size_t i = 1; i < sweep.size(); ++i)
        out.require(sweep[i].report.ber <= sweep[i - 1].report.ber,
                    "ber not monotone between grid points " + std::to_string(i - 1) + " and " +
                        std::to_string(i));

    double took = ms_since(t0);
    out.require(took < 60000.0, "modem checks took " + std::to_string(took) + " ms");
    return out;
}

// Variants with all-ten-pass ciphertext statistics under the default key
// schedule; shared by criteria 4 and 5.
const int kFixtureVariants[3] = {0, 4, 6};

std::vector<img::GrayImage> fixture_ciphertexts() {
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;
    std::vector<img::GrayImage> out;
    for (int variant : kFixtureVariants) {
        auto im = testutil::synthetic_image(256, 256, variant);
        out.push_back(cipher::encrypt(im, cipher::CipherOptions{}, params, cfg).cipher);
    }
    return out;
}

// ---- 4: randomness battery ------------------------------------------------
Outcome criterion_randomness(const std::vector<img::GrayImage>& ciphertexts) {
    Outcome out;
    char buf[64];
    for (std::size_t i = 0; i < ciphertexts.size(); ++i) {
        auto results = metrics::run_suite(img::bits_from_image(ciphertexts[i]));
        for (const auto& r : results) {
            if (!r.passed()) {
                std::snprintf(buf, sizeof buf, "%.6f", r.p_value);
                out.require(false, "image " + std::to_string(i) + ": " + r.name + " p = " + buf);
            }
        }
    }

    auto freq = metrics::frequency_test({1, 0, 1, 1, 0, 1, 0, 1, 0, 1});
    std::snprintf(buf, sizeof buf, "%.6f", freq.p_value);
    out.require(std::string(buf) == "0.527089", "frequency worked example gave " +
                                                    std::string(buf) + ", want 0.527089");
    auto runs = metrics::runs_test({1, 0, 0, 1, 1, 0, 1, 0, 1, 1});
    std::snprintf(buf, sizeof buf, "%.6f", runs.p_value);
    out.require(std::string(buf) == "0.147232",
                "runs worked example gave " + std::string(buf) + ", want 0.147232");
    return out;
}

// ---- 5: histogram flatness and entropy ------------------------------------
Outcome criterion_histogram(const std::vector<img::GrayImage>& ciphertexts) {
    Outcome out;
    for (std::size_t i = 0; i < ciphertexts.size(); ++i) {
        auto chi = metrics::chi_square_uniformity(metrics::histogram(ciphertexts[i]));
        out.require(chi.statistic < 310.457, "image " + std::to_string(i) + ": chi-square " +
                                                 std::to_string(chi.statistic));
        double h = metrics::shannon_entropy(ciphertexts[i]);
        out.require(h >= 7.99,
                    "image " + std::to_string(i) + ": entropy " + std::to_string(h));
    }
    return out;
}

// ---- 6: reconstruction quality across the link -----------------------------
Outcome criterion_reconstruction() {
    Outcome out;
    chaos::SystemParams params;
    chaos::IntegratorConfig icfg;
    ofdm::OfdmConfig cfg;

    // PSNR of the decrypted received image must not degrade as snr rises.
    auto im = testutil::synthetic_image(256, 256, 0);
    auto enc = cipher::encrypt(im, cipher::CipherOptions{}, params, icfg);
    auto payload = img::bits_from_image(enc.cipher);
    double prev = -1.0;
    for (double snr : {5.0, 10.0, 20.0}) {
        auto res = ofdm::transmit_bits(payload, cfg, ofdm::ChannelModel{snr, 11});
        auto received = img::image_from_bits(res.received, enc.cipher.width, enc.cipher.height);
        double p = metrics::psnr(im, cipher::decrypt(received, enc.bundle, params));
        out.require(p >= prev, "psnr fell from " + std::to_string(prev) + " to " +
                                   std::to_string(p) + " at snr " + std::to_string(snr));
        prev = p;
    }

    // 10^6-bit payload (512x256 image), 20 seeds at 20 dB: byte-exact nearly always.
    auto big = testutil::synthetic_image(512, 256, 3);
    auto enc2 = cipher::encrypt(big, cipher::CipherOptions{}, params, icfg);
    auto bits = img::bits_from_image(enc2.cipher);
    int exact = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto res = ofdm::transmit_bits(bits, cfg, ofdm::ChannelModel{20.0, seed});
        if (res.received == bits) ++exact;
    }
    out.require(exact >= 19, "only " + std::to_string(exact) + "/20 trials byte-exact at 20 dB");
    return out;
}

// ---- 7: structural property suite ------------------------------------------
Outcome criterion_properties() {
    Outcome out;
    chaos::SystemParams params;
    chaos::IntegratorConfig icfg;

    // Permutation bijectivity from an arbitrary keystream.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<double> L(4096);
    for (auto& v : L) v = u(rng);
    auto map = cipher::permutation_from_keystream(L);
    auto sorted = map.s;
    std::sort(sorted.begin(), sorted.end());
    bool bijective = true;
    for (std::uint32_t i = 0; i < sorted.size(); ++i) bijective &= (sorted[i] == i + 1);
    out.require(bijective, "permutation is not a bijection on 1..n");

    // Cassini identity and modular invertibility across all admissible powers.
    for (int n = 2; n <= 44; n += 2) {
        auto q = cipher::q_power(n);
        out.require(q.m[0][0] * q.m[1][1] - q.m[0][1] * q.m[1][0] == 1,
                    "determinant != 1 at exponent " + std::to_string(n));
        auto qi = cipher::q_inverse_mod256(q);
        long long prod[2][2] = {};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) prod[i][j] += q.m[i][k] * qi.m[k][j];
        bool identity = ((prod[0][0] % 256 + 256) % 256 == 1) &&
                        ((prod[0][1] % 256 + 256) % 256 == 0) &&
                        ((prod[1][0] % 256 + 256) % 256 == 0) &&
                        ((prod[1][1] % 256 + 256) % 256 == 1);
        out.require(identity, "mod-256 inverse wrong at exponent " + std::to_string(n));
    }

    // IFFT/FFT roundtrip.
    std::vector<dsp::cplx> spec(1024);
    for (auto& s : spec) s = dsp::cplx(u(rng), u(rng));
    auto time_dom = dsp::ifft(spec);
    auto back = dsp::fft(time_dom);
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        worst = std::max(worst, std::abs(back[i] - spec[i]));
    out.require(worst <= 1e-9, "ifft/fft roundtrip error " + std::to_string(worst));

    // Cyclic prefix coherence.
    ofdm::OfdmConfig cfg;
    std::vector<dsp::cplx> syms(cfg.fft_length);
    for (auto& s : syms) s = dsp::cplx(u(rng), u(rng));
    auto tx = ofdm::ofdm_modulate(syms, cfg);
    bool coherent = true;
    for (int i = 0; i < cfg.cp_length; ++i)
        coherent &= std::abs(tx[i] - tx[cfg.fft_length + i]) < 1e-12;
    out.require(coherent, "cyclic prefix is not a copy of the block tail");

    // Keystream prefix property.
    cipher::RoundKey key{0.11, 0.22, 0.33, 0.44, 0.55, 0.66};
    auto short_ks = cipher::keystream(key, 100, 100, params, icfg);
    auto long_ks = cipher::keystream(key, 100, 200, params, icfg);
    out.require(std::equal(short_ks.begin(), short_ks.end(), long_ks.begin()),
                "keystream prefixes disagree");

    // Key sensitivity: 1e-10 on one component garbles > 99% of pixels. The
    // warm-up must be long enough for that perturbation to reach the attractor
    // scale before any keystream value is emitted.
    cipher::CipherOptions opt;
    opt.n0 = 30000;
    auto im = testutil::synthetic_image(256, 256, 0);
    auto enc = cipher::encrypt(im, opt, params, icfg);
    auto tampered = enc.bundle;
    tampered.round_keys[opt.rounds - 1][0] += 1e-10;
    double changed =
        testutil::pixel_change_fraction(im, cipher::decrypt(enc.cipher, tampered, params));
    out.require(changed > 0.99,
                "key sensitivity only changed " + std::to_string(changed * 100.0) + "% of pixels");
    return out;
}

}  // namespace

int main() {
    auto ciphertexts = fixture_ciphertexts();
    auto randomness = [&] { return criterion_randomness(ciphertexts); };
    auto hist = [&] { return criterion_histogram(ciphertexts); };

    int failures = 0;
    int index = 0;
    auto report = [&](const char* name, Outcome o, double took_ms) {
        ++index;
        std::printf("criterion %d: %s  %s (%.0f ms)%s%s\n", index, o.ok ? "PASS" : "FAIL", name,
                    took_ms, o.detail.empty() ? "" : " -- ", o.detail.c_str());
        if (!o.ok) ++failures;
    };
    auto timed = [&](const char* name, auto&& fn) {
        auto t0 = Clock::now();
        Outcome o = fn();
        report(name, std::move(o), ms_since(t0));
    };

    timed("cipher roundtrip (256x256, 8x8, 2x2)", criterion_roundtrip);
    timed("two positive Lyapunov exponents, trace-consistent sum", criterion_lyapunov);
    timed("QPSK/AWGN BER matches theory; noiseless link clean; sweep monotone", criterion_modem);
    timed("ciphertexts pass all ten randomness tests; worked examples exact", randomness);
    timed("ciphertext histogram flat (chi-square) and entropy >= 7.99", hist);
    timed("reconstruction PSNR trend and byte-exact rate at 20 dB", criterion_reconstruction);
    timed("structural properties (permutation, Q-matrix, modem, key sensitivity)",
          criterion_properties);

    if (failures == 0) {
        std::printf("acceptance: all %d criteria satisfied\n", index);
        return 0;
    }
    std::printf("acceptance: %d of %d criteria FAILED\n", failures, index);
    return 1;
}
