#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "chaoslink/ofdm.hpp"
#include "testutil.hpp"

using namespace chaoslink;
using dsp::cplx;
using img::BitVec;
using ofdm::ChannelModel;
using ofdm::Mapping;
using ofdm::OfdmConfig;

namespace {

BitVec random_bits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BitVec b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

}  // namespace

TEST_CASE("QPSK constellation: the four Gray points, exactly") {
    const double s = 0.70710678118654752440;  // correctly rounded 1/sqrt(2)
    struct Row {
        std::uint8_t b0, b1;
        double re, im;
    };
    // First bit selects the imaginary sign, second bit the real sign.
    for (const Row& r : {Row{0, 0, s, s}, Row{0, 1, -s, s}, Row{1, 1, -s, -s}, Row{1, 0, s, -s}}) {
        auto sym = ofdm::map_bits({r.b0, r.b1}, Mapping::qpsk);
        REQUIRE(sym.size() == 1);
        CHECK(sym[0].real() == r.re);
        CHECK(sym[0].imag() == r.im);
        auto back = ofdm::demap_symbols(sym, Mapping::qpsk);
        CHECK(back == BitVec{r.b0, r.b1});
    }
    CHECK(ofdm::bits_per_symbol(Mapping::qpsk) == 2);
    CHECK(ofdm::bits_per_symbol(Mapping::psk16) == 4);
    CHECK_THROWS_AS(ofdm::map_bits({1}, Mapping::qpsk), invalid_input);  // odd bit count
    CHECK_THROWS_AS(ofdm::map_bits({1, 0, 1}, Mapping::psk16), invalid_input);
}

TEST_CASE("16-PSK: unit circle, Gray adjacency, demap inverts map") {
    std::vector<cplx> points;
    for (int m = 0; m < 16; ++m) {
        int gray = m ^ (m >> 1);
        BitVec bits(4);
        for (int k = 0; k < 4; ++k) bits[k] = static_cast<std::uint8_t>((gray >> (3 - k)) & 1);
        auto sym = ofdm::map_bits(bits, Mapping::psk16);
        REQUIRE(sym.size() == 1);
        CHECK(std::abs(sym[0]) == doctest::Approx(1.0).epsilon(1e-14));
        double angle = std::arg(sym[0]);
        if (angle < -1e-12) angle += 2.0 * M_PI;
        CHECK(angle == doctest::Approx(2.0 * M_PI * m / 16.0).epsilon(1e-10));
        CHECK(ofdm::demap_symbols(sym, Mapping::psk16) == bits);
        points.push_back(sym[0]);
    }
    // Angular neighbors differ in exactly one bit (Gray property).
    for (int m = 0; m < 16; ++m) {
        int g1 = m ^ (m >> 1);
        int g2 = ((m + 1) % 16) ^ (((m + 1) % 16) >> 1);
        int diff = g1 ^ g2;
        CHECK((diff & (diff - 1)) == 0);
        CHECK(diff != 0);
    }
}

TEST_CASE("map/demap identity on random payloads, both mappings") {
    for (Mapping m : {Mapping::qpsk, Mapping::psk16}) {
        auto bits = random_bits(4096, 11);
        auto syms = ofdm::map_bits(bits, m);
        CHECK(syms.size() == bits.size() / ofdm::bits_per_symbol(m));
        double power = 0.0;
        for (const cplx& s : syms) power += std::norm(s);
        CHECK(power / static_cast<double>(syms.size()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ofdm::demap_symbols(syms, m) == bits);
    }
}

TEST_CASE("ofdm_modulate: DC bin, impulse response, cyclic prefix coherence") {
    OfdmConfig cfg;
    cfg.fft_length = 4;
    cfg.cp_length = 2;

    // Only bin 0 loaded: time domain is constant at X0/N.
    auto dc = ofdm::ofdm_modulate({cplx(4.0, 0.0), 0, 0, 0}, cfg);
    REQUIRE(dc.size() == 6);  // cp + body
    for (const cplx& v : dc) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(v.imag()) < 1e-14);
    }

    // All bins equal: time-domain impulse at sample 0.
    auto imp = ofdm::ofdm_modulate({1, 1, 1, 1}, cfg);
    CHECK(std::abs(imp[2] - cplx(1.0, 0.0)) < 1e-14);  // body starts after cp
    CHECK(std::abs(imp[3]) < 1e-14);

    // CP is a copy of the tail.
    OfdmConfig big;  // defaults: 1024/256
    std::vector<cplx> syms(1024);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& s : syms) s = cplx(u(rng), u(rng));
    auto tx = ofdm::ofdm_modulate(syms, big);
    REQUIRE(tx.size() == 1280);
    for (int i = 0; i < 256; ++i) CHECK(std::abs(tx[i] - tx[1024 + i]) < 1e-12);

    CHECK_THROWS_AS(ofdm::ofdm_modulate({1, 1}, big), invalid_input);  // wrong block size
}

TEST_CASE("modulate/demodulate roundtrip is exact to near machine precision") {
    OfdmConfig cfg;
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<cplx> syms(cfg.fft_length);
    for (auto& s : syms) s = cplx(u(rng), u(rng));
    auto rx = ofdm::ofdm_demodulate(ofdm::ofdm_modulate(syms, cfg), cfg);
    REQUIRE(rx.size() == syms.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < syms.size(); ++i) worst = std::max(worst, std::abs(rx[i] - syms[i]));
    CHECK(worst < 1e-9);

    CHECK_THROWS_AS(ofdm::ofdm_demodulate(syms, cfg), invalid_input);  // missing cp
}

TEST_CASE("NoiseRng: deterministic, standard-normal moments") {
    ofdm::NoiseRng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.gaussian() == b.gaussian());

    ofdm::NoiseRng r(7);
    const int n = 10'000'000;
    double sum = 0, sum2 = 0, sum4 = 0;
    for (int i = 0; i < n; ++i) {
        double g = r.gaussian();
        sum += g;
        sum2 += g * g;
        sum4 += g * g * g * g;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    double kurt = (sum4 / n) / (var * var);
    CHECK(std::abs(mean) < 0.002);
    CHECK(var == doctest::Approx(1.0).epsilon(0.005));
    CHECK(kurt == doctest::Approx(3.0).epsilon(0.02));

    ofdm::NoiseRng u(3);
    for (int i = 0; i < 10000; ++i) {
        double v = u.uniform();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("awgn: sentinel, determinism, measured noise power, rejects") {
    std::vector<cplx> samples(100000, cplx(1.0, 0.0));

    ChannelModel clean;  // +inf default
    CHECK(ofdm::awgn(samples, clean) == samples);

    ChannelModel ch{10.0, 99};
    auto n1 = ofdm::awgn(samples, ch);
    auto n2 = ofdm::awgn(samples, ch);
    CHECK(n1 == n2);
    ChannelModel other{10.0, 100};
    CHECK(ofdm::awgn(samples, other) != n1);

    // Noise power should match P/10^(snr/10) = 0.1 within a few percent.
    double acc = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) acc += std::norm(n1[i] - samples[i]);
    acc /= static_cast<double>(samples.size());
    CHECK(acc == doctest::Approx(0.1).epsilon(0.02));

    CHECK_THROWS_AS(ofdm::awgn({}, ch), invalid_input);
    std::vector<cplx> zeros(16, cplx(0.0, 0.0));
    CHECK_THROWS_AS(ofdm::awgn(zeros, ch), invalid_input);
    CHECK(ofdm::awgn(zeros, clean) == zeros);  // zero power is fine when noiseless
    ChannelModel nan_snr{std::numeric_limits<double>::quiet_NaN(), 0};
    CHECK_THROWS_AS(ofdm::awgn(samples, nan_snr), invalid_input);
    ChannelModel neg_inf{-std::numeric_limits<double>::infinity(), 0};
    CHECK_THROWS_AS(ofdm::awgn(samples, neg_inf), invalid_input);
}

TEST_CASE("transmit_bits: noiseless identity, padding, empty payload") {
    OfdmConfig cfg;
    ChannelModel clean;
    // 5000 bits is not a whole number of OFDM symbols -> exercises padding.
    auto bits = random_bits(5000, 123);
    auto res = ofdm::transmit_bits(bits, cfg, clean);
    CHECK(res.received == bits);
    CHECK(res.report.total_bits == 5000);
    CHECK(res.report.bit_errors == 0);
    CHECK(res.report.ber == 0.0);

    auto res16 = ofdm::transmit_bits(bits, OfdmConfig{1024, 256, Mapping::psk16, 1.0}, clean);
    CHECK(res16.received == bits);

    auto empty = ofdm::transmit_bits({}, cfg, clean);
    CHECK(empty.report.total_bits == 0);
    CHECK(empty.received.empty());

    OfdmConfig bad = cfg;
    bad.fft_length = 1000;
    CHECK_THROWS_AS(ofdm::transmit_bits(bits, bad, clean), invalid_input);
}

TEST_CASE("QPSK BER matches Q(sqrt(2 Eb/N0)) within 3 sigma") {
    OfdmConfig cfg;
    auto bits = random_bits(1'000'000, 777);
    for (double ebn0 : {2.0, 4.0}) {
        ChannelModel ch{ofdm::snr_db_from_ebn0(ebn0, Mapping::qpsk), 31};
        auto res = ofdm::transmit_bits(bits, cfg, ch);
        double p = ofdm::qpsk_ber_theory(ebn0);
        double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(bits.size()));
        INFO("ebn0=", ebn0, " measured=", res.report.ber, " theory=", p);
        CHECK(std::abs(res.report.ber - p) < 3.0 * sigma);
    }
}

TEST_CASE("ber_sweep: grid order, monotonicity, exec equivalence, validation") {
    OfdmConfig cfg;
    auto bits = random_bits(200000, 2024);
    std::vector<double> grid{5, 10, 20, 30};
    auto par = ofdm::ber_sweep(bits, cfg, grid, 3);
    REQUIRE(par.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(par[i].report.snr_db == grid[i]);
        CHECK(par[i].report.total_bits == bits.size());
        if (i > 0) CHECK(par[i].report.ber <= par[i - 1].report.ber);
    }
    CHECK(par[0].report.ber > 0.0);   // 5 dB is noisy for sure
    CHECK(par[3].report.ber == 0.0);  // 30 dB is clean for this length

    auto ser = ofdm::ber_sweep(bits, cfg, grid, 3, Exec::serial);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ser[i].report.bit_errors == par[i].report.bit_errors);
        CHECK(ser[i].received == par[i].received);
    }

    // Same seed reproduces; different seed gives a different error pattern.
    auto again = ofdm::ber_sweep(bits, cfg, grid, 3);
    CHECK(again[0].received == par[0].received);
    auto reseeded = ofdm::ber_sweep(bits, cfg, grid, 4);
    CHECK(reseeded[0].received != par[0].received);

    CHECK_THROWS_AS(ofdm::ber_sweep(bits, cfg, {}, 3), invalid_input);
    CHECK_THROWS_AS(ofdm::ber_sweep(bits, cfg, {10, 5}, 3), invalid_input);
    CHECK_THROWS_AS(ofdm::ber_sweep(bits, cfg, {5, 5}, 3), invalid_input);
    std::vector<double> nan_grid{1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(ofdm::ber_sweep(bits, cfg, nan_grid, 3), invalid_input);
}

TEST_CASE("helper math: snr/ebn0 conversions, cp overhead, q functions") {
    double off_qpsk = 10.0 * std::log10(2.0);
    CHECK(ofdm::ebn0_db_from_snr(10.0, Mapping::qpsk) == doctest::Approx(10.0 - off_qpsk));
    CHECK(ofdm::snr_db_from_ebn0(4.0, Mapping::qpsk) == doctest::Approx(4.0 + off_qpsk));
    double off_16 = 10.0 * std::log10(4.0);
    CHECK(ofdm::ebn0_db_from_snr(10.0, Mapping::psk16) == doctest::Approx(10.0 - off_16));
    // The two are inverses.
    CHECK(ofdm::ebn0_db_from_snr(ofdm::snr_db_from_ebn0(7.3, Mapping::psk16), Mapping::psk16) ==
          doctest::Approx(7.3).epsilon(1e-12));

    OfdmConfig cfg;  // 1024 + 256 -> 10*log10(1.25)
    CHECK(ofdm::cp_overhead_db(cfg) == doctest::Approx(10.0 * std::log10(1.25)).epsilon(1e-12));

    CHECK(ofdm::qfunc(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ofdm::qfunc(3.0) == doctest::Approx(0.0013498980316301).epsilon(1e-10));
    CHECK(ofdm::qfunc(-1.0) + ofdm::qfunc(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ofdm::qpsk_ber_theory(4.0) == doctest::Approx(0.0125008).epsilon(1e-4));
    CHECK(ofdm::qpsk_ber_theory(40.0) < 1e-300);  // effectively zero, but not nan
}

TEST_CASE("validate_config: rejects malformed geometry") {
    OfdmConfig ok;
    CHECK_NOTHROW(ofdm::validate_config(ok));
    OfdmConfig bad = ok;
    bad.fft_length = 1000;
    CHECK_THROWS_AS(ofdm::validate_config(bad), invalid_input);
    bad = ok;
    bad.fft_length = 1;
    CHECK_THROWS_AS(ofdm::validate_config(bad), invalid_input);
    bad = ok;
    bad.cp_length = 1024;
    CHECK_THROWS_AS(ofdm::validate_config(bad), invalid_input);
    bad = ok;
    bad.cp_length = -1;
    CHECK_THROWS_AS(ofdm::validate_config(bad), invalid_input);
    bad = ok;
    bad.cp_length = 0;  // no prefix is allowed
    CHECK_NOTHROW(ofdm::validate_config(bad));
    bad = ok;
    bad.symbol_interval = 0.0;
    CHECK_THROWS_AS(ofdm::validate_config(bad), invalid_input);
}
