#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "chaoslink/common.hpp"
#include "chaoslink/fft.hpp"
#include "chaoslink/image.hpp"

namespace chaoslink::ofdm {

using dsp::cplx;
using img::BitVec;

enum class Mapping { qpsk, psk16 };

int bits_per_symbol(Mapping m);

struct OfdmConfig {
    int fft_length = 1024;  // power of two
    int cp_length = 256;    // 0 <= cp_length < fft_length
    Mapping mapping = Mapping::qpsk;
    double symbol_interval = 1.0;  // abstract time units, used only for sample dumps
};

void validate_config(const OfdmConfig& cfg);

// AWGN only. snr_db is the time-domain per-sample signal-to-noise ratio; the
// +infinity sentinel means a noiseless channel.
struct ChannelModel {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
};

struct LinkReport {
    double snr_db = 0.0;
    std::size_t total_bits = 0;
    std::size_t bit_errors = 0;
    double ber = 0.0;
    double psnr_db = std::numeric_limits<double>::quiet_NaN();  // filled for image payloads
};

// Gray-coded unit-energy constellations.
// QPSK: 00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2.
// 16-PSK: position m on the unit circle (angle 2*pi*m/16) carries the Gray
// code m ^ (m >> 1), so angular neighbors differ in exactly one bit.
std::vector<cplx> map_bits(const BitVec& bits, Mapping m);
BitVec demap_symbols(const std::vector<cplx>& symbols, Mapping m);  // nearest-point hard decision

// Inverse DFT with 1/N scaling evaluated at the N sample instants, then the
// last cp_length samples are prepended as the cyclic prefix.
std::vector<cplx> ofdm_modulate(const std::vector<cplx>& symbols, const OfdmConfig& cfg);
// Drops the CP and applies the unscaled forward DFT (exact inverse of the above).
std::vector<cplx> ofdm_demodulate(const std::vector<cplx>& samples, const OfdmConfig& cfg);

// Deterministic Gaussian source: splitmix64-driven Box-Muller. The standard
// library's normal_distribution is implementation-defined, which would break
// bit-identical reproducibility across toolchains.
class NoiseRng {
  public:
    explicit NoiseRng(std::uint64_t seed) : state_(seed) {}
    double uniform();   // (0, 1]
    double gaussian();  // standard normal
  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Adds circularly symmetric complex Gaussian noise with total per-sample
// variance P_measured / 10^(snr_db/10), split equally between re and im.
std::vector<cplx> awgn(const std::vector<cplx>& samples, const ChannelModel& channel);

struct TransmitResult {
    LinkReport report;
    BitVec received;  // payload bits after the full chain (padding stripped)
};

// map -> modulate per block -> AWGN -> demodulate -> demap. The payload is
// zero-padded to whole OFDM symbols internally; errors are counted on payload
// bits only. Blocks are independent (per-block derived noise seeds), so the
// serial and parallel paths are bit-identical.
TransmitResult transmit_bits(const BitVec& bits, const OfdmConfig& cfg,
                             const ChannelModel& channel, Exec exec = Exec::parallel);

// One transmit_bits run per grid point with seeds derived from (seed, index);
// results are returned in grid order regardless of scheduling.
std::vector<TransmitResult> ber_sweep(const BitVec& bits, const OfdmConfig& cfg,
                                      const std::vector<double>& snr_grid_db, std::uint64_t seed,
                                      Exec exec = Exec::parallel);

// Under this modem's scaling the per-subcarrier Es/N0 equals the per-sample
// SNR, so the decision-point Eb/N0 is snr_db minus 10*log10(bits per symbol).
// The cyclic prefix is discarded before the FFT and carries the same
// per-sample power as the body, so it does not enter this conversion;
// cp_overhead_db() quantifies the transmit-energy cost separately.
double ebn0_db_from_snr(double snr_db, Mapping m);
double snr_db_from_ebn0(double ebn0_db, Mapping m);
double cp_overhead_db(const OfdmConfig& cfg);

double qfunc(double x);                  // Gaussian tail Q(x)
double qpsk_ber_theory(double ebn0_db);  // Q(sqrt(2*Eb/N0)) for Gray QPSK

}  // namespace chaoslink::ofdm
