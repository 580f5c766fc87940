#include "chaoslink/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chaoslink::ofdm {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

int gray_code(int m) { return m ^ (m >> 1); }

}  // namespace

int bits_per_symbol(Mapping m) { return m == Mapping::qpsk ? 2 : 4; }

void validate_config(const OfdmConfig& cfg) {
    if (cfg.fft_length < 2 || !dsp::is_pow2(static_cast<std::size_t>(cfg.fft_length)))
        throw invalid_input("fft length must be a power of two (>= 2)");
    if (cfg.cp_length < 0 || cfg.cp_length >= cfg.fft_length)
        throw invalid_input("cp length must satisfy 0 <= cp < fft length");
    if (!(cfg.symbol_interval > 0.0)) throw invalid_input("symbol interval must be > 0");
}

std::vector<cplx> map_bits(const BitVec& bits, Mapping m) {
    int bps = bits_per_symbol(m);
    if (bits.size() % bps != 0)
        throw invalid_input("bit count must be divisible by bits per symbol");
    std::vector<cplx> out;
    out.reserve(bits.size() / bps);
    if (m == Mapping::qpsk) {
        for (std::size_t i = 0; i < bits.size(); i += 2) {
            double im = (bits[i] & 1) ? -inv_sqrt2 : inv_sqrt2;
            double re = (bits[i + 1] & 1) ? -inv_sqrt2 : inv_sqrt2;
            out.emplace_back(re, im);
        }
    } else {
        // Position index from the Gray code carried by the 4 bits (MSB first).
        int inverse_gray[16];
        for (int pos = 0; pos < 16; ++pos) inverse_gray[gray_code(pos)] = pos;
        for (std::size_t i = 0; i < bits.size(); i += 4) {
            int code = ((bits[i] & 1) << 3) | ((bits[i + 1] & 1) << 2) |
                       ((bits[i + 2] & 1) << 1) | (bits[i + 3] & 1);
            double ang = 2.0 * std::numbers::pi * inverse_gray[code] / 16.0;
            out.emplace_back(std::cos(ang), std::sin(ang));
        }
    }
    return out;
}

BitVec demap_symbols(const std::vector<cplx>& symbols, Mapping m) {
    BitVec out;
    out.reserve(symbols.size() * bits_per_symbol(m));
    if (m == Mapping::qpsk) {
        for (const cplx& s : symbols) {
            out.push_back(s.imag() < 0.0 ? 1 : 0);
            out.push_back(s.real() < 0.0 ? 1 : 0);
        }
    } else {
        cplx points[16];
        for (int pos = 0; pos < 16; ++pos) {
            double ang = 2.0 * std::numbers::pi * pos / 16.0;
            points[pos] = {std::cos(ang), std::sin(ang)};
        }
        for (const cplx& s : symbols) {
            int best = 0;
            double best_d = std::norm(s - points[0]);
            for (int pos = 1; pos < 16; ++pos) {
                double d = std::norm(s - points[pos]);
                if (d < best_d) {
                    best_d = d;
                    best = pos;
                }
            }
            int code = gray_code(best);
            for (int k = 3; k >= 0; --k) out.push_back((code >> k) & 1);
        }
    }
    return out;
}

std::vector<cplx> ofdm_modulate(const std::vector<cplx>& symbols, const OfdmConfig& cfg) {
    validate_config(cfg);
    if (symbols.size() != static_cast<std::size_t>(cfg.fft_length))
        throw invalid_input("symbol block must be exactly fft length");
    std::vector<cplx> body = dsp::ifft(symbols);
    std::vector<cplx> out;
    out.reserve(body.size() + cfg.cp_length);
    out.insert(out.end(), body.end() - cfg.cp_length, body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::vector<cplx> ofdm_demodulate(const std::vector<cplx>& samples, const OfdmConfig& cfg) {
    validate_config(cfg);
    if (samples.size() != static_cast<std::size_t>(cfg.fft_length) + cfg.cp_length)
        throw invalid_input("sample block must be fft length plus cp length");
    std::vector<cplx> body(samples.begin() + cfg.cp_length, samples.end());
    return dsp::fft(std::move(body));
}

double NoiseRng::uniform() {
    return (static_cast<double>(splitmix64(state_) >> 11) + 1.0) * 0x1.0p-53;
}

double NoiseRng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<cplx> awgn(const std::vector<cplx>& samples, const ChannelModel& channel) {
    if (samples.empty()) throw invalid_input("awgn input is empty");
    if (std::isinf(channel.snr_db) && channel.snr_db > 0.0) return samples;  // noiseless
    if (!std::isfinite(channel.snr_db)) throw invalid_input("snr must be finite or +inf");
    double power = 0.0;
    for (const cplx& s : samples) power += std::norm(s);
    power /= static_cast<double>(samples.size());
    if (!(power > 0.0))
        throw invalid_input("degenerate signal: zero power block with finite snr");
    double sigma2 = power / std::pow(10.0, channel.snr_db / 10.0);
    double comp_sigma = std::sqrt(sigma2 / 2.0);
    NoiseRng rng(channel.seed);
    std::vector<cplx> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double nr = rng.gaussian(), ni = rng.gaussian();
        out[i] = samples[i] + cplx(comp_sigma * nr, comp_sigma * ni);
    }
    return out;
}

TransmitResult transmit_bits(const BitVec& bits, const OfdmConfig& cfg,
                             const ChannelModel& channel, Exec exec) {
    validate_config(cfg);
    TransmitResult result;
    result.report.snr_db = channel.snr_db;
    result.report.total_bits = bits.size();
    if (bits.empty()) return result;  // zero-bit report, nothing sent

    std::size_t bpb = static_cast<std::size_t>(cfg.fft_length) * bits_per_symbol(cfg.mapping);
    std::size_t nblocks = (bits.size() + bpb - 1) / bpb;
    BitVec rx(nblocks * bpb, 0);

    auto run_block = [&](std::size_t b) {
        BitVec chunk(bpb, 0);  // final partial block is zero-padded
        std::size_t begin = b * bpb;
        std::size_t count = std::min(bpb, bits.size() - begin);
        std::copy(bits.begin() + begin, bits.begin() + begin + count, chunk.begin());
        std::vector<cplx> tx = ofdm_modulate(map_bits(chunk, cfg.mapping), cfg);
        ChannelModel block_channel{channel.snr_db, derive_seed(channel.seed, b)};
        std::vector<cplx> ry = awgn(tx, block_channel);
        BitVec got = demap_symbols(ofdm_demodulate(ry, cfg), cfg.mapping);
        std::copy(got.begin(), got.end(), rx.begin() + begin);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long b = 0; b < static_cast<long long>(nblocks); ++b)
            run_block(static_cast<std::size_t>(b));
    } else {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
    }

    rx.resize(bits.size());  // strip the pad
    std::size_t errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if ((rx[i] & 1) != (bits[i] & 1)) ++errors;
    result.report.bit_errors = errors;
    result.report.ber = static_cast<double>(errors) / static_cast<double>(bits.size());
    result.received = std::move(rx);
    return result;
}

std::vector<TransmitResult> ber_sweep(const BitVec& bits, const OfdmConfig& cfg,
                                      const std::vector<double>& snr_grid_db, std::uint64_t seed,
                                      Exec exec) {
    validate_config(cfg);
    if (snr_grid_db.empty()) throw invalid_input("snr grid is empty");
    for (double v : snr_grid_db)
        if (std::isnan(v)) throw invalid_input("snr grid contains nan");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
        if (!(snr_grid_db[i] > snr_grid_db[i - 1]))
            throw invalid_input("snr grid must be strictly increasing");

    std::vector<TransmitResult> out(snr_grid_db.size());
    auto run_point = [&](std::size_t i) {
        ChannelModel ch{snr_grid_db[i], derive_seed(seed, i)};
        out[i] = transmit_bits(bits, cfg, ch, Exec::serial);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(snr_grid_db.size()); ++i)
            run_point(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < snr_grid_db.size(); ++i) run_point(i);
    }
    return out;
}

double ebn0_db_from_snr(double snr_db, Mapping m) {
    return snr_db - 10.0 * std::log10(static_cast<double>(bits_per_symbol(m)));
}

double snr_db_from_ebn0(double ebn0_db, Mapping m) {
    return ebn0_db + 10.0 * std::log10(static_cast<double>(bits_per_symbol(m)));
}

double cp_overhead_db(const OfdmConfig& cfg) {
    return 10.0 * std::log10(1.0 + static_cast<double>(cfg.cp_length) / cfg.fft_length);
}

double qfunc(double x) { return 0.5 * std::erfc(x * inv_sqrt2); }

double qpsk_ber_theory(double ebn0_db) {
    return qfunc(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0)));
}

}  // namespace chaoslink::ofdm
