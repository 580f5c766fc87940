#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chaoslink/chaos.hpp"
#include "chaoslink/common.hpp"
#include "chaoslink/image.hpp"

namespace chaoslink::cipher {

using RoundKey = std::array<double, 6>;

struct CipherOptions {
    int rounds = 4;
    long long n0 = 1000;   // keystream warm-up samples to discard
    int q_exponent = 20;   // even, in [2, 44] so Q^n entries stay exact in 64 bits
    // Audit switches for the two documented reading choices; defaults are the
    // working interpretations. The literal denominator makes every derived key
    // collapse toward zero for realistically sized images.
    bool literal_denominator = false;
    bool concatenated_streams = false;  // x1-block then x3-block then x5-block
};

// The transmitted secret: everything decrypt needs to reverse the rounds.
struct KeyBundle {
    int rounds = 0;
    long long n0 = 0;
    int q_exponent = 0;
    double step = 0.0;  // integrator step used for the keystreams
    std::vector<RoundKey> round_keys;
};

void validate_bundle(const KeyBundle& bundle);

// Key-file text format: version line, then labeled scalar lines, then one
// "key" line per round with six reals at 17 significant digits (lossless for
// 64-bit floats).
void write_key_file(const KeyBundle& bundle, const std::string& path);
KeyBundle read_key_file(const std::string& path);

// x1 = (sum of pixels + M*N) / (2^8 * M*N); x_{i} = frac(x_{i-1} * 10^6) with
// the zero-fallback 0.123456789*i (1-based component index) whenever the
// fractional part drops below 1e-12.
RoundKey derive_round_key(const img::GrayImage& image, bool literal_denominator = false);

// Iterates the flow from `key` for n0 + ceil(length/3) steps, discards the
// first n0, then reads (x1, x3, x5) from each remaining step (interleaved by
// default), truncated to `length`.
std::vector<double> keystream(const RoundKey& key, long long n0, std::size_t length,
                              const chaos::SystemParams& params,
                              const chaos::IntegratorConfig& cfg,
                              bool concatenated_streams = false);

struct PermutationMap {
    std::vector<std::uint32_t> s;  // 1-based positions; s[k] = origin of rank k
};

// Stable ascending argsort: ties keep their original order, so the map is
// always invertible even with duplicate keystream values.
PermutationMap permutation_from_keystream(const std::vector<double>& L);
std::vector<std::uint8_t> permute(const std::vector<std::uint8_t>& p, const PermutationMap& map);
std::vector<std::uint8_t> unpermute(const std::vector<std::uint8_t>& r, const PermutationMap& map);

struct QMatrix {
    long long m[2][2] = {{0, 0}, {0, 0}};
    int n = 0;  // exponent
};

// Q^n = [[F(n+1), F(n)], [F(n), F(n-1)]]; even n only, so det = +1 and the
// mod-256 inverse is [[F(n-1), -F(n)], [-F(n), F(n+1)]].
QMatrix q_power(int n);
QMatrix q_inverse_mod256(const QMatrix& q);

// Tiles into non-overlapping 2x2 blocks (row-major) and right-multiplies each
// by Q^n mod 256. Blocks are independent, hence the Exec knob.
img::GrayImage diffuse(const img::GrayImage& image, const QMatrix& q, Exec exec = Exec::parallel);
img::GrayImage undiffuse(const img::GrayImage& image, const QMatrix& q,
                         Exec exec = Exec::parallel);

struct EncryptResult {
    img::GrayImage cipher;
    KeyBundle bundle;
};

// Per round: derive a key from the round's input image (recorded into the
// bundle), build the keystream/permutation, permute, then diffuse. The filled
// bundle is the secret key; without it the rounds cannot be reversed.
EncryptResult encrypt(const img::GrayImage& image, const CipherOptions& options,
                      const chaos::SystemParams& params, const chaos::IntegratorConfig& cfg,
                      Exec exec = Exec::parallel);

img::GrayImage decrypt(const img::GrayImage& cipher, const KeyBundle& bundle,
                       const chaos::SystemParams& params, bool concatenated_streams = false,
                       Exec exec = Exec::parallel);

}  // namespace chaoslink::cipher
