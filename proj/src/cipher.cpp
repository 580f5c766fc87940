#include "chaoslink/cipher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "chaoslink/lyapunov_core.hpp"

namespace chaoslink::cipher {

namespace {

void validate_cipher_image(const img::GrayImage& im) {
    if (im.width < 2 || im.height < 2)
        throw invalid_input("cipher images must be at least 2x2");
    if (im.width % 2 != 0 || im.height % 2 != 0)
        throw invalid_input("cipher images must have even width and height (2x2 block tiling)");
    if (im.pixels.size() != static_cast<std::size_t>(im.width) * im.height)
        throw invalid_input("pixel buffer does not match image dimensions");
}

void validate_options(const CipherOptions& o) {
    if (o.rounds < 1) throw invalid_input("cipher needs at least one round");
    if (o.n0 < 0) throw invalid_input("keystream discard count must be >= 0");
    if (o.q_exponent < 2 || o.q_exponent > 44 || o.q_exponent % 2 != 0)
        throw invalid_input("q_exponent must be even and within [2, 44]");
}

long long fib(int n) {  // F(0)=0, F(1)=1
    long long a = 0, b = 1;
    for (int i = 0; i < n; ++i) {
        long long c = a + b;
        a = b;
        b = c;
    }
    return a;
}

std::uint8_t mod256(long long v) {
    return static_cast<std::uint8_t>(((v % 256) + 256) % 256);
}

struct ByteMat2 {
    int m[2][2];
};

ByteMat2 reduce(const QMatrix& q) {
    ByteMat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = mod256(q.m[i][j]);
    return r;
}

img::GrayImage apply_blocks(const img::GrayImage& image, const ByteMat2& q, Exec exec) {
    validate_cipher_image(image);
    img::GrayImage out = image;
    int bw = image.width / 2, bh = image.height / 2;
    long long nblocks = static_cast<long long>(bw) * bh;
    auto one = [&](long long idx) {
        int by = static_cast<int>(idx / bw), bx = static_cast<int>(idx % bw);
        std::size_t base = static_cast<std::size_t>(2 * by) * image.width + 2 * bx;
        std::size_t row2 = base + image.width;
        int b00 = image.pixels[base], b01 = image.pixels[base + 1];
        int b10 = image.pixels[row2], b11 = image.pixels[row2 + 1];
        out.pixels[base] = mod256(b00 * q.m[0][0] + b01 * q.m[1][0]);
        out.pixels[base + 1] = mod256(b00 * q.m[0][1] + b01 * q.m[1][1]);
        out.pixels[row2] = mod256(b10 * q.m[0][0] + b11 * q.m[1][0]);
        out.pixels[row2 + 1] = mod256(b10 * q.m[0][1] + b11 * q.m[1][1]);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < nblocks; ++i) one(i);
    } else {
        for (long long i = 0; i < nblocks; ++i) one(i);
    }
    return out;
}

}  // namespace

void validate_bundle(const KeyBundle& bundle) {
    if (bundle.rounds < 1) throw invalid_input("key bundle must hold at least one round");
    if (bundle.round_keys.size() != static_cast<std::size_t>(bundle.rounds))
        throw invalid_input("key bundle round count does not match its key list");
    if (bundle.n0 < 0) throw invalid_input("key bundle discard count must be >= 0");
    if (bundle.q_exponent < 2 || bundle.q_exponent > 44 || bundle.q_exponent % 2 != 0)
        throw invalid_input("key bundle q_exponent must be even and within [2, 44]");
    if (!(bundle.step > 0.0)) throw invalid_input("key bundle integrator step must be > 0");
    for (const auto& key : bundle.round_keys)
        for (double v : key)
            // 1.0 is reachable (all-255 image), hence the closed upper end.
            if (!(v >= 0.0 && v <= 1.0)) throw invalid_input("round key component outside [0, 1]");
}

void write_key_file(const KeyBundle& bundle, const std::string& path) {
    validate_bundle(bundle);
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot write key file: " + path);
    char buf[64];
    out << "CHAOSLINK-KEY v1\n";
    out << "rounds " << bundle.rounds << "\n";
    out << "n0 " << bundle.n0 << "\n";
    out << "q_exponent " << bundle.q_exponent << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", bundle.step);
    out << "step " << buf << "\n";
    for (const auto& key : bundle.round_keys) {
        out << "key";
        for (double v : key) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << " " << buf;
        }
        out << "\n";
    }
    if (!out) throw invalid_input("short write on key file: " + path);
}

KeyBundle read_key_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open key file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "CHAOSLINK-KEY v1")
        throw invalid_input(path + ": unrecognized key file version line");
    KeyBundle b;
    auto scalar_line = [&](const std::string& label) -> std::string {
        if (!std::getline(in, line)) throw invalid_input(path + ": truncated key file");
        std::istringstream ss(line);
        std::string got;
        ss >> got;
        if (got != label) throw invalid_input(path + ": expected '" + label + "' line");
        std::string value;
        ss >> value;
        if (value.empty()) throw invalid_input(path + ": missing value for " + label);
        return value;
    };
    try {
        b.rounds = std::stoi(scalar_line("rounds"));
        b.n0 = std::stoll(scalar_line("n0"));
        b.q_exponent = std::stoi(scalar_line("q_exponent"));
        b.step = std::stod(scalar_line("step"));
    } catch (const std::logic_error&) {
        throw invalid_input(path + ": malformed numeric field");
    }
    for (int r = 0; r < b.rounds; ++r) {
        if (!std::getline(in, line)) throw invalid_input(path + ": missing round key line");
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag != "key") throw invalid_input(path + ": expected 'key' line");
        RoundKey key{};
        for (double& v : key)
            if (!(ss >> v)) throw invalid_input(path + ": round key line needs six values");
        b.round_keys.push_back(key);
    }
    validate_bundle(b);
    return b;
}

RoundKey derive_round_key(const img::GrayImage& image, bool literal_denominator) {
    validate_cipher_image(image);
    double mn = static_cast<double>(image.width) * image.height;
    double sum = 0.0;
    for (std::uint8_t px : image.pixels) sum += px;
    double denom = literal_denominator ? std::exp2(8.0 * mn) : 256.0 * mn;
    RoundKey key{};
    key[0] = (sum + mn) / denom;
    if (!std::isfinite(key[0])) key[0] = 0.0;  // literal denominator overflow
    for (int i = 1; i < 6; ++i) {
        double v = key[i - 1] * 1e6;
        double frac = v - std::floor(v);
        if (frac < 1e-12) frac = 0.123456789 * (i + 1);
        key[i] = frac;
    }
    return key;
}

std::vector<double> keystream(const RoundKey& key, long long n0, std::size_t length,
                              const chaos::SystemParams& params,
                              const chaos::IntegratorConfig& cfg, bool concatenated_streams) {
    if (length < 1) throw invalid_input("keystream length must be >= 1");
    if (n0 < 0) throw invalid_input("keystream discard count must be >= 0");
    if (cfg.h <= 0.0) throw invalid_input("integrator step must be > 0");
    std::size_t kept = (length + 2) / 3;
    auto f = [&](const chaos::State& y) { return chaos::derivative(y, params); };
    chaos::State x = {key[0], key[1], key[2], key[3], key[4], key[5]};
    for (long long i = 0; i < n0; ++i) {
        x = chaos::detail::rk4_step(f, x, cfg.h);
        chaos::detail::check_finite(x, static_cast<std::size_t>(i) + 1);
    }
    std::vector<double> out;
    out.reserve(kept * 3);
    if (concatenated_streams) {
        std::vector<double> x1s, x3s, x5s;
        x1s.reserve(kept);
        x3s.reserve(kept);
        x5s.reserve(kept);
        for (std::size_t i = 0; i < kept; ++i) {
            x = chaos::detail::rk4_step(f, x, cfg.h);
            chaos::detail::check_finite(x, static_cast<std::size_t>(n0) + i + 1);
            x1s.push_back(x[0]);
            x3s.push_back(x[2]);
            x5s.push_back(x[4]);
        }
        out.insert(out.end(), x1s.begin(), x1s.end());
        out.insert(out.end(), x3s.begin(), x3s.end());
        out.insert(out.end(), x5s.begin(), x5s.end());
    } else {
        for (std::size_t i = 0; i < kept; ++i) {
            x = chaos::detail::rk4_step(f, x, cfg.h);
            chaos::detail::check_finite(x, static_cast<std::size_t>(n0) + i + 1);
            out.push_back(x[0]);
            out.push_back(x[2]);
            out.push_back(x[4]);
        }
    }
    out.resize(length);
    return out;
}

PermutationMap permutation_from_keystream(const std::vector<double>& L) {
    if (L.empty()) throw invalid_input("keystream is empty");
    if (L.size() > 0xffffffffull) throw invalid_input("keystream too long");
    PermutationMap map;
    map.s.resize(L.size());
    std::iota(map.s.begin(), map.s.end(), 0u);
    std::stable_sort(map.s.begin(), map.s.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return L[a] < L[b]; });
    for (auto& v : map.s) ++v;  // 1-based positions
    return map;
}

std::vector<std::uint8_t> permute(const std::vector<std::uint8_t>& p, const PermutationMap& map) {
    if (p.size() != map.s.size()) throw invalid_input("permutation length mismatch");
    std::vector<std::uint8_t> r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[map.s[i] - 1];
    return r;
}

std::vector<std::uint8_t> unpermute(const std::vector<std::uint8_t>& r,
                                    const PermutationMap& map) {
    if (r.size() != map.s.size()) throw invalid_input("permutation length mismatch");
    std::vector<std::uint8_t> p(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) p[map.s[i] - 1] = r[i];
    return p;
}

QMatrix q_power(int n) {
    if (n < 2 || n > 44 || n % 2 != 0)
        throw invalid_input("Q-matrix exponent must be even and within [2, 44]");
    QMatrix q;
    q.n = n;
    q.m[0][0] = fib(n + 1);
    q.m[0][1] = fib(n);
    q.m[1][0] = fib(n);
    q.m[1][1] = fib(n - 1);
    return q;
}

QMatrix q_inverse_mod256(const QMatrix& q) {
    if (q.n < 2 || q.n > 44 || q.n % 2 != 0)
        throw invalid_input("Q-matrix exponent must be even and within [2, 44]");
    QMatrix inv;
    inv.n = q.n;
    inv.m[0][0] = mod256(fib(q.n - 1));
    inv.m[0][1] = mod256(-fib(q.n));
    inv.m[1][0] = mod256(-fib(q.n));
    inv.m[1][1] = mod256(fib(q.n + 1));
    return inv;
}

img::GrayImage diffuse(const img::GrayImage& image, const QMatrix& q, Exec exec) {
    return apply_blocks(image, reduce(q), exec);
}

img::GrayImage undiffuse(const img::GrayImage& image, const QMatrix& q, Exec exec) {
    return apply_blocks(image, reduce(q_inverse_mod256(q)), exec);
}

EncryptResult encrypt(const img::GrayImage& image, const CipherOptions& options,
                      const chaos::SystemParams& params, const chaos::IntegratorConfig& cfg,
                      Exec exec) {
    validate_cipher_image(image);
    validate_options(options);
    if (cfg.h <= 0.0) throw invalid_input("integrator step must be > 0");
    QMatrix q = q_power(options.q_exponent);
    std::size_t mn = image.pixels.size();

    EncryptResult result;
    result.bundle.rounds = options.rounds;
    result.bundle.n0 = options.n0;
    result.bundle.q_exponent = options.q_exponent;
    result.bundle.step = cfg.h;
    img::GrayImage cur = image;
    for (int round = 0; round < options.rounds; ++round) {
        RoundKey key = derive_round_key(cur, options.literal_denominator);
        result.bundle.round_keys.push_back(key);
        std::vector<double> L =
            keystream(key, options.n0, mn, params, cfg, options.concatenated_streams);
        PermutationMap map = permutation_from_keystream(L);
        cur.pixels = permute(cur.pixels, map);
        cur = diffuse(cur, q, exec);
    }
    result.cipher = std::move(cur);
    return result;
}

img::GrayImage decrypt(const img::GrayImage& cipher, const KeyBundle& bundle,
                       const chaos::SystemParams& params, bool concatenated_streams, Exec exec) {
    validate_cipher_image(cipher);
    validate_bundle(bundle);
    QMatrix q = q_power(bundle.q_exponent);
    chaos::IntegratorConfig cfg{bundle.step};
    std::size_t mn = cipher.pixels.size();

    img::GrayImage cur = cipher;
    for (int round = bundle.rounds - 1; round >= 0; --round) {
        std::vector<double> L = keystream(bundle.round_keys[round], bundle.n0, mn, params, cfg,
                                          concatenated_streams);
        PermutationMap map = permutation_from_keystream(L);
        cur = undiffuse(cur, q, exec);
        cur.pixels = unpermute(cur.pixels, map);
    }
    return cur;
}

}  // namespace chaoslink::cipher
