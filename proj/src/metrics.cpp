#include "chaoslink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chaoslink/fft.hpp"

namespace chaoslink::metrics {

namespace {

constexpr double alpha = 0.01;
const double nan_value = std::numeric_limits<double>::quiet_NaN();

TestResult finish(std::string name, double p, double statistic,
                  std::vector<std::pair<std::string, double>> params) {
    TestResult r;
    r.name = std::move(name);
    r.p_value = p;
    r.statistic = statistic;
    r.status = p > alpha ? TestStatus::passed : TestStatus::failed;
    r.parameters = std::move(params);
    return r;
}

void require_bits(const BitVec& bits, std::size_t minimum, const char* test) {
    if (bits.size() < minimum)
        throw invalid_input(std::string(test) + ": sequence too short (needs >= " +
                            std::to_string(minimum) + " bits)");
}

}  // namespace

double igamc(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw invalid_input("igamc requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series; return the complement.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 10000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    // Lentz continued fraction for the upper tail.
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(log_prefix) * h;
}

TestResult frequency_test(const BitVec& bits) {
    require_bits(bits, 1, "frequency");
    long long s = 0;
    for (auto b : bits) s += (b & 1) ? 1 : -1;
    double s_obs = std::abs(static_cast<double>(s)) / std::sqrt(static_cast<double>(bits.size()));
    double p = std::erfc(s_obs / std::sqrt(2.0));
    return finish("Frequency", p, s_obs, {{"n", static_cast<double>(bits.size())}});
}

TestResult block_frequency_test(const BitVec& bits, int block_len) {
    if (block_len < 1) throw invalid_input("block frequency: block length must be >= 1");
    require_bits(bits, static_cast<std::size_t>(block_len), "block frequency");
    std::size_t n_blocks = bits.size() / block_len;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n_blocks; ++i) {
        long long ones = 0;
        for (int j = 0; j < block_len; ++j) ones += bits[i * block_len + j] & 1;
        double pi = static_cast<double>(ones) / block_len;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * block_len;
    double p = igamc(static_cast<double>(n_blocks) / 2.0, chi2 / 2.0);
    return finish("Block frequency", p, chi2,
                  {{"block_length", static_cast<double>(block_len)},
                   {"n_blocks", static_cast<double>(n_blocks)}});
}

TestResult runs_test(const BitVec& bits) {
    require_bits(bits, 2, "runs");
    double n = static_cast<double>(bits.size());
    long long ones = 0;
    for (auto b : bits) ones += b & 1;
    double pi = static_cast<double>(ones) / n;
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        // Frequency pre-test failed; runs statistic is meaningless, p forced to 0.
        return finish("Runs", 0.0, 0.0, {{"pi", pi}});
    }
    long long v = 1;
    for (std::size_t k = 0; k + 1 < bits.size(); ++k)
        if ((bits[k] & 1) != (bits[k + 1] & 1)) ++v;
    double num = std::abs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
    double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
    double p = std::erfc(num / den);
    return finish("Runs", p, static_cast<double>(v), {{"pi", pi}});
}

TestResult longest_run_test(const BitVec& bits) {
    require_bits(bits, 128, "longest run of ones");
    std::size_t n = bits.size();
    int m_len;
    std::vector<int> edges;   // category upper/lower cut points
    std::vector<double> pis;
    if (n < 6272) {
        m_len = 8;
        edges = {1, 2, 3, 4};           // <=1, 2, 3, >=4
        pis = {0.2148, 0.3672, 0.2305, 0.1875};
    } else if (n < 750000) {
        m_len = 128;
        edges = {4, 5, 6, 7, 8, 9};     // <=4 .. >=9
        pis = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
    } else {
        m_len = 10000;
        edges = {10, 11, 12, 13, 14, 15, 16};  // <=10 .. >=16
        pis = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }
    std::size_t n_blocks = n / m_len;
    std::vector<double> nu(pis.size(), 0.0);
    for (std::size_t i = 0; i < n_blocks; ++i) {
        int longest = 0, run = 0;
        for (int j = 0; j < m_len; ++j) {
            if (bits[i * m_len + j] & 1) {
                ++run;
                longest = std::max(longest, run);
            } else {
                run = 0;
            }
        }
        std::size_t cat = pis.size() - 1;
        for (std::size_t k = 0; k < edges.size(); ++k)
            if (longest <= edges[k]) {
                cat = k;
                break;
            }
        nu[cat] += 1.0;
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < pis.size(); ++k) {
        double expect = static_cast<double>(n_blocks) * pis[k];
        chi2 += (nu[k] - expect) * (nu[k] - expect) / expect;
    }
    double p = igamc((static_cast<double>(pis.size()) - 1.0) / 2.0, chi2 / 2.0);
    return finish("Longest-run-of-ones", p, chi2,
                  {{"block_length", static_cast<double>(m_len)},
                   {"n_blocks", static_cast<double>(n_blocks)}});
}

TestResult dft_test(const BitVec& bits) {
    require_bits(bits, 10, "discrete fourier transform");
    std::size_t n = bits.size();
    std::vector<dsp::cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (bits[i] & 1) ? 1.0 : -1.0;
    std::vector<dsp::cplx> spectrum = dsp::fft(std::move(x));
    double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
    std::size_t below = 0;
    for (std::size_t k = 0; k < n / 2; ++k)
        if (std::abs(spectrum[k]) < threshold) ++below;
    double n0 = 0.95 * static_cast<double>(n) / 2.0;
    double d = (static_cast<double>(below) - n0) /
               std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
    double p = std::erfc(std::abs(d) / std::sqrt(2.0));
    return finish("Discrete Fourier Transform", p, d,
                  {{"threshold", threshold}, {"peaks_below", static_cast<double>(below)}});
}

namespace {

int binary_rank_32(std::array<std::uint32_t, 32> rows) {
    int rank = 0;
    for (int col = 0; col < 32 && rank < 32; ++col) {
        std::uint32_t mask = 1u << col;
        int pivot = -1;
        for (int r = rank; r < 32; ++r)
            if (rows[r] & mask) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = rank + 1; r < 32; ++r)
            if (rows[r] & mask) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

}  // namespace

TestResult rank_test(const BitVec& bits) {
    constexpr std::size_t bits_per_matrix = 32 * 32;
    require_bits(bits, 38 * bits_per_matrix, "binary matrix rank");
    std::size_t n_mats = bits.size() / bits_per_matrix;
    std::size_t full = 0, minus1 = 0;
    for (std::size_t m = 0; m < n_mats; ++m) {
        std::array<std::uint32_t, 32> rows{};
        for (int r = 0; r < 32; ++r) {
            std::uint32_t row = 0;
            for (int c = 0; c < 32; ++c)
                row |= static_cast<std::uint32_t>(bits[m * bits_per_matrix + r * 32 + c] & 1) << c;
            rows[r] = row;
        }
        int rank = binary_rank_32(rows);
        if (rank == 32) ++full;
        else if (rank == 31) ++minus1;
    }
    double rest = static_cast<double>(n_mats - full - minus1);
    double e_full = 0.2888 * static_cast<double>(n_mats);
    double e_m1 = 0.5776 * static_cast<double>(n_mats);
    double e_rest = 0.1336 * static_cast<double>(n_mats);
    double chi2 = (full - e_full) * (full - e_full) / e_full +
                  (minus1 - e_m1) * (minus1 - e_m1) / e_m1 +
                  (rest - e_rest) * (rest - e_rest) / e_rest;
    double p = igamc(1.0, chi2 / 2.0);
    return finish("Binary matrix rank", p, chi2,
                  {{"n_matrices", static_cast<double>(n_mats)},
                   {"full_rank", static_cast<double>(full)}});
}

TestResult non_overlapping_template_test(const BitVec& bits, const std::string& pattern,
                                         int n_blocks) {
    if (n_blocks < 1) throw invalid_input("non-overlapping template: need >= 1 block");
    int m = static_cast<int>(pattern.size());
    if (m < 1) throw invalid_input("non-overlapping template: empty pattern");
    for (char ch : pattern)
        if (ch != '0' && ch != '1')
            throw invalid_input("non-overlapping template: pattern must be binary");
    require_bits(bits, static_cast<std::size_t>(n_blocks) * 2 * m, "non-overlapping template");
    std::size_t block_len = bits.size() / n_blocks;
    double mu = static_cast<double>(block_len - m + 1) / std::exp2(m);
    double var = static_cast<double>(block_len) *
                 (1.0 / std::exp2(m) - (2.0 * m - 1.0) / std::exp2(2 * m));
    double chi2 = 0.0;
    for (int b = 0; b < n_blocks; ++b) {
        const std::uint8_t* block = bits.data() + static_cast<std::size_t>(b) * block_len;
        std::size_t hits = 0;
        for (std::size_t j = 0; j + m <= block_len;) {
            bool match = true;
            for (int k = 0; k < m; ++k)
                if ((block[j + k] & 1) != (pattern[k] - '0')) {
                    match = false;
                    break;
                }
            if (match) {
                ++hits;
                j += m;  // non-overlapping: restart the scan after a hit
            } else {
                ++j;
            }
        }
        chi2 += (hits - mu) * (hits - mu) / var;
    }
    double p = igamc(static_cast<double>(n_blocks) / 2.0, chi2 / 2.0);
    return finish("Non overlapping template matching", p, chi2,
                  {{"template_length", static_cast<double>(m)},
                   {"n_blocks", static_cast<double>(n_blocks)},
                   {"mean", mu}});
}

TestResult overlapping_template_test(const BitVec& bits, int template_len) {
    if (template_len != 9)
        throw invalid_input("overlapping template: only the 9-bit all-ones template is supported");
    constexpr std::size_t block_len = 1032;
    require_bits(bits, block_len, "overlapping template");
    std::size_t n_blocks = bits.size() / block_len;
    // Reference tail probabilities for lambda = 2 (m=9, M=1032), 0..>=5 hits.
    const double pis[6] = {0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865};
    double nu[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::uint8_t* block = bits.data() + b * block_len;
        int hits = 0;
        for (std::size_t j = 0; j + template_len <= block_len; ++j) {
            bool match = true;
            for (int k = 0; k < template_len; ++k)
                if (!(block[j + k] & 1)) {
                    match = false;
                    break;
                }
            if (match) ++hits;
        }
        nu[std::min(hits, 5)] += 1.0;
    }
    double chi2 = 0.0;
    for (int k = 0; k < 6; ++k) {
        double expect = static_cast<double>(n_blocks) * pis[k];
        chi2 += (nu[k] - expect) * (nu[k] - expect) / expect;
    }
    double p = igamc(5.0 / 2.0, chi2 / 2.0);
    return finish("Overlapping template matching", p, chi2,
                  {{"template_length", static_cast<double>(template_len)},
                   {"n_blocks", static_cast<double>(n_blocks)}});
}

namespace {

// psi^2_t over the circularly extended sequence; psi^2_0 = 0 by convention.
double psi_squared(const BitVec& bits, int t) {
    if (t <= 0) return 0.0;
    std::size_t n = bits.size();
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(1) << t, 0);
    std::uint32_t mask = (static_cast<std::uint32_t>(1) << t) - 1;
    std::uint32_t window = 0;
    for (int j = 0; j < t - 1; ++j) window = ((window << 1) | (bits[j] & 1)) & mask;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t next = (i + static_cast<std::size_t>(t) - 1) % n;
        window = ((window << 1) | (bits[next] & 1)) & mask;
        ++counts[window];
    }
    double sum = 0.0;
    for (std::uint32_t c : counts) sum += static_cast<double>(c) * c;
    return sum * std::exp2(t) / static_cast<double>(n) - static_cast<double>(n);
}

}  // namespace

TestResult serial_test(const BitVec& bits, int m) {
    if (m < 2 || m > 24) throw invalid_input("serial: pattern length must be in [2, 24]");
    require_bits(bits, static_cast<std::size_t>(1) << m, "serial");
    double psi_m = psi_squared(bits, m);
    double psi_m1 = psi_squared(bits, m - 1);
    double psi_m2 = psi_squared(bits, m - 2);
    double del1 = psi_m - psi_m1;
    double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    double p1 = igamc(std::exp2(m - 2), del1 / 2.0);
    double p2 = igamc(std::exp2(m - 3), del2 / 2.0);
    TestResult r = finish("Serial", std::min(p1, p2), del1,
                          {{"m", static_cast<double>(m)},
                           {"p_value1", p1},
                           {"p_value2", p2},
                           {"del1", del1},
                           {"del2", del2}});
    return r;
}

TestResult random_excursions_test(const BitVec& bits) {
    require_bits(bits, 100, "random excursions");
    // Cycles of the +-1 random walk between returns to zero.
    const int states[8] = {-4, -3, -2, -1, 1, 2, 3, 4};
    std::vector<std::array<std::uint32_t, 8>> cycle_visits;
    std::array<std::uint32_t, 8> cur{};
    long long s = 0;
    bool any = false;
    for (auto b : bits) {
        s += (b & 1) ? 1 : -1;
        any = true;
        if (s == 0) {
            cycle_visits.push_back(cur);
            cur.fill(0);
        } else if (s >= -4 && s <= 4) {
            int idx = s < 0 ? static_cast<int>(s) + 4 : static_cast<int>(s) + 3;
            ++cur[idx];
        }
    }
    if (any && s != 0) cycle_visits.push_back(cur);  // final unfinished excursion
    std::size_t j_cycles = cycle_visits.size();

    TestResult r;
    r.name = "Random excursion";
    r.statistic = static_cast<double>(j_cycles);
    r.parameters.push_back({"J", static_cast<double>(j_cycles)});
    if (j_cycles < 500) {
        // Not enough cycles for the chi-square approximation; no p-value is fabricated.
        r.p_value = nan_value;
        r.status = TestStatus::inconclusive;
        return r;
    }
    double min_p = 1.0;
    for (int si = 0; si < 8; ++si) {
        int x = states[si];
        double ax = std::abs(x);
        double pi[6];
        pi[0] = 1.0 - 1.0 / (2.0 * ax);
        for (int k = 1; k <= 4; ++k)
            pi[k] = 1.0 / (4.0 * ax * ax) * std::pow(1.0 - 1.0 / (2.0 * ax), k - 1);
        pi[5] = 1.0 / (2.0 * ax) * std::pow(1.0 - 1.0 / (2.0 * ax), 4.0);
        double nu[6] = {0, 0, 0, 0, 0, 0};
        for (const auto& cyc : cycle_visits) nu[std::min<std::uint32_t>(cyc[si], 5)] += 1.0;
        double chi2 = 0.0;
        for (int k = 0; k < 6; ++k) {
            double expect = static_cast<double>(j_cycles) * pi[k];
            chi2 += (nu[k] - expect) * (nu[k] - expect) / expect;
        }
        double p = igamc(5.0 / 2.0, chi2 / 2.0);
        r.parameters.push_back({"p_x=" + std::to_string(x), p});
        min_p = std::min(min_p, p);
    }
    r.p_value = min_p;
    r.status = min_p > alpha ? TestStatus::passed : TestStatus::failed;
    return r;
}

std::vector<TestResult> run_suite(const BitVec& bits, Exec exec) {
    if (bits.size() < 100000)
        throw invalid_input("suite requires at least 1e5 bits (1e6 recommended)");
    std::vector<TestResult> results(10);
    auto run_one = [&](int i) {
        switch (i) {
            case 0: results[0] = frequency_test(bits); break;
            case 1: results[1] = block_frequency_test(bits); break;
            case 2: results[2] = runs_test(bits); break;
            case 3: results[3] = longest_run_test(bits); break;
            case 4: results[4] = dft_test(bits); break;
            case 5: results[5] = rank_test(bits); break;
            case 6: results[6] = non_overlapping_template_test(bits); break;
            case 7: results[7] = overlapping_template_test(bits); break;
            case 8: results[8] = serial_test(bits); break;
            case 9: results[9] = random_excursions_test(bits); break;
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < 10; ++i) run_one(i);
    } else {
        for (int i = 0; i < 10; ++i) run_one(i);
    }
    return results;
}

bool suite_passes(const std::vector<TestResult>& results) {
    for (const auto& r : results)
        if (r.status != TestStatus::passed) return false;
    return !results.empty();
}

Histogram histogram(const GrayImage& image) {
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height ||
        image.pixels.empty())
        throw invalid_input("invalid image");
    Histogram h;
    for (std::uint8_t px : image.pixels) ++h.counts[px];
    h.total = image.pixels.size();
    return h;
}

ChiSquareResult chi_square_uniformity(const Histogram& h) {
    if (h.total == 0) throw invalid_input("empty histogram");
    double expect = static_cast<double>(h.total) / 256.0;
    ChiSquareResult r;
    for (auto c : h.counts) {
        double d = static_cast<double>(c) - expect;
        r.statistic += d * d / expect;
    }
    r.p_value = igamc(255.0 / 2.0, r.statistic / 2.0);
    return r;
}

double shannon_entropy(const GrayImage& image) {
    Histogram h = histogram(image);
    double total = static_cast<double>(h.total);
    double entropy = 0.0;
    for (auto c : h.counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / total;
        entropy -= p * std::log2(p);
    }
    return entropy;
}

double psnr(const GrayImage& reference, const GrayImage& reconstructed) {
    if (!reference.same_shape(reconstructed)) throw invalid_input("psnr: dimension mismatch");
    if (reference.pixels.empty()) throw invalid_input("psnr: empty image");
    double mse = 0.0;
    for (std::size_t i = 0; i < reference.pixels.size(); ++i) {
        double d = static_cast<double>(reference.pixels[i]) - reconstructed.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.pixels.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace chaoslink::metrics
