#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chaoslink/common.hpp"
#include "chaoslink/image.hpp"

namespace chaoslink::metrics {

using img::BitVec;
using img::GrayImage;

// --- SP 800-22 style randomness tests -------------------------------------

enum class TestStatus { passed, failed, inconclusive };

struct TestResult {
    std::string name;
    double p_value = 0.0;   // NaN when inconclusive
    double statistic = 0.0;
    TestStatus status = TestStatus::failed;
    std::vector<std::pair<std::string, double>> parameters;

    bool passed() const { return status == TestStatus::passed; }
};

// Regularized upper incomplete gamma Q(a, x), series + continued fraction,
// relative accuracy ~1e-10. Hand-rolled so the p-values have no libm
// version dependence beyond erfc/lgamma.
double igamc(double a, double x);

TestResult frequency_test(const BitVec& bits);
TestResult block_frequency_test(const BitVec& bits, int block_len = 128);
TestResult runs_test(const BitVec& bits);
TestResult longest_run_test(const BitVec& bits);
TestResult dft_test(const BitVec& bits);
TestResult rank_test(const BitVec& bits);
TestResult non_overlapping_template_test(const BitVec& bits,
                                         const std::string& pattern = "000000001",
                                         int n_blocks = 8);
TestResult overlapping_template_test(const BitVec& bits, int template_len = 9);
TestResult serial_test(const BitVec& bits, int m = 16);       // reports min(p1, p2)
TestResult random_excursions_test(const BitVec& bits);        // min over the 8 states; J >= 500 gate

// All ten tests with default parameters, in the fixed report order:
// frequency, block frequency, runs, longest run, dft, rank, non-overlapping,
// overlapping, serial, random excursions. Tests are independent, hence Exec.
std::vector<TestResult> run_suite(const BitVec& bits, Exec exec = Exec::parallel);
bool suite_passes(const std::vector<TestResult>& results);

// --- histogram / entropy / psnr -------------------------------------------

struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

Histogram histogram(const GrayImage& image);

struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 0.0;  // 255 degrees of freedom against the uniform model
};

ChiSquareResult chi_square_uniformity(const Histogram& h);

double shannon_entropy(const GrayImage& image);  // bits per pixel, in [0, 8]

// 10*log10(255^2 / MSE); +infinity when the images are identical.
double psnr(const GrayImage& reference, const GrayImage& reconstructed);

}  // namespace chaoslink::metrics
