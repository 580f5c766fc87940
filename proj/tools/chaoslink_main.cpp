// chaoslink: hyperchaotic image cipher over a simulated OFDM/AWGN link.
//
// Subcommands: encrypt, decrypt, transmit, ber-sweep, analyze, dynamics.
// Exit codes: 0 success, 2 invalid input/usage, 3 internal failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chaoslink/chaos.hpp"
#include "chaoslink/cipher.hpp"
#include "chaoslink/common.hpp"
#include "chaoslink/image.hpp"
#include "chaoslink/metrics.hpp"
#include "chaoslink/ofdm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chaoslink;

namespace {

std::string fmt(double v, int precision = 12) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

// JSON has no inf/nan; keep non-finite summary values as their text form.
json num(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw invalid_input("bad grid entry '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) throw invalid_input("bad grid entry '" + tok + "'");
        grid.push_back(v);
    }
    if (grid.empty()) throw invalid_input("empty SNR grid");
    return grid;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw invalid_input("grid needs at least one point");
    if (n == 1) return {lo};
    if (!(hi > lo)) throw invalid_input("grid upper bound must exceed lower bound");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

chaos::State parse_init(const std::string& text) {
    auto vals = parse_grid(text);
    if (vals.size() != 6) throw invalid_input("--init needs exactly 6 comma-separated values");
    chaos::State s;
    std::copy(vals.begin(), vals.end(), s.begin());
    return s;
}

const char* status_name(metrics::TestStatus s) {
    switch (s) {
        case metrics::TestStatus::passed: return "pass";
        case metrics::TestStatus::failed: return "fail";
        default: return "inconclusive";
    }
}

// Shared flag bag; each subcommand registers the subset it uses.
struct Options {
    std::string image, key, out_dir = ".";
    double snr = std::numeric_limits<double>::infinity();
    std::string snr_grid = "5,10,20,30";
    std::uint64_t seed = 0;
    int fft_len = 1024;
    int cp_len = 256;
    std::string mapping = "qpsk";
    int rounds = 4;
    long long n0 = 1000;
    int q_exp = 20;
    double step = 0.001;
    // dynamics extras
    std::string kind = "lyapunov";
    std::string param = "r";
    double param_min = 0.0, param_max = 10.0;
    int param_points = 201;
    long long transient = 10000;
    long long total = 200000;
    long long record = 50000;
    long long steps = 5000;
    std::string init = "1,1,1,1,1,1";
};

struct Emitter {
    fs::path dir;
    json manifest;
    std::vector<std::string> outputs;

    explicit Emitter(const Options& o, const std::string& command) : dir(o.out_dir) {
        fs::create_directories(dir);
        manifest["command"] = command;
        manifest["seed"] = o.seed;
        manifest["outputs"] = json::array();
        manifest["summary"] = json::object();
    }
    fs::path path(const std::string& name) {
        outputs.push_back(name);
        return dir / name;
    }
    void config(const json& cfg) { manifest["config"] = cfg; }
    void summary(const std::string& k, const json& v) { manifest["summary"][k] = v; }
    // Manifest goes last so that every file it lists already exists.
    void finish() {
        manifest["outputs"] = outputs;
        auto out = open_out(dir / "manifest.json");
        out << manifest.dump(2) << "\n";
        std::cout << "manifest: " << (dir / "manifest.json").string() << "\n";
    }
};

ofdm::OfdmConfig ofdm_config(const Options& o) {
    ofdm::OfdmConfig cfg;
    cfg.fft_length = o.fft_len;
    cfg.cp_length = o.cp_len;
    cfg.mapping = o.mapping == "psk16" ? ofdm::Mapping::psk16 : ofdm::Mapping::qpsk;
    ofdm::validate_config(cfg);
    return cfg;
}

cipher::CipherOptions cipher_options(const Options& o) {
    cipher::CipherOptions c;
    c.rounds = o.rounds;
    c.n0 = o.n0;
    c.q_exponent = o.q_exp;
    return c;
}

void write_link_csv(std::ofstream out, const std::vector<ofdm::LinkReport>& rows) {
    out << "snr_db,total_bits,bit_errors,ber,psnr_db\n";
    for (const auto& r : rows)
        out << fmt(r.snr_db) << ',' << r.total_bits << ',' << r.bit_errors << ',' << fmt(r.ber)
            << ',' << fmt(r.psnr_db) << "\n";
}

// --- subcommands ------------------------------------------------------------

void cmd_encrypt(const Options& o) {
    Emitter em(o, "encrypt");
    em.config({{"image", o.image},
               {"rounds", o.rounds},
               {"n0", o.n0},
               {"q_exp", o.q_exp},
               {"step", o.step}});
    auto image = img::read_pgm(o.image);
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;
    cfg.h = o.step;
    auto enc = cipher::encrypt(image, cipher_options(o), params, cfg);
    img::write_pgm(enc.cipher, em.path("cipher.pgm").string());
    cipher::write_key_file(enc.bundle, em.path("key.txt").string());
    em.summary("width", image.width);
    em.summary("height", image.height);
    em.summary("rounds", enc.bundle.rounds);
    em.finish();
    std::cout << "encrypted " << image.width << "x" << image.height << " -> cipher.pgm, key.txt\n";
}

void cmd_decrypt(const Options& o) {
    Emitter em(o, "decrypt");
    em.config({{"image", o.image}, {"key", o.key}});
    auto cipher_img = img::read_pgm(o.image);
    auto bundle = cipher::read_key_file(o.key);
    chaos::SystemParams params;
    auto plain = cipher::decrypt(cipher_img, bundle, params);
    img::write_pgm(plain, em.path("decrypted.pgm").string());
    em.summary("width", plain.width);
    em.summary("height", plain.height);
    em.finish();
    std::cout << "decrypted " << plain.width << "x" << plain.height << " -> decrypted.pgm\n";
}

void cmd_transmit(const Options& o) {
    Emitter em(o, "transmit");
    em.config({{"image", o.image},
               {"key", o.key},
               {"snr", fmt(o.snr, 17)},
               {"seed", o.seed},
               {"fft_len", o.fft_len},
               {"cp_len", o.cp_len},
               {"mapping", o.mapping}});
    auto cipher_img = img::read_pgm(o.image);
    auto bundle = cipher::read_key_file(o.key);
    auto ocfg = ofdm_config(o);
    ofdm::ChannelModel channel;
    channel.snr_db = o.snr;
    channel.seed = o.seed;
    auto bits = img::bits_from_image(cipher_img);
    auto tx = ofdm::transmit_bits(bits, ocfg, channel);
    auto rx_cipher = img::image_from_bits(tx.received, cipher_img.width, cipher_img.height);
    chaos::SystemParams params;
    auto sent_plain = cipher::decrypt(cipher_img, bundle, params);
    auto rx_plain = cipher::decrypt(rx_cipher, bundle, params);
    tx.report.psnr_db = metrics::psnr(sent_plain, rx_plain);
    img::write_pgm(rx_plain, em.path("received.pgm").string());
    write_link_csv(open_out(em.path("link.csv")), {tx.report});
    em.summary("snr_db", num(tx.report.snr_db));
    em.summary("total_bits", tx.report.total_bits);
    em.summary("bit_errors", tx.report.bit_errors);
    em.summary("ber", num(tx.report.ber));
    em.summary("psnr_db", num(tx.report.psnr_db));
    em.finish();
    std::cout << "snr_db=" << fmt(tx.report.snr_db, 6) << " ber=" << fmt(tx.report.ber, 6)
              << " psnr_db=" << fmt(tx.report.psnr_db, 6) << " -> received.pgm, link.csv\n";
}

void cmd_ber_sweep(const Options& o) {
    Emitter em(o, "ber-sweep");
    em.config({{"image", o.image},
               {"key", o.key},
               {"snr_grid", o.snr_grid},
               {"seed", o.seed},
               {"fft_len", o.fft_len},
               {"cp_len", o.cp_len},
               {"mapping", o.mapping}});
    auto image = img::read_pgm(o.image);
    auto grid = parse_grid(o.snr_grid);
    auto ocfg = ofdm_config(o);
    auto bits = img::bits_from_image(image);
    auto points = ofdm::ber_sweep(bits, ocfg, grid, o.seed);

    chaos::SystemParams params;
    img::GrayImage reference = image;
    cipher::KeyBundle bundle;
    bool keyed = !o.key.empty();
    if (keyed) {
        // --image is ciphertext: compare decrypted sent vs decrypted received.
        bundle = cipher::read_key_file(o.key);
        reference = cipher::decrypt(image, bundle, params);
    }
    std::vector<ofdm::LinkReport> rows;
    for (auto& pt : points) {
        auto rx_img = img::image_from_bits(pt.received, image.width, image.height);
        auto rx = keyed ? cipher::decrypt(rx_img, bundle, params) : rx_img;
        pt.report.psnr_db = metrics::psnr(reference, rx);
        rows.push_back(pt.report);
    }
    write_link_csv(open_out(em.path("ber_sweep.csv")), rows);
    em.summary("points", rows.size());
    em.summary("keyed", keyed);
    em.finish();
    for (const auto& r : rows)
        std::cout << "snr_db=" << fmt(r.snr_db, 6) << " ber=" << fmt(r.ber, 6)
                  << " psnr_db=" << fmt(r.psnr_db, 6) << "\n";
    std::cout << "-> ber_sweep.csv\n";
}

void cmd_analyze(const Options& o) {
    Emitter em(o, "analyze");
    em.config({{"image", o.image}});
    auto image = img::read_pgm(o.image);
    auto hist = metrics::histogram(image);
    auto chi = metrics::chi_square_uniformity(hist);
    double entropy = metrics::shannon_entropy(image);
    auto bits = img::bits_from_image(image);
    auto suite = metrics::run_suite(bits);

    {
        auto out = open_out(em.path("histogram.csv"));
        out << "value,count\n";
        for (int v = 0; v < 256; ++v) out << v << ',' << hist.counts[v] << "\n";
    }
    {
        auto out = open_out(em.path("nist.csv"));
        out << "index,test_name,p_value,result\n";
        for (std::size_t i = 0; i < suite.size(); ++i)
            out << i + 1 << ',' << suite[i].name << ',' << std::fixed << std::setprecision(6)
                << suite[i].p_value << std::defaultfloat << ',' << status_name(suite[i].status)
                << "\n";
    }
    em.summary("entropy_bits", num(entropy));
    em.summary("chi_square", num(chi.statistic));
    em.summary("chi_square_p", num(chi.p_value));
    em.summary("suite_pass", metrics::suite_passes(suite));
    em.finish();
    std::cout << "entropy=" << fmt(entropy, 6) << " chi_square=" << fmt(chi.statistic, 6)
              << " (p=" << fmt(chi.p_value, 4) << ")\n";
    for (std::size_t i = 0; i < suite.size(); ++i)
        std::cout << std::setw(2) << i + 1 << "  " << std::left << std::setw(36) << suite[i].name
                  << std::right << "  p=" << std::fixed << std::setprecision(6)
                  << suite[i].p_value << std::defaultfloat << "  " << status_name(suite[i].status)
                  << "\n";
    std::cout << "suite: " << (metrics::suite_passes(suite) ? "all pass" : "not all pass")
              << " -> histogram.csv, nist.csv\n";
}

void cmd_dynamics(const Options& o) {
    Emitter em(o, "dynamics");
    em.config({{"kind", o.kind},
               {"step", o.step},
               {"param", o.param},
               {"param_min", o.param_min},
               {"param_max", o.param_max},
               {"param_points", o.param_points},
               {"transient", o.transient},
               {"total", o.total},
               {"record", o.record},
               {"steps", o.steps},
               {"init", o.init}});
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;
    cfg.h = o.step;
    auto init = parse_init(o.init);
    if (o.transient < 0 || o.total < 0 || o.record < 0 || o.steps < 0)
        throw invalid_input("step counts must be non-negative");

    if (o.kind == "lyapunov") {
        auto report = chaos::lyapunov_spectrum(init, params, cfg,
                                               static_cast<std::size_t>(o.transient),
                                               static_cast<std::size_t>(o.total));
        auto out = open_out(em.path("lyapunov.csv"));
        out << "index,exponent\n";
        json exps = json::array();
        for (int i = 0; i < 6; ++i) {
            out << i + 1 << ',' << fmt(report.exponents[i]) << "\n";
            exps.push_back(report.exponents[i]);
            std::cout << "L" << i + 1 << " = " << fmt(report.exponents[i], 6) << "\n";
        }
        em.summary("exponents", exps);
        em.finish();
        std::cout << "-> lyapunov.csv\n";
    } else if (o.kind == "bifurcation") {
        auto grid = linspace(o.param_min, o.param_max, o.param_points);
        auto scan = chaos::bifurcation_scan(o.param, grid, init, params, cfg,
                                            static_cast<std::size_t>(o.transient),
                                            static_cast<std::size_t>(o.record));
        auto out = open_out(em.path("bifurcation.csv"));
        out << "param_value,xmax\n";
        std::size_t rows = 0, diverged = 0;
        for (const auto& pt : scan.points) {
            if (pt.diverged) {
                ++diverged;
                continue;
            }
            for (double m : pt.maxima) {
                out << fmt(pt.param_value) << ',' << fmt(m) << "\n";
                ++rows;
            }
        }
        em.summary("grid_points", scan.points.size());
        em.summary("diverged_points", diverged);
        em.summary("rows", rows);
        em.finish();
        std::cout << scan.points.size() << " grid points (" << diverged << " diverged), " << rows
                  << " maxima -> bifurcation.csv\n";
    } else if (o.kind == "trajectory") {
        auto traj = chaos::generate_trajectory(init, params, cfg,
                                               static_cast<std::size_t>(o.steps));
        auto out = open_out(em.path("trajectory.csv"));
        out << "step,x1,x2,x3,x4,x5,x6\n";
        auto row = [&](long long k, const chaos::State& s) {
            out << k;
            for (double v : s) out << ',' << fmt(v);
            out << "\n";
        };
        row(0, init);
        for (std::size_t k = 0; k < traj.size(); ++k) row(static_cast<long long>(k) + 1, traj[k]);
        em.summary("steps", traj.size());
        em.finish();
        std::cout << traj.size() + 1 << " states -> trajectory.csv\n";
    } else {
        throw invalid_input("--kind must be lyapunov, bifurcation, or trajectory");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperchaotic image cipher over a simulated OFDM/AWGN link"};
    app.require_subcommand(1);
    Options o;

    auto add_ofdm_flags = [&](CLI::App* c) {
        c->add_option("--fft-len", o.fft_len, "FFT length (power of two)")->capture_default_str();
        c->add_option("--cp-len", o.cp_len, "cyclic prefix length")->capture_default_str();
        c->add_option("--mapping", o.mapping, "constellation")
            ->check(CLI::IsMember({"qpsk", "psk16"}))
            ->capture_default_str();
    };
    auto add_cipher_flags = [&](CLI::App* c) {
        c->add_option("--rounds", o.rounds, "encryption rounds")->capture_default_str();
        c->add_option("--n0", o.n0, "keystream warm-up samples")->capture_default_str();
        c->add_option("--q-exp", o.q_exp, "Fibonacci Q-matrix exponent (even)")
            ->capture_default_str();
        c->add_option("--step", o.step, "integrator step size")->capture_default_str();
    };
    auto add_out_dir = [&](CLI::App* c) {
        c->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
    };

    auto* enc = app.add_subcommand("encrypt", "encrypt a PGM image; writes cipher.pgm + key.txt");
    enc->add_option("--image", o.image, "input image (P5 PGM)")->required();
    add_cipher_flags(enc);
    add_out_dir(enc);
    enc->callback([&] { cmd_encrypt(o); });

    auto* dec = app.add_subcommand("decrypt", "decrypt a ciphertext PGM with its key file");
    dec->add_option("--image", o.image, "ciphertext image (P5 PGM)")->required();
    dec->add_option("--key", o.key, "key file from encrypt")->required();
    add_out_dir(dec);
    dec->callback([&] { cmd_decrypt(o); });

    auto* tx = app.add_subcommand(
        "transmit", "send a ciphertext over the OFDM/AWGN link and reconstruct the image");
    tx->add_option("--image", o.image, "ciphertext image (P5 PGM)")->required();
    tx->add_option("--key", o.key, "key file from encrypt")->required();
    tx->add_option("--snr", o.snr, "channel SNR in dB (default: noiseless)");
    tx->add_option("--seed", o.seed, "channel noise master seed")->capture_default_str();
    add_ofdm_flags(tx);
    add_out_dir(tx);
    tx->callback([&] { cmd_transmit(o); });

    auto* sweep = app.add_subcommand("ber-sweep", "BER/PSNR across an SNR grid");
    sweep->add_option("--image", o.image, "payload image (ciphertext when --key is given)")
        ->required();
    sweep->add_option("--key", o.key, "key file; enables decrypted-image PSNR");
    sweep->add_option("--snr-grid", o.snr_grid, "comma-separated SNR grid in dB")
        ->capture_default_str();
    sweep->add_option("--seed", o.seed, "channel noise master seed")->capture_default_str();
    add_ofdm_flags(sweep);
    add_out_dir(sweep);
    sweep->callback([&] { cmd_ber_sweep(o); });

    auto* an = app.add_subcommand("analyze",
                                  "histogram, entropy, chi-square, and the ten-test suite");
    an->add_option("--image", o.image, "image to analyze (P5 PGM)")->required();
    add_out_dir(an);
    an->callback([&] { cmd_analyze(o); });

    auto* dyn = app.add_subcommand("dynamics", "trajectory, Lyapunov spectrum, or bifurcation scan");
    dyn->add_option("--kind", o.kind, "lyapunov | bifurcation | trajectory")
        ->check(CLI::IsMember({"lyapunov", "bifurcation", "trajectory"}))
        ->capture_default_str();
    dyn->add_option("--step", o.step, "integrator step size")->capture_default_str();
    dyn->add_option("--init", o.init, "initial state, 6 comma-separated values")
        ->capture_default_str();
    dyn->add_option("--param", o.param, "bifurcation parameter (a|b|c|d|e|r)")
        ->capture_default_str();
    dyn->add_option("--param-min", o.param_min, "bifurcation grid lower bound")
        ->capture_default_str();
    dyn->add_option("--param-max", o.param_max, "bifurcation grid upper bound")
        ->capture_default_str();
    dyn->add_option("--param-points", o.param_points, "bifurcation grid size")
        ->capture_default_str();
    dyn->add_option("--transient", o.transient, "transient steps to discard")
        ->capture_default_str();
    dyn->add_option("--total", o.total, "total Lyapunov steps (includes transient)")
        ->capture_default_str();
    dyn->add_option("--record", o.record, "bifurcation recording steps")->capture_default_str();
    dyn->add_option("--steps", o.steps, "trajectory steps")->capture_default_str();
    add_out_dir(dyn);
    dyn->callback([&] { cmd_dynamics(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit 0; usage errors exit 2
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
