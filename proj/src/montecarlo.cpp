#include "uwoc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>

#include "uwoc/errors.hpp"
#include "uwoc/meijerg.hpp"
#include "uwoc/specfun.hpp"

namespace uwoc {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = 0xD2511F53ULL * c[0];
    const std::uint64_t p1 = 0xCD9E8D57ULL * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
}

// Runs body(lo, hi) over [0, total) in fixed 4096-sample chunks handed to a
// small worker pool. Chunk boundaries are independent of the worker count,
// and the body itself derives all randomness from the sample index, so the
// output is identical for any `threads`.
void run_chunked(long total, int threads,
                 const std::function<void(long, long)>& body) {
    constexpr long kChunk = 4096;
    if (threads <= 1 || total <= kChunk) {
        body(0, total);
        return;
    }
    const long n_chunks = (total + kChunk - 1) / kChunk;
    const int n_workers = static_cast<int>(
        std::min<long>(static_cast<long>(threads), n_chunks));
    std::atomic<long> next{0};
    std::mutex err_mu;
    std::exception_ptr err = nullptr;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (;;) {
                    const long c = next.fetch_add(1);
                    if (c >= n_chunks) break;
                    const long lo = c * kChunk;
                    body(lo, std::min(total, lo + kChunk));
                }
            } catch (...) {
                std::lock_guard<std::mutex> guard(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
    auto c = counter;
    auto k = key;
    for (int round = 0; round < 10; ++round) philox_round(c, k);
    return c;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void PhiloxStream::refill() {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    buf_ = philox4x32(counter, key_);
    ++block_;
    pos_ = 0;
}

std::uint32_t PhiloxStream::next_u32() {
    if (pos_ >= 4) refill();
    return buf_[static_cast<std::size_t>(pos_++)];
}

double PhiloxStream::next_unit() {
    return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32;
}

double PhiloxStream::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_unit()));
    const double w = kTwoPi * next_unit();
    spare_ = r * std::sin(w);
    have_spare_ = true;
    return r * std::cos(w);
}

double PhiloxStream::next_gamma_unit(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("next_gamma_unit: shape must be positive");
    }
    // Squeeze-accept sampler on the cube-transformed density; shapes below
    // one are lifted by one and corrected with a power of a uniform draw.
    double boost = 1.0;
    double k = shape;
    if (k < 1.0) {
        boost = std::pow(next_unit(), 1.0 / k);
        k += 1.0;
    }
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_unit();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * boost / shape;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v * boost / shape;
        }
    }
}

std::string config_label(const OrisConfig& config) {
    struct Visitor {
        std::string operator()(const PassiveRandom&) { return "random"; }
        std::string operator()(const PassiveIdeal&) { return "ideal"; }
        std::string operator()(const PassiveControlled&) {
            return "controlled";
        }
        std::string operator()(const ActiveControlled&) { return "active"; }
        std::string operator()(const PassiveQuantized&) { return "quantized"; }
    };
    return std::visit(Visitor{}, config);
}

void validate_oris_config(const OrisConfig& config) {
    struct Visitor {
        void operator()(const PassiveRandom&) {}
        void operator()(const PassiveIdeal&) {}
        void operator()(const PassiveControlled& c) {
            if (!(c.sigma_phase >= 0.0) || !std::isfinite(c.sigma_phase)) {
                throw DomainError(
                    "oris config: controlled sigma_phase must be >= 0");
            }
        }
        void operator()(const ActiveControlled& c) {
            if (!(c.gain_db > 0.0) || !std::isfinite(c.gain_db)) {
                throw DomainError("oris config: active gain_db must be > 0");
            }
            if (!(c.sigma_phase >= 0.0) || !std::isfinite(c.sigma_phase)) {
                throw DomainError(
                    "oris config: active sigma_phase must be >= 0");
            }
            if (!std::isfinite(c.p_noise_dbw)) {
                throw DomainError(
                    "oris config: active p_noise_dbw must be finite");
            }
        }
        void operator()(const PassiveQuantized& c) {
            if (c.bits < 1 || c.bits > 30) {
                throw DomainError(
                    "oris config: quantizer bits must lie in [1, 30]");
            }
        }
    };
    std::visit(Visitor{}, config);
}

double quantize_phase(double phi, int bits) {
    if (bits < 1 || bits > 30) {
        throw DomainError("quantize_phase: bits must lie in [1, 30]");
    }
    if (!std::isfinite(phi)) {
        throw DomainError("quantize_phase: phi must be finite");
    }
    const double step = kTwoPi / static_cast<double>(1u << bits);
    double wrapped = std::fmod(phi, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    return std::round(wrapped / step) * step;
}

void validate_plan(const SimPlan& plan) {
    if (plan.trials < 1) throw DomainError("sim plan: trials must be >= 1");
    if (plan.n_elements < 1) {
        throw DomainError("sim plan: n_elements must be >= 1");
    }
    if (!(plan.alpha > 0.0) || !std::isfinite(plan.alpha) ||
        !(plan.beta > 0.0) || !std::isfinite(plan.beta)) {
        throw DomainError("sim plan: fading shapes must be positive");
    }
    if (!(plan.xi_sq > 0.0) || !std::isfinite(plan.xi_sq)) {
        throw DomainError("sim plan: xi_sq must be positive");
    }
    if (!(plan.a0 > 0.0) || !(plan.a0 <= 1.0)) {
        throw DomainError("sim plan: a0 must lie in (0, 1]");
    }
    if (!(plan.gamma_bar > 0.0) || !std::isfinite(plan.gamma_bar)) {
        throw DomainError("sim plan: gamma_bar must be positive");
    }
    if (plan.threads < 1 || plan.threads > 1024) {
        throw DomainError("sim plan: threads must lie in [1, 1024]");
    }
}

double sample_cascade(double alpha, double beta, PhiloxStream& rng) {
    return rng.next_gamma_unit(alpha) * rng.next_gamma_unit(beta);
}

namespace {

struct Dispatch {
    enum Kind { kRandom, kIdeal, kControlled, kActive, kQuantized } kind;
    double sigma = 0.0;     // residual phase std (rad)
    double gain_amp = 1.0;  // active amplitude gain
    double denom = 1.0;     // active noise denominator 1 + N * p_noise
    int bits = 0;           // quantizer resolution
};

Dispatch make_dispatch(const OrisConfig& config, int n_elements) {
    struct Visitor {
        int n;
        Dispatch operator()(const PassiveRandom&) const {
            return {Dispatch::kRandom, 0.0, 1.0, 1.0, 0};
        }
        Dispatch operator()(const PassiveIdeal&) const {
            return {Dispatch::kIdeal, 0.0, 1.0, 1.0, 0};
        }
        Dispatch operator()(const PassiveControlled& c) const {
            return {Dispatch::kControlled, c.sigma_phase, 1.0, 1.0, 0};
        }
        Dispatch operator()(const ActiveControlled& c) const {
            const double gain = std::pow(10.0, c.gain_db / 20.0);
            const double p_noise = std::pow(10.0, c.p_noise_dbw / 10.0);
            return {Dispatch::kActive, c.sigma_phase, gain,
                    1.0 + static_cast<double>(n) * p_noise, 0};
        }
        Dispatch operator()(const PassiveQuantized& c) const {
            return {Dispatch::kQuantized, 0.0, 1.0, 1.0, c.bits};
        }
    };
    return std::visit(Visitor{n_elements}, config);
}

// One complete trial: a single misalignment draw shared by every element,
// one two-leg fading cascade per element, and the configuration's amplitude
// and phase model applied to the coherent element sum.
double trial_snr(const Dispatch& d, const SimPlan& plan, long trial) {
    PhiloxStream rng(plan.seed, static_cast<std::uint64_t>(trial));
    const double hp = plan.a0 * std::pow(rng.next_unit(), 1.0 / plan.xi_sq);
    double re = 0.0, im = 0.0;
    for (int m = 0; m < plan.n_elements; ++m) {
        const double h = sample_cascade(plan.alpha, plan.beta, rng);
        switch (d.kind) {
            case Dispatch::kIdeal:
                re += h;
                break;
            case Dispatch::kRandom: {
                const double rho = rng.next_unit();
                const double psi = kTwoPi * rng.next_unit();
                re += rho * h * std::cos(psi);
                im += rho * h * std::sin(psi);
            } break;
            case Dispatch::kControlled: {
                const double rho = rng.next_unit();
                const double eps = d.sigma * rng.next_gaussian();
                re += rho * h * std::cos(eps);
                im += rho * h * std::sin(eps);
            } break;
            case Dispatch::kActive: {
                const double eps = d.sigma * rng.next_gaussian();
                const double amp = d.gain_amp * h;
                re += amp * std::cos(eps);
                im += amp * std::sin(eps);
            } break;
            case Dispatch::kQuantized: {
                const double rho = rng.next_unit();
                const double phi = kTwoPi * rng.next_unit();
                const double eps = quantize_phase(phi, d.bits) - phi;
                re += rho * h * std::cos(eps);
                im += rho * h * std::sin(eps);
            } break;
        }
    }
    const double coherent = re * re + im * im;
    return plan.gamma_bar * hp * hp * coherent / d.denom;
}

}  // namespace

std::vector<double> simulate_snr(const OrisConfig& config,
                                 const SimPlan& plan) {
    validate_oris_config(config);
    validate_plan(plan);
    const Dispatch d = make_dispatch(config, plan.n_elements);
    std::vector<double> out(static_cast<std::size_t>(plan.trials));
    run_chunked(plan.trials, plan.threads, [&](long lo, long hi) {
        for (long t = lo; t < hi; ++t) {
            out[static_cast<std::size_t>(t)] = trial_snr(d, plan, t);
        }
    });
    return out;
}

OpEstimate empirical_op(const std::vector<double>& snr_samples,
                        double gamma_th) {
    if (snr_samples.empty()) {
        throw DomainError("empirical_op: empty sample stream");
    }
    if (!(gamma_th >= 0.0)) {
        throw DomainError("empirical_op: gamma_th must be >= 0");
    }
    const long n_below = std::count_if(
        snr_samples.begin(), snr_samples.end(),
        [gamma_th](double g) { return g <= gamma_th; });
    const double n = static_cast<double>(snr_samples.size());
    const double p_hat = static_cast<double>(n_below) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (p_hat + z2 / (2.0 * n)) / denom;
    const double half =
        kZ95 / denom *
        std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
    // At the boundaries center and half agree analytically; pin the exact
    // endpoint rather than leaving one-ulp residue.
    const double lo = n_below == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = n_below == static_cast<long>(snr_samples.size())
                          ? 1.0
                          : std::min(1.0, center + half);
    return {p_hat, lo, hi, n_below, static_cast<long>(snr_samples.size())};
}

BerEstimate empirical_ber(const std::vector<double>& snr_samples,
                          const ModulationSpec& mod) {
    if (snr_samples.empty()) {
        throw DomainError("empirical_ber: empty sample stream");
    }
    validate_modulation(mod);
    // Welford accumulation of the per-sample conditional error probability.
    double mean = 0.0, m2 = 0.0;
    long count = 0;
    for (double g : snr_samples) {
        if (!(g >= 0.0)) {
            throw DomainError("empirical_ber: negative SNR sample");
        }
        double ber = 0.0;
        for (double q : mod.q_k) ber += 1.0 - gamma_p(mod.p, q * g);
        ber *= 0.5 * mod.delta;
        ++count;
        const double delta1 = ber - mean;
        mean += delta1 / static_cast<double>(count);
        m2 += delta1 * (ber - mean);
    }
    const double n = static_cast<double>(count);
    const double se = count > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    return {mean, std::max(0.0, mean - kZ95 * se),
            std::min(1.0, mean + kZ95 * se), count};
}

SumApproxReport validate_sum_approx(double alpha, double beta, int n,
                                    long trials, std::uint64_t seed,
                                    int threads) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
        !std::isfinite(beta)) {
        throw DomainError("validate_sum_approx: shapes must be positive");
    }
    if (n < 1) throw DomainError("validate_sum_approx: n must be >= 1");
    if (trials < 2) {
        throw DomainError("validate_sum_approx: trials must be >= 2");
    }
    if (threads < 1 || threads > 1024) {
        throw DomainError("validate_sum_approx: threads must lie in [1, 1024]");
    }

    std::vector<double> y(static_cast<std::size_t>(trials));
    run_chunked(trials, threads, [&](long lo, long hi) {
        for (long t = lo; t < hi; ++t) {
            PhiloxStream rng(seed, static_cast<std::uint64_t>(t));
            double s = 0.0;
            for (int m = 0; m < n; ++m) s += sample_cascade(alpha, beta, rng);
            y[static_cast<std::size_t>(t)] = s;
        }
    });

    SumApproxReport report{};
    report.trials = trials;
    const double nd = static_cast<double>(trials);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= nd;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= (nd - 1.0);
    report.mean_emp = mean;
    report.var_emp = var;
    report.mean_se = std::sqrt(var / nd);
    report.mean_expected = static_cast<double>(n);
    report.var_expected =
        (1.0 / alpha + 1.0 / beta + 1.0 / (alpha * beta)) *
        static_cast<double>(n);

    // Distribution check: empirical CDF of the sum against the
    // moment-matched aggregate shape pair (n alpha, n beta) with matched
    // mean, evaluated on a log-spaced grid spanning the sample range.
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const double big_a = static_cast<double>(n) * alpha;
    const double big_b = static_cast<double>(n) * beta;
    const MeijerOrder cdf_order(2, 1, {1.0}, {big_a, big_b, 0.0});
    const double ln_norm = log_gamma(big_a) + log_gamma(big_b);
    constexpr int kGrid = 2000;
    const double lo = std::log(sorted.front());
    const double hi = std::log(sorted.back());
    double ks = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        const double g = std::exp(
            lo + (hi - lo) * static_cast<double>(i) /
                     static_cast<double>(kGrid - 1));
        const double z = big_a * big_b * g / static_cast<double>(n);
        const MeijerResult res = meijer_g(cdf_order, z);
        if (!res.converged) {
            throw NoConvergence("validate_sum_approx: aggregate CDF failed",
                                res.value, res.rel_err);
        }
        double cdf = res.sign <= 0
                         ? 0.0
                         : std::exp(res.log_abs - ln_norm);
        cdf = std::min(1.0, std::max(0.0, cdf));
        const auto it =
            std::upper_bound(sorted.begin(), sorted.end(), g);
        const double f_emp =
            static_cast<double>(it - sorted.begin()) / nd;
        ks = std::max(ks, std::abs(f_emp - cdf));
    }
    report.ks_distance = ks;
    return report;
}

}  // namespace uwoc
