// SPDX-License-Identifier: Apache-2.0

#include "wpt/rectenna.hpp"

#include "wpt/simd/kernels.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wpt {

void DiodeParams::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("diode parameter ") + name + " must be positive");
    };
    positive(i_s, "i_s");
    positive(n, "n");
    positive(v_t, "v_t");
    positive(r_ant, "R_ant");
    positive(r_load, "R_L");
}

namespace {

void check_order(int order)
{
    if (order != 2 && order != 4 && order != 6)
        throw std::invalid_argument("Taylor truncation order must be 2, 4 or 6, got " +
                                    std::to_string(order));
}

}  // namespace

std::vector<double> taylor_coefficients(const DiodeParams& diode, int order)
{
    diode.validate();
    check_order(order);
    std::vector<double> k;
    double factorial = 1.0;
    double power = 1.0;
    for (int i = 1; i <= order; ++i) {
        factorial *= i;
        power *= diode.n_vt();
        if (i % 2 == 0) k.push_back(diode.i_s / (factorial * power));
    }
    return k;
}

void RectennaParams::validate() const
{
    diode.validate();
    check_order(order);
}

Eigen::VectorXcd received_tone_coefficients(const Waveform& w, const ChannelRealization& h)
{
    if (w.tones() != h.tones() || w.antennas() != h.antennas())
        throw std::invalid_argument("waveform and channel dimensions differ");
    return h.response.cwiseProduct(w.weights()).rowwise().sum();
}

EvenMoments even_moments(const Eigen::VectorXcd& x, int order)
{
    check_order(order);
    const auto n = static_cast<long>(x.size());
    EvenMoments out;
    out.m2 = 0.5 * x.squaredNorm();
    if (order >= 4) {
        // n0 + n1 = n2 + n3
        std::complex<double> acc = 0.0;
        for (long a = 0; a < n; ++a)
            for (long b = 0; b < n; ++b) {
                const std::complex<double> ab = x[a] * x[b];
                const long s = a + b;
                for (long c = std::max(0L, s - n + 1); c <= std::min(n - 1, s); ++c)
                    acc += ab * std::conj(x[c] * x[s - c]);
            }
        out.m4 = 0.375 * acc.real();
    }
    if (order >= 6) {
        // n0 + n1 + n2 = n3 + n4 + n5
        std::complex<double> acc = 0.0;
        for (long a = 0; a < n; ++a)
            for (long b = 0; b < n; ++b)
                for (long c = 0; c < n; ++c) {
                    const std::complex<double> abc = x[a] * x[b] * x[c];
                    const long s = a + b + c;
                    for (long d = std::max(0L, s - 2 * (n - 1)); d <= std::min(n - 1, s); ++d) {
                        const long rest = s - d;
                        const std::complex<double> xd = std::conj(x[d]);
                        for (long e = std::max(0L, rest - n + 1); e <= std::min(n - 1, rest); ++e)
                            acc += abc * xd * std::conj(x[e] * x[rest - e]);
                    }
                }
        out.m6 = 0.3125 * acc.real();
    }
    return out;
}

ZdcBreakdown zdc_breakdown(const Eigen::VectorXcd& tones, const RectennaParams& p)
{
    p.validate();
    const std::vector<double> k = p.k();
    const EvenMoments m = even_moments(tones, p.order);
    const double r = p.diode.r_ant;
    ZdcBreakdown z;
    z.order2 = k[0] * r * m.m2;
    if (p.order >= 4) z.order4 = k[1] * r * r * m.m4;
    if (p.order >= 6) z.order6 = k[2] * r * r * r * m.m6;
    return z;
}

double zdc_from_tones(const Eigen::VectorXcd& tones, const RectennaParams& p)
{
    return zdc_breakdown(tones, p).total();
}

double zdc_analytic(const Waveform& w, const ChannelRealization& h, const RectennaParams& p)
{
    return zdc_from_tones(received_tone_coefficients(w, h), p);
}

double zdc_time_average(const Waveform& w, const ChannelRealization& h, const RectennaParams& p,
                        int sample_factor)
{
    p.validate();
    if (sample_factor < 1) throw std::invalid_argument("sample factor must be at least 1");
    if (w.tones() != h.tones() || w.antennas() != h.antennas())
        throw std::invalid_argument("waveform and channel dimensions differ");
    if (!w.grid.commensurate())
        throw std::invalid_argument("time-average oracle needs f0 to be a multiple of the tone spacing");

    const auto g = static_cast<std::int64_t>(std::llround(w.grid.harmonic_offset()));
    const auto tones = static_cast<std::int64_t>(w.tones());
    const auto samples = static_cast<std::size_t>(sample_factor * p.order * (g + tones));
    std::vector<double> y(samples, 0.0);
    const auto& kern = simd::kernels();
    for (std::size_t n = 0; n < w.tones(); ++n) {
        const double step = 2.0 * std::numbers::pi * static_cast<double>(g + static_cast<std::int64_t>(n)) /
                            static_cast<double>(samples);
        for (std::size_t m = 0; m < w.antennas(); ++m) {
            const auto ni = static_cast<Eigen::Index>(n);
            const auto mi = static_cast<Eigen::Index>(m);
            const double amp = w.amplitude(ni, mi) * std::abs(h.response(ni, mi));
            if (amp == 0.0) continue;
            const double phase = w.phase(ni, mi) + std::arg(h.response(ni, mi));
            kern.accumulate_cosine(y.data(), samples, amp, phase, step);
        }
    }
    const std::array<double, 3> sums = kern.even_power_sums(y.data(), samples);
    const std::vector<double> k = p.k();
    double z = 0.0;
    double rpow = 1.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        rpow *= p.diode.r_ant;
        z += k[i] * rpow * sums[i] / static_cast<double>(samples);
    }
    return z;
}

double iout_fixed_point(double zdc, const RectennaParams& p)
{
    p.validate();
    if (!(zdc >= 0.0) || !std::isfinite(zdc)) throw std::invalid_argument("z_DC must be non-negative");
    if (zdc == 0.0) return 0.0;
    const double is = p.diode.i_s;
    const double slope = p.diode.r_load / p.diode.n_vt();
    const double target = std::log1p(zdc / is);
    // Logarithm of both sides: strictly increasing in i.
    auto f = [&](double i) { return slope * i + std::log1p(i / is) - target; };
    std::uintmax_t iterations = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        f, 0.0, zdc, f(0.0), f(zdc),
        boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 3), iterations);
    return 0.5 * (lo + hi);
}

std::vector<double> synthesize_transmit(const Waveform& w, std::size_t antenna,
                                        std::span<const double> times_s)
{
    if (antenna >= w.antennas()) throw std::out_of_range("antenna index out of range");
    std::vector<double> x(times_s.size(), 0.0);
    const auto mi = static_cast<Eigen::Index>(antenna);
    for (std::size_t n = 0; n < w.tones(); ++n) {
        const auto ni = static_cast<Eigen::Index>(n);
        const double s = w.amplitude(ni, mi);
        if (s == 0.0) continue;
        const double omega = w.grid.angular(n);
        for (std::size_t k = 0; k < times_s.size(); ++k)
            x[k] += s * std::cos(omega * times_s[k] + w.phase(ni, mi));
    }
    return x;
}

double papr(const Waveform& w, std::size_t antenna, int oversampling)
{
    if (antenna >= w.antennas()) throw std::out_of_range("antenna index out of range");
    if (oversampling < 1) throw std::invalid_argument("oversampling factor must be positive");
    const auto mi = static_cast<Eigen::Index>(antenna);
    const double mean = 0.5 * w.amplitude.col(mi).squaredNorm();
    if (!(mean > 0.0)) throw std::invalid_argument("PAPR undefined for an antenna with zero power");

    const auto q_count = static_cast<std::int64_t>(w.tones()) * oversampling;
    const bool exact = w.grid.commensurate();
    const auto g = static_cast<std::int64_t>(std::llround(w.grid.harmonic_offset()));
    double peak = 0.0;
    for (std::int64_t q = 0; q < q_count; ++q) {
        double x = 0.0;
        for (std::size_t n = 0; n < w.tones(); ++n) {
            const auto ni = static_cast<Eigen::Index>(n);
            const double s = w.amplitude(ni, mi);
            if (s == 0.0) continue;
            double cycles;
            if (exact) {
                const std::int64_t r = ((g + static_cast<std::int64_t>(n)) % q_count) * q % q_count;
                cycles = static_cast<double>(r) / static_cast<double>(q_count);
            } else {
                const double ratio = w.grid.tone_hz(n) / w.grid.spacing_hz;
                cycles = std::fmod(ratio * static_cast<double>(q) / static_cast<double>(q_count), 1.0);
            }
            x += s * std::cos(2.0 * std::numbers::pi * cycles + w.phase(ni, mi));
        }
        peak = std::max(peak, x * x);
    }
    return peak / mean;
}

std::uint64_t count_index_tuples(std::size_t tones, int order)
{
    check_order(order);
    const int half = order / 2;
    const auto n = static_cast<std::int64_t>(tones);
    // ways[s] = number of ordered half-tuples whose indices sum to s
    std::vector<std::uint64_t> ways{1};
    for (int j = 0; j < half; ++j) {
        std::vector<std::uint64_t> next(ways.size() + static_cast<std::size_t>(n) - 1, 0);
        for (std::size_t s = 0; s < ways.size(); ++s)
            for (std::int64_t i = 0; i < n; ++i) next[s + static_cast<std::size_t>(i)] += ways[s];
        ways = std::move(next);
    }
    std::uint64_t total = 0;
    for (auto c : ways) total += c * c;
    return total;
}

namespace {

// Builds sum_i k_i R^{i/2} c_i sum_s |P_s|^2 where the linear forms are
// X_n = sum_m a(n,m) x_{n M + m}.
SparsePolynomial build_zdc_polynomial(const Eigen::MatrixXcd& a, const RectennaParams& p)
{
    p.validate();
    const auto tones = static_cast<std::size_t>(a.rows());
    const auto antennas = static_cast<std::size_t>(a.cols());
    const std::size_t vars = tones * antennas;
    const std::vector<double> k = p.k();
    const double r = p.diode.r_ant;

    std::vector<SparsePolynomial> x;
    x.reserve(tones);
    for (std::size_t n = 0; n < tones; ++n) {
        std::vector<std::pair<std::size_t, std::complex<double>>> terms;
        for (std::size_t m = 0; m < antennas; ++m) {
            const auto c = a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
            if (c != 0.0) terms.emplace_back(amplitude_index(n, m, antennas), c);
        }
        x.push_back(SparsePolynomial::linear(vars, terms));
    }

    SparsePolynomial z(vars);
    for (const auto& xn : x) z += (xn * xn.conjugate()).scaled(0.5 * k[0] * r);
    if (p.order < 4) return z;

    // Y_s = sum_{n0 + n1 = s} X_{n0} X_{n1}
    std::vector<SparsePolynomial> y(2 * tones - 1, SparsePolynomial(vars));
    for (std::size_t i = 0; i < tones; ++i) {
        y[2 * i] += x[i] * x[i];
        for (std::size_t j = i + 1; j < tones; ++j) y[i + j] += (x[i] * x[j]).scaled(2.0);
    }
    for (const auto& ys : y) z += (ys * ys.conjugate()).scaled(0.375 * k[1] * r * r);
    if (p.order < 6) return z;

    // T_s = sum_{n0} X_{n0} Y_{s - n0}
    std::vector<SparsePolynomial> t(3 * tones - 2, SparsePolynomial(vars));
    for (std::size_t i = 0; i < tones; ++i)
        for (std::size_t s = 0; s < y.size(); ++s) t[i + s] += x[i] * y[s];
    for (const auto& ts : t) z += (ts * ts.conjugate()).scaled(0.3125 * k[2] * r * r * r);
    return z;
}

}  // namespace

SparsePolynomial zdc_polynomial(const ChannelRealization& h, const Eigen::MatrixXd& phases,
                                const RectennaParams& p)
{
    if (phases.rows() != h.response.rows() || phases.cols() != h.response.cols())
        throw std::invalid_argument("phase matrix and channel dimensions differ");
    Eigen::MatrixXcd a(h.response.rows(), h.response.cols());
    for (Eigen::Index n = 0; n < a.rows(); ++n)
        for (Eigen::Index m = 0; m < a.cols(); ++m)
            a(n, m) = h.response(n, m) * std::polar(1.0, phases(n, m));
    return build_zdc_polynomial(a, p);
}

gp::Posynomial zdc_posynomial(const ChannelRealization& h, const RectennaParams& p)
{
    // With matched phases every received component is real and non-negative.
    const Eigen::MatrixXcd a = h.amplitudes().cast<std::complex<double>>();
    gp::Signomial split = build_zdc_polynomial(a, p).real_part_split();
    if (!split.negative.empty()) throw std::logic_error("matched-phase z_DC produced negative terms");
    return split.positive;
}

gp::Signomial weighted_sum_signomial(const std::vector<ChannelRealization>& h,
                                     const std::vector<double>& weights, const RectennaParams& p,
                                     const Eigen::MatrixXd& phases)
{
    if (h.empty()) throw std::invalid_argument("at least one rectenna channel is required");
    if (weights.size() != h.size()) throw std::invalid_argument("one weight per rectenna is required");
    const auto vars = h.front().tones() * h.front().antennas();
    SparsePolynomial total(vars);
    for (std::size_t u = 0; u < h.size(); ++u) {
        if (!(weights[u] >= 0.0)) throw std::invalid_argument("rectenna weights must be non-negative");
        if (weights[u] == 0.0) continue;
        total += zdc_polynomial(h[u], phases, p).scaled(weights[u]);
    }
    return total.real_part_split();
}

Eigen::VectorXd flatten_amplitudes(const Eigen::MatrixXd& s)
{
    const auto antennas = static_cast<std::size_t>(s.cols());
    Eigen::VectorXd x(s.size());
    for (Eigen::Index n = 0; n < s.rows(); ++n)
        for (Eigen::Index m = 0; m < s.cols(); ++m)
            x[static_cast<Eigen::Index>(amplitude_index(static_cast<std::size_t>(n),
                                                         static_cast<std::size_t>(m), antennas))] = s(n, m);
    return x;
}

Eigen::MatrixXd unflatten_amplitudes(const Eigen::VectorXd& x, std::size_t tones, std::size_t antennas)
{
    if (static_cast<std::size_t>(x.size()) != tones * antennas)
        throw std::invalid_argument("amplitude vector has wrong length");
    Eigen::MatrixXd s(static_cast<Eigen::Index>(tones), static_cast<Eigen::Index>(antennas));
    for (std::size_t n = 0; n < tones; ++n)
        for (std::size_t m = 0; m < antennas; ++m)
            s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) =
                x[static_cast<Eigen::Index>(amplitude_index(n, m, antennas))];
    return s;
}

}  // namespace wpt
