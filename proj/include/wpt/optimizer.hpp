// SPDX-License-Identifier: Apache-2.0
//
// Waveform strategies: closed-form baselines and the successive-condensation
// designs (joint, spatially decoupled, PAPR-constrained, multi-rectenna).

#pragma once

#include "wpt/channel.hpp"
#include "wpt/gp.hpp"
#include "wpt/rectenna.hpp"
#include "wpt/waveform.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace wpt {

struct OptimizerOptions {
    double epsilon = 1e-6;       // relative z_DC change that ends the SCA loop
    int max_iterations = 100;    // i_max
    double kkt_tol = 1e-7;       // fast path also waits for this stationarity residual
    int oversampling = 8;        // O_s for the PAPR constraints
    double floor_ratio = 1e-12;  // amplitude floor as a fraction of sqrt(2P)
    bool multi_start = true;     // run the SCA from every baseline seed and keep the best
    gp::GpOptions gp;

    void validate() const;
};

struct SCATrace {
    std::vector<double> zdc;  // seed value followed by one entry per iteration
    Waveform waveform;
    bool converged = false;
    int iterations = 0;
    double kkt_residual = 0.0;  // log-domain stationarity of the final point
    std::string seed;           // baseline the returned trace started from

    double final_zdc() const { return zdc.empty() ? 0.0 : zdc.back(); }
};

/// phi*(n,m) = -arg h(n,m)
Eigen::MatrixXd optimal_phases(const ChannelRealization& h);

// Closed-form baselines. All meet the power budget with equality.
Waveform ss(const ChannelRealization& h, double power);  // tone 0 only, matched beam
Waveform up(const FrequencyGrid& grid, std::size_t antennas, double power);  // Phi = 0
Waveform up_matched(const ChannelRealization& h, double power);              // UP with Phi*
Waveform ass(const ChannelRealization& h, double power);
Waveform upmf(const ChannelRealization& h, double power);
Waveform mf(const ChannelRealization& h, double power);
Waveform max_papr(const ChannelRealization& h, double power);

/// Algorithm 1: joint space-frequency amplitude design with Phi*.
SCATrace optimize(const ChannelRealization& h, double power, const RectennaParams& p,
                  const OptimizerOptions& opts = {});

/// Algorithm 2: per-tone matched beamforming plus an N-variable design on ||h_n||.
SCATrace optimize_decoupled(const ChannelRealization& h, double power, const RectennaParams& p,
                            const OptimizerOptions& opts = {});

/// Algorithm 3: design subject to PAPR_m <= eta on every antenna.
SCATrace optimize_papr(const ChannelRealization& h, double power, double eta,
                       const RectennaParams& p, const OptimizerOptions& opts = {});

/// Phase choice for several rectennas: per tone, the phase of the dominant
/// right singular vector of the stacked weighted channel, rotated so that the
/// strongest rectenna receives a real positive tone.
Eigen::MatrixXd multi_rectenna_phases(const std::vector<ChannelRealization>& h,
                                      const std::vector<double>& weights, const RectennaParams& p);

/// Algorithm 4: maximize sum_u v_u z_DC,u.
SCATrace optimize_multi(const std::vector<ChannelRealization>& h, const std::vector<double>& weights,
                        double power, const RectennaParams& p, const OptimizerOptions& opts = {});

/// Single tone along the dominant right singular vector of the best tone.
Waveform ass_multi(const std::vector<ChannelRealization>& h, const std::vector<double>& weights,
                   double power, const RectennaParams& p);

/// sum_u v_u z_DC,u
double weighted_zdc(const Waveform& w, const std::vector<ChannelRealization>& h,
                    const std::vector<double>& weights, const RectennaParams& p);

/// Stationarity residual of amplitude vector x for max f s.t. 0.5 ||x||^2 <= P,
/// measured in log variables with floored entries treated as active bounds.
double kkt_residual(const gp::Posynomial& f, const Eigen::VectorXd& x, double floor);

struct ToyResult {
    double s0_sq = 0.0;
    double s1_sq = 0.0;
    double zdc = 0.0;
    bool interior = false;  // the stationary point with both tones active won
};

/// Two tones, one antenna, fourth order: best of the three stationary points.
ToyResult toy_n2(double a0, double a1, double power, const RectennaParams& p);

/// Strategy identifiers accepted by the command line.
const std::vector<std::string>& strategy_names();

/// Builds the waveform for a single-rectenna strategy id ("opt-multi" uses
/// unit weight on the given channel).
Waveform design(std::string_view strategy, const ChannelRealization& h, double power,
                const RectennaParams& p, const OptimizerOptions& opts = {}, double eta = 0.0);

}  // namespace wpt
