// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_METRICS_HPP
#define ROMA_METRICS_HPP

#include "roma/channel.hpp"
#include "roma/geometry.hpp"
#include "roma/precoding.hpp"

#include <armadillo>
#include <complex>
#include <vector>

namespace roma
{
    // Spectral-efficiency summary for one evaluation, bits/s/Hz.
    struct SEReport
    {
        std::vector<double> per_user_se;
        double average_se = 0.0;
        double average_se_std_error = 0.0;       // Monte Carlo standard error of average_se
        std::vector<double> bound_theorem1;      // optional, empty when not evaluated
        std::vector<double> bound_corollary1;    // optional, empty when not evaluated
    };

    // Interference-plus-noise matrix of user u:
    //   Xi = sum_j B_j B_j^* - B_u B_u^* + sigma2 I,  B_j = H_u^* W_j.
    // Hermitian positive definite for sigma2 > 0.
    arma::cx_mat interference_matrix(arma::uword u, const std::vector<ChannelMatrix> &channels,
                                     const PrecoderSet &precoders, double sigma2_w);

    // Per-user spectral efficiency, log2|I + B_u^* Xi^{-1} B_u|.
    double user_se(arma::uword u, const std::vector<ChannelMatrix> &channels,
                   const PrecoderSet &precoders, double sigma2_w);

    // Arithmetic mean of per-user SEs.
    double average_se(const std::vector<double> &per_user_se);

    // Channel-gain upper bound G = M * N * (sum_l |gain_l| / sqrt(L))^2.
    // Satisfies G >= ||H||_F^2 for every geometry (triangle inequality).
    double channel_gain_bound(const PathSet &paths, arma::uword tx_count, arma::uword rx_count);

    // Inter-user interference term of the SE upper bound,
    //   I_u = sum_{j != u} (p_j / G_j) sum_{n_u, n_j}
    //         | sum_m sum_{l1} sum_{l2} gain_u(l1)^* gain_j(l2) / L
    //           h_{m n_u}(l1)^* h_{m n_j}(l2) |^2 ,
    // evaluated as the direct multiple sum over per-path element responses.
    double inter_user_interference(arma::uword u, const std::vector<PathSet> &all_paths,
                                   const std::vector<arma::vec3> &tx_positions,
                                   const std::vector<std::vector<arma::vec3>> &rx_positions,
                                   const std::vector<double> &powers_w, double lambda);

    struct TheoremBound
    {
        double with_interference = 0.0;  // log2(1 + G p / (N sigma2 + I))
        double interference_free = 0.0;  // log2(1 + G p / (N sigma2))
    };

    TheoremBound bound_theorem1(double gain_bound, double power_w, double sigma2_w,
                                arma::uword rx_count, double interference_w = 0.0);

    // Uniform-grid panel description used by the LoS closed forms.
    struct UniformPanelLayout
    {
        arma::uword count_h = 1;
        arma::uword count_v = 1;
        double spacing_h = 0.0;
        double spacing_v = 0.0;
        double alpha = 0.0;
        double beta = 0.0;
    };

    // Extracts the uniform layout of a grid panel; throws std::invalid_argument
    // when the panel offsets are not a centered uniform grid.
    UniformPanelLayout uniform_layout_of(const PanelGeometry &g);

    // Spacing-weighted direction cosines of a departure direction as seen by a
    // rotated uniform panel. sigma scales the horizontal index, varsigma the
    // vertical index of the element phase.
    struct AxisProjections
    {
        double sigma = 0.0;
        double varsigma = 0.0;
    };

    AxisProjections direction_projections(const UniformPanelLayout &layout,
                                          const PlaneWaveAngles &departure);

    // Numerator order of the Dirichlet kernel ratio. kElementCount is the
    // order validated against the brute-force array sum; kPrintedMinusOne
    // keeps the order-(M-1) variant selectable for A/B comparison.
    enum class DirichletOrder
    {
        kElementCount,
        kPrintedMinusOne,
    };

    // Correlation of the LoS array responses of two users over a uniform
    // rotated panel: product of per-axis Dirichlet ratios
    //   sin(pi K delta / lambda) / sin(pi delta / lambda),
    // real-valued for centered grids; equals M_H * M_V at coincident angles
    // (kElementCount order). Near-zero denominators evaluate the limit.
    std::complex<double> los_correlation(const UniformPanelLayout &tx_layout,
                                         const PlaneWaveAngles &departure_u,
                                         const PlaneWaveAngles &departure_j,
                                         double lambda,
                                         DirichletOrder order = DirichletOrder::kElementCount);

    // Inputs of the LoS closed-form SE bound: single-path gains, per-user
    // powers, noise, panel layout and per-user departure angles.
    struct LosBoundInputs
    {
        UniformPanelLayout tx_layout;
        std::vector<PlaneWaveAngles> departure; // per user
        std::vector<double> gain_abs;           // |gain_u| of the LoS path
        std::vector<double> power_w;            // p_u
        double sigma2_w = 0.0;
        arma::uword rx_count = 1;               // N, per-user antennas
        double lambda_m = 0.0;
    };

    // LoS SE upper bound for user u with the interference term built from the
    // closed-form correlation kernels. Reduces to the interference-free
    // Theorem-1 bound when there is a single user or the kernels vanish.
    double bound_corollary1(const LosBoundInputs &inputs, arma::uword u,
                            DirichletOrder order = DirichletOrder::kElementCount);
}

#endif
