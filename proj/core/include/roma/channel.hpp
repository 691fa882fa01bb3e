// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_CHANNEL_HPP
#define ROMA_CHANNEL_HPP

#include <armadillo>
#include <complex>
#include <cstdint>
#include <vector>

namespace roma
{
    // Elevation/azimuth pair of a plane wave, radians.
    // Elevation in [-pi/2, pi/2], azimuth in [-pi, pi].
    struct PlaneWaveAngles
    {
        double elevation = 0.0;
        double azimuth = 0.0;
    };

    // One multipath component: complex gain plus departure and arrival angles.
    struct Path
    {
        std::complex<double> gain{1.0, 0.0};
        PlaneWaveAngles departure;
        PlaneWaveAngles arrival;
    };

    struct PathSet
    {
        std::vector<Path> paths;

        arma::uword count() const { return paths.size(); }
        auto begin() const { return paths.begin(); }
        auto end() const { return paths.end(); }
        void validate() const; // throws std::invalid_argument
    };

    // Channel matrices are M x N_u complex (BS antennas by user antennas).
    using ChannelMatrix = arma::cx_mat;

    enum class PathModel
    {
        kStochastic,          // CN(0,1) gains, uniform elevation and azimuth
        kStochasticIsotropic, // as above with sine-weighted (isotropic) elevation
        kLosGeometric,        // single line-of-sight path from the geometry
    };

    // Spatial frequency vector, magnitude 2*pi/lambda:
    //   kappa = (2 pi / lambda) [cos(el) cos(az), cos(el) sin(az), sin(el)]
    arma::vec3 wave_vector(double elevation, double azimuth, double lambda);

    // Unit-modulus array response. Entry i is exp(sign * j * kappa . r_i);
    // sign is +1 at the transmitter and -1 at the receiver.
    arma::cx_vec steering(const std::vector<arma::vec3> &positions,
                          double elevation, double azimuth, double lambda, int sign);

    // Multipath channel synthesis:
    //   H = sqrt(1/L) sum_l gain_l a_s(dep_l) a_r(arr_l)^T
    ChannelMatrix synthesize_channel(const std::vector<arma::vec3> &tx_positions,
                                     const std::vector<arma::vec3> &rx_positions,
                                     const PathSet &paths, double lambda);

    // Draws a path set. Stochastic models produce path_count paths with unit
    // mean-square gain. The LoS model derives the single path from the
    // BS-to-user direction (path_count is ignored) and draws only the gain
    // phase; it requires distinct centers.
    PathSet sample_paths(std::uint64_t seed, arma::uword path_count, PathModel model,
                         const arma::vec3 &bs_center, const arma::vec3 &user_center);
}

#endif
