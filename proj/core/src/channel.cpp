// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/channel.hpp"

#include "roma/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace roma
{
    void PathSet::validate() const
    {
        if (paths.empty())
            throw std::invalid_argument("PathSet: at least one path required");
        for (const auto &p : paths)
        {
            if (std::abs(p.departure.elevation) > M_PI / 2 || std::abs(p.arrival.elevation) > M_PI / 2)
                throw std::invalid_argument("PathSet: elevation outside [-pi/2, pi/2]");
            if (std::abs(p.departure.azimuth) > M_PI || std::abs(p.arrival.azimuth) > M_PI)
                throw std::invalid_argument("PathSet: azimuth outside [-pi, pi]");
        }
    }

    arma::vec3 wave_vector(double elevation, double azimuth, double lambda)
    {
        if (!(lambda > 0.0))
            throw std::invalid_argument("wave_vector: lambda must be > 0");
        const double k = 2.0 * M_PI / lambda;
        const double ce = std::cos(elevation);
        return {k * ce * std::cos(azimuth), k * ce * std::sin(azimuth), k * std::sin(elevation)};
    }

    arma::cx_vec steering(const std::vector<arma::vec3> &positions,
                          double elevation, double azimuth, double lambda, int sign)
    {
        if (positions.empty())
            throw std::invalid_argument("steering: positions must be non-empty");
        const arma::vec3 kappa = wave_vector(elevation, azimuth, lambda);
        arma::cx_vec a(positions.size());
        for (arma::uword i = 0; i < positions.size(); ++i)
        {
            const double phase = static_cast<double>(sign) * arma::dot(kappa, positions[i]);
            a(i) = std::complex<double>(std::cos(phase), std::sin(phase));
        }
        return a;
    }

    ChannelMatrix synthesize_channel(const std::vector<arma::vec3> &tx_positions,
                                     const std::vector<arma::vec3> &rx_positions,
                                     const PathSet &paths, double lambda)
    {
        paths.validate();
        const arma::uword m = tx_positions.size();
        const arma::uword n = rx_positions.size();
        ChannelMatrix h(m, n, arma::fill::zeros);
        const double scale = std::sqrt(1.0 / static_cast<double>(paths.count()));
        for (const auto &p : paths)
        {
            const arma::cx_vec a_s = steering(tx_positions, p.departure.elevation, p.departure.azimuth, lambda, +1);
            const arma::cx_vec a_r = steering(rx_positions, p.arrival.elevation, p.arrival.azimuth, lambda, -1);
            h += (scale * p.gain) * (a_s * a_r.st());
        }
        return h;
    }

    namespace
    {
        PlaneWaveAngles direction_angles(const arma::vec3 &from, const arma::vec3 &to)
        {
            const arma::vec3 d = to - from;
            const double range = arma::norm(d);
            return {std::asin(d(2) / range), std::atan2(d(1), d(0))};
        }
    }

    PathSet sample_paths(std::uint64_t seed, arma::uword path_count, PathModel model,
                         const arma::vec3 &bs_center, const arma::vec3 &user_center)
    {
        if (path_count < 1)
            throw std::invalid_argument("sample_paths: path_count must be >= 1");
        RandomSource rng(seed);
        PathSet out;

        if (model == PathModel::kLosGeometric)
        {
            if (arma::norm(user_center - bs_center) <= 0.0)
                throw std::invalid_argument("sample_paths: LoS model requires distinct centers");
            Path p;
            p.gain = rng.unit_phasor();
            p.departure = direction_angles(bs_center, user_center);
            p.arrival = direction_angles(user_center, bs_center);
            out.paths.push_back(p);
            return out;
        }

        out.paths.reserve(path_count);
        for (arma::uword l = 0; l < path_count; ++l)
        {
            Path p;
            p.gain = rng.complex_normal();
            if (model == PathModel::kStochasticIsotropic)
            {
                p.departure.elevation = std::asin(rng.uniform(-1.0, 1.0));
                p.arrival.elevation = std::asin(rng.uniform(-1.0, 1.0));
            }
            else
            {
                p.departure.elevation = rng.uniform(-M_PI / 2, M_PI / 2);
                p.arrival.elevation = rng.uniform(-M_PI / 2, M_PI / 2);
            }
            p.departure.azimuth = rng.uniform(-M_PI, M_PI);
            p.arrival.azimuth = rng.uniform(-M_PI, M_PI);
            out.paths.push_back(p);
        }
        return out;
    }
}
