// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/precoding.hpp"

#include "roma/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace roma
{
    double PrecoderSet::total_power() const
    {
        double p = 0.0;
        for (const auto &wj : w)
            p += std::pow(arma::norm(wj, "fro"), 2);
        return p;
    }

    arma::cx_mat mr_precoder(const ChannelMatrix &h, double power_w)
    {
        if (!(power_w >= 0.0))
            throw std::invalid_argument("mr_precoder: power must be >= 0");
        const double fro = arma::norm(h, "fro");
        if (fro <= 0.0)
            throw degenerate_channel_error("mr_precoder: zero channel");
        return (std::sqrt(power_w) / fro) * h;
    }

    PrecoderSet zf_precoder(const std::vector<ChannelMatrix> &channels,
                            const std::vector<double> &powers_w)
    {
        if (channels.empty() || channels.size() != powers_w.size())
            throw std::invalid_argument("zf_precoder: channels/powers size mismatch");
        const arma::uword m = channels.front().n_rows;

        arma::cx_mat gram(m, m, arma::fill::zeros);
        for (const auto &h : channels)
        {
            if (h.n_rows != m)
                throw std::invalid_argument("zf_precoder: inconsistent BS antenna count");
            gram += h * h.t();
        }
        const double tr = std::real(arma::trace(gram));
        if (tr <= 0.0)
            throw degenerate_channel_error("zf_precoder: all channels are zero");

        // Regularize rank-deficient Gram sums (single-path channels make the
        // printed inverse singular).
        double eps = 0.0;
        if (arma::rcond(gram) < 1e-12)
            eps = 1e-6 * tr / static_cast<double>(m);

        const arma::cx_mat reg = gram + eps * arma::cx_mat(arma::eye<arma::mat>(m, m), arma::mat(m, m, arma::fill::zeros));

        PrecoderSet set;
        set.w.reserve(channels.size());
        for (const auto &h : channels)
            set.w.push_back(arma::solve(reg, h, arma::solve_opts::likely_sympd));

        const double target = std::accumulate(powers_w.begin(), powers_w.end(), 0.0);
        const double raw = set.total_power();
        if (raw <= 0.0)
            throw degenerate_channel_error("zf_precoder: degenerate precoder set");
        const double scale = std::sqrt(target / raw);
        for (auto &wj : set.w)
            wj *= scale;
        set.total_power_budget = target;
        return set;
    }

    PrecoderSet normalize_power(PrecoderSet set, double max_power_w)
    {
        const double total = set.total_power();
        set.total_power_budget = max_power_w;
        if (total > max_power_w)
        {
            const double scale = std::sqrt(max_power_w / total);
            for (auto &wj : set.w)
                wj *= scale;
        }
        return set;
    }
}
