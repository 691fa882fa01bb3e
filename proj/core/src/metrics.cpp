// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace roma
{
    arma::cx_mat interference_matrix(arma::uword u, const std::vector<ChannelMatrix> &channels,
                                     const PrecoderSet &precoders, double sigma2_w)
    {
        if (!(sigma2_w > 0.0))
            throw std::invalid_argument("interference_matrix: sigma2 must be > 0");
        if (u >= channels.size() || channels.size() != precoders.w.size())
            throw std::invalid_argument("interference_matrix: index/size mismatch");

        const arma::cx_mat &h_u = channels[u];
        const arma::uword n = h_u.n_cols;
        arma::cx_mat xi(n, n, arma::fill::zeros);
        for (arma::uword j = 0; j < channels.size(); ++j)
        {
            if (j == u)
                continue;
            const arma::cx_mat b_j = h_u.t() * precoders.w[j];
            xi += b_j * b_j.t();
        }
        xi.diag() += sigma2_w;
        return xi;
    }

    double user_se(arma::uword u, const std::vector<ChannelMatrix> &channels,
                   const PrecoderSet &precoders, double sigma2_w)
    {
        const arma::cx_mat xi = interference_matrix(u, channels, precoders, sigma2_w);
        const arma::cx_mat b_u = channels[u].t() * precoders.w[u];
        const arma::cx_mat x = arma::solve(xi, b_u, arma::solve_opts::likely_sympd);
        arma::cx_mat inner = b_u.t() * x;
        inner.diag() += 1.0;
        const std::complex<double> ld = arma::log_det(inner);
        return std::max(0.0, std::real(ld) / std::log(2.0));
    }

    double average_se(const std::vector<double> &per_user_se)
    {
        if (per_user_se.empty())
            throw std::invalid_argument("average_se: empty list");
        double sum = 0.0;
        for (double v : per_user_se)
            sum += v;
        return sum / static_cast<double>(per_user_se.size());
    }

    double channel_gain_bound(const PathSet &paths, arma::uword tx_count, arma::uword rx_count)
    {
        paths.validate();
        double sum_abs = 0.0;
        for (const auto &p : paths)
            sum_abs += std::abs(p.gain);
        const double per_entry = sum_abs / std::sqrt(static_cast<double>(paths.count()));
        return static_cast<double>(tx_count) * static_cast<double>(rx_count) * per_entry * per_entry;
    }

    double inter_user_interference(arma::uword u, const std::vector<PathSet> &all_paths,
                                   const std::vector<arma::vec3> &tx_positions,
                                   const std::vector<std::vector<arma::vec3>> &rx_positions,
                                   const std::vector<double> &powers_w, double lambda)
    {
        const arma::uword users = all_paths.size();
        if (u >= users || rx_positions.size() != users || powers_w.size() != users)
            throw std::invalid_argument("inter_user_interference: size mismatch");
        const arma::uword m_count = tx_positions.size();

        // Per-user, per-path element responses h_{mn}(l) = a_s(l)_m a_r(l)_n.
        auto responses = [&](arma::uword i)
        {
            const auto &ps = all_paths[i];
            std::vector<arma::cx_vec> a_s(ps.count()), a_r(ps.count());
            for (arma::uword l = 0; l < ps.count(); ++l)
            {
                const auto &p = ps.paths[l];
                a_s[l] = steering(tx_positions, p.departure.elevation, p.departure.azimuth, lambda, +1);
                a_r[l] = steering(rx_positions[i], p.arrival.elevation, p.arrival.azimuth, lambda, -1);
            }
            return std::make_pair(a_s, a_r);
        };

        const auto [as_u, ar_u] = responses(u);
        const arma::uword n_u = rx_positions[u].size();
        const arma::uword l_u = all_paths[u].count();

        double total = 0.0;
        for (arma::uword j = 0; j < users; ++j)
        {
            if (j == u)
                continue;
            const auto [as_j, ar_j] = responses(j);
            const arma::uword n_j = rx_positions[j].size();
            const arma::uword l_j = all_paths[j].count();
            const double norm = std::sqrt(static_cast<double>(l_u) * static_cast<double>(l_j));
            const double g_j = channel_gain_bound(all_paths[j], m_count, n_j);

            double pair_sum = 0.0;
            for (arma::uword nu = 0; nu < n_u; ++nu)
                for (arma::uword nj = 0; nj < n_j; ++nj)
                {
                    std::complex<double> inner(0.0, 0.0);
                    for (arma::uword m = 0; m < m_count; ++m)
                        for (arma::uword l1 = 0; l1 < l_u; ++l1)
                            for (arma::uword l2 = 0; l2 < l_j; ++l2)
                            {
                                const std::complex<double> h_u =
                                    as_u[l1](m) * ar_u[l1](nu);
                                const std::complex<double> h_j =
                                    as_j[l2](m) * ar_j[l2](nj);
                                inner += std::conj(all_paths[u].paths[l1].gain) * all_paths[j].paths[l2].gain / norm * std::conj(h_u) * h_j;
                            }
                    pair_sum += std::norm(inner);
                }
            total += powers_w[j] / g_j * pair_sum;
        }
        return total;
    }

    TheoremBound bound_theorem1(double gain_bound, double power_w, double sigma2_w,
                                arma::uword rx_count, double interference_w)
    {
        if (!(sigma2_w > 0.0) || rx_count < 1)
            throw std::invalid_argument("bound_theorem1: need sigma2 > 0 and rx_count >= 1");
        const double noise = static_cast<double>(rx_count) * sigma2_w;
        TheoremBound b;
        b.with_interference = std::log2(1.0 + gain_bound * power_w / (noise + interference_w));
        b.interference_free = std::log2(1.0 + gain_bound * power_w / noise);
        return b;
    }

    UniformPanelLayout uniform_layout_of(const PanelGeometry &g)
    {
        UniformPanelLayout layout;
        layout.count_h = g.rows_h;
        layout.count_v = g.rows_v;
        layout.alpha = g.alpha;
        layout.beta = g.beta;
        if (g.offsets.size() != g.size())
            throw std::invalid_argument("uniform_layout_of: malformed panel");
        layout.spacing_h = g.rows_h > 1 ? g.offsets[1].x - g.offsets[0].x : 0.0;
        layout.spacing_v = g.rows_v > 1 ? g.offsets[g.rows_h].z - g.offsets[0].z : 0.0;
        const auto grid = element_grid(g.rows_h, g.rows_v,
                                       layout.spacing_h > 0.0 ? layout.spacing_h : 1.0,
                                       layout.spacing_v > 0.0 ? layout.spacing_v : 1.0);
        for (arma::uword t = 0; t < g.size(); ++t)
            if (std::abs(grid[t].x - g.offsets[t].x) > 1e-9 || std::abs(grid[t].z - g.offsets[t].z) > 1e-9)
                throw std::invalid_argument("uniform_layout_of: panel offsets are not a uniform grid");
        return layout;
    }

    AxisProjections direction_projections(const UniformPanelLayout &layout,
                                          const PlaneWaveAngles &departure)
    {
        const double gamma = std::cos(departure.elevation) * std::cos(departure.azimuth);
        const double eta = std::cos(departure.elevation) * std::sin(departure.azimuth);
        const double vartheta = std::sin(departure.elevation);
        const double ca = std::cos(layout.alpha), sa = std::sin(layout.alpha);
        const double cb = std::cos(layout.beta), sb = std::sin(layout.beta);
        AxisProjections out;
        out.sigma = layout.spacing_h * (gamma * ca + eta * sa);
        out.varsigma = layout.spacing_v * (vartheta * cb + eta * sb * ca - gamma * sb * sa);
        return out;
    }

    namespace
    {
        // sin(K x) / sin(x) with the analytic limit where sin(x) vanishes.
        double dirichlet_ratio(arma::uword numerator_count, double x)
        {
            const double k = static_cast<double>(numerator_count);
            if (numerator_count == 0)
                return 0.0;
            const double den = std::sin(x);
            if (std::abs(den) < 1e-9)
                return k * std::cos(k * x) / std::cos(x);
            return std::sin(k * x) / den;
        }
    }

    std::complex<double> los_correlation(const UniformPanelLayout &tx_layout,
                                         const PlaneWaveAngles &departure_u,
                                         const PlaneWaveAngles &departure_j,
                                         double lambda,
                                         DirichletOrder order)
    {
        if (!(lambda > 0.0))
            throw std::invalid_argument("los_correlation: lambda must be > 0");
        const AxisProjections pu = direction_projections(tx_layout, departure_u);
        const AxisProjections pj = direction_projections(tx_layout, departure_j);
        const double xh = M_PI / lambda * (pj.sigma - pu.sigma);
        const double xv = M_PI / lambda * (pj.varsigma - pu.varsigma);
        const arma::uword kh = order == DirichletOrder::kElementCount ? tx_layout.count_h : tx_layout.count_h - 1;
        const arma::uword kv = order == DirichletOrder::kElementCount ? tx_layout.count_v : tx_layout.count_v - 1;
        return {dirichlet_ratio(kh, xh) * dirichlet_ratio(kv, xv), 0.0};
    }

    double bound_corollary1(const LosBoundInputs &inputs, arma::uword u, DirichletOrder order)
    {
        const arma::uword users = inputs.departure.size();
        if (u >= users || inputs.gain_abs.size() != users || inputs.power_w.size() != users)
            throw std::invalid_argument("bound_corollary1: size mismatch");
        const double m_count = static_cast<double>(inputs.tx_layout.count_h * inputs.tx_layout.count_v);
        const double n_count = static_cast<double>(inputs.rx_count);

        auto gain_of = [&](arma::uword i)
        { return m_count * n_count * inputs.gain_abs[i] * inputs.gain_abs[i]; };

        double interference = 0.0;
        for (arma::uword j = 0; j < users; ++j)
        {
            if (j == u)
                continue;
            const std::complex<double> r =
                los_correlation(inputs.tx_layout, inputs.departure[u], inputs.departure[j], inputs.lambda_m, order);
            const double cross = inputs.gain_abs[u] * inputs.gain_abs[j];
            interference += inputs.power_w[j] / gain_of(j) * n_count * n_count * cross * cross * std::norm(r);
        }
        return bound_theorem1(gain_of(u), inputs.power_w[u], inputs.sigma2_w,
                              inputs.rx_count, interference)
            .with_interference;
    }
}
