// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/evaluator.hpp"

#include "roma/metrics.hpp"
#include "roma/precoding.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace roma
{
    namespace
    {
        using cx = std::complex<double>;

        // In-place lower Cholesky of a Hermitian positive definite matrix,
        // column-major, lower triangle only. Returns false on a non-positive
        // pivot. Small fixed-size problems only; no blocking, no pivoting.
        bool chol_lower(arma::uword n, cx *a)
        {
            for (arma::uword j = 0; j < n; ++j)
            {
                double d = a[j + j * n].real();
                for (arma::uword k = 0; k < j; ++k)
                    d -= std::norm(a[j + k * n]);
                if (!(d > 0.0))
                    return false;
                const double root = std::sqrt(d);
                a[j + j * n] = root;
                for (arma::uword i = j + 1; i < n; ++i)
                {
                    cx s = a[i + j * n];
                    for (arma::uword k = 0; k < j; ++k)
                        s -= a[i + k * n] * std::conj(a[j + k * n]);
                    a[i + j * n] = s / root;
                }
            }
            return true;
        }

        // Forward substitution L y = b for k right-hand sides (n x k).
        void solve_lower(arma::uword n, const cx *l, cx *b, arma::uword k)
        {
            for (arma::uword c = 0; c < k; ++c)
            {
                cx *col = b + c * n;
                for (arma::uword i = 0; i < n; ++i)
                {
                    cx s = col[i];
                    for (arma::uword j = 0; j < i; ++j)
                        s -= l[i + j * n] * col[j];
                    col[i] = s / l[i + i * n].real();
                }
            }
        }

        // Backward substitution L^H x = b for k right-hand sides.
        void solve_lower_herm(arma::uword n, const cx *l, cx *b, arma::uword k)
        {
            for (arma::uword c = 0; c < k; ++c)
            {
                cx *col = b + c * n;
                for (arma::uword ii = n; ii-- > 0;)
                {
                    cx s = col[ii];
                    for (arma::uword j = ii + 1; j < n; ++j)
                        s -= std::conj(l[j + ii * n]) * col[j];
                    col[ii] = s / l[ii + ii * n].real();
                }
            }
        }

        // log2 det(A) from the Cholesky factor of A.
        double log2det_from_chol(arma::uword n, const cx *l)
        {
            double s = 0.0;
            for (arma::uword i = 0; i < n; ++i)
                s += std::log(l[i + i * n].real());
            return 2.0 * s / std::log(2.0);
        }

        arma::vec3 unit_direction(const PlaneWaveAngles &a)
        {
            const double ce = std::cos(a.elevation);
            return {ce * std::cos(a.azimuth), ce * std::sin(a.azimuth), std::sin(a.elevation)};
        }

        EvalResult summarize(const std::vector<std::vector<double>> &per_trial_user)
        {
            const arma::uword trials = per_trial_user.size();
            const arma::uword users = per_trial_user.front().size();
            EvalResult r;
            r.per_user_se.assign(users, 0.0);
            arma::vec per_trial_avg(trials);
            for (arma::uword t = 0; t < trials; ++t)
            {
                double s = 0.0;
                for (arma::uword u = 0; u < users; ++u)
                {
                    r.per_user_se[u] += per_trial_user[t][u];
                    s += per_trial_user[t][u];
                }
                per_trial_avg(t) = s / static_cast<double>(users);
            }
            for (auto &v : r.per_user_se)
                v /= static_cast<double>(trials);
            r.average_se = arma::mean(per_trial_avg);
            r.average_se_std_error =
                trials > 1 ? arma::stddev(per_trial_avg) / std::sqrt(static_cast<double>(trials)) : 0.0;
            return r;
        }
    }

    EvalResult evaluate_objective_reference(const GeometryVariables &vars,
                                            const SampledScenario &sampled, BatchKind kind)
    {
        const auto &batch = kind == BatchKind::kOptimization ? sampled.optimization_paths
                                                             : sampled.holdout_paths;
        const Scenario &sc = sampled.scenario;
        const double lambda = sc.lambda();
        const arma::uword users = sc.users;
        const arma::uword trials = batch.front().size();

        PanelGeometry bs;
        bs.rows_h = sc.bs_grid_h;
        bs.rows_v = sc.bs_grid_v;
        bs.alpha = vars.alphas(0);
        bs.beta = vars.betas(0);
        bs.offsets = vars.bs_offsets;
        bs.center = {0, 0, 0};
        const auto bs_pos = absolute_positions(bs);

        std::vector<std::vector<arma::vec3>> user_pos(users);
        for (arma::uword u = 0; u < users; ++u)
        {
            PanelGeometry p;
            p.rows_h = sc.user_grid_h;
            p.rows_v = sc.user_grid_v;
            p.alpha = vars.alphas(u + 1);
            p.beta = vars.betas(u + 1);
            p.offsets = vars.user_offsets[u];
            p.center = sampled.user_centers[u];
            user_pos[u] = absolute_positions(p);
        }

        const std::vector<double> powers(users, sc.per_user_power_w);
        std::vector<std::vector<double>> per_trial_user(trials, std::vector<double>(users));
        for (arma::uword t = 0; t < trials; ++t)
        {
            std::vector<ChannelMatrix> channels(users);
            for (arma::uword u = 0; u < users; ++u)
                channels[u] = synthesize_channel(bs_pos, user_pos[u], batch[u][t], lambda);
            const PrecoderSet zf = zf_precoder(channels, powers);
            for (arma::uword u = 0; u < users; ++u)
                per_trial_user[t][u] = user_se(u, channels, zf, sc.sigma2_w);
        }
        return summarize(per_trial_user);
    }

    Evaluator::PanelBasis Evaluator::basis_of(double alpha, double beta)
    {
        PanelBasis b;
        const double ca = std::cos(alpha), sa = std::sin(alpha);
        const double cb = std::cos(beta), sb = std::sin(beta);
        b.bx_x = ca;
        b.bx_y = sa;
        b.bz_x = -sb * sa;
        b.bz_y = sb * ca;
        b.bz_z = cb;
        return b;
    }

    Evaluator::Evaluator(const SampledScenario &sampled, BatchKind kind)
    {
        const auto &batch = kind == BatchKind::kOptimization ? sampled.optimization_paths
                                                             : sampled.holdout_paths;
        const Scenario &sc = sampled.scenario;
        users_ = sc.users;
        m_ = sc.bs_count();
        n_ = sc.user_count();
        trials_ = batch.front().size();
        lambda_ = sc.lambda();
        two_pi_over_lambda_ = 2.0 * M_PI / lambda_;
        sigma2_ = sc.sigma2_w;
        powers_.assign(users_, sc.per_user_power_w);
        user_centers_ = sampled.user_centers;

        trial_.resize(trials_);
        for (arma::uword t = 0; t < trials_; ++t)
        {
            auto &td = trial_[t];
            td.dep_dir.resize(users_);
            td.arr_dir.resize(users_);
            td.gain.resize(users_);
            for (arma::uword u = 0; u < users_; ++u)
            {
                const PathSet &ps = batch[u][t];
                const double scale = 1.0 / std::sqrt(static_cast<double>(ps.count()));
                for (const auto &p : ps.paths)
                {
                    td.dep_dir[u].push_back(unit_direction(p.departure));
                    td.arr_dir[u].push_back(unit_direction(p.arrival));
                    td.gain[u].push_back(p.gain * scale);
                }
            }
        }

        const arma::uword cells = trials_ * users_;
        a_s_.resize(cells);
        w_r_.resize(cells);
        h_.resize(cells);
        h_scratch_.resize(cells);
        for (arma::uword i = 0; i < cells; ++i)
        {
            const arma::uword l = trial_[i / users_].gain[i % users_].size();
            max_paths_ = std::max(max_paths_, l);
            a_s_[i].assign(m_ * l, cx{});
            w_r_[i].assign(n_ * l, cx{});
            h_[i].assign(m_ * n_, cx{});
            h_scratch_[i].assign(m_ * n_, cx{});
        }
        panel_scratch_.assign(std::max(m_, n_) * max_paths_, cx{});
        panel_scratch2_.assign(std::max(m_, n_) * max_paths_, cx{});

        s_.assign(m_ * m_, cx{});
        chol_.assign(m_ * m_, cx{});
        w_all_.assign(m_ * n_ * users_, cx{});
        b_.assign(n_ * n_ * (users_ + 1), cx{});
        xi_.assign(n_ * n_, cx{});
        y_.assign(n_ * n_, cx{});
        mse_.assign(n_ * n_, cx{});
    }

    void Evaluator::rebuild_tx(arma::uword u, arma::uword t, const std::vector<PlanarOffset> &offsets,
                               const PanelBasis &basis, cx *a_s) const
    {
        const auto &dirs = trial_[t].dep_dir[u];
        for (arma::uword l = 0; l < dirs.size(); ++l)
        {
            const arma::vec3 &d = dirs[l];
            const double kx = two_pi_over_lambda_ * (d(0) * basis.bx_x + d(1) * basis.bx_y);
            const double kz = two_pi_over_lambda_ * (d(0) * basis.bz_x + d(1) * basis.bz_y + d(2) * basis.bz_z);
            cx *col = a_s + l * m_;
            for (arma::uword m = 0; m < m_; ++m)
            {
                const double phase = kx * offsets[m].x + kz * offsets[m].z;
                col[m] = cx(std::cos(phase), std::sin(phase));
            }
        }
    }

    void Evaluator::rebuild_rx(arma::uword u, arma::uword t, const std::vector<PlanarOffset> &offsets,
                               const PanelBasis &basis, cx *w_r) const
    {
        const auto &dirs = trial_[t].arr_dir[u];
        const auto &gains = trial_[t].gain[u];
        const arma::vec3 &c = user_centers_[u];
        for (arma::uword l = 0; l < dirs.size(); ++l)
        {
            const arma::vec3 &d = dirs[l];
            const double kx = two_pi_over_lambda_ * (d(0) * basis.bx_x + d(1) * basis.bx_y);
            const double kz = two_pi_over_lambda_ * (d(0) * basis.bz_x + d(1) * basis.bz_y + d(2) * basis.bz_z);
            const double kc = two_pi_over_lambda_ * (d(0) * c(0) + d(1) * c(1) + d(2) * c(2));
            cx *col = w_r + l * n_;
            for (arma::uword n = 0; n < n_; ++n)
            {
                const double phase = -(kc + kx * offsets[n].x + kz * offsets[n].z);
                col[n] = gains[l] * cx(std::cos(phase), std::sin(phase));
            }
        }
    }

    void Evaluator::rebuild_h(arma::uword u, arma::uword t, const cx *a_s, const cx *w_r, cx *h) const
    {
        const arma::uword paths = trial_[t].gain[u].size();
        std::memset(static_cast<void *>(h), 0, sizeof(cx) * m_ * n_);
        for (arma::uword l = 0; l < paths; ++l)
        {
            const cx *ac = a_s + l * m_;
            const cx *wc = w_r + l * n_;
            for (arma::uword n = 0; n < n_; ++n)
            {
                const cx w = wc[n];
                cx *hc = h + n * m_;
                for (arma::uword m = 0; m < m_; ++m)
                    hc[m] += ac[m] * w;
            }
        }
    }

    void Evaluator::commit(const GeometryVariables &vars)
    {
        base_ = vars;
        const PanelBasis bs_basis = basis_of(vars.alphas(0), vars.betas(0));
        for (arma::uword t = 0; t < trials_; ++t)
            for (arma::uword u = 0; u < users_; ++u)
            {
                const arma::uword i = t * users_ + u;
                rebuild_tx(u, t, vars.bs_offsets, bs_basis, a_s_[i].data());
                rebuild_rx(u, t, vars.user_offsets[u], basis_of(vars.alphas(u + 1), vars.betas(u + 1)),
                           w_r_[i].data());
                rebuild_h(u, t, a_s_[i].data(), w_r_[i].data(), h_[i].data());
            }
    }

    EvalResult Evaluator::eval_committed()
    {
        std::vector<const cx *> ptrs(trials_ * users_);
        for (arma::uword i = 0; i < ptrs.size(); ++i)
            ptrs[i] = h_[i].data();
        return downstream(ptrs);
    }

    EvalResult Evaluator::eval_bs_panel(const PanelBasis &basis, const std::vector<PlanarOffset> &offsets)
    {
        std::vector<const cx *> ptrs(trials_ * users_);
        for (arma::uword t = 0; t < trials_; ++t)
            for (arma::uword u = 0; u < users_; ++u)
            {
                const arma::uword i = t * users_ + u;
                rebuild_tx(u, t, offsets, basis, panel_scratch_.data());
                rebuild_h(u, t, panel_scratch_.data(), w_r_[i].data(), h_scratch_[i].data());
                ptrs[i] = h_scratch_[i].data();
            }
        return downstream(ptrs);
    }

    EvalResult Evaluator::eval_user_panel(arma::uword user, const PanelBasis &basis,
                                          const std::vector<PlanarOffset> &offsets)
    {
        std::vector<const cx *> ptrs(trials_ * users_);
        for (arma::uword t = 0; t < trials_; ++t)
            for (arma::uword u = 0; u < users_; ++u)
            {
                const arma::uword i = t * users_ + u;
                if (u != user)
                {
                    ptrs[i] = h_[i].data();
                    continue;
                }
                rebuild_rx(u, t, offsets, basis, panel_scratch_.data());
                rebuild_h(u, t, a_s_[i].data(), panel_scratch_.data(), h_scratch_[i].data());
                ptrs[i] = h_scratch_[i].data();
            }
        return downstream(ptrs);
    }

    EvalResult Evaluator::eval_bs_offsets(const std::vector<PlanarOffset> &offsets)
    {
        return eval_bs_panel(basis_of(base_.alphas(0), base_.betas(0)), offsets);
    }

    EvalResult Evaluator::eval_user_offsets(arma::uword user, const std::vector<PlanarOffset> &offsets)
    {
        return eval_user_panel(user, basis_of(base_.alphas(user + 1), base_.betas(user + 1)), offsets);
    }

    EvalResult Evaluator::eval_angles(const arma::vec &alphas, const arma::vec &betas)
    {
        const PanelBasis bs_basis = basis_of(alphas(0), betas(0));
        std::vector<const cx *> ptrs(trials_ * users_);
        for (arma::uword t = 0; t < trials_; ++t)
            for (arma::uword u = 0; u < users_; ++u)
            {
                const arma::uword i = t * users_ + u;
                rebuild_tx(u, t, base_.bs_offsets, bs_basis, panel_scratch_.data());
                rebuild_rx(u, t, base_.user_offsets[u], basis_of(alphas(u + 1), betas(u + 1)),
                           panel_scratch2_.data());
                rebuild_h(u, t, panel_scratch_.data(), panel_scratch2_.data(), h_scratch_[i].data());
                ptrs[i] = h_scratch_[i].data();
            }
        return downstream(ptrs);
    }

    EvalResult Evaluator::eval_bs_coord(arma::uword element, double x, double z)
    {
        const PanelBasis basis = basis_of(base_.alphas(0), base_.betas(0));
        std::vector<const cx *> ptrs(trials_ * users_);
        for (arma::uword t = 0; t < trials_; ++t)
            for (arma::uword u = 0; u < users_; ++u)
            {
                const arma::uword i = t * users_ + u;
                auto &hs = h_scratch_[i];
                std::memcpy(hs.data(), h_[i].data(), sizeof(cx) * m_ * n_);
                for (arma::uword n = 0; n < n_; ++n)
                    hs[element + n * m_] = cx{};
                const auto &dirs = trial_[t].dep_dir[u];
                const cx *wr = w_r_[i].data();
                for (arma::uword l = 0; l < dirs.size(); ++l)
                {
                    const arma::vec3 &d = dirs[l];
                    const double kx = two_pi_over_lambda_ * (d(0) * basis.bx_x + d(1) * basis.bx_y);
                    const double kz = two_pi_over_lambda_ * (d(0) * basis.bz_x + d(1) * basis.bz_y + d(2) * basis.bz_z);
                    const double phase = kx * x + kz * z;
                    const cx a(std::cos(phase), std::sin(phase));
                    for (arma::uword n = 0; n < n_; ++n)
                        hs[element + n * m_] += a * wr[n + l * n_];
                }
                ptrs[i] = hs.data();
            }
        return downstream(ptrs);
    }

    EvalResult Evaluator::eval_user_coord(arma::uword user, arma::uword element, double x, double z)
    {
        const PanelBasis basis = basis_of(base_.alphas(user + 1), base_.betas(user + 1));
        const arma::vec3 &c = user_centers_[user];
        std::vector<const cx *> ptrs(trials_ * users_);
        for (arma::uword t = 0; t < trials_; ++t)
            for (arma::uword u = 0; u < users_; ++u)
            {
                const arma::uword i = t * users_ + u;
                if (u != user)
                {
                    ptrs[i] = h_[i].data();
                    continue;
                }
                auto &hs = h_scratch_[i];
                std::memcpy(hs.data(), h_[i].data(), sizeof(cx) * m_ * n_);
                cx *col = hs.data() + element * m_;
                std::memset(static_cast<void *>(col), 0, sizeof(cx) * m_);
                const auto &dirs = trial_[t].arr_dir[u];
                const auto &gains = trial_[t].gain[u];
                const cx *as = a_s_[i].data();
                for (arma::uword l = 0; l < dirs.size(); ++l)
                {
                    const arma::vec3 &d = dirs[l];
                    const double kx = two_pi_over_lambda_ * (d(0) * basis.bx_x + d(1) * basis.bx_y);
                    const double kz = two_pi_over_lambda_ * (d(0) * basis.bz_x + d(1) * basis.bz_y + d(2) * basis.bz_z);
                    const double kc = two_pi_over_lambda_ * (d(0) * c(0) + d(1) * c(1) + d(2) * c(2));
                    const double phase = -(kc + kx * x + kz * z);
                    const cx w = gains[l] * cx(std::cos(phase), std::sin(phase));
                    const cx *ac = as + l * m_;
                    for (arma::uword m = 0; m < m_; ++m)
                        col[m] += ac[m] * w;
                }
                ptrs[i] = hs.data();
            }
        return downstream(ptrs);
    }

    EvalResult Evaluator::eval_alpha(arma::uword panel, double value)
    {
        if (panel == 0)
            return eval_bs_panel(basis_of(value, base_.betas(0)), base_.bs_offsets);
        const arma::uword user = panel - 1;
        return eval_user_panel(user, basis_of(value, base_.betas(panel)), base_.user_offsets[user]);
    }

    EvalResult Evaluator::eval_beta(arma::uword panel, double value)
    {
        if (panel == 0)
            return eval_bs_panel(basis_of(base_.alphas(0), value), base_.bs_offsets);
        const arma::uword user = panel - 1;
        return eval_user_panel(user, basis_of(base_.alphas(panel), value), base_.user_offsets[user]);
    }

    EvalResult Evaluator::downstream(const std::vector<const cx *> &h_ptrs)
    {
        ++evaluations_;
        const arma::uword m = m_, n = n_, users = users_;
        double target_power = 0.0;
        for (double p : powers_)
            target_power += p;

        std::vector<std::vector<double>> per_trial_user(trials_, std::vector<double>(users, 0.0));
        for (arma::uword t = 0; t < trials_; ++t)
        {
            // Gram sum over users, lower triangle.
            std::fill(s_.begin(), s_.end(), cx{});
            for (arma::uword u = 0; u < users; ++u)
            {
                const cx *h = h_ptrs[t * users + u];
                for (arma::uword j = 0; j < n; ++j)
                {
                    const cx *hc = h + j * m;
                    for (arma::uword b = 0; b < m; ++b)
                    {
                        const cx cb = std::conj(hc[b]);
                        cx *sc = s_.data() + b * m;
                        for (arma::uword a = b; a < m; ++a)
                            sc[a] += hc[a] * cb;
                    }
                }
            }
            double trace = 0.0;
            for (arma::uword i = 0; i < m; ++i)
                trace += s_[i + i * m].real();

            // Cholesky with the same regularization rule as the public ZF:
            // add eps = 1e-6 tr/M when the Gram sum is near-singular. The
            // condition estimate here is the squared Cholesky diagonal ratio.
            std::memcpy(chol_.data(), s_.data(), sizeof(cx) * m * m);
            bool ok = chol_lower(m, chol_.data());
            if (ok)
            {
                double dmin = chol_[0].real(), dmax = dmin;
                for (arma::uword i = 1; i < m; ++i)
                {
                    const double d = chol_[i + i * m].real();
                    dmin = std::min(dmin, d);
                    dmax = std::max(dmax, d);
                }
                ok = (dmax / dmin) * (dmax / dmin) <= 1e12;
            }
            if (!ok)
            {
                const double eps = 1e-6 * trace / static_cast<double>(m);
                std::memcpy(chol_.data(), s_.data(), sizeof(cx) * m * m);
                for (arma::uword i = 0; i < m; ++i)
                    chol_[i + i * m] += eps;
                if (!chol_lower(m, chol_.data()))
                    continue; // degenerate trial, SE contribution 0
            }

            // W = S^{-1} [H_1 .. H_U], then one common power rescale.
            for (arma::uword u = 0; u < users; ++u)
                std::memcpy(w_all_.data() + u * m * n, h_ptrs[t * users + u], sizeof(cx) * m * n);
            solve_lower(m, chol_.data(), w_all_.data(), n * users);
            solve_lower_herm(m, chol_.data(), w_all_.data(), n * users);
            double raw_power = 0.0;
            for (const cx &v : w_all_)
                raw_power += std::norm(v);
            if (!(raw_power > 0.0))
                continue;
            const double scale = std::sqrt(target_power / raw_power);
            for (cx &v : w_all_)
                v *= scale;

            for (arma::uword u = 0; u < users; ++u)
            {
                const cx *h_u = h_ptrs[t * users + u];
                // B_j = H_u^H W_j for every j; interference sum for j != u.
                std::fill(xi_.begin(), xi_.end(), cx{});
                cx *b_u = b_.data() + users * n * n; // keep the signal block last
                for (arma::uword j = 0; j < users; ++j)
                {
                    cx *b_j = j == u ? b_u : b_.data() + j * n * n;
                    const cx *w_j = w_all_.data() + j * m * n;
                    for (arma::uword cidx = 0; cidx < n; ++cidx)
                        for (arma::uword r = 0; r < n; ++r)
                        {
                            cx s{};
                            const cx *hc = h_u + r * m;
                            const cx *wc = w_j + cidx * m;
                            for (arma::uword q = 0; q < m; ++q)
                                s += std::conj(hc[q]) * wc[q];
                            b_j[r + cidx * n] = s;
                        }
                    if (j == u)
                        continue;
                    for (arma::uword cidx = 0; cidx < n; ++cidx)
                    {
                        const cx *bc = b_j + cidx * n;
                        for (arma::uword b2 = 0; b2 < n; ++b2)
                        {
                            const cx cb = std::conj(bc[b2]);
                            cx *xc = xi_.data() + b2 * n;
                            for (arma::uword a = b2; a < n; ++a)
                                xc[a] += bc[a] * cb;
                        }
                    }
                }
                for (arma::uword i = 0; i < n; ++i)
                    xi_[i + i * n] += sigma2_;

                if (!chol_lower(n, xi_.data()))
                    continue; // numerically degenerate, count as zero SE
                std::memcpy(y_.data(), b_u, sizeof(cx) * n * n);
                solve_lower(n, xi_.data(), y_.data(), n);

                // I + Y^H Y, lower triangle.
                for (arma::uword cidx = 0; cidx < n; ++cidx)
                    for (arma::uword r = cidx; r < n; ++r)
                    {
                        cx s = r == cidx ? cx(1.0, 0.0) : cx{};
                        const cx *ya = y_.data() + r * n;
                        const cx *yb = y_.data() + cidx * n;
                        for (arma::uword q = 0; q < n; ++q)
                            s += std::conj(ya[q]) * yb[q];
                        mse_[r + cidx * n] = s;
                    }
                if (!chol_lower(n, mse_.data()))
                    continue;
                per_trial_user[t][u] = std::max(0.0, log2det_from_chol(n, mse_.data()));
            }
        }
        return summarize(per_trial_user);
    }
}
