// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_EVALUATOR_HPP
#define ROMA_EVALUATOR_HPP

#include "roma/geometry.hpp"
#include "roma/scenario.hpp"

#include <armadillo>
#include <complex>
#include <vector>

namespace roma
{
    // Geometry decision variables: one rotation-angle pair per panel
    // (index 0 is the BS, 1..U the users) and per-panel in-plane offsets.
    struct GeometryVariables
    {
        arma::vec alphas; // length U+1
        arma::vec betas;  // length U+1
        std::vector<PlanarOffset> bs_offsets;
        std::vector<std::vector<PlanarOffset>> user_offsets; // [user][element]
    };

    struct EvalResult
    {
        double average_se = 0.0;
        std::vector<double> per_user_se;
        double average_se_std_error = 0.0;
    };

    enum class BatchKind
    {
        kOptimization,
        kHoldout,
    };

    // Reference objective: panel geometry -> channels -> ZF precoders -> SE,
    // composed purely from the public module operations. The fast Evaluator
    // below is pinned to this path by the unit tests.
    EvalResult evaluate_objective_reference(const GeometryVariables &vars,
                                            const SampledScenario &sampled, BatchKind kind);

    // Sample-average SE objective over one frozen path batch, with per-panel
    // caches so single-coordinate finite-difference probes only rebuild the
    // phases that actually changed. Every architecture reports SE through
    // this one code path.
    class Evaluator
    {
    public:
        Evaluator(const SampledScenario &sampled, BatchKind kind);

        arma::uword users() const { return users_; }
        arma::uword tx_count() const { return m_; }
        arma::uword rx_count() const { return n_; }
        arma::uword trials() const { return trials_; }

        // Sets the base state and rebuilds all caches.
        void commit(const GeometryVariables &vars);

        const GeometryVariables &committed() const { return base_; }

        // Objective at the committed state.
        EvalResult eval_committed();

        // Block probes: evaluate with one block of variables replaced,
        // leaving the committed caches untouched.
        EvalResult eval_bs_offsets(const std::vector<PlanarOffset> &offsets);
        EvalResult eval_user_offsets(arma::uword user, const std::vector<PlanarOffset> &offsets);
        EvalResult eval_angles(const arma::vec &alphas, const arma::vec &betas);

        // Single-coordinate probes for finite differences.
        EvalResult eval_bs_coord(arma::uword element, double x, double z);
        EvalResult eval_user_coord(arma::uword user, arma::uword element, double x, double z);
        EvalResult eval_alpha(arma::uword panel, double value);
        EvalResult eval_beta(arma::uword panel, double value);

        long long evaluation_count() const { return evaluations_; }

    private:
        struct PanelBasis
        {
            double bx_x, bx_y;       // rotated x-basis column (z component is 0)
            double bz_x, bz_y, bz_z; // rotated z-basis column
        };

        struct TrialData
        {
            // Per user: path direction vectors and normalized gains.
            std::vector<std::vector<arma::vec3>> dep_dir; // [user][path]
            std::vector<std::vector<arma::vec3>> arr_dir;
            std::vector<std::vector<std::complex<double>>> gain; // gain / sqrt(L)
        };

        static PanelBasis basis_of(double alpha, double beta);

        void rebuild_tx(arma::uword u, arma::uword t, const std::vector<PlanarOffset> &offsets,
                        const PanelBasis &basis, std::complex<double> *a_s) const;
        void rebuild_rx(arma::uword u, arma::uword t, const std::vector<PlanarOffset> &offsets,
                        const PanelBasis &basis, std::complex<double> *w_r) const;
        void rebuild_h(arma::uword u, arma::uword t, const std::complex<double> *a_s,
                       const std::complex<double> *w_r, std::complex<double> *h) const;

        EvalResult eval_bs_panel(const PanelBasis &basis, const std::vector<PlanarOffset> &offsets);
        EvalResult eval_user_panel(arma::uword user, const PanelBasis &basis,
                                   const std::vector<PlanarOffset> &offsets);
        EvalResult downstream(const std::vector<const std::complex<double> *> &h_ptrs);

        arma::uword users_ = 0, m_ = 0, n_ = 0, trials_ = 0;
        double lambda_ = 0.0, two_pi_over_lambda_ = 0.0;
        double sigma2_ = 0.0;
        std::vector<double> powers_;
        std::vector<arma::vec3> user_centers_;
        std::vector<TrialData> trial_; // [trial]

        GeometryVariables base_;
        // Caches, indexed [trial * users + user].
        std::vector<std::vector<std::complex<double>>> a_s_;  // M x L, column-major
        std::vector<std::vector<std::complex<double>>> w_r_;  // N x L, gain-weighted
        std::vector<std::vector<std::complex<double>>> h_;    // M x N
        // Scratch for probes.
        arma::uword max_paths_ = 0;
        std::vector<std::vector<std::complex<double>>> h_scratch_;
        std::vector<std::complex<double>> panel_scratch_;
        std::vector<std::complex<double>> panel_scratch2_;

        // Downstream work buffers.
        std::vector<std::complex<double>> s_, chol_, w_all_, b_, xi_, y_, mse_;

        long long evaluations_ = 0;
    };
}

#endif
