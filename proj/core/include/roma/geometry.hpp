// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_GEOMETRY_HPP
#define ROMA_GEOMETRY_HPP

#include <armadillo>
#include <vector>

namespace roma
{
    // In-panel element coordinate relative to the panel center, meters.
    // Panels are parameterized in 2D; 3D coordinates are always derived
    // through the panel rotation, so pairwise-distance constraints can be
    // enforced in-plane.
    struct PlanarOffset
    {
        double x = 0.0;
        double z = 0.0;
    };

    inline double planar_distance(const PlanarOffset &a, const PlanarOffset &b)
    {
        double dx = a.x - b.x, dz = a.z - b.z;
        return std::sqrt(dx * dx + dz * dz);
    }

    // Movable region for the elements of one panel: the square
    // [-A, A] x [-A, A] wavelengths in the (x, z) panel plane, centered on
    // the panel center, plus the minimum pairwise element distance. A is the
    // normalized region size; at A = 0.5 the region exactly holds a 3x3 grid
    // at half-wavelength spacing.
    struct RegionSpec
    {
        double half_side_wavelengths = 2.5;    // A
        double min_distance_wavelengths = 0.5; // D

        void validate() const;

        // Whether a rows_h x rows_v grid at the minimum distance fits in the
        // region. Used as the feasibility precheck before any projection.
        bool grid_fits(arma::uword rows_h, arma::uword rows_v) const;

        double side_m(double lambda) const { return 2.0 * half_side_wavelengths * lambda; }
        double min_distance_m(double lambda) const { return min_distance_wavelengths * lambda; }
    };

    // One ROMA panel: grid shape, the two rotation angles, per-element
    // in-plane offsets and the absolute center position.
    struct PanelGeometry
    {
        arma::uword rows_h = 1; // P, horizontal element count
        arma::uword rows_v = 1; // Q, vertical element count
        double alpha = 0.0;     // rad, in [0, pi]
        double beta = 0.0;      // rad, in [0, pi]
        std::vector<PlanarOffset> offsets;
        arma::vec3 center{arma::fill::zeros};

        arma::uword size() const { return rows_h * rows_v; }

        // Uniform grid panel at the given spacings.
        static PanelGeometry uniform(arma::uword rows_h, arma::uword rows_v,
                                     double spacing_h, double spacing_v,
                                     double alpha, double beta,
                                     const arma::vec3 &center);

        // Checks angle boxes, offset count, region membership and (optionally)
        // the pairwise minimum distance. Throws std::invalid_argument.
        void validate(const RegionSpec &region, double lambda,
                      bool enforce_min_distance) const;
    };

    // Centered uniform grid of P*Q in-plane offsets, row-major with
    // p = mod(t-1, P), q = floor((t-1)/P). The grid sums to the zero vector.
    std::vector<PlanarOffset> element_grid(arma::uword rows_h, arma::uword rows_v,
                                           double spacing_h, double spacing_v);

    // Rigid rotation of an in-plane offset into 3D:
    //   dx = X cos(a) - Z sin(b) sin(a)
    //   dy = X sin(a) + Z sin(b) cos(a)
    //   dz = Z cos(b)
    // This is an isometry: |result| = sqrt(X^2 + Z^2).
    arma::vec3 rotate_to_3d(double x, double z, double alpha, double beta);

    // Pre-fix variant with dx-row cos(a) in the y component. Not an isometry;
    // kept only for A/B comparison, never used by the simulator.
    arma::vec3 rotate_to_3d_legacy_nonisometric(double x, double z, double alpha, double beta);

    // Absolute 3D positions of every element of a panel.
    std::vector<arma::vec3> absolute_positions(const PanelGeometry &g);

    double min_pairwise_distance(const std::vector<PlanarOffset> &offsets);

    // Least-moved feasible placement: returns offsets that are pairwise at
    // least min_distance apart and inside the centered square region of the
    // given side, staying as close to the targets as the candidate geometry
    // allows. Targets that are already feasible are returned unchanged.
    // Throws infeasible_problem_error when the region cannot hold the points.
    std::vector<PlanarOffset> project_min_distance(const std::vector<PlanarOffset> &targets,
                                                   double min_distance_m, double region_side_m);

    std::vector<PlanarOffset> project_min_distance(const std::vector<PlanarOffset> &targets,
                                                   const RegionSpec &region, double lambda);
}

#endif
