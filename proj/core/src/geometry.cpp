// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/geometry.hpp"

#include "roma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace roma
{
    void RegionSpec::validate() const
    {
        if (!(half_side_wavelengths >= 0.0))
            throw std::invalid_argument("RegionSpec: half_side_wavelengths must be >= 0");
        if (!(min_distance_wavelengths >= 0.0))
            throw std::invalid_argument("RegionSpec: min_distance_wavelengths must be >= 0");
    }

    bool RegionSpec::grid_fits(arma::uword rows_h, arma::uword rows_v) const
    {
        const double side = 2.0 * half_side_wavelengths;
        const double need_h = static_cast<double>(rows_h - 1) * min_distance_wavelengths;
        const double need_v = static_cast<double>(rows_v - 1) * min_distance_wavelengths;
        return need_h <= side + 1e-12 && need_v <= side + 1e-12;
    }

    std::vector<PlanarOffset> element_grid(arma::uword rows_h, arma::uword rows_v,
                                           double spacing_h, double spacing_v)
    {
        if (rows_h < 1 || rows_v < 1)
            throw std::invalid_argument("element_grid: element counts must be >= 1");
        if (!(spacing_h > 0.0) || !(spacing_v > 0.0))
            throw std::invalid_argument("element_grid: spacings must be > 0");

        std::vector<PlanarOffset> out(rows_h * rows_v);
        const double ph = (static_cast<double>(rows_h) - 1.0) / 2.0;
        const double qv = (static_cast<double>(rows_v) - 1.0) / 2.0;
        for (arma::uword t = 0; t < rows_h * rows_v; ++t)
        {
            const double p = static_cast<double>(t % rows_h);
            const double q = static_cast<double>(t / rows_h);
            out[t] = {(p - ph) * spacing_h, (q - qv) * spacing_v};
        }
        return out;
    }

    arma::vec3 rotate_to_3d(double x, double z, double alpha, double beta)
    {
        const double ca = std::cos(alpha), sa = std::sin(alpha);
        const double cb = std::cos(beta), sb = std::sin(beta);
        return {x * ca - z * sb * sa,
                x * sa + z * sb * ca,
                z * cb};
    }

    arma::vec3 rotate_to_3d_legacy_nonisometric(double x, double z, double alpha, double beta)
    {
        const double ca = std::cos(alpha), sa = std::sin(alpha);
        const double cb = std::cos(beta), sb = std::sin(beta);
        return {x * ca - z * sb * sa,
                x * ca + z * sb * ca,
                z * cb};
    }

    PanelGeometry PanelGeometry::uniform(arma::uword rows_h, arma::uword rows_v,
                                         double spacing_h, double spacing_v,
                                         double alpha, double beta,
                                         const arma::vec3 &center)
    {
        PanelGeometry g;
        g.rows_h = rows_h;
        g.rows_v = rows_v;
        g.alpha = alpha;
        g.beta = beta;
        g.offsets = element_grid(rows_h, rows_v, spacing_h, spacing_v);
        g.center = center;
        return g;
    }

    void PanelGeometry::validate(const RegionSpec &region, double lambda,
                                 bool enforce_min_distance) const
    {
        region.validate();
        if (alpha < 0.0 || alpha > M_PI)
            throw std::invalid_argument("PanelGeometry: alpha outside [0, pi]");
        if (beta < 0.0 || beta > M_PI)
            throw std::invalid_argument("PanelGeometry: beta outside [0, pi]");
        if (offsets.size() != size())
            throw std::invalid_argument("PanelGeometry: offsets length != rows_h * rows_v");
        const double half = region.side_m(lambda) / 2.0 + 1e-9;
        for (const auto &o : offsets)
            if (std::abs(o.x) > half || std::abs(o.z) > half)
                throw std::invalid_argument("PanelGeometry: offset outside the movable region");
        if (enforce_min_distance)
        {
            const double need = region.min_distance_m(lambda) - 1e-9;
            if (min_pairwise_distance(offsets) < need)
                throw std::invalid_argument("PanelGeometry: pairwise element distance below minimum");
        }
    }

    std::vector<arma::vec3> absolute_positions(const PanelGeometry &g)
    {
        std::vector<arma::vec3> out;
        out.reserve(g.offsets.size());
        for (const auto &o : g.offsets)
            out.push_back(arma::vec3(g.center + rotate_to_3d(o.x, o.z, g.alpha, g.beta)));
        return out;
    }

    double min_pairwise_distance(const std::vector<PlanarOffset> &offsets)
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
            for (std::size_t j = i + 1; j < offsets.size(); ++j)
                best = std::min(best, planar_distance(offsets[i], offsets[j]));
        return best;
    }

    namespace
    {
        constexpr double kDistSlack = 1.0 - 1e-12;

        bool in_region(const PlanarOffset &p, double half_side)
        {
            return std::abs(p.x) <= half_side + 1e-12 && std::abs(p.z) <= half_side + 1e-12;
        }

        PlanarOffset clamp_offset(const PlanarOffset &p, double half_side)
        {
            return {std::clamp(p.x, -half_side, half_side), std::clamp(p.z, -half_side, half_side)};
        }

        double min_distance_to(const std::vector<PlanarOffset> &placed, const PlanarOffset &c)
        {
            double best = std::numeric_limits<double>::infinity();
            for (const auto &z : placed)
                best = std::min(best, planar_distance(z, c));
            return best;
        }

        // Intersections of two circles of equal radius r centered at a and b.
        // Empty when the centers are coincident or farther apart than 2r.
        void circle_circle(const PlanarOffset &a, const PlanarOffset &b, double r,
                           std::vector<PlanarOffset> &out)
        {
            const double d = planar_distance(a, b);
            if (d < 1e-15 || d > 2.0 * r)
                return;
            const double h = std::sqrt(std::max(r * r - d * d / 4.0, 0.0));
            const double mx = (a.x + b.x) / 2.0, mz = (a.z + b.z) / 2.0;
            const double px = -(b.z - a.z) / d, pz = (b.x - a.x) / d;
            out.push_back({mx + h * px, mz + h * pz});
            out.push_back({mx - h * px, mz - h * pz});
        }

        // Deterministic fallback when the analytic candidate set is fully
        // blocked: scan the region on successively finer lattices for the
        // feasible point nearest the target.
        bool lattice_search(const PlanarOffset &target, const std::vector<PlanarOffset> &placed,
                            double min_dist, double half_side, PlanarOffset &out)
        {
            for (int level = 1; level <= 3; ++level)
            {
                const double res = min_dist / std::pow(2.0, level);
                const long steps = static_cast<long>(std::floor(2.0 * half_side / res)) + 1;
                bool found = false;
                double best_d2 = std::numeric_limits<double>::infinity();
                for (long i = 0; i < steps; ++i)
                    for (long j = 0; j < steps; ++j)
                    {
                        PlanarOffset c{-half_side + static_cast<double>(i) * res,
                                       -half_side + static_cast<double>(j) * res};
                        if (min_distance_to(placed, c) < min_dist * kDistSlack)
                            continue;
                        const double dx = c.x - target.x, dz = c.z - target.z;
                        const double d2 = dx * dx + dz * dz;
                        if (d2 < best_d2)
                        {
                            best_d2 = d2;
                            out = c;
                            found = true;
                        }
                    }
                if (found)
                    return true;
            }
            return false;
        }

        // One placement pass in element-index order. For each element the
        // candidate set is the target itself, the intersections of each
        // placed-element circle with the line through its center and the
        // target, and the pairwise circle-circle intersections. The feasible
        // candidate closest to the target wins; in-region candidates are
        // preferred; ties keep the earliest-constructed candidate.
        std::vector<PlanarOffset> place_pass(const std::vector<PlanarOffset> &targets,
                                             double min_dist, double half_side)
        {
            std::vector<PlanarOffset> placed;
            placed.reserve(targets.size());
            std::vector<PlanarOffset> candidates;
            for (std::size_t m = 0; m < targets.size(); ++m)
            {
                const PlanarOffset &t = targets[m];
                candidates.clear();
                candidates.push_back(t);
                for (const auto &z : placed)
                {
                    double dx = t.x - z.x, dz = t.z - z.z;
                    const double d = std::sqrt(dx * dx + dz * dz);
                    if (d < 1e-15)
                    {
                        dx = 1.0;
                        dz = 0.0;
                    }
                    else
                    {
                        dx /= d;
                        dz /= d;
                    }
                    candidates.push_back({z.x + min_dist * dx, z.z + min_dist * dz});
                    candidates.push_back({z.x - min_dist * dx, z.z - min_dist * dz});
                }
                for (std::size_t l1 = 0; l1 + 1 < placed.size(); ++l1)
                    for (std::size_t l2 = l1 + 1; l2 < placed.size(); ++l2)
                        circle_circle(placed[l1], placed[l2], min_dist, candidates);

                bool have = false, have_inside = false;
                double best_d2 = std::numeric_limits<double>::infinity();
                PlanarOffset best{};
                for (const auto &c : candidates)
                {
                    if (min_distance_to(placed, c) < min_dist * kDistSlack)
                        continue;
                    const bool inside = in_region(c, half_side);
                    if (have_inside && !inside)
                        continue;
                    const double dx = c.x - t.x, dz = c.z - t.z;
                    const double d2 = dx * dx + dz * dz;
                    const bool upgrade = inside && !have_inside;
                    if (upgrade || !have || d2 < best_d2)
                    {
                        best = c;
                        best_d2 = d2;
                        have = true;
                        have_inside = have_inside || inside;
                    }
                }
                if (!have && !lattice_search(t, placed, min_dist, half_side, best))
                    throw infeasible_problem_error(
                        "project_min_distance: no feasible placement for element " + std::to_string(m));
                placed.push_back(best);
            }
            return placed;
        }

        bool feasible(const std::vector<PlanarOffset> &pts, double min_dist, double half_side)
        {
            for (const auto &p : pts)
                if (!in_region(p, half_side))
                    return false;
            return min_pairwise_distance(pts) >= min_dist - 1e-9;
        }
    }

    std::vector<PlanarOffset> project_min_distance(const std::vector<PlanarOffset> &targets,
                                                   double min_distance_m, double region_side_m)
    {
        if (region_side_m < 0.0)
            throw std::invalid_argument("project_min_distance: negative region side");
        const double half = region_side_m / 2.0;

        if (targets.empty())
            return {};
        if (min_distance_m <= 0.0)
        {
            std::vector<PlanarOffset> out;
            out.reserve(targets.size());
            for (const auto &t : targets)
                out.push_back(clamp_offset(t, half));
            return out;
        }

        // Feasibility precheck: a near-square grid of n points at the minimum
        // distance has to fit inside the region.
        const auto n = targets.size();
        const auto cols = static_cast<arma::uword>(std::ceil(std::sqrt(static_cast<double>(n))));
        const auto rows = static_cast<arma::uword>((n + cols - 1) / cols);
        const double need = static_cast<double>(std::max(cols, rows) - 1) * min_distance_m;
        if (need > region_side_m + 1e-12)
            throw infeasible_problem_error("project_min_distance: region too small for " +
                                           std::to_string(n) + " elements at the minimum distance");

        // Already feasible targets are returned unchanged, which also makes
        // the projection idempotent.
        if (feasible(targets, min_distance_m, half))
            return targets;

        std::vector<PlanarOffset> work = targets;
        for (int pass = 0; pass < 5; ++pass)
        {
            work = place_pass(work, min_distance_m, half);
            bool clamped_any = false;
            for (auto &p : work)
            {
                PlanarOffset c = clamp_offset(p, half);
                if (c.x != p.x || c.z != p.z)
                    clamped_any = true;
                p = c;
            }
            if (!clamped_any || feasible(work, min_distance_m, half))
                return work;
        }
        throw infeasible_problem_error(
            "project_min_distance: could not reconcile region clamping with the minimum distance");
    }

    std::vector<PlanarOffset> project_min_distance(const std::vector<PlanarOffset> &targets,
                                                   const RegionSpec &region, double lambda)
    {
        region.validate();
        return project_min_distance(targets, region.min_distance_m(lambda), region.side_m(lambda));
    }
}
