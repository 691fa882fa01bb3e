// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_ERRORS_HPP
#define ROMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace roma
{
    // Thrown when a channel matrix is identically zero (or numerically so)
    // where a precoder needs a direction to point at.
    class degenerate_channel_error : public std::runtime_error
    {
    public:
        explicit degenerate_channel_error(const std::string &what) : std::runtime_error(what) {}
    };

    // Thrown when a placement/projection problem has no feasible solution,
    // e.g. more antenna elements than the region can hold at the minimum
    // pairwise distance.
    class infeasible_problem_error : public std::runtime_error
    {
    public:
        explicit infeasible_problem_error(const std::string &what) : std::runtime_error(what) {}
    };

    // Thrown when a finite-difference gradient hits non-finite objective values.
    class gradient_failure_error : public std::runtime_error
    {
    public:
        explicit gradient_failure_error(const std::string &what) : std::runtime_error(what) {}
    };

    // Thrown by the configuration parser; carries the offending key or line context.
    class config_error : public std::runtime_error
    {
    public:
        explicit config_error(const std::string &what) : std::runtime_error(what) {}
    };
}

#endif
