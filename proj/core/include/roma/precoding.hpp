// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_PRECODING_HPP
#define ROMA_PRECODING_HPP

#include "roma/channel.hpp"

#include <armadillo>
#include <vector>

namespace roma
{
    // Per-user precoding matrices under a shared total power budget,
    // sum_j ||W_j||_F^2 <= total_power_budget.
    struct PrecoderSet
    {
        std::vector<arma::cx_mat> w;
        double total_power_budget = 0.0;

        double total_power() const;
    };

    // Maximum-ratio precoder, W = sqrt(p) H / ||H||_F, so that the transmit
    // power ||W||_F^2 equals p watts.
    arma::cx_mat mr_precoder(const ChannelMatrix &h, double power_w);

    // Zero-forcing set: W_u = (sum_j H_j H_j^* + eps I)^{-1} H_u with eps = 0
    // when the Gram sum is well conditioned, then a common rescale so the
    // total transmit power equals sum_j p_j.
    PrecoderSet zf_precoder(const std::vector<ChannelMatrix> &channels,
                            const std::vector<double> &powers_w);

    // Scales every precoder by the same factor when the total power exceeds
    // the budget; a set within budget is returned unchanged.
    PrecoderSet normalize_power(PrecoderSet set, double max_power_w);
}

#endif
