// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_UNITS_HPP
#define ROMA_UNITS_HPP

#include <cmath>

namespace roma
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s

    inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

    inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

    inline double wavelength_m(double carrier_hz) { return kSpeedOfLight / carrier_hz; }
}

#endif
