#pragma once

namespace freewalk {

// Exponentially scaled modified Bessel functions e^{-x} I_0(x), e^{-x} I_1(x)
// for x >= 0. Power series below the crossover, asymptotic expansion above;
// relative accuracy ~1e-14 across the range (the asymptotic truncation error
// at the crossover is ~e^{-2x}).
double besseli0_scaled(double x);
double besseli1_scaled(double x);

// Ratio I_1(x)/I_0(x), stable for all x >= 0.
double bessel_ratio_i1_i0(double x);

}  // namespace freewalk
