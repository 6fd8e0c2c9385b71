#pragma once

#include <cmath>

namespace cgoslab {

// quintic step: 0 for t <= 0, 1 for t >= 1, C^2 across both ends
inline double quintic_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// compactly supported bump profile exp(1 - 1/(1 - r^2)) on r < 1 (peak 1)
inline double bump_profile(double r2) {
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

}
