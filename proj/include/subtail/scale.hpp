#pragma once

#include <cmath>
#include <stdexcept>

namespace subtail {

// coef * s^exponent. Used for the spatial scale function and the volume function.
struct PowerScale {
    double exponent = 2.0;
    double coef = 1.0;

    double operator()(double s) const { return coef * std::pow(s, exponent); }
    double inverse(double y) const { return std::pow(y / coef, 1.0 / exponent); }
    // lower and upper weak-scaling indices coincide for a pure power
    double lower_index() const { return exponent; }
    double upper_index() const { return exponent; }
};

}  // namespace subtail
