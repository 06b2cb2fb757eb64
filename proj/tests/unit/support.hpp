#pragma once

#include <cmath>

#include <gtest/gtest.h>

#include "mgrelay/phasors.hpp"

namespace mgrelay::test {

inline double rel(Phasor x, Phasor ref) {
    return std::abs(x - ref) / std::max(std::abs(ref), 1e-300);
}

inline ::testing::AssertionResult near_rel(Phasor x, Phasor ref, double tol) {
    const double e = rel(x, ref);
    if (e <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure()
           << "got " << x << " want " << ref << " rel " << e << " > " << tol;
}

inline ::testing::AssertionResult near_abs(Phasor x, Phasor ref, double tol) {
    const double e = std::abs(x - ref);
    if (e <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got " << x << " want " << ref << " diff " << e;
}

} // namespace mgrelay::test
