#pragma once

#include <random>

#include "spinprop/symbols.hpp"

namespace testutil {

using spinprop::OperatorSpec;
using spinprop::cplx;

inline OperatorSpec ho_spec(double omega = 1.0) {
    return {{omega, 1, 1, 0, 0, 0}};
}

inline OperatorSpec jz_spec(double omega0 = 1.0) {
    return {{omega0, 0, 0, 0, 1, 0}};
}

inline OperatorSpec jc_spec(double omega = 1.0, double omega0 = 0.9, double g = 0.3) {
    return {{omega, 1, 1, 0, 0, 0},
            {omega0, 0, 0, 0, 1, 0},
            {g, 1, 0, 0, 0, 1},
            {g, 0, 1, 1, 0, 0}};
}

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}

    double real(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    cplx disk(double radius) {
        for (;;) {
            double x = real(-radius, radius), y = real(-radius, radius);
            if (x * x + y * y <= radius * radius) return {x, y};
        }
    }
};

}  // namespace testutil
