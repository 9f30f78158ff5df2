#pragma once
#include <algorithm>
#include <cmath>
#include <doctest.h>

#include <wfi/error.hpp>

/// Runs `expr` and checks that it throws wfi::Error with the given code.
#define CHECK_WFI_ERROR(expr, ecode)                          \
    do {                                                      \
        bool thrown_ = false;                                 \
        try {                                                 \
            (void)(expr);                                     \
        } catch (const wfi::Error& e_) {                      \
            thrown_ = true;                                   \
            CHECK_MESSAGE(e_.code() == (ecode), e_.what());   \
        }                                                     \
        CHECK_MESSAGE(thrown_, "expected " #ecode);           \
    } while (0)

inline bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}
