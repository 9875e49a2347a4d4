#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "perc/errors.hpp"

// Asserts that `expr` throws perc::error with the given code.
#define REQUIRE_ERRC(expr, expected)                        \
  do {                                                      \
    bool thrown_ = false;                                   \
    try {                                                   \
      (void)(expr);                                         \
    } catch (const perc::error& e_) {                       \
      thrown_ = true;                                       \
      REQUIRE(e_.code() == (expected));                     \
    }                                                       \
    REQUIRE(thrown_);                                       \
  } while (0)
