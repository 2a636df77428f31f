#pragma once

#include <gtest/gtest.h>

#include <lagshrink/error.hpp>

// Asserts that stmt throws lagshrink::Error of the given kind.
#define EXPECT_ERROR_KIND(stmt, expected_kind)                                                   \
  do {                                                                                           \
    bool thrown_ = false;                                                                        \
    try {                                                                                        \
      stmt;                                                                                      \
    } catch (const ::lagshrink::Error &e_) {                                                     \
      thrown_ = true;                                                                            \
      EXPECT_EQ(e_.kind(), expected_kind) << ::lagshrink::to_string(e_.kind()) << ": " << e_.what(); \
    }                                                                                            \
    EXPECT_TRUE(thrown_) << "no lagshrink::Error from " #stmt;                                   \
  } while (0)
