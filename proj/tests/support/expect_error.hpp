#pragma once

#include <gtest/gtest.h>

#include "ecx/error.hpp"

#define EXPECT_ECX_ERROR(statement, expected_code)                                   \
  do {                                                                               \
    try {                                                                            \
      statement;                                                                     \
      ADD_FAILURE() << "expected " << ::ecx::to_string(expected_code) << " error"; \
    } catch (const ::ecx::Error& e) {                                                \
      EXPECT_EQ(e.code(), expected_code) << e.what();                                \
    }                                                                                \
  } while (0)
