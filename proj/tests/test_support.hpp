#pragma once

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmelimit/error.hpp"

namespace pmelimit::testing {

template <class Fn>
void expect_error(ErrorKind kind, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(kind) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace pmelimit::testing
