#pragma once

#include "pwidths/error.hpp"

#include <doctest.h>

#include <optional>

namespace testing {

template <class F>
std::optional<pwidths::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const pwidths::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace testing

#define CHECK_ERROR(expr, kind_)                                                   \
  CHECK(testing::error_kind([&] { (void)(expr); }) == std::optional(pwidths::ErrorKind::kind_))
