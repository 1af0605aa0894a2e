#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "amwave/common.hpp"

inline auto ErrorKindIs(amwave::ErrorKind k) {
  return Catch::Matchers::Predicate<amwave::Error>(
      [k](const amwave::Error& e) { return e.kind == k; }, "error kind matches");
}
