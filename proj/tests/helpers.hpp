#pragma once

#include <functional>

#include <doctest.h>

#include "clab/errors.hpp"
#include "clab/green.hpp"
#include "clab/lattice.hpp"
#include "clab/operator.hpp"

namespace clab::test {

inline Exhaustion unit_exhaustion(int dim, std::vector<int> radii, int ambient) {
  return build_exhaustion(dim, std::move(radii), ambient, [](const Coord&) { return 1.0; });
}

/// The kind raised by fn, or nullopt if it returned normally.
inline std::optional<ErrorKind> kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace clab::test

#define CHECK_KIND(expr, k)                                                                   \
  do {                                                                                        \
    const auto got_ = ::clab::test::kind_of([&] { (void)(expr); });                           \
    REQUIRE_MESSAGE(got_.has_value(), "no error raised by " #expr);                           \
    CHECK_MESSAGE(*got_ == (k), "got " << ::clab::to_string(*got_) << " from " #expr);        \
  } while (0)
