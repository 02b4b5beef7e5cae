#pragma once

#include "doctest.h"

#include <cstddef>
#include <string>

#include "posture/types.hpp"

// Checks that `expr` throws posture::Error carrying `errc`.
#define CHECK_THROWS_CODE(expr, errc)                                \
  do {                                                               \
    bool thrown_ = false;                                            \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const posture::Error& e_) {                             \
      thrown_ = true;                                                \
      CHECK_MESSAGE(e_.code() == (errc), "wrong code: ", std::string(e_.what())); \
    }                                                                \
    CHECK_MESSAGE(thrown_, "expected an exception from " #expr);     \
  } while (0)

inline posture::Episode constant_episode(posture::AccelSample s, std::size_t n) {
  posture::Episode ep;
  ep.samples.assign(n, s);
  ep.subject_id = "s01";
  ep.id = "s01/chest/" + std::to_string(n);
  return ep;
}
