#include "rodessa/kernels.hpp"

#include "rodessa/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace rodessa::kernels {

#ifndef RODESSA_HAVE_AVX2
const Table* avx2_table() noexcept { return nullptr; }
#endif

namespace {

Level detect() noexcept {
  if (const char* env = std::getenv("RODESSA_SIMD"); env && std::string(env) == "scalar") {
    return Level::Scalar;
  }
  return cpu_supports(Level::Avx2) ? Level::Avx2 : Level::Scalar;
}

std::atomic<Level>& current() noexcept {
  static std::atomic<Level> level{detect()};
  return level;
}

}  // namespace

bool cpu_supports(Level level) noexcept {
  switch (level) {
    case Level::Scalar: return true;
    case Level::Avx2:
#if defined(RODESSA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Level active_level() noexcept { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (!cpu_supports(level)) {
    throw Error(ErrorKind::Configuration, std::string("kernel level ") +
                                              std::string(level_name(level)) + " unavailable");
  }
  current().store(level, std::memory_order_relaxed);
}

std::string_view level_name(Level level) noexcept {
  return level == Level::Avx2 ? "avx2" : "scalar";
}

const Table& active() noexcept {
  if (active_level() == Level::Avx2) return *avx2_table();
  return scalar_table();
}

}  // namespace rodessa::kernels
