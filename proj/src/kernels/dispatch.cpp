#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace offo::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(OFFO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table* initial_choice() {
  const char* forced = std::getenv("OFFO_SIMD");
  if (forced != nullptr && std::string(forced) == "scalar") return &scalar_table();
  if (const Table* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{initial_choice()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const Table* avx2_table() {
#if defined(OFFO_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) {
  const Table* t = isa == Isa::scalar ? &scalar_table() : avx2_table();
  if (t == nullptr) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace offo::kernels
