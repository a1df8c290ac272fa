// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "tcf/error.hpp"
#include "tcf/simd/kernels.hpp"

namespace tcf::simd {

namespace detail {
#if defined(TCF_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif
#if defined(TCF_HAVE_NEON)
const KernelTable& neon_table_impl();
#endif
}  // namespace detail

const KernelTable* avx2_table() {
#if defined(TCF_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(TCF_HAVE_NEON)
  return &detail::neon_table_impl();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::kScalar: return &scalar_table();
    case Backend::kAvx2: return avx2_table();
    case Backend::kNeon: return neon_table();
  }
  return nullptr;
}

const KernelTable* best_available() {
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

const KernelTable* initial_table() {
  const char* env = std::getenv("TCF_KERNELS");
  if (env == nullptr || std::string_view(env).empty() || std::string_view(env) == "auto") {
    return best_available();
  }
  const KernelTable* t = table_for(parse_backend(env));
  if (t == nullptr) {
    throw Error("TCF_KERNELS=" + std::string(env) + " is not available on this machine");
  }
  return t;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

bool backend_available(Backend b) { return table_for(b) != nullptr; }

void set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (t == nullptr) {
    throw Error("kernel backend '" + std::string(backend_name(b)) + "' is not available");
  }
  slot().store(t, std::memory_order_release);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  throw Error("unknown kernel backend '" + std::string(name) + "' (expected scalar|avx2|neon|auto)");
}

}  // namespace tcf::simd
