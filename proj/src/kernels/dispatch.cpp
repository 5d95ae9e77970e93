// Copyright 2026 The TKS-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <string_view>
#include <vector>

#include "kernels_impl.hpp"
#include "tks/kernels.hpp"

namespace tks::kernels {
namespace {

std::vector<const KernelTable*> DetectTables() {
  std::vector<const KernelTable*> tables{&scalar_table()};
#if defined(TKS_HAVE_AVX2)
  if (avx2_supported()) tables.push_back(&avx2_table());
#endif
#if defined(TKS_HAVE_NEON)
  tables.push_back(&neon_table());
#endif
  return tables;
}

const std::vector<const KernelTable*>& Tables() {
  static const std::vector<const KernelTable*> tables = DetectTables();
  return tables;
}

const KernelTable* Find(Isa isa) {
  for (const KernelTable* t : Tables()) {
    if (t->isa == isa) return t;
  }
  return nullptr;
}

const KernelTable* InitialTable() {
  if (const char* env = std::getenv("TKS_KERNELS")) {
    const std::string_view want(env);
    for (const KernelTable* t : Tables()) {
      if (want == t->name) return t;
    }
  }
  return Tables().back();
}

const KernelTable*& Current() {
  static const KernelTable* current = InitialTable();
  return current;
}

}  // namespace

std::span<const KernelTable* const> available_tables() {
  return {Tables().data(), Tables().size()};
}

const KernelTable& active() { return *Current(); }

bool set_active(Isa isa) {
  const KernelTable* t = Find(isa);
  if (t == nullptr) return false;
  Current() = t;
  return true;
}

}  // namespace tks::kernels
