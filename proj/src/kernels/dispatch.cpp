#include <cstdlib>
#include <string_view>

#include "seriesforge/kernels/kernels.hpp"

namespace seriesforge::kernels {
namespace {

const KernelTable& select() {
    if (const char* env = std::getenv("SERIESFORGE_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
        return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    if (const KernelTable* t = neon_table()) return *t;
    return scalar_table();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace seriesforge::kernels
