#include "fran/mutation.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace fran {

namespace {
std::atomic<Mutation> g_mutation{Mutation::None};
}

void set_mutation(Mutation m) { g_mutation.store(m, std::memory_order_relaxed); }

Mutation active_mutation() { return g_mutation.load(std::memory_order_relaxed); }

Mutation parse_mutation(std::string_view name)
{
    if (name == "none") return Mutation::None;
    if (name == "precoder-sign") return Mutation::PrecoderSignFlip;
    if (name == "theorem-off-by-one") return Mutation::TheoremOffByOne;
    throw std::invalid_argument("unknown mutation '" + std::string(name) + "'");
}

}  // namespace fran
