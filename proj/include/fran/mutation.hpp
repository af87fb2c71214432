// Fault injection for mutation testing of the verification suite.
#pragma once

#include <string_view>

namespace fran {

enum class Mutation {
    None,
    PrecoderSignFlip,  ///< negates g[1][2] in the alignment precoders
    TheoremOffByOne,   ///< adds 1 to the fronthaul-dominant branch of the minimum NDT
};

void set_mutation(Mutation m);
Mutation active_mutation();
/// Accepts "none", "precoder-sign", "theorem-off-by-one"; throws std::invalid_argument otherwise.
Mutation parse_mutation(std::string_view name);

/// Restores the previous mutation on scope exit.
class ScopedMutation {
public:
    explicit ScopedMutation(Mutation m) : prev_(active_mutation()) { set_mutation(m); }
    ~ScopedMutation() { set_mutation(prev_); }
    ScopedMutation(const ScopedMutation&) = delete;
    ScopedMutation& operator=(const ScopedMutation&) = delete;

private:
    Mutation prev_;
};

}  // namespace fran
