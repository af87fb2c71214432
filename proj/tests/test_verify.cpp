#include <doctest.h>

#include <sstream>

#include "fran/mutation.hpp"
#include "fran/verify.hpp"

using namespace fran;

namespace {

bool failed(const std::vector<verify::CheckResult>& rs, const std::string& module, const std::string& name_part)
{
    for (const auto& r : rs)
        if (r.module == module && r.name.find(name_part) != std::string::npos) return !r.passed;
    FAIL("no check " << module << ": " << name_part);
    return false;
}

}  // namespace

TEST_CASE("verify passes on the unmodified library")
{
    const auto rs = verify::run_all();
    CHECK(rs.size() >= 20);
    std::ostringstream os;
    CHECK(verify::report(rs, os) == 0);
    for (const auto& r : rs) CHECK_MESSAGE(r.passed, r.module << ": " << r.name << ": " << r.detail);
    CHECK(os.str().find("0 failed") != std::string::npos);
}

TEST_CASE("precoder sign flip is caught by the alignment check")
{
    ScopedMutation m(Mutation::PrecoderSignFlip);
    const auto rs = verify::run_all();
    CHECK(failed(rs, "real_ia", "alignment"));
    CHECK_FALSE(failed(rs, "ndt_formulas", "converse"));
}

TEST_CASE("theorem off-by-one is caught by the tightness check")
{
    ScopedMutation m(Mutation::TheoremOffByOne);
    const auto rs = verify::run_all();
    CHECK(failed(rs, "ndt_formulas", "achievability meets the converse"));
    CHECK_FALSE(failed(rs, "real_ia", "alignment"));
}

TEST_CASE("mutation names")
{
    CHECK(parse_mutation("none") == Mutation::None);
    CHECK(parse_mutation("precoder-sign") == Mutation::PrecoderSignFlip);
    CHECK(parse_mutation("theorem-off-by-one") == Mutation::TheoremOffByOne);
    CHECK_THROWS_AS(parse_mutation("x"), std::invalid_argument);
    {
        ScopedMutation m(Mutation::TheoremOffByOne);
        CHECK(active_mutation() == Mutation::TheoremOffByOne);
    }
    CHECK(active_mutation() == Mutation::None);
}
