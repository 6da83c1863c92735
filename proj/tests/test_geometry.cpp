#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platelab/geometry.hpp"

using namespace platelab;

TEST_CASE("centered annulus satisfies MGC exactly") {
    const Annulus g(1.0, 2.0);
    const MgcReport rep = mgc_check(g, 64);
    CHECK(rep.satisfied);
    CHECK(rep.min_hnu_gamma1 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rep.max_hnu_gamma0 == doctest::Approx(-1.0).epsilon(1e-14));
    REQUIRE(rep.delta.has_value());
    CHECK(*rep.delta == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("multiplier origin outside the hole breaks MGC") {
    const Annulus g(1.0, 2.0, {0.0, 3.0});
    const MgcReport rep = mgc_check(g, 256);
    CHECK_FALSE(rep.satisfied);
    CHECK_FALSE(rep.delta.has_value());
}

TEST_CASE("delta is the reciprocal of the outer radius for centered x0") {
    const Annulus g(0.5, 1.0);
    const MgcReport rep = mgc_check(g, 64);
    REQUIRE(rep.delta.has_value());
    CHECK(*rep.delta == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sampling independence for centered x0") {
    const Annulus g(1.0, 2.0);
    const MgcReport a = mgc_check(g, 8);
    const MgcReport b = mgc_check(g, 64);
    const MgcReport c = mgc_check(g, 1024);
    CHECK(a.min_hnu_gamma1 == b.min_hnu_gamma1);
    CHECK(b.min_hnu_gamma1 == c.min_hnu_gamma1);
    CHECK(a.max_hnu_gamma0 == c.max_hnu_gamma0);
    CHECK(*a.delta == *c.delta);
}

TEST_CASE("delta times min h.nu equals one whenever satisfied") {
    for (double r1 : {1.5, 2.0, 3.7}) {
        const MgcReport rep = mgc_check(Annulus(1.0, r1), 32);
        REQUIRE(rep.satisfied);
        CHECK(*rep.delta * rep.min_hnu_gamma1 == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("degenerate radii are rejected") {
    CHECK_THROWS(Annulus(2.0, 1.0));
    CHECK_THROWS(mgc_check(Annulus(1.0, 2.0), 4));
}
