#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "platelab/evolution.hpp"

using namespace platelab;

namespace {

const Annulus kGeom(1.0, 2.0);
const PlateConfig kCfg(0.3);
const FeedbackParams kH{2.0, 1.0, 3.0, -2.0, 0.7, 1.1};

SystemState random_state(const DiscreteGenerator& gen, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SystemState s = zero_state(gen);
    for (int i = 0; i < gen.dim; ++i) s.x(i) = cplx(unif(rng), 0.0);
    return s;
}

}  // namespace

TEST_CASE("zero state stays zero") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 8);
    const DiscreteGenerator gen = build_generator(SystemKind::System2, sp, kH, 7, 11);
    SystemState s = zero_state(gen);
    const SystemState s2 = step(s, gen, kH.tau1 / 7.0);
    CHECK(s2.x.norm() == 0.0);
    CHECK(energy_breakdown(gen, s2).total == 0.0);
}

TEST_CASE("exact-shift detection and commensurate stepping") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 4);
    const DiscreteGenerator gen = build_generator(SystemKind::System2, sp, kH, 70, 110);
    Stepper exact(gen, kH.tau1 / 70.0);
    CHECK(exact.exact_shift());
    Stepper interp(gen, 0.9 * kH.tau1 / 70.0);
    CHECK_FALSE(interp.exact_shift());
}

TEST_CASE("dissipation bound holds with zero flags under (H): System2") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 1, 16);
    const DiscreteGenerator gen = build_generator(SystemKind::System2, sp, kH, 35, 55);
    const double dt = kH.tau1 / 35.0;
    for (unsigned long long seed : {3ull, 4ull}) {
        const Trajectory traj = simulate(gen, random_state(gen, seed), dt, 1000 * dt, 0);
        REQUIRE(traj.exact_shift);
        const AuditLedger led = dissipation_audit(traj, gen);
        CHECK(led.flags == 0);
        // energy series non-increasing within the audit slack
        for (size_t k = 1; k < traj.energies.size(); ++k)
            CHECK(traj.energies[k].total <=
                  traj.energies[k - 1].total + 1e-10 * traj.energies[0].total);
    }
}

TEST_CASE("dissipation bound holds with zero flags under (H): System1") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 16);
    const DiscreteGenerator gen = build_generator(SystemKind::System1, sp, kH, 35, 55);
    const double dt = kH.tau1 / 35.0;
    const Trajectory traj = simulate(gen, random_state(gen, 9), dt, 800 * dt, 0);
    const AuditLedger led = dissipation_audit(traj, gen);
    CHECK(led.flags == 0);
}

TEST_CASE("interpolation mode only removes energy for detached feedback") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 8);
    FeedbackParams p = kH;
    const DiscreteGenerator gen = build_generator(SystemKind::System2, sp, p, 16, 16);
    // dt incommensurate with both lines
    const double dt = 0.43 * p.tau1 / 16.0;
    const Trajectory traj = simulate(gen, random_state(gen, 5), dt, 400 * dt, 0);
    CHECK_FALSE(traj.exact_shift);
    for (size_t k = 1; k < traj.energies.size(); ++k)
        CHECK(traj.energies[k].total <=
              traj.energies[k - 1].total + 1e-9 * traj.energies[0].total);
}

TEST_CASE("conservative limit: midpoint preserves energy per step") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 2, 24);
    const FeedbackParams off{1e-30, 0.0, 1e-30, 0.0, 0.7, 1.1};
    for (SystemKind kind : {SystemKind::System1, SystemKind::System2}) {
        const DiscreteGenerator gen = build_generator(kind, sp, off, 4, 4);
        SystemState s = zero_state(gen);
        // smooth plate data
        auto f = [](double r) { return (r - 1.0) * (r - 1.0) * (2.0 - r); };
        auto df = [](double r) {
            return 2.0 * (r - 1.0) * (2.0 - r) - (r - 1.0) * (r - 1.0);
        };
        s.x.segment(gen.off_u, sp.ndof) = interpolate_dofs(sp, f, df).cast<cplx>();
        Stepper st(gen, 0.005);
        const double e0 = energy_breakdown(gen, s).total;
        double prev = e0;
        for (int k = 0; k < 2000; ++k) {
            st.step(s);
            const double e = energy_breakdown(gen, s).total;
            CHECK(std::abs(e - prev) <= 1e-12 * e0);
            prev = e;
        }
    }
}

TEST_CASE("time reversal of the undamped flow recovers the initial state") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 1, 12);
    const FeedbackParams off{1e-30, 0.0, 1e-30, 0.0, 0.7, 1.1};
    const DiscreteGenerator gen = build_generator(SystemKind::System2, sp, off, 4, 4);
    SystemState s = zero_state(gen);
    auto f = [](double r) { return (r - 1.0) * (r - 1.0) * (2.0 - r) * r; };
    auto df = [](double r) {
        return (r - 1.0) * (2.0 * (2.0 - r) * r + (r - 1.0) * (2.0 - 2.0 * r));
    };
    auto g = [](double r) { return (r - 1.0) * (r - 1.0) * std::sin(r); };
    auto dg = [](double r) {
        return 2.0 * (r - 1.0) * std::sin(r) + (r - 1.0) * (r - 1.0) * std::cos(r);
    };
    s.x.segment(gen.off_u, sp.ndof) = interpolate_dofs(sp, f, df).cast<cplx>();
    s.x.segment(gen.off_v, sp.ndof) = interpolate_dofs(sp, g, dg).cast<cplx>();
    const Eigen::VectorXcd x0 = s.x;

    Stepper st(gen, 0.02);
    for (int k = 0; k < 50; ++k) st.step(s);
    s.x.segment(gen.off_v, sp.ndof) *= -1.0;  // conservative flow reverses under v -> -v
    for (int k = 0; k < 50; ++k) st.step(s);
    s.x.segment(gen.off_v, sp.ndof) *= -1.0;
    // detached lines keep collecting inflow history; the reversible dynamics
    // live in the plate blocks. Compare in the energy norm.
    Eigen::VectorXcd diff = s.x - x0;
    diff.segment(gen.off_z1, gen.n_rho1 + 1).setZero();
    diff.segment(gen.off_z2, gen.n_rho2 + 1).setZero();
    CHECK(std::sqrt(gen.hilbert_norm_sq(diff)) <= 1e-10 * std::sqrt(gen.hilbert_norm_sq(x0)));
}

TEST_CASE("exact shift conserves line content except boundary exchange") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 8);
    const DiscreteGenerator gen = build_generator(SystemKind::System2, sp, kH, 20, 20);
    SystemState s = random_state(gen, 31);
    const double dt = kH.tau1 / 20.0;
    REQUIRE(std::abs(kH.tau2 / 20.0 - dt) > 1e-12);  // line2 not commensurate alone
    // use a generator where both lines are commensurate instead
    const DiscreteGenerator gen2 = build_generator(SystemKind::System2, sp, kH, 14, 22);
    const double dt2 = kH.tau1 / 14.0;
    SystemState t = random_state(gen2, 31);
    const Eigen::VectorXcd before = t.x.segment(gen2.off_z1, gen2.n_rho1 + 1);
    Stepper st(gen2, dt2);
    const StepRecord rec = st.step(t);
    const Eigen::VectorXcd after = t.x.segment(gen2.off_z1, gen2.n_rho1 + 1);
    for (int j = 1; j <= gen2.n_rho1; ++j) CHECK(after(j) == before(j - 1));
    CHECK(after(0) == rec.eta_half);
}

TEST_CASE("audit ledger matches stated bound formula") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 8);
    const DiscreteGenerator gen = build_generator(SystemKind::System1, sp, kH, 14, 22);
    const double dt = kH.tau1 / 14.0;
    const Trajectory traj = simulate(gen, random_state(gen, 77), dt, 20 * dt, 0);
    const AuditLedger led = dissipation_audit(traj, gen);
    REQUIRE(led.entries.size() == traj.steps.size());
    const double lg = sp.ell_gamma;
    for (size_t k = 0; k < led.entries.size(); ++k) {
        const StepRecord& r = traj.steps[k];
        const double bound = -dt * (kH.beta1 - std::abs(kH.beta2)) * lg * std::norm(r.eta_half) -
                             dt * (kH.gamma1 - std::abs(kH.gamma2)) * lg * std::norm(r.xi_half);
        CHECK(led.entries[k].bound == doctest::Approx(bound).epsilon(1e-14));
        CHECK(led.entries[k].dE == doctest::Approx(r.e_after - r.e_before).epsilon(1e-14));
    }
}
