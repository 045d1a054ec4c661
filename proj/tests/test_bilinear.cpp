#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "caes/bilinear.hpp"
#include "caes/params.hpp"
#include "caes/reference.hpp"

using namespace caes;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

CavernState at_mass(double m, double T, const PlantConfig& c) { return {T, m * c.R * T / c.V_s, m}; }

}  // namespace

TEST_CASE("zero flow charge and discharge match idle") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 1.0);
    const CavernState s = state_from_pT(60e5, 318.15, c);
    const CavernState i = step_idle_bilinear(s, co);
    const CavernState a = step_charge_bilinear(s, 0.0, co);
    const CavernState b = step_discharge_bilinear(s, 0.0, co);
    CHECK(std::abs(a.T_s - i.T_s) <= 1e-3);
    CHECK(std::abs(a.p_s - i.p_s) <= 50.0);
    CHECK(std::abs(b.T_s - i.T_s) <= 1e-3);
    CHECK(std::abs(b.p_s - i.p_s) <= 50.0);
}

TEST_CASE("bilinear steps are exact at the expansion points") {
    const PlantConfig c = resolved(huntorf_config());
    {
        const double dt = 1.0;
        const CoefficientSet co = compute_coefficients(c, dt);
        for (double T : {293.15, 313.15, 330.0}) {
            const CavernState s = at_mass(co.m_av0, T, c);
            for (double md : {c.mdot_in0, c.mdot_in1}) {
                const CavernState b = step_charge_bilinear(s, md, co), r = step_charge_prelinear(s, md, c, dt);
                CHECK(rel(b.T_s, r.T_s) <= 1e-9);
                CHECK(rel(b.p_s, r.p_s) <= 1e-9);
            }
            for (double md : {c.mdot_out0, c.mdot_out1}) {
                const CavernState b = step_discharge_bilinear(s, md, co), r = step_discharge_prelinear(s, md, c, dt);
                CHECK(rel(b.T_s, r.T_s) <= 1e-9);
                CHECK(rel(b.p_s, r.p_s) <= 1e-9);
            }
            const CavernState b = step_idle_bilinear(s, co), r = step_idle_exact(s, c, dt);
            CHECK(rel(b.T_s, r.T_s) <= 1e-9);
            CHECK(rel(b.p_s, r.p_s) <= 1e-9);
        }
    }
}

TEST_CASE("mass bookkeeping is exact") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 600.0);
    const CavernState s = state_from_pT(55e5, 310.0, c);
    for (double md : {0.0, 10.0, 22.74, 49.12}) CHECK(step_charge_bilinear(s, md, co).m_s == s.m_s + md * 600.0);
    for (double md : {0.0, 90.97, 189.67}) CHECK(step_discharge_bilinear(s, md, co).m_s == s.m_s - md * 600.0);
    CHECK(step_idle_bilinear(s, co).m_s == s.m_s);

    const std::vector<StepMode> modes = {StepMode::charge(30.0), StepMode::idle(), StepMode::discharge(150.0),
                                         StepMode::charge(49.12), StepMode::idle()};
    const Trajectory tr = simulate(s, modes, c, co, Model::bilinear);
    double m = s.m_s;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double dm = modes[i].mode == Mode::charge ? modes[i].mdot * 600.0
                          : modes[i].mode == Mode::discharge ? -modes[i].mdot * 600.0
                                                             : 0.0;
        CHECK(tr.states[i].m_s == m + dm);
        m = tr.states[i].m_s;
    }
}

TEST_CASE("idle fixed point and decay") {
    const PlantConfig c = resolved(huntorf_config());
    const CoefficientSet co = compute_coefficients(c, 1.0);
    const CavernState eq = at_mass(co.m_av0, c.T_RW, c);
    CHECK(rel(step_idle_bilinear(eq, co).T_s, c.T_RW) <= 1e-9);
    CHECK(step_idle_exact(eq, c, 1.0).T_s == c.T_RW);

    // closed form of the exponential decay
    const CavernState hot = state_from_pT(60e5, 330.0, c);
    const double want = (330.0 - c.T_RW) * std::exp(-c.h_a * 1000.0 / (c.rho_av * c.c_v)) + c.T_RW;
    CHECK(step_idle_exact(hot, c, 1000.0).T_s == doctest::Approx(want).epsilon(1e-13));

    double prev = hot.T_s;
    for (double dt : {1e3, 1e4, 1e5, 1e6, 1e7}) {
        const double T = step_idle_exact(hot, c, dt).T_s;
        CHECK(T < prev);
        CHECK(T >= c.T_RW);
        prev = T;
    }
    CHECK(prev == doctest::Approx(c.T_RW).epsilon(1e-9));
}

TEST_CASE("idle steppers move T toward the wall temperature") {
    const PlantConfig c = resolved(huntorf_config());
    const CoefficientSet co = compute_coefficients(c, 60.0);
    for (double T : {285.0, 300.0, 313.0, 313.3, 325.0, 333.0})
        for (double p : {46e5, 56e5, 66e5}) {
            const CavernState s = state_from_pT(p, T, c);
            const double want = T < c.T_RW ? 1.0 : -1.0;
            CHECK((step_idle_bilinear(s, co).T_s - T) * want > 0.0);
            CHECK((step_idle_exact(s, c, 60.0).T_s - T) * want > 0.0);
        }
}

TEST_CASE("prelinear charge at zero flow is pure heat-transfer drift") {
    const PlantConfig c = resolved(huntorf_config());
    const CavernState s = state_from_pT(50e5, 300.0, c);
    const double dt = 10.0;
    const double want = 300.0 + c.h_a * (c.T_RW - 300.0) * dt / (c.rho_av * c.c_v);
    CHECK(step_charge_prelinear(s, 0.0, c, dt).T_s == doctest::Approx(want).epsilon(1e-14));
    CHECK(step_discharge_prelinear(s, 0.0, c, dt).T_s == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("adiabatic identities") {
    const PlantConfig c = huntorf_config();
    const CavernState s = state_from_pT(55e5, 305.0, c);
    for (AdiabaticForm f : {AdiabaticForm::exact, AdiabaticForm::linearized}) {
        const CavernState a = adiabatic_charge(s, 0.0, 60.0, f, c), b = adiabatic_discharge(s, 0.0, 60.0, f, c);
        CHECK(a.p_s == s.p_s);
        CHECK(a.T_s == s.T_s);
        CHECK(b.p_s == s.p_s);
        CHECK(b.T_s == s.T_s);
        for (double md : {1.0, 20.0, 49.12}) CHECK(adiabatic_charge(s, md, 60.0, f, c).p_s > s.p_s);
    }
}

TEST_CASE("exact adiabatic discharge matches its closed form and composes") {
    const PlantConfig c = huntorf_config();
    const CavernState s = state_from_pT(60e5, 313.15, c);
    const double k = 1.4;
    const CavernState one = adiabatic_discharge(s, 100.0, 3600.0, AdiabaticForm::exact, c);
    const double r = 1.0 - 100.0 * 3600.0 / s.m_s;
    CHECK(rel(one.p_s, std::pow(r, k) * s.p_s) <= 1e-14);
    CHECK(rel(one.T_s, std::pow(r, k - 1) * s.T_s) <= 1e-14);

    const CavernState h1 = adiabatic_discharge(s, 100.0, 1000.0, AdiabaticForm::exact, c);
    const CavernState h2 = adiabatic_discharge(h1, 100.0, 2600.0, AdiabaticForm::exact, c);
    CHECK(rel(h2.p_s, one.p_s) <= 1e-12);
    CHECK(rel(h2.T_s, one.T_s) <= 1e-12);
    CHECK_THROWS_AS(adiabatic_discharge(s, 189.67, 1e6, AdiabaticForm::exact, c), std::domain_error);
}

TEST_CASE("exact and linearized adiabatic forms agree for small steps") {
    const PlantConfig c = huntorf_config();
    for (double p : {46e5, 56e5, 66e5}) {
        const CavernState s = state_from_pT(p, 313.15, c);
        const double dt = 1.0, md = 1e-3 * s.m_s / dt;
        const CavernState ce = adiabatic_charge(s, md, dt, AdiabaticForm::exact, c);
        const CavernState cl = adiabatic_charge(s, md, dt, AdiabaticForm::linearized, c);
        CHECK(rel(cl.p_s, ce.p_s) <= 1e-5);
        CHECK(rel(cl.T_s, ce.T_s) <= 1e-5);
        const CavernState de = adiabatic_discharge(s, md, dt, AdiabaticForm::exact, c);
        const CavernState dl = adiabatic_discharge(s, md, dt, AdiabaticForm::linearized, c);
        CHECK(rel(dl.p_s, de.p_s) <= 1e-5);
        CHECK(rel(dl.T_s, de.T_s) <= 1e-5);
    }
}

TEST_CASE("wall heat raises a cold charge and cools a hot one") {
    const PlantConfig c = resolved(huntorf_config());
    const double dt = 60.0;
    for (double md : {10.0, 49.12}) {
        const CavernState cold = state_from_pT(50e5, 290.0, c), hot = state_from_pT(50e5, 330.0, c);
        CHECK(step_charge_prelinear(cold, md, c, dt).T_s > adiabatic_charge(cold, md, dt, AdiabaticForm::exact, c).T_s);
        CHECK(step_charge_prelinear(hot, md, c, dt).T_s < adiabatic_charge(hot, md, dt, AdiabaticForm::exact, c).T_s);
    }
}

TEST_CASE("dispatch equals manual composition") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 60.0);
    const CavernState s = state_from_pT(56e5, 310.0, c);
    const std::vector<StepMode> modes = {StepMode::charge(40.0), StepMode::idle(), StepMode::discharge(120.0)};
    const Trajectory tr = simulate(s, modes, c, co, Model::bilinear, 60.0);
    const CavernState a = step_charge_bilinear(s, 40.0, co);
    const CavernState b = step_idle_bilinear(a, co);
    const CavernState d = step_discharge_bilinear(b, 120.0, co);
    REQUIRE(tr.states.size() == 3);
    CHECK(tr.states[0].T_s == a.T_s);
    CHECK(tr.states[1].p_s == b.p_s);
    CHECK(tr.states[2].T_s == d.T_s);
    CHECK(tr.states[2].p_s == d.p_s);

    const Trajectory ta = simulate(s, modes, c, co, Model::analytical);
    CHECK(ta.states[2].T_s == analytical_step(analytical_step(analytical_step(s, modes[0], c, 60.0), modes[1], c, 60.0),
                                              modes[2], c, 60.0)
                                  .T_s);
}

TEST_CASE("all-idle schedule keeps the mass") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 1.0);
    const CavernState s = state_from_pT(60e5, 318.15, c);
    const Trajectory tr = simulate(s, std::vector<StepMode>(500, StepMode::idle()), c, co, Model::bilinear);
    for (const CavernState& x : tr.states) CHECK(x.m_s == s.m_s);
}

TEST_CASE("precondition violations are domain errors") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 1.0);
    const CavernState s = state_from_pT(60e5, 318.15, c);
    CHECK_THROWS_AS(step_charge_bilinear(s, -1.0, co), std::domain_error);
    CHECK_THROWS_AS(step_charge_bilinear(s, 60.0, co), std::domain_error);
    CHECK_THROWS_AS(step_discharge_bilinear(s, 200.0, co), std::domain_error);
    CHECK_THROWS_AS(step_idle_bilinear({318.15, 1e5, 1000.0}, co), std::domain_error);
    CHECK_THROWS_AS(simulate(s, {}, c, co, Model::bilinear), std::invalid_argument);
    CHECK_THROWS_AS(simulate(s, {StepMode::idle()}, c, co, Model::bilinear, 2.0), std::invalid_argument);
    try {
        simulate(s, {StepMode::idle(), StepMode::charge(500.0)}, c, co, Model::bilinear);
        FAIL("expected a domain error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_model("quadratic"), std::invalid_argument);
    CHECK(parse_model("bilinear") == Model::bilinear);
}

TEST_CASE("trajectory csv") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 1.0);
    const CavernState s = state_from_pT(60e5, 318.15, c);
    const Trajectory tr = simulate(s, std::vector<StepMode>(5, StepMode::charge(10.0)), c, co, Model::bilinear);
    std::ostringstream a, b;
    write_trajectory_csv(a, tr);
    write_trajectory_csv(b, tr, 2, "bilinear");
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_s,mode,mdot_kg_s,T_K,p_Pa,m_kg");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
    CHECK(b.str().substr(0, b.str().find('\n')) == "t_s,mode,mdot_kg_s,T_K,p_Pa,m_kg,model");
    CHECK_THROWS_AS(write_trajectory_csv(a, tr, 0), std::invalid_argument);
}
