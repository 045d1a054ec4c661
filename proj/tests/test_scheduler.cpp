#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "caes/milp.hpp"
#include "caes/params.hpp"
#include "caes/scheduler.hpp"

using namespace caes;

namespace {

PriceSeries prices_of(std::vector<double> tau, double dt = 1200.0) { return PriceSeries{dt, std::move(tau)}; }

ScheduleOptions exact() {
    ScheduleOptions o;
    o.rel_gap = 0.0;
    o.time_limit = 120.0;
    return o;
}

void check_plan_invariants(const ScheduleSolution& s, const PlantConfig& cfg_in) {
    const PlantConfig cfg = resolved(cfg_in);
    REQUIRE(s.states.size() == s.n_t() + 1);
    for (size_t t = 0; t < s.n_t(); ++t) {
        CHECK(s.alpha[t] + s.beta[t] <= 1);
        CHECK(s.P_ch[t] >= s.alpha[t] * cfg.P_ch_min - 1e-6);
        CHECK(s.P_ch[t] <= s.alpha[t] * cfg.P_ch_max + 1e-6);
        CHECK(s.P_dch[t] >= s.beta[t] * cfg.P_dch_min - 1e-6);
        CHECK(s.P_dch[t] <= s.beta[t] * cfg.P_dch_max + 1e-6);
        CHECK(s.mdot_in[t] == doctest::Approx(cfg.c_Ain * s.P_ch[t]).epsilon(1e-12).scale(1.0));
        CHECK(s.mdot_out[t] == doctest::Approx(cfg.c_Aout * s.P_dch[t]).epsilon(1e-12).scale(1.0));
        CHECK(s.states[t + 1].m_s ==
              doctest::Approx(s.states[t].m_s + (s.mdot_in[t] - s.mdot_out[t]) * s.dt).epsilon(1e-15));
    }
}

}  // namespace

TEST_CASE("bilinear formulation census") {
    const Model1Description d = describe_model1(24);
    CHECK(d.continuous == 264);
    CHECK(d.binary == 48);
    CHECK(d.variable_names.size() == 312);
    CHECK(describe_model1(1).continuous == 11);
}

TEST_CASE("price validation and generator") {
    CHECK_THROWS_AS(validate_prices(prices_of({})), std::invalid_argument);
    CHECK_THROWS_AS(validate_prices(prices_of({1.0, NAN})), std::invalid_argument);
    const PriceSeries p = two_peak_prices(24, 3600.0);
    REQUIRE(p.tau.size() == 24);
    // peaks around 9-12 and 18-21
    CHECK(p.tau[10] > p.tau[3]);
    CHECK(p.tau[19] > p.tau[15]);
    CHECK(p.tau[3] == 30.0);

    std::ostringstream out;
    write_prices_csv(out, p);
    std::istringstream in(out.str());
    const PriceSeries back = read_prices_csv(in, 3600.0);
    CHECK(back.tau == p.tau);
    std::istringstream gap("t,price_per_MWh\n0,30\n2,40\n");
    CHECK_THROWS_AS(read_prices_csv(gap, 3600.0), std::invalid_argument);
}

TEST_CASE("a price between the costs leaves the plant idle") {
    const PlantConfig c = huntorf_config();
    for (double tau : {0.0, 2.9, -2.9}) {
        for (ScheduleModel m : {ScheduleModel::model2_milp, ScheduleModel::model4_constT}) {
            const ScheduleSolution s = solve_schedule(c, prices_of({tau}), m, exact());
            CHECK(s.objective == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
            CHECK(s.alpha[0] == 0);
            CHECK(s.beta[0] == 0);
        }
        CHECK(oracle_enumerate(c, prices_of({tau}), 5).objective == 0.0);
    }
}

TEST_CASE("a price below minus the charging cost pays for charging") {
    // from p_min nothing can be discharged; charging at full power earns -(tau + C_ch) per MWh
    const PlantConfig c = huntorf_config();
    const ScheduleSolution s = solve_schedule(c, prices_of({-10.0}), ScheduleModel::model2_milp, exact());
    CHECK(s.alpha[0] == 1);
    CHECK(s.objective == doctest::Approx(7.0 * 60.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("flat prices equal to the costs give zero") {
    const PlantConfig c = huntorf_config();
    const PriceSeries flat = prices_of({3.0, 3.0, 3.0});
    const ScheduleSolution s = solve_schedule(c, flat, ScheduleModel::model2_milp, exact());
    CHECK(s.objective <= 1e-6);
    CHECK(s.objective >= -1e-6);
    CHECK(oracle_enumerate(c, flat, 5).objective == 0.0);
    const ScheduleSolution idle = oracle_enumerate(c, flat, 5);
    CHECK(schedule_profit(c, flat, std::vector<double>(3, 0.0), std::vector<double>(3, 0.0)) == 0.0);
    check_plan_invariants(idle, c);
}

TEST_CASE("oracle objective is homogeneous in the prices without costs") {
    PlantConfig c = huntorf_config();
    c.C_ch = c.C_dch = 0.0;
    const PriceSeries a = prices_of({20, 25, 90, 70});
    PriceSeries b = a;
    for (double& t : b.tau) t *= 2;
    const ScheduleSolution sa = oracle_enumerate(c, a, 3), sb = oracle_enumerate(c, b, 3);
    CHECK(sb.objective == doctest::Approx(2 * sa.objective).epsilon(1e-12));
    CHECK(sa.objective > 0.0);
    check_plan_invariants(sa, c);
}

TEST_CASE("model 2 on two steps beats the coarse oracle and verifies") {
    const PlantConfig c = huntorf_config();
    const PriceSeries pr = prices_of({20, 90});
    const ScheduleSolution s = solve_schedule(c, pr, ScheduleModel::model2_milp, exact());
    const ScheduleSolution o = oracle_enumerate(c, pr, 5);
    CHECK(s.status == "optimal");
    CHECK(s.objective >= o.objective * 0.99);
    CHECK(s.objective == doctest::Approx(schedule_profit(c, pr, s.P_ch, s.P_dch)).epsilon(1e-12));
    check_plan_invariants(s, c);
    const FeasibilityReport rep = verify_schedule(s, c, TruthModel::bilinear);
    CHECK(rep.worst_excursion <= 0.1e5);
}

TEST_CASE("objective grows at least along the plan's net power") {
    // the optimum is a max of functions linear in tau with slope (P_dch - P_ch) h
    const PlantConfig c = huntorf_config();
    const PriceSeries base = prices_of({20, 90});
    const ScheduleSolution s0 = solve_schedule(c, base, ScheduleModel::model2_milp, exact());
    const double h = 1200.0 / 3600.0;
    for (size_t t = 0; t < 2; ++t)
        for (double d : {-10.0, 10.0}) {
            PriceSeries p = base;
            p.tau[t] += d;
            const ScheduleSolution s1 = solve_schedule(c, p, ScheduleModel::model2_milp, exact());
            const double slope = (s0.P_dch[t] - s0.P_ch[t]) / 1e6 * h;
            CHECK(s1.objective >= s0.objective + d * slope - 1e-6 * std::abs(s0.objective));
            if (s0.P_ch[t] == 0.0 && d > 0) CHECK(s1.objective >= s0.objective - 1e-9);
        }
}

TEST_CASE("reconstructed products stay within the encoding error") {
    const PlantConfig c = resolved(huntorf_config());
    const PriceSeries pr = prices_of({20, 90, 40});
    ScheduleModelMap map;
    const MILPProblem p = build_model(c, pr, ScheduleModel::model2_milp, exact(), &map);
    REQUIRE(!map.products.empty());
    MILPOptions o;
    o.rel_gap = 1e-4;
    o.time_limit = 60.0;
    const MILPSolution s = solve_milp(p, o);
    REQUIRE(s.has_solution);
    for (const auto& pr : map.products) {
        double v = pr.constant;
        for (auto [i, k] : pr.expr) v += k * s.values[i];
        const double truth = s.values[pr.a] * s.values[pr.b];
        CHECK(std::abs(v - truth) <= pr.max_error + 1e-7);
    }
    for (const PwlSquare& sq : map.squares) {
        double x = sq.x_constant, y = sq.constant;
        for (auto [i, k] : sq.x) x += k * s.values[i];
        for (auto [i, k] : sq.expr) y += k * s.values[i];
        CHECK(std::abs(y - x * x) <= sq.max_error() + 1e-7);
    }
}

TEST_CASE("model 4 keeps the temperature fixed") {
    const PlantConfig c = huntorf_config();
    const ScheduleSolution s = solve_schedule(c, prices_of({20, 90, 40}), ScheduleModel::model4_constT, exact());
    check_plan_invariants(s, c);
    for (const CavernState& x : s.states) CHECK(x.T_s == s.states.front().T_s);
}

TEST_CASE("model 3 search") {
    PlantConfig wide = huntorf_config();
    wide.p_min = 30e5;
    wide.p_max = 80e5;
    ScheduleOptions o;
    // starting at p_min, discharging needs a charge first
    o.initial = state_from_pT(30e5, 303.15, wide);
    const ScheduleSolution two = solve_model3_heuristic(wide, prices_of({20, 90}), 3, o);
    CHECK(two.alpha[0] == 1);
    CHECK(two.beta[1] == 1);
    CHECK(two.objective > 0.0);
    check_plan_invariants(two, wide);

    // one step: best of idle plus every discharge level, evaluated by hand
    const PlantConfig r = resolved(wide);
    const PriceSeries one = prices_of({90});
    double best = 0.0;
    for (int l = 0; l < 3; ++l) {
        const double P = r.P_dch_min + (r.P_dch_max - r.P_dch_min) * l / 2.0;
        best = std::max(best, schedule_profit(r, one, {0.0}, {P}));
    }
    ScheduleOptions mid;
    mid.initial = state_from_pT(50e5, 303.15, wide);
    CHECK(solve_model3_heuristic(wide, one, 3, mid).objective == doctest::Approx(best).epsilon(1e-12));

    PlantConfig pinched = wide;
    pinched.p_min = 50e5;
    pinched.p_max = 50e5 + 1.0;
    ScheduleOptions po;
    po.initial = state_from_pT(50e5 + 0.5, pinched.T_RW, pinched);
    const ScheduleSolution idle = solve_model3_heuristic(pinched, prices_of({20, 90}), 3, po);
    CHECK(idle.alpha == std::vector<int>{0, 0});
    CHECK(idle.beta == std::vector<int>{0, 0});
}

TEST_CASE("all-idle plan verifies clean") {
    const PlantConfig c = huntorf_config();
    ScheduleSolution s;
    s.dt = 1200.0;
    s.alpha = s.beta = {0, 0, 0, 0};
    s.P_ch = s.P_dch = s.mdot_in = s.mdot_out = {0, 0, 0, 0};
    s.states = {state_from_pT(50e5, 300.0, c)};
    const FeasibilityReport r = verify_schedule(s, c, TruthModel::bilinear);
    CHECK(r.violations == 0);
    CHECK(r.worst_excursion == 0.0);
    CHECK(r.steps.size() == 4);
    CHECK(verify_schedule(s, c, TruthModel::analytical).violations == 0);
}

TEST_CASE("verify flags a plan that drains the cavern") {
    const PlantConfig c = resolved(huntorf_config());
    ScheduleSolution s;
    s.dt = 3600.0;
    s.alpha = {0, 0};
    s.beta = {1, 1};
    s.P_ch = s.mdot_in = {0, 0};
    s.P_dch = {290e6, 290e6};
    s.mdot_out = {c.c_Aout * 290e6, c.c_Aout * 290e6};
    s.states = {state_from_pT(50e5, 313.15, c)};
    const FeasibilityReport r = verify_schedule(s, c, TruthModel::bilinear);
    CHECK(r.violations >= 1);
    CHECK(r.worst_excursion > 1e5);
    std::ostringstream out;
    write_violation_csv(out, r);
    CHECK(out.str().rfind("step,p_bar,excursion_bar\n", 0) == 0);
}

TEST_CASE("schedule csv round trip") {
    const PlantConfig c = huntorf_config();
    const PriceSeries pr = prices_of({20, 90, 40});
    const ScheduleSolution s = solve_schedule(c, pr, ScheduleModel::model4_constT, exact());
    std::ostringstream out;
    write_schedule_csv(out, s, pr, c);
    std::istringstream in(out.str());
    const ScheduleSolution r = read_schedule_csv(in, 1200.0, c);
    CHECK(r.alpha == s.alpha);
    CHECK(r.beta == s.beta);
    CHECK(r.P_ch == s.P_ch);
    CHECK(r.P_dch == s.P_dch);
    REQUIRE(r.states.size() == s.states.size());
    for (size_t i = 0; i < s.states.size(); ++i) {
        CHECK(r.states[i].m_s == s.states[i].m_s);
        CHECK(r.states[i].T_s == s.states[i].T_s);
        CHECK(r.states[i].p_s == doctest::Approx(s.states[i].p_s).epsilon(1e-15));
    }
    CHECK(r.objective == doctest::Approx(s.objective).epsilon(1e-12));

    std::ostringstream again;
    write_schedule_csv(again, r, pr, c);
    CHECK(again.str() == out.str());

    // step 1 charging and discharging at once
    std::string bad = out.str();
    const size_t row1 = bad.find("\n1,") + 1;
    REQUIRE(row1 != 0);
    bad.replace(row1, 5, "1,1,1");
    std::istringstream bin(bad);
    CHECK_THROWS_AS(read_schedule_csv(bin, 1200.0, c), std::invalid_argument);
}

TEST_CASE("horizon that the bounds cannot hold is rejected") {
    PlantConfig c = huntorf_config();
    ScheduleOptions o;
    o.initial = state_from_pT(70e5, 313.15, c);
    CHECK_THROWS(build_model(c, prices_of({30, 30}), ScheduleModel::model2_milp, o));
}
