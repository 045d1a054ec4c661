#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "caes/bilinear.hpp"
#include "caes/milp.hpp"
#include "caes/params.hpp"

namespace caes {

struct PriceSeries {
    double dt = 1200.0;       // s
    std::vector<double> tau;  // $/MWh, one per step
};

void validate_prices(const PriceSeries& prices);

// Daily shape with high-price blocks around hours 9-12 and 18-21, sampled at
// the midpoint of each of n_t steps spread over `hours`.
PriceSeries two_peak_prices(int n_t, double dt, double base = 30.0, double peak = 80.0, double hours = 24.0);

// CSV `t,price_per_MWh`; t counts steps from 0 or 1 and must increase by one.
PriceSeries read_prices_csv(std::istream& in, double dt);
void write_prices_csv(std::ostream& out, const PriceSeries& prices);

enum class ScheduleModel { model1_mibp, model2_milp, model4_constT };

struct ScheduleOptions {
    CavernState initial;          // defaults to (46 bar, 20 C) when m_s is 0
    int segments = 8;             // most segments per PWL square
    // Per step and state equation, the PWL error allowed before a square gets
    // more segments. Squares stop at `segments` either way.
    double pwl_budget_T = 0.02;   // K
    double pwl_budget_p = 0.005;  // bar
    double rel_gap = 1e-3;
    double time_limit = 600.0;    // s
    long node_limit = -1;         // B&B nodes, -1 for none; unlike the time limit it gives repeatable runs
    bool terminal_mass = false;   // require m at the end >= m at the start
};

struct ScheduleSolution {
    double dt = 0.0;  // s
    std::vector<int> alpha, beta;
    std::vector<double> P_ch, P_dch;       // W
    std::vector<double> mdot_in, mdot_out;  // kg/s
    std::vector<CavernState> states;        // n_t + 1, states[0] is the initial state
    double objective = 0.0;                 // $
    std::string status;                     // optimal, gap-terminated, time-limit, infeasible, searched
    double gap = 0.0;
    long nodes = 0;
    double seconds = 0.0;

    size_t n_t() const { return alpha.size(); }
    std::vector<StepMode> modes() const;
};

// Variable census of the bilinear formulation before any reformulation.
struct Model1Description {
    int n_t = 0;
    int continuous = 0;
    int binary = 0;
    int bilinear_terms = 0;  // distinct continuous x continuous products
    std::vector<std::string> variable_names;
};

Model1Description describe_model1(int n_t);

// Bookkeeping for a built model so a MILP solution can be read back.
struct ScheduleModelMap {
    ScheduleModel variant = ScheduleModel::model2_milp;
    double dt = 0.0;
    CavernState initial;
    std::vector<int> alpha, beta, P_ch, P_dch;  // MW variables
    std::vector<int> m, T, p;                   // scaled state per step 1..n_t (index 0 unused, -1)
    std::vector<PwlSquare> squares;
    struct Product {
        std::string label;
        int step = 0;
        int a = -1, b = -1;         // variable indices, b == a for a square
        LinExpr expr;
        double constant = 0.0;
        double max_error = 0.0;     // in scaled product units
    };
    std::vector<Product> products;
    double p_error_bound = 0.0;     // Pa, accumulated PWL error bound on the final pressure
};

// Scaled units inside the MILP: mass 1e6 kg, temperature 100 K, pressure bar, power MW.
constexpr double mass_unit = 1e6;
constexpr double temperature_unit = 100.0;
constexpr double pressure_unit = 1e5;
constexpr double power_unit = 1e6;

// Builds model 2 or model 4. Throws std::domain_error when the bounds alone
// already make the horizon infeasible.
MILPProblem build_model(const PlantConfig& cfg, const PriceSeries& prices, ScheduleModel variant,
                        const ScheduleOptions& opt, ScheduleModelMap* map = nullptr);

ScheduleSolution solve_schedule(const PlantConfig& cfg, const PriceSeries& prices, ScheduleModel variant,
                                const ScheduleOptions& opt = {});

// Net market profit of a fixed power plan, operating costs included.
double schedule_profit(const PlantConfig& cfg, const PriceSeries& prices, const std::vector<double>& P_ch,
                       const std::vector<double>& P_dch);

// Exhaustive search over idle plus `power_levels` uniform levels of each
// power range per step, simulated with the bilinear stepper. n_t <= 8.
ScheduleSolution oracle_enumerate(const PlantConfig& cfg, const PriceSeries& prices, int power_levels,
                                  const ScheduleOptions& opt = {});

// Same search simulated with the analytical model. n_t <= 12. A node budget
// stops the search on long horizons; the status then reads "incumbent".
ScheduleSolution solve_model3_heuristic(const PlantConfig& cfg, const PriceSeries& prices, int power_levels,
                                        const ScheduleOptions& opt = {}, long node_budget = 50000000);

enum class TruthModel { bilinear, analytical };

struct StepCheck {
    int step = 0;  // 1-based
    double T = 0.0, p = 0.0, m = 0.0;
    double excursion = 0.0;  // Pa outside [p_min, p_max], 0 when inside
};

struct FeasibilityReport {
    std::vector<StepCheck> steps;
    std::vector<CavernState> states;
    double worst_excursion = 0.0;  // Pa
    int violations = 0;
    bool ok(double tolerance) const { return worst_excursion <= tolerance; }
};

FeasibilityReport verify_schedule(const ScheduleSolution& sol, const PlantConfig& cfg, TruthModel truth);

// `t,alpha,beta,P_ch_MW,P_dch_MW,mdot_kg_s,T_K,p_bar,m_kg,profit_$`; row 0 is the initial state.
void write_schedule_csv(std::ostream& out, const ScheduleSolution& sol, const PriceSeries& prices,
                        const PlantConfig& cfg);
// Reads the schedule CSV back: modes and powers from every row, the initial
// state from row 0, stored states as written. Throws std::invalid_argument
// on a malformed file or a plan that breaks the mode and power limits.
ScheduleSolution read_schedule_csv(std::istream& in, double dt, const PlantConfig& cfg);
// `step,p_bar,excursion_bar`, one row per step.
void write_violation_csv(std::ostream& out, const FeasibilityReport& rep);

}  // namespace caes
