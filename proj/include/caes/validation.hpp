#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "caes/bilinear.hpp"
#include "caes/params.hpp"

namespace caes {

struct ScenarioSpec {
    std::string label;
    double initial_p = 0.0;  // Pa
    double initial_T = 0.0;  // K
    StepMode mode;
    double duration = 0.0;  // s
    double dt = 1.0;        // s
};

struct ComparisonReport {
    double mape_p = 0.0;
    double mape_T = 0.0;  // on Kelvin values
    double mae_p = 0.0;   // Pa
    double mae_T = 0.0;   // K
    size_t n_points = 0;
};

// C1..C6, D1..D7, I1..I4 at dt = 1 s; charge and idle last 16 h, discharge 4 h.
std::vector<ScenarioSpec> table_scenarios();
ScenarioSpec find_scenario(const std::string& label);

// The three long runs used for the headline comparison.
ScenarioSpec charge_reference_scenario();
ScenarioSpec discharge_reference_scenario();
ScenarioSpec idle_reference_scenario();

void validate_scenario(const ScenarioSpec& spec);
std::vector<StepMode> scenario_modes(const ScenarioSpec& spec);

// Point-wise comparison of two equally long state lists; `ref` is the denominator for MAPE.
ComparisonReport compare_states(const std::vector<CavernState>& test, const std::vector<CavernState>& ref);

// Bilinear versus analytical from the same initial state, every step compared.
ComparisonReport run_scenario(const ScenarioSpec& spec, const PlantConfig& cfg);

// Largest relative ideal gas residual over a bilinear run of the scenario.
double max_ideal_gas_residual(const ScenarioSpec& spec, const PlantConfig& cfg);

struct IntervalRow {
    double interval = 0.0;  // s
    double T_error = 0.0;   // K, bilinear minus analytical at the final state
    double p_error = 0.0;   // Pa
    double T_rel = 0.0;     // relative to the analytical value
    double p_rel = 0.0;
};

std::vector<IntervalRow> interval_study(Mode process, const std::vector<double>& intervals, const PlantConfig& cfg);
std::vector<double> default_intervals();  // 1 s, 1, 5, 10, 20, 60 min

struct EfficiencyReport {
    double U_in = 0.0;
    double U_out = 0.0;
    double Q_wall = 0.0;
    double delta_U_cavern = 0.0;
    double efficiency = 0.0;
    // delta_U_cavern - (U_in - U_out + Q_wall)
    double closure = 0.0;
    bool closure_ok() const;
};

// Temperatures inside a step are taken as the mean of the start and end states.
EfficiencyReport efficiency_audit(const Trajectory& traj, const PlantConfig& cfg);

// One day at step dt: full-flow charging for charge_hours, rest, discharging
// the same mass over discharge_hours, rest. The two rests split what is left
// of the day. Throws std::invalid_argument when the discharge flow would
// exceed mdot_out_max or the phases do not fit in a day.
std::vector<StepMode> balanced_day_cycle(const PlantConfig& cfg, double charge_hours, double discharge_hours, double dt);

// Runs the same daily mode list `days` times, each day starting where the previous ended.
std::vector<EfficiencyReport> chained_efficiency(const CavernState& initial, const std::vector<StepMode>& day,
                                                 int days, const PlantConfig& cfg, const CoefficientSet& co);

struct MeasuredSeries {
    std::vector<double> t;  // s
    std::vector<double> p;  // Pa
    std::vector<double> T;  // K
};

// Header `t_s,p_bar,T_C`, strictly increasing time.
MeasuredSeries ingest_measurements(std::istream& in);

// Compares a series against a trajectory at timestamps that fall on the trajectory grid.
ComparisonReport compare_measurements(const MeasuredSeries& series, const Trajectory& traj);

void write_comparison_header(std::ostream& out);
void write_comparison_row(std::ostream& out, const ScenarioSpec& spec, const ComparisonReport& r);
void write_interval_csv(std::ostream& out, Mode process, const std::vector<IntervalRow>& rows);

}  // namespace caes
