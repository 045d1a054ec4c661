#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>

#include "caes/params.hpp"

using namespace caes;

namespace {

const char* huntorf_doc = R"(# plant
V_s = 141000 m3
A_c = 25000 m2
c_v = 718.3 J/kgK
R = 286.7 J/kgK
k = 1.4
T_RW = 40 C
T_in = 50 C
p_in = 66 bar
C_ch = 3 $/MWh
C_dch = 3 $/MWh
p_min = 46 bar
p_max = 66 bar
)";

PlantConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string without(const std::string& key) {
    std::istringstream in(huntorf_doc);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind(key + " ", 0) != 0) out += line + "\n";
    return out;
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("huntorf document parses to SI values") {
    const PlantConfig c = parse(huntorf_doc);
    CHECK(c.V_s == 141000.0);
    CHECK(c.T_RW == doctest::Approx(313.15).epsilon(1e-15));
    CHECK(c.T_in == doctest::Approx(323.15).epsilon(1e-15));
    CHECK(c.p_in == 6.6e6);
    CHECK(c.p_min == 4.6e6);
    CHECK(c.p_max == 6.6e6);
    CHECK(c.C_ch == 3.0);
}

TEST_CASE("omitted optional keys take their defaults") {
    const PlantConfig c = parse(huntorf_doc);
    CHECK(c.h_a == 0.2356);
    CHECK(c.h_b == 0.0149);
    CHECK(c.P_ch_min == 15e6);
    CHECK(c.P_dch_max == 290e6);
    CHECK(c.c_Ain == doctest::Approx(49.12 / 60e6).epsilon(1e-14));
    CHECK(c.c_Aout == doctest::Approx(189.67 / 290e6).epsilon(1e-14));
    // mid-range density p_mid / (R T_RW)
    CHECK(c.rho_av == doctest::Approx(56e5 / (286.7 * 313.15)).epsilon(1e-14));
    CHECK(c.rho_av == doctest::Approx(62.37).epsilon(1e-3));
}

TEST_CASE("file and built-in Huntorf values agree") {
    const PlantConfig a = parse(huntorf_doc), b = huntorf_config();
    CHECK(a.V_s == b.V_s);
    CHECK(a.T_RW == b.T_RW);
    CHECK(a.rho_av == b.rho_av);
    CHECK(compute_coefficients(a, 1.0).c20 == compute_coefficients(b, 1.0).c20);
}

TEST_CASE("config errors name the field") {
    CHECK(error_of(without("V_s")).find("'V_s' is missing") != std::string::npos);
    CHECK(error_of(std::string(huntorf_doc) + "V_ss = 1 m3\n").find("unknown key 'V_ss'") != std::string::npos);
    CHECK(error_of(std::string(huntorf_doc) + "h_a = 0.3\nh_a = 0.3\n").find("'h_a' given twice") != std::string::npos);
    CHECK(error_of(without("p_in") + "p_in = 66 psi\n").find("'p_in': unsupported unit") != std::string::npos);
    CHECK(error_of(without("V_s") + "V_s = -5 m3\n").find("'V_s' must be positive") != std::string::npos);
    CHECK(error_of(without("k") + "k = 0.9\n").find("'k'") != std::string::npos);
    CHECK(error_of(without("p_min") + "p_min = 70 bar\n").find("p_min") != std::string::npos);
    CHECK(error_of(std::string(huntorf_doc) + "garbage line\n").find("line") != std::string::npos);
}

TEST_CASE("load_config reports a missing file") {
    CHECK_THROWS_AS(load_config("/nonexistent/huntorf.cfg"), std::runtime_error);
}

TEST_CASE("a2 matches the Huntorf reference value") {
    const CoefficientSet co = compute_coefficients(huntorf_config(), 1.0);
    CHECK(std::abs(co.a2 / 1.04e-3 - 1.0) <= 0.01);
}

TEST_CASE("a3 equals its closed form") {
    // R^(k-1) T_in^k / (V_s^(k-1) p_in^(k-1)) from Table I literals
    const double R = 286.7, k = 1.4, T_in = 323.15, V = 141000.0, p_in = 66e5;
    const double want = std::pow(R, k - 1) * std::pow(T_in, k) / (std::pow(V, k - 1) * std::pow(p_in, k - 1));
    const CoefficientSet co = compute_coefficients(huntorf_config(), 1.0);
    CHECK(co.a3 == doctest::Approx(want).epsilon(1e-12));
    CHECK(co.a3 == doctest::Approx(0.511).epsilon(5e-3));
}

TEST_CASE("secant slopes reproduce the powers at both endpoints") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet co = compute_coefficients(c, 1.0);
    auto line = [](double slope, double x0, double e, double x) { return slope * (x - x0) + std::pow(x0, e); };
    CHECK(line(co.l1, c.mdot_in0, 0.8, c.mdot_in1) == doctest::Approx(std::pow(c.mdot_in1, 0.8)).epsilon(1e-14));
    CHECK(line(co.l2, c.mdot_in0, 1.8, c.mdot_in1) == doctest::Approx(std::pow(c.mdot_in1, 1.8)).epsilon(1e-14));
    CHECK(line(co.l3, c.mdot_out0, 0.8, c.mdot_out1) == doctest::Approx(std::pow(c.mdot_out1, 0.8)).epsilon(1e-14));
    CHECK(line(co.l4, c.mdot_out0, 1.8, c.mdot_out1) == doctest::Approx(std::pow(c.mdot_out1, 1.8)).epsilon(1e-14));
    CHECK(co.l1 == doctest::Approx((std::pow(49.12, 0.8) - std::pow(22.74, 0.8)) / (49.12 - 22.74)).epsilon(1e-14));
}

TEST_CASE("coefficient computation is a pure function") {
    const PlantConfig c = huntorf_config();
    const CoefficientSet a = compute_coefficients(c, 600.0), b = compute_coefficients(c, 600.0);
    CHECK(std::memcmp(&a, &b, sizeof(CoefficientSet)) == 0);
}

TEST_CASE("degenerate secant and bad dt are rejected") {
    PlantConfig c = huntorf_config();
    CHECK_THROWS_AS(compute_coefficients(c, 0.0), std::invalid_argument);
    c.mdot_in0 = c.mdot_in1;
    CHECK_THROWS_AS(compute_coefficients(c, 1.0), std::domain_error);
}

TEST_CASE("derived parameters") {
    const PlantConfig c = huntorf_config();
    const DerivedParams d = derive_params(c);
    CHECK(d.m_av0 == c.rho_av * c.V_s);
    CHECK(d.c_p == doctest::Approx(1005.62).epsilon(1e-12));
    CHECK(d.m_s_min < d.m_av0);
    CHECK(d.m_av0 < d.m_s_max);
}

TEST_CASE("state from pressure and temperature") {
    const PlantConfig c = huntorf_config();
    const CavernState a = state_from_pT(46e5, 293.15, c);
    CHECK(a.m_s == doctest::Approx(46e5 * 141000.0 / (286.7 * 293.15)).epsilon(1e-15));
    CHECK(a.m_s == doctest::Approx(7.717e6).epsilon(1e-4));
    const CavernState b = state_from_pT(66e5, 313.15, c);
    CHECK(b.m_s == doctest::Approx(1.0366e7).epsilon(1e-4));
    CHECK(state_from_pT(92e5, 293.15, c).m_s == 2.0 * a.m_s);
    CHECK(a.p_s == 46e5);
    CHECK(a.T_s == 293.15);
    CHECK(ideal_gas_residual(a, c) <= 1e-15);
    CHECK(a.m_s * c.R * a.T_s / c.V_s == doctest::Approx(a.p_s).epsilon(1e-12));
    CHECK_THROWS_AS(state_from_pT(0.0, 293.15, c), std::invalid_argument);
    CHECK_THROWS_AS(state_from_pT(46e5, -1.0, c), std::invalid_argument);
}

TEST_CASE("unit helpers") {
    CHECK(bar_to_pa(46.0) == 46e5);
    CHECK(pa_to_bar(46e5) == 46.0);
    CHECK(c_to_k(40.0) == 313.15);
    CHECK(k_to_c(313.15) == doctest::Approx(40.0).epsilon(1e-15));
    CHECK(parse_pressure("60bar") == 60e5);
    CHECK(parse_pressure("4.6e6 Pa") == 4.6e6);
    CHECK(parse_temperature("45C") == c_to_k(45.0));
    CHECK(parse_temperature("318.15 K") == 318.15);
    CHECK_THROWS_AS(parse_pressure("60"), std::invalid_argument);
    CHECK_THROWS_AS(parse_temperature("45F"), std::invalid_argument);
}
