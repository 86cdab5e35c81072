#pragma once

#include <array>
#include <span>
#include <vector>

#include "heatplan/clustering.hpp"
#include "heatplan/demand.hpp"
#include "heatplan/geodata.hpp"
#include "heatplan/solar.hpp"

namespace heatplan::esm {

struct Tariffs {
    double c_el_eur_per_kwh = 0.30;
    double c_feedin_eur_per_kwh = 0.08;
    double c_gas_eur_per_kwh = 0.10;
    double f_el_g_per_kwh = 260.0;
    double f_gas_g_per_kwh = 240.0;
    double el_emission_scaling = 0.25; ///< lifetime-average factor on f_el
    double central_cop = 8.0;          ///< waste-heat central heat pump
    double carnot_efficiency = 0.45;   ///< c_pf of decentral air-source heat pumps
    double flow_temp_k = 328.15;       ///< T_F
};

/// Rounded state of one (representative building, group) combination.
/// Exactly one of the delta flags is set; the q-hat values keep the raw
/// continuous variables as an investment floor.
struct TechDecision {
    double q_hp = 0.0;
    double q_hn = 0.0;
    double q_pv = 0.0;
    int delta_hp = 0;
    int delta_gb = 1;
    int delta_hn = 0;
    double q_hat_hp = 0.0;
    double q_hat_hn = 0.0;
};

/// delta = floor(q + 0.5) per heat option; when both round to one the larger
/// q wins (exact tie prefers the heat network); the gas boiler takes the
/// remainder; q_hat = max(q, delta) after the tie is resolved.
TechDecision round_decisions(double q_hp, double q_hn, double q_pv);

/// The three minimized objectives, each per person.
struct KpiTriple {
    double energy_costs_2025_eur_per_pers = 0.0;
    double invest_eur_per_pers_a = 0.0;
    double emissions_t_per_pers = 0.0;

    std::array<double, 3> as_array() const {
        return {energy_costs_2025_eur_per_pers, invest_eur_per_pers_a, emissions_t_per_pers};
    }
};

/// COP(t) = c_pf * T_F / (T_F - T_S(t)). Throws NumericalError if the source
/// temperature reaches the flow temperature.
std::vector<double> hp_cop_series(const solar::WeatherSeries& weather, const Tariffs& tariffs = {});

/// Annualised heat pump investment, piecewise in the peak:
/// [0,50) kW: P^0.705 * 3830.5 EUR / 20 a, [50,300): P^0.793 * 3194.6 / 20,
/// [300,inf): P^0.755 * 1352.0 / 20.
double hp_invest_annuity_eur(double peak_kw);

/// PV investment: peak kW * 1500 EUR/kW over 20 a.
double pv_invest_annuity_eur(double pv_peak_kw);

/// Heat-network connection of one building:
/// q_hat / 25 a * (peak * 13.4 EUR/kW + 13976 EUR).
double hn_connection_annuity_eur(double q_hat_hn, double peak_kw);

/// Heat-network infrastructure: length * peak^0.2029 * 432.69 EUR / 50 a
/// plus the central heat pump at hp_invest_annuity_eur(peak).
double hn_infrastructure_annuity_eur(double length_m, double central_peak_kw);

struct BuildingBalance {
    std::vector<double> el_kw;
    std::vector<double> gas_kw;
};

/// P_el = ESLP + delta_HP/COP * HSLP - q_PV * PV;  P_gas = delta_GB * HSLP.
BuildingBalance building_balance(const TechDecision& decision, std::span<const double> heat_kw,
                                 std::span<const double> el_base_kw, std::span<const double> pv_kw,
                                 std::span<const double> cop);

/// Central heat pump electricity: the N-weighted sum of connected heat
/// demands divided by the constant central COP.
std::vector<double> heat_network_power(
    const std::vector<std::pair<double, std::span<const double>>>& connected_heat_kw,
    double central_cop);

/// Energy costs of one building-year: import at c_el, export credited at
/// c_feedin, gas at c_gas; hourly left-rectangle integration.
double building_energy_cost_eur(std::span<const double> el_kw, std::span<const double> gas_kw,
                                const Tariffs& tariffs);

/// Persons of one building: max(1, round(annual_heat / denominator)).
long building_persons(double annual_heat_demand_kwh, double denominator_kwh = 15000.0);

struct EsmOptions {
    double q_inf = demand::default_q_inf;
    double persons_denominator_kwh = 15000.0;
    double electricity_annual_kwh = 2500.0; ///< household electricity per building
    bool weighted_representatives = true;   ///< footprint-weighted category means
};

/// The area energy balance model over one aggregation: precomputes the
/// representative-building series once, then evaluates KPI triples for
/// decision genomes (3 values per nonempty combo, layout matching
/// Aggregation::combos).
class EsmModel {
public:
    EsmModel(const geodata::Dataset& dataset, const clustering::Aggregation& aggregation,
             const clustering::CategoryModel& categories, const solar::WeatherSeries& weather,
             const solar::StandardRoofSet& standard, Tariffs tariffs = {}, EsmOptions options = {});

    std::size_t combo_count() const { return combos_.size(); }
    std::size_t genome_length() const { return 3 * combos_.size(); }
    double total_persons() const { return total_persons_; }
    const Tariffs& tariffs() const { return tariffs_; }
    const EsmOptions& options() const { return options_; }

    std::vector<TechDecision> decisions(std::span<const double> genome) const;

    /// Fast evaluation via per-representative breakpoint curves.
    KpiTriple evaluate(std::span<const double> genome) const;

    /// Direct series evaluation through the balance primitives; kept as the
    /// slow reference path for verification.
    KpiTriple evaluate_reference(std::span<const double> genome) const;

private:
    struct PvCostCurve {
        double const_import_kwh = 0.0; ///< terms with no PV coupling
        double import_slope_kwh = 0.0; ///< negative-PV reconstruction artifacts
        std::vector<double> ratio;     ///< sorted s/p breakpoints, p > 0
        std::vector<double> s_prefix;
        std::vector<double> p_prefix;
        double s_total = 0.0;
        double p_total = 0.0;

        double import_kwh(double q_pv) const;
        double export_kwh(double q_pv) const;
    };

    struct Representative {
        std::vector<double> heat_kw;
        std::vector<double> hp_el_kw;
        std::vector<double> pv_kw;
        double heat_sum_kwh = 0.0;
        double heat_peak_kw = 0.0;
        double pv_peak_kw = 0.0;
        PvCostCurve curve[2]; ///< indexed by delta_hp
    };

    struct ComboContext {
        int rep = 0;
        double n = 0.0;
        long n_int = 0;
        std::vector<std::array<double, 2>> member_coords;
    };

    KpiTriple finish(double energy_cost_eur, double invest_eur, double emissions_g) const;

    std::vector<double> el_base_kw_;
    double el_base_sum_kwh_ = 0.0;
    std::vector<Representative> reps_;
    std::vector<ComboContext> combos_;
    double total_persons_ = 0.0;
    Tariffs tariffs_;
    EsmOptions options_;
};

void export_kpi_csv(const std::vector<std::pair<std::uint64_t, KpiTriple>>& rows,
                    const std::filesystem::path& path);

} // namespace heatplan::esm
