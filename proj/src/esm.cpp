#include "heatplan/esm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heatplan/csv.hpp"
#include "heatplan/errors.hpp"
#include "heatplan/network.hpp"

namespace heatplan::esm {

TechDecision round_decisions(double q_hp, double q_hn, double q_pv) {
    TechDecision d;
    d.q_hp = q_hp;
    d.q_hn = q_hn;
    d.q_pv = q_pv;
    d.delta_hp = int(std::floor(q_hp + 0.5));
    d.delta_hn = int(std::floor(q_hn + 0.5));
    if (d.delta_hp == 1 && d.delta_hn == 1) {
        if (q_hp > q_hn) {
            d.delta_hn = 0;
        } else {
            d.delta_hp = 0;
        }
    }
    d.delta_gb = 1 - d.delta_hp - d.delta_hn;
    d.q_hat_hp = std::max(q_hp, double(d.delta_hp));
    d.q_hat_hn = std::max(q_hn, double(d.delta_hn));
    return d;
}

std::vector<double> hp_cop_series(const solar::WeatherSeries& weather, const Tariffs& tariffs) {
    std::vector<double> cop(weather.temp_k.size(), 0.0);
    for (std::size_t i = 0; i < cop.size(); ++i) {
        const double gap = tariffs.flow_temp_k - weather.temp_k[i];
        if (gap <= 0.0) {
            throw NumericalError("hp_cop_series: source temperature reaches the flow temperature");
        }
        cop[i] = tariffs.carnot_efficiency * tariffs.flow_temp_k / gap;
    }
    return cop;
}

double hp_invest_annuity_eur(double peak_kw) {
    if (peak_kw < 0.0) {
        throw ArgumentError("hp_invest_annuity_eur: peak must be >= 0");
    }
    if (peak_kw == 0.0) {
        return 0.0;
    }
    double exponent = 0.705, constant = 3830.5;
    if (peak_kw >= 300.0) {
        exponent = 0.755;
        constant = 1352.0;
    } else if (peak_kw >= 50.0) {
        exponent = 0.793;
        constant = 3194.6;
    }
    return std::pow(peak_kw, exponent) * constant / 20.0;
}

double pv_invest_annuity_eur(double pv_peak_kw) {
    if (pv_peak_kw < 0.0) {
        throw ArgumentError("pv_invest_annuity_eur: peak must be >= 0");
    }
    return pv_peak_kw * 1500.0 / 20.0;
}

double hn_connection_annuity_eur(double q_hat_hn, double peak_kw) {
    if (peak_kw < 0.0 || q_hat_hn < 0.0) {
        throw ArgumentError("hn_connection_annuity_eur: arguments must be >= 0");
    }
    return q_hat_hn / 25.0 * (peak_kw * 13.4 + 13976.0);
}

double hn_infrastructure_annuity_eur(double length_m, double central_peak_kw) {
    if (length_m < 0.0 || central_peak_kw < 0.0) {
        throw ArgumentError("hn_infrastructure_annuity_eur: arguments must be >= 0");
    }
    const double pipe = length_m * std::pow(central_peak_kw, 0.2029) * 432.69 / 50.0;
    return pipe + hp_invest_annuity_eur(central_peak_kw);
}

BuildingBalance building_balance(const TechDecision& decision, std::span<const double> heat_kw,
                                 std::span<const double> el_base_kw, std::span<const double> pv_kw,
                                 std::span<const double> cop) {
    const std::size_t n = heat_kw.size();
    if (el_base_kw.size() != n || pv_kw.size() != n || cop.size() != n) {
        throw ArgumentError("building_balance: series length mismatch");
    }
    BuildingBalance balance;
    balance.el_kw.resize(n);
    balance.gas_kw.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        balance.el_kw[i] = el_base_kw[i] + double(decision.delta_hp) / cop[i] * heat_kw[i] -
                           decision.q_pv * pv_kw[i];
        balance.gas_kw[i] = double(decision.delta_gb) * heat_kw[i];
    }
    return balance;
}

std::vector<double> heat_network_power(
    const std::vector<std::pair<double, std::span<const double>>>& connected_heat_kw,
    double central_cop) {
    if (central_cop <= 0.0) {
        throw ArgumentError("heat_network_power: central COP must be > 0");
    }
    std::vector<double> power(solar::hours_per_year, 0.0);
    for (const auto& [count, heat] : connected_heat_kw) {
        if (heat.size() != power.size()) {
            throw ArgumentError("heat_network_power: series length mismatch");
        }
        for (std::size_t i = 0; i < power.size(); ++i) {
            power[i] += count * heat[i];
        }
    }
    for (auto& v : power) {
        v /= central_cop;
    }
    return power;
}

double building_energy_cost_eur(std::span<const double> el_kw, std::span<const double> gas_kw,
                                const Tariffs& tariffs) {
    if (el_kw.size() != gas_kw.size()) {
        throw ArgumentError("building_energy_cost_eur: series length mismatch");
    }
    double import_kwh = 0.0, export_kwh = 0.0, gas_kwh = 0.0;
    for (std::size_t i = 0; i < el_kw.size(); ++i) {
        import_kwh += std::max(el_kw[i], 0.0);
        export_kwh += -std::min(el_kw[i], 0.0);
        gas_kwh += gas_kw[i];
    }
    return tariffs.c_el_eur_per_kwh * import_kwh - tariffs.c_feedin_eur_per_kwh * export_kwh +
           tariffs.c_gas_eur_per_kwh * gas_kwh;
}

long building_persons(double annual_heat_demand_kwh, double denominator_kwh) {
    return std::max(1L, std::lround(annual_heat_demand_kwh / denominator_kwh));
}

// ---------------------------------------------------------------------------
// EsmModel
// ---------------------------------------------------------------------------

double EsmModel::PvCostCurve::import_kwh(double q_pv) const {
    const auto it = std::upper_bound(ratio.begin(), ratio.end(), q_pv);
    const std::size_t idx = std::size_t(it - ratio.begin());
    const double s_below = idx > 0 ? s_prefix[idx - 1] : 0.0;
    const double p_below = idx > 0 ? p_prefix[idx - 1] : 0.0;
    return const_import_kwh + q_pv * import_slope_kwh + (s_total - s_below) -
           q_pv * (p_total - p_below);
}

double EsmModel::PvCostCurve::export_kwh(double q_pv) const {
    const auto it = std::upper_bound(ratio.begin(), ratio.end(), q_pv);
    const std::size_t idx = std::size_t(it - ratio.begin());
    const double s_below = idx > 0 ? s_prefix[idx - 1] : 0.0;
    const double p_below = idx > 0 ? p_prefix[idx - 1] : 0.0;
    return q_pv * p_below - s_below;
}

EsmModel::EsmModel(const geodata::Dataset& dataset, const clustering::Aggregation& aggregation,
                   const clustering::CategoryModel& categories,
                   const solar::WeatherSeries& weather, const solar::StandardRoofSet& standard,
                   Tariffs tariffs, EsmOptions options)
    : tariffs_(tariffs), options_(options) {
    const std::size_t n = dataset.buildings.size();
    if (aggregation.category.size() != n || categories.labels.size() != n) {
        throw ArgumentError("EsmModel: dataset, aggregation and categories must match");
    }

    for (const auto& b : dataset.buildings) {
        total_persons_ += double(building_persons(b.annual_heat_demand_kwh,
                                                  options_.persons_denominator_kwh));
    }

    const std::vector<double> cop = hp_cop_series(weather, tariffs_);
    el_base_kw_ = demand::electricity_profile(options_.electricity_annual_kwh, weather.base_year);
    el_base_sum_kwh_ = std::accumulate(el_base_kw_.begin(), el_base_kw_.end(), 0.0);

    const auto& rep_source = options_.weighted_representatives ? categories.weighted
                                                               : categories.plain;
    reps_.resize(rep_source.size());
    for (std::size_t c = 0; c < rep_source.size(); ++c) {
        const auto& rep = rep_source[c];
        Representative& out = reps_[c];
        const double annual_heat = rep.specific.q_heat * rep.footprint_m2;
        out.heat_kw = demand::heat_profile(weather, annual_heat);
        out.heat_sum_kwh = std::accumulate(out.heat_kw.begin(), out.heat_kw.end(), 0.0);
        out.heat_peak_kw = out.heat_kw.empty()
                               ? 0.0
                               : *std::max_element(out.heat_kw.begin(), out.heat_kw.end());
        // Specific anchor potentials scale back to absolute standard-roof
        // weights through the same anchor matrix used for real roofs.
        const std::array<double, 3> rhs = {rep.specific.p9 * rep.footprint_m2,
                                           rep.specific.p12 * rep.footprint_m2,
                                           rep.specific.p15 * rep.footprint_m2};
        const std::vector<double> omega = standard.solve(rhs);
        const std::vector<double> pv_w = standard.reconstruct_series(omega);
        out.pv_kw.resize(pv_w.size());
        for (std::size_t i = 0; i < pv_w.size(); ++i) {
            out.pv_kw[i] = pv_w[i] / 1000.0;
        }
        out.pv_peak_kw = *std::max_element(out.pv_kw.begin(), out.pv_kw.end());
        out.pv_peak_kw = std::max(out.pv_peak_kw, 0.0);
        out.hp_el_kw.resize(out.heat_kw.size());
        for (std::size_t i = 0; i < out.heat_kw.size(); ++i) {
            out.hp_el_kw[i] = out.heat_kw[i] / cop[i];
        }

        for (int with_hp = 0; with_hp < 2; ++with_hp) {
            PvCostCurve& curve = out.curve[with_hp];
            struct Term {
                double ratio, s, p;
            };
            std::vector<Term> terms;
            terms.reserve(solar::hours_per_year);
            for (std::size_t i = 0; i < el_base_kw_.size(); ++i) {
                const double s = el_base_kw_[i] + (with_hp ? out.hp_el_kw[i] : 0.0);
                const double p = out.pv_kw[i];
                if (p > 0.0) {
                    terms.push_back({s / p, s, p});
                } else if (p < 0.0) {
                    curve.const_import_kwh += s;
                    curve.import_slope_kwh += -p;
                } else {
                    curve.const_import_kwh += std::max(s, 0.0);
                }
            }
            std::sort(terms.begin(), terms.end(),
                      [](const Term& a, const Term& b) { return a.ratio < b.ratio; });
            curve.ratio.reserve(terms.size());
            curve.s_prefix.reserve(terms.size());
            curve.p_prefix.reserve(terms.size());
            double s_acc = 0.0, p_acc = 0.0;
            for (const auto& term : terms) {
                s_acc += term.s;
                p_acc += term.p;
                curve.ratio.push_back(term.ratio);
                curve.s_prefix.push_back(s_acc);
                curve.p_prefix.push_back(p_acc);
            }
            curve.s_total = s_acc;
            curve.p_total = p_acc;
        }
    }

    combos_.resize(aggregation.combos.size());
    for (std::size_t i = 0; i < aggregation.combos.size(); ++i) {
        combos_[i].rep = aggregation.combos[i].category;
        combos_[i].n = double(aggregation.combos[i].count);
        combos_[i].n_int = aggregation.combos[i].count;
    }
    for (std::size_t b = 0; b < n; ++b) {
        combos_[aggregation.combo_of_building[b]].member_coords.push_back(
            {dataset.buildings[b].x_m, dataset.buildings[b].y_m});
    }
}

std::vector<TechDecision> EsmModel::decisions(std::span<const double> genome) const {
    if (genome.size() != genome_length()) {
        throw ArgumentError("EsmModel: genome length mismatch");
    }
    std::vector<TechDecision> out;
    out.reserve(combos_.size());
    for (std::size_t i = 0; i < combos_.size(); ++i) {
        out.push_back(round_decisions(genome[3 * i], genome[3 * i + 1], genome[3 * i + 2]));
    }
    return out;
}

KpiTriple EsmModel::finish(double energy_cost_eur, double invest_eur, double emissions_g) const {
    KpiTriple kpi;
    kpi.energy_costs_2025_eur_per_pers = energy_cost_eur / total_persons_;
    kpi.invest_eur_per_pers_a = invest_eur / total_persons_;
    kpi.emissions_t_per_pers = emissions_g / 1e6 / total_persons_;
    return kpi;
}

KpiTriple EsmModel::evaluate(std::span<const double> genome) const {
    const std::vector<TechDecision> decisions = this->decisions(genome);
    double energy_cost = 0.0, invest = 0.0;

    struct RepAccum {
        double n_total = 0.0, n_hp = 0.0, n_gb = 0.0, n_hn = 0.0, n_qpv = 0.0;
    };
    std::vector<RepAccum> accum(reps_.size());
    double n_connected = 0.0;
    long n_connected_int = 0;
    double hn_peak_sum_kw = 0.0;
    std::size_t connected_points = 0;

    for (std::size_t i = 0; i < combos_.size(); ++i) {
        const TechDecision& d = decisions[i];
        const ComboContext& combo = combos_[i];
        const Representative& rep = reps_[combo.rep];
        const double peak = rep.heat_peak_kw / options_.q_inf;

        const PvCostCurve& curve = rep.curve[d.delta_hp];
        const double import_kwh = curve.import_kwh(d.q_pv);
        const double export_kwh = curve.export_kwh(d.q_pv);
        const double gas_kwh = d.delta_gb ? rep.heat_sum_kwh : 0.0;
        energy_cost += combo.n * (tariffs_.c_el_eur_per_kwh * import_kwh -
                                  tariffs_.c_feedin_eur_per_kwh * export_kwh +
                                  tariffs_.c_gas_eur_per_kwh * gas_kwh);

        invest += combo.n * (d.q_hat_hp * hp_invest_annuity_eur(peak) +
                             pv_invest_annuity_eur(d.q_pv * rep.pv_peak_kw) +
                             hn_connection_annuity_eur(d.q_hat_hn, peak));

        RepAccum& a = accum[combo.rep];
        a.n_total += combo.n;
        a.n_hp += combo.n * d.delta_hp;
        a.n_gb += combo.n * d.delta_gb;
        a.n_hn += combo.n * d.delta_hn;
        a.n_qpv += combo.n * d.q_pv;
        if (d.delta_hn) {
            n_connected += combo.n;
            n_connected_int += combo.n_int;
            hn_peak_sum_kw += combo.n * peak;
            connected_points += combo.member_coords.size();
        }
    }

    // Global balances, N-weighted, plus the central heat pump share.
    std::vector<double> global_el(el_base_kw_.size(), 0.0);
    std::vector<double> global_gas(el_base_kw_.size(), 0.0);
    double total_n = 0.0;
    for (const auto& a : accum) {
        total_n += a.n_total;
    }
    for (std::size_t t = 0; t < global_el.size(); ++t) {
        global_el[t] = total_n * el_base_kw_[t];
    }
    double hn_heat_sum_kwh = 0.0;
    for (std::size_t r = 0; r < reps_.size(); ++r) {
        const RepAccum& a = accum[r];
        const Representative& rep = reps_[r];
        if (a.n_total == 0.0) {
            continue;
        }
        const double hn_over_cop = a.n_hn / tariffs_.central_cop;
        for (std::size_t t = 0; t < global_el.size(); ++t) {
            global_el[t] += a.n_hp * rep.hp_el_kw[t] - a.n_qpv * rep.pv_kw[t] +
                            hn_over_cop * rep.heat_kw[t];
            global_gas[t] += a.n_gb * rep.heat_kw[t];
        }
        hn_heat_sum_kwh += a.n_hn * rep.heat_sum_kwh;
    }
    energy_cost += tariffs_.c_el_eur_per_kwh * hn_heat_sum_kwh / tariffs_.central_cop;

    if (n_connected > 0.0) {
        std::vector<std::array<double, 2>> pts;
        pts.reserve(connected_points);
        for (std::size_t i = 0; i < combos_.size(); ++i) {
            if (decisions[i].delta_hn) {
                pts.insert(pts.end(), combos_[i].member_coords.begin(),
                           combos_[i].member_coords.end());
            }
        }
        const double length = network::mst(pts).total_length_m;
        const double central_peak =
            demand::diversity(std::size_t(n_connected_int)) * hn_peak_sum_kw;
        invest += hn_infrastructure_annuity_eur(length, central_peak);
    }

    double emissions_g = 0.0;
    for (std::size_t t = 0; t < global_el.size(); ++t) {
        emissions_g += tariffs_.f_el_g_per_kwh * tariffs_.el_emission_scaling *
                           std::max(global_el[t], 0.0) +
                       tariffs_.f_gas_g_per_kwh * global_gas[t];
    }
    return finish(energy_cost, invest, emissions_g);
}

KpiTriple EsmModel::evaluate_reference(std::span<const double> genome) const {
    const std::vector<TechDecision> decisions = this->decisions(genome);
    double energy_cost = 0.0, invest = 0.0;

    std::vector<double> global_el(el_base_kw_.size(), 0.0);
    std::vector<double> global_gas(el_base_kw_.size(), 0.0);
    std::vector<std::pair<double, std::span<const double>>> connected;
    double n_connected = 0.0;
    long n_connected_int = 0;
    double hn_peak_sum_kw = 0.0;

    // The per-combo COP dependence lives in the precomputed hp_el series, so
    // the reference balance passes cop = 1 and the hp_el series as heat.
    static const std::vector<double> unity(solar::hours_per_year, 1.0);

    for (std::size_t i = 0; i < combos_.size(); ++i) {
        const TechDecision& d = decisions[i];
        const ComboContext& combo = combos_[i];
        const Representative& rep = reps_[combo.rep];
        const double peak = rep.heat_peak_kw / options_.q_inf;

        const BuildingBalance balance =
            building_balance(d, rep.hp_el_kw, el_base_kw_, rep.pv_kw, unity);
        // gas balance must use the raw heat series, not hp_el
        std::vector<double> gas(rep.heat_kw.size(), 0.0);
        for (std::size_t t = 0; t < gas.size(); ++t) {
            gas[t] = double(d.delta_gb) * rep.heat_kw[t];
        }
        energy_cost += combo.n * building_energy_cost_eur(balance.el_kw, gas, tariffs_);
        invest += combo.n * (d.q_hat_hp * hp_invest_annuity_eur(peak) +
                             pv_invest_annuity_eur(d.q_pv * rep.pv_peak_kw) +
                             hn_connection_annuity_eur(d.q_hat_hn, peak));
        for (std::size_t t = 0; t < global_el.size(); ++t) {
            global_el[t] += combo.n * balance.el_kw[t];
            global_gas[t] += combo.n * gas[t];
        }
        if (d.delta_hn) {
            connected.emplace_back(combo.n, std::span<const double>(rep.heat_kw));
            n_connected += combo.n;
            n_connected_int += combo.n_int;
            hn_peak_sum_kw += combo.n * peak;
        }
    }

    if (!connected.empty()) {
        const std::vector<double> p_el_hn = heat_network_power(connected, tariffs_.central_cop);
        double hn_kwh = 0.0;
        for (std::size_t t = 0; t < global_el.size(); ++t) {
            global_el[t] += p_el_hn[t];
            hn_kwh += p_el_hn[t];
        }
        energy_cost += tariffs_.c_el_eur_per_kwh * hn_kwh;

        std::vector<std::array<double, 2>> pts;
        for (std::size_t i = 0; i < combos_.size(); ++i) {
            if (decisions[i].delta_hn) {
                pts.insert(pts.end(), combos_[i].member_coords.begin(),
                           combos_[i].member_coords.end());
            }
        }
        const double length = network::mst(pts).total_length_m;
        const double central_peak =
            demand::diversity(std::size_t(n_connected_int)) * hn_peak_sum_kw;
        invest += hn_infrastructure_annuity_eur(length, central_peak);
    }

    double emissions_g = 0.0;
    for (std::size_t t = 0; t < global_el.size(); ++t) {
        emissions_g += tariffs_.f_el_g_per_kwh * tariffs_.el_emission_scaling *
                           std::max(global_el[t], 0.0) +
                       tariffs_.f_gas_g_per_kwh * global_gas[t];
    }
    return finish(energy_cost, invest, emissions_g);
}

void export_kpi_csv(const std::vector<std::pair<std::uint64_t, KpiTriple>>& rows,
                    const std::filesystem::path& path) {
    std::vector<std::string> lines{
        "config_id,energy_costs_2025_eur_per_pers,invest_eur_per_pers_a,emissions_t_per_pers"};
    for (const auto& [id, kpi] : rows) {
        lines.push_back(std::to_string(id) + ',' +
                        csv::format_double(kpi.energy_costs_2025_eur_per_pers) + ',' +
                        csv::format_double(kpi.invest_eur_per_pers_a) + ',' +
                        csv::format_double(kpi.emissions_t_per_pers));
    }
    csv::write_lines(path, lines);
}

} // namespace heatplan::esm
