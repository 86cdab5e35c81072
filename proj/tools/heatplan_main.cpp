// heatplan: compress a building stock, search Pareto-optimal heat supply
// configurations, and decompress the result onto every building.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatplan/analysis.hpp"
#include "heatplan/clustering.hpp"
#include "heatplan/csv.hpp"
#include "heatplan/demand.hpp"
#include "heatplan/errors.hpp"
#include "heatplan/esm.hpp"
#include "heatplan/features.hpp"
#include "heatplan/geodata.hpp"
#include "heatplan/network.hpp"
#include "heatplan/optimizer.hpp"
#include "heatplan/solar.hpp"

namespace {

namespace hp = heatplan;
using std::filesystem::path;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEmptySelection = 4;

std::uint64_t fnv1a_file(const path& file) {
    std::ifstream in(file, std::ios::binary);
    std::uint64_t hash = 14695981039346656037ULL;
    char buf[4096];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= std::uint64_t(static_cast<unsigned char>(buf[i]));
            hash *= 1099511628211ULL;
        }
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

/// Machine-readable run manifest: inputs (with content hashes), parameters,
/// and the tool version. No wall-clock data, so reruns are byte-identical.
void write_manifest(const path& out_dir, const std::string& command,
                    const std::vector<path>& inputs, const nlohmann::json& parameters) {
    nlohmann::json doc;
    doc["command"] = command;
    doc["version"] = kVersion;
    doc["parameters"] = parameters;
    auto& in = doc["inputs"] = nlohmann::json::object();
    for (const auto& file : inputs) {
        in[file.string()] = hex64(fnv1a_file(file));
    }
    std::ofstream out(out_dir / ("manifest_" + command + ".json"), std::ios::binary);
    out << doc.dump(1) << '\n';
}

struct CommonPaths {
    std::string data;
    std::string weather;
    std::string out = ".";
    double latitude = 53.1;
    double longitude = 8.85;
};

hp::geodata::Dataset load_data(const std::string& data) {
    const path p(data);
    const auto format = p.extension() == ".geojson" ? hp::geodata::GeoFormat::geojson
                                                    : hp::geodata::GeoFormat::csv;
    return hp::geodata::load_dataset(p, format);
}

std::vector<double> footprints_of(const hp::geodata::Dataset& dataset) {
    std::vector<double> out;
    out.reserve(dataset.buildings.size());
    for (const auto& b : dataset.buildings) {
        out.push_back(b.footprint_m2);
    }
    return out;
}

/// Features loaded from features.csv, reordered to match the dataset.
std::vector<hp::features::FeatureVector> load_features_for(const hp::geodata::Dataset& dataset,
                                                           const std::string& file) {
    auto [ids, vectors] = hp::features::load_features_csv(file);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        index.emplace(ids[i], i);
    }
    std::vector<hp::features::FeatureVector> out;
    out.reserve(dataset.buildings.size());
    for (const auto& b : dataset.buildings) {
        const auto it = index.find(b.id);
        if (it == index.end()) {
            throw hp::ValidationError("features file is missing building '" + b.id + "'");
        }
        out.push_back(vectors[it->second]);
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"building-stock compression and Pareto heat-supply search"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "write a synthetic building dataset");
    std::uint64_t synth_seed = 1;
    std::size_t synth_n = 859;
    std::string synth_layout = "two_districts";
    std::string synth_out = ".";
    bool synth_weather = false;
    double synth_lat = 53.1, synth_lon = 8.85;
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--n", synth_n, "number of buildings");
    synth->add_option("--layout", synth_layout, "grid | two_districts")
        ->check(CLI::IsMember({"grid", "two_districts"}));
    synth->add_option("--out", synth_out, "output directory");
    synth->add_flag("--with-weather", synth_weather, "also write a clear-sky weather.csv");
    synth->add_option("--lat", synth_lat, "site latitude for --with-weather");
    synth->add_option("--lon", synth_lon, "site longitude for --with-weather");
    synth->set_config("--config");

    // ---- features ----
    auto* features_cmd = app.add_subcommand("features", "derive the five clustering indicators");
    CommonPaths feat;
    bool feat_hist = false;
    features_cmd->add_option("--data", feat.data, "buildings.csv, its directory, or .geojson")
        ->required();
    features_cmd->add_option("--weather", feat.weather, "weather.csv")->required();
    features_cmd->add_option("--out", feat.out, "output directory");
    features_cmd->add_option("--lat", feat.latitude, "site latitude");
    features_cmd->add_option("--lon", feat.longitude, "site longitude");
    features_cmd->add_flag("--hist", feat_hist, "also export binned feature histograms");
    features_cmd->set_config("--config");

    // ---- cluster ----
    auto* cluster = app.add_subcommand("cluster", "two-step aggregation into (category, group)");
    std::string cl_data, cl_features, cl_method = "kmeans_energy", cl_out = ".";
    int cl_k_reps = 5, cl_k_groups = 10, cl_mcs = 5;
    std::uint64_t cl_seed = 1;
    cluster->add_option("--data", cl_data)->required();
    cluster->add_option("--features", cl_features, "features.csv")->required();
    cluster->add_option("--method", cl_method,
                        "kmeans_geo | kmeans_energy | kprototypes | kprototypes_hdbscan | kmodes");
    cluster->add_option("--k-reps", cl_k_reps, "number of representative buildings");
    cluster->add_option("--k-groups", cl_k_groups, "number of geographical groups");
    cluster->add_option("--seed", cl_seed);
    cluster->add_option("--min-cluster-size", cl_mcs, "HDBSCAN minimum cluster size");
    cluster->add_option("--out", cl_out);
    cluster->set_config("--config");

    // ---- scan ----
    auto* scan_cmd = app.add_subcommand("scan", "sweep k_reps x k_groups over methods");
    std::string sc_data, sc_features, sc_out = ".";
    std::vector<std::string> sc_methods = {"kmeans_geo", "kmeans_energy", "kprototypes",
                                           "kprototypes_hdbscan", "kmodes"};
    int sc_reps_from = 5, sc_reps_to = 30, sc_groups_from = 5, sc_groups_to = 30, sc_mcs = 5;
    unsigned sc_threads = 0;
    std::uint64_t sc_seed = 1;
    scan_cmd->add_option("--data", sc_data)->required();
    scan_cmd->add_option("--features", sc_features)->required();
    scan_cmd->add_option("--methods", sc_methods, "subset of grouping methods")->delimiter(',');
    scan_cmd->add_option("--reps-from", sc_reps_from);
    scan_cmd->add_option("--reps-to", sc_reps_to);
    scan_cmd->add_option("--groups-from", sc_groups_from);
    scan_cmd->add_option("--groups-to", sc_groups_to);
    scan_cmd->add_option("--seed", sc_seed);
    scan_cmd->add_option("--min-cluster-size", sc_mcs);
    scan_cmd->add_option("--threads", sc_threads, "0 = hardware concurrency");
    scan_cmd->add_option("--out", sc_out);
    scan_cmd->set_config("--config");

    // ---- optimize ----
    auto* opt = app.add_subcommand("optimize", "NSGA-II search over the energy system model");
    std::string op_data, op_features, op_weather, op_aggregation, op_out = ".";
    std::uint64_t op_seed = 1;
    std::size_t op_generations = 2000, op_population = 16;
    bool op_seed_known = false, op_plain_reps = false;
    double op_lat = 53.1, op_lon = 8.85;
    hp::esm::Tariffs tariffs;
    hp::esm::EsmOptions esm_options;
    opt->add_option("--data", op_data)->required();
    opt->add_option("--features", op_features)->required();
    opt->add_option("--weather", op_weather)->required();
    opt->add_option("--aggregation", op_aggregation, "aggregation.csv")->required();
    opt->add_option("--out", op_out);
    opt->add_option("--seed", op_seed);
    opt->add_option("--generations", op_generations);
    opt->add_option("--population", op_population);
    opt->add_flag("--seed-known", op_seed_known, "inject the all-gas zero-invest genome");
    opt->add_flag("--plain-reps", op_plain_reps, "plain instead of footprint-weighted representatives");
    opt->add_option("--lat", op_lat);
    opt->add_option("--lon", op_lon);
    opt->add_option("--q-inf", esm_options.q_inf, "diversity limit for peak scaling");
    opt->add_option("--persons-kwh", esm_options.persons_denominator_kwh,
                    "annual kWh per person for the KPI denominator");
    opt->add_option("--el-annual-kwh", esm_options.electricity_annual_kwh,
                    "household electricity per building");
    opt->add_option("--c-el", tariffs.c_el_eur_per_kwh);
    opt->add_option("--c-feedin", tariffs.c_feedin_eur_per_kwh);
    opt->add_option("--c-gas", tariffs.c_gas_eur_per_kwh);
    opt->add_option("--f-el", tariffs.f_el_g_per_kwh);
    opt->add_option("--f-gas", tariffs.f_gas_g_per_kwh);
    opt->add_option("--central-cop", tariffs.central_cop);
    opt->set_config("--config");

    // ---- analyze ----
    auto* an = app.add_subcommand("analyze", "filter, select and decompress archive solutions");
    std::string an_data, an_archive, an_aggregation, an_out = ".";
    double an_cost_cap = 500.0, an_min_share = 1.0 / 3.0;
    std::vector<std::string> an_compare;
    an->add_option("--data", an_data)->required();
    an->add_option("--archive", an_archive, "archive.csv")->required();
    an->add_option("--aggregation", an_aggregation, "aggregation.csv")->required();
    an->add_option("--cost-cap", an_cost_cap, "energy-cost cap in EUR/person");
    an->add_option("--min-share", an_min_share, "minimum HN and HP building share");
    an->add_option("--compare", an_compare,
                   "assignment.geojson files for a cross-method consistency report")
        ->delimiter(',');
    an->add_option("--out", an_out);
    an->set_config("--config");

    CLI11_PARSE(app, argc, argv);

    if (*synth) {
        const auto layout = synth_layout == "grid" ? hp::geodata::SyntheticLayout::grid
                                                   : hp::geodata::SyntheticLayout::two_districts;
        const auto dataset = hp::geodata::generate_synthetic(synth_seed, synth_n, layout);
        const path out(synth_out);
        hp::geodata::export_dataset(dataset, out, hp::geodata::GeoFormat::csv);
        if (synth_weather) {
            hp::solar::save_weather_csv(hp::solar::make_clear_sky_year(synth_lat, synth_lon),
                                        out / "weather.csv");
        }
        write_manifest(out, "synth", {},
                       {{"seed", synth_seed},
                        {"n", synth_n},
                        {"layout", synth_layout},
                        {"with_weather", synth_weather}});
        std::cout << "wrote " << dataset.buildings.size() << " buildings to " << out.string()
                  << '\n';
        return 0;
    }

    if (*features_cmd) {
        const auto dataset = load_data(feat.data);
        const auto weather =
            hp::solar::load_weather_csv(feat.weather, feat.latitude, feat.longitude);
        const auto standard = hp::solar::StandardRoofSet::standard(weather);
        std::vector<std::string> ids;
        std::vector<hp::features::FeatureVector> vectors;
        for (const auto& b : dataset.buildings) {
            const auto omega = hp::solar::building_roof_weights(b, weather, standard);
            const auto day = standard.reconstruct_day_average(omega);
            ids.push_back(b.id);
            vectors.push_back(hp::features::feature_vector(b, day));
        }
        const path out(feat.out);
        std::filesystem::create_directories(out);
        hp::features::export_features_csv(ids, vectors, out / "features.csv");
        if (feat_hist) {
            constexpr int bins = 20;
            std::vector<std::string> lines{"feature,bin_low,bin_high,count"};
            const char* names[5] = {"q_heat", "p9", "p12", "p15", "c_hnc"};
            for (int d = 0; d < 5; ++d) {
                double lo = vectors.front().as_array()[d], hi = lo;
                for (const auto& v : vectors) {
                    lo = std::min(lo, v.as_array()[d]);
                    hi = std::max(hi, v.as_array()[d]);
                }
                const double width = hi > lo ? (hi - lo) / bins : 1.0;
                std::vector<int> counts(bins, 0);
                for (const auto& v : vectors) {
                    const int bin = std::min(bins - 1, int((v.as_array()[d] - lo) / width));
                    ++counts[bin];
                }
                for (int b = 0; b < bins; ++b) {
                    lines.push_back(std::string(names[d]) + ',' +
                                    hp::csv::format_double(lo + b * width) + ',' +
                                    hp::csv::format_double(lo + (b + 1) * width) + ',' +
                                    std::to_string(counts[b]));
                }
            }
            hp::csv::write_lines(out / "feature_histograms.csv", lines);
        }
        write_manifest(out, "features", {path(feat.data), path(feat.weather)},
                       {{"lat", feat.latitude}, {"lon", feat.longitude}});
        std::cout << "wrote features for " << ids.size() << " buildings\n";
        return 0;
    }

    if (*cluster) {
        const auto dataset = load_data(cl_data);
        const auto vectors = load_features_for(dataset, cl_features);
        const auto method = hp::clustering::grouping_method_from_string(cl_method);
        const auto categories =
            hp::clustering::build_categories(vectors, footprints_of(dataset), cl_k_reps, cl_seed);
        const auto aggregation = hp::clustering::group_buildings(
            method, dataset, vectors, categories, cl_k_groups, cl_seed, cl_mcs);
        const path out(cl_out);
        std::filesystem::create_directories(out);
        hp::clustering::export_aggregation_csv(dataset, aggregation, out / "aggregation.csv");
        {
            std::vector<std::string> lines{
                "category,variant,footprint_m2,q_heat,p9,p12,p15,c_hnc,members"};
            for (int c = 0; c < categories.k; ++c) {
                for (const auto* variant : {"plain", "weighted"}) {
                    const auto& rep = std::string(variant) == "plain" ? categories.plain[c]
                                                                      : categories.weighted[c];
                    const auto f = rep.specific.as_array();
                    std::string line = std::to_string(c) + ',' + variant + ',' +
                                       hp::csv::format_double(rep.footprint_m2);
                    for (const double v : f) {
                        line += ',' + hp::csv::format_double(v);
                    }
                    line += ',' + std::to_string(categories.member_count[c]);
                    lines.push_back(std::move(line));
                }
            }
            hp::csv::write_lines(out / "representatives.csv", lines);
        }
        write_manifest(out, "cluster", {path(cl_data), path(cl_features)},
                       {{"method", cl_method},
                        {"k_reps", cl_k_reps},
                        {"k_groups", cl_k_groups},
                        {"seed", cl_seed},
                        {"min_cluster_size", cl_mcs}});
        std::cout << cl_method << ": " << aggregation.combos.size() << " nonempty combos\n";
        return 0;
    }

    if (*scan_cmd) {
        const auto dataset = load_data(sc_data);
        const auto vectors = load_features_for(dataset, sc_features);
        std::vector<hp::clustering::GroupingMethod> methods;
        for (const auto& name : sc_methods) {
            methods.push_back(hp::clustering::grouping_method_from_string(name));
        }
        const auto rows = hp::clustering::scan(dataset, vectors, methods,
                                               {sc_reps_from, sc_reps_to},
                                               {sc_groups_from, sc_groups_to}, sc_seed, sc_mcs,
                                               sc_threads);
        const path out(sc_out);
        std::filesystem::create_directories(out);
        hp::clustering::export_scan_csv(rows, out / "scan.csv");
        write_manifest(out, "scan", {path(sc_data), path(sc_features)},
                       {{"methods", sc_methods},
                        {"reps", {sc_reps_from, sc_reps_to}},
                        {"groups", {sc_groups_from, sc_groups_to}},
                        {"seed", sc_seed},
                        {"min_cluster_size", sc_mcs}});
        std::cout << "scan wrote " << rows.size() << " rows\n";
        return 0;
    }

    if (*opt) {
        const auto dataset = load_data(op_data);
        const auto vectors = load_features_for(dataset, op_features);
        const auto weather = hp::solar::load_weather_csv(op_weather, op_lat, op_lon);
        const auto standard = hp::solar::StandardRoofSet::standard(weather);
        const auto aggregation = hp::clustering::load_aggregation_csv(
            dataset, op_aggregation, hp::clustering::GroupingMethod::kmeans_geo);
        const auto categories = hp::clustering::category_model_from_labels(
            vectors, footprints_of(dataset), aggregation.category);
        esm_options.weighted_representatives = !op_plain_reps;
        const hp::esm::EsmModel model(dataset, aggregation, categories, weather, standard, tariffs,
                                      esm_options);

        hp::optimizer::EvolveOptions evolve_options;
        evolve_options.population_size = op_population;
        evolve_options.generations = op_generations;
        evolve_options.seed_known_solutions = op_seed_known;
        evolve_options.log = &std::cout;
        const auto archive = hp::optimizer::evolve(
            [&](std::span<const double> genome) {
                return model.evaluate(genome).as_array();
            },
            model.combo_count(), evolve_options, op_seed);

        const path out(op_out);
        std::filesystem::create_directories(out);
        hp::analysis::export_archive_csv(archive, aggregation, out / "archive.csv");
        std::vector<std::pair<std::uint64_t, hp::esm::KpiTriple>> kpis;
        for (const auto& entry : archive) {
            kpis.emplace_back(entry.config_id,
                              hp::esm::KpiTriple{entry.objectives[0], entry.objectives[1],
                                                 entry.objectives[2]});
        }
        hp::esm::export_kpi_csv(kpis, out / "kpi.csv");
        write_manifest(out, "optimize",
                       {path(op_data), path(op_features), path(op_weather), path(op_aggregation)},
                       {{"seed", op_seed},
                        {"generations", op_generations},
                        {"population", op_population},
                        {"seed_known", op_seed_known},
                        {"weighted_reps", !op_plain_reps},
                        {"q_inf", esm_options.q_inf}});
        std::cout << "archive holds " << archive.size() << " non-dominated configurations\n";
        return 0;
    }

    if (*an) {
        const auto dataset = load_data(an_data);
        const auto aggregation = hp::clustering::load_aggregation_csv(
            dataset, an_aggregation, hp::clustering::GroupingMethod::kmeans_geo);
        const auto archive = hp::analysis::load_archive_csv(an_archive);
        const path out(an_out);
        std::filesystem::create_directories(out);

        const auto shares = hp::analysis::technology_share_triangle(archive, aggregation);
        hp::analysis::export_shares_csv(archive, shares, out / "shares.csv");

        bool missing = false;
        std::vector<hp::analysis::SolutionSelection> selections;
        const auto low_invest =
            hp::analysis::select_low_invest_under_cost_cap(archive, aggregation, an_cost_cap);
        if (low_invest) {
            selections.push_back(*low_invest);
            hp::analysis::export_assignment_geojson(
                dataset, hp::analysis::decompress(archive[low_invest->archive_index].genome,
                                                  aggregation),
                out / "assignment_cost_cap.geojson");
        } else {
            std::cerr << "no archive point has energy costs under " << an_cost_cap
                      << " EUR/person\n";
            missing = true;
        }
        const auto min_shares =
            hp::analysis::select_min_shares(archive, aggregation, an_min_share);
        if (min_shares) {
            selections.push_back(*min_shares);
            hp::analysis::export_assignment_geojson(
                dataset, hp::analysis::decompress(archive[min_shares->archive_index].genome,
                                                  aggregation),
                out / "assignment_min_shares.geojson");
        } else {
            std::cerr << "no archive point reaches a " << an_min_share
                      << " share of both heat network and heat pumps\n";
            missing = true;
        }
        hp::analysis::export_selection_csv(selections, out / "selection.csv");

        if (an_compare.size() >= 2) {
            std::vector<std::vector<hp::analysis::BuildingAssignment>> runs;
            for (const auto& file : an_compare) {
                runs.push_back(hp::analysis::load_assignment_geojson(file));
            }
            hp::analysis::export_consistency_csv(hp::analysis::consistency(runs),
                                                 out / "consistency.csv");
        }

        std::vector<path> inputs{path(an_data), path(an_archive), path(an_aggregation)};
        for (const auto& file : an_compare) {
            inputs.emplace_back(file);
        }
        write_manifest(out, "analyze", inputs,
                       {{"cost_cap", an_cost_cap}, {"min_share", an_min_share}});
        for (const auto& s : selections) {
            std::cout << s.filter << ": config " << s.config_id << " (HN " << s.n_hn << ", HP "
                      << s.n_hp << ", GB " << s.n_gb << ")\n";
        }
        return missing ? kExitEmptySelection : 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hp::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const hp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
