#include "heatplan/analysis.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "heatplan/csv.hpp"
#include "heatplan/errors.hpp"

namespace heatplan::analysis {

std::string to_string(Technology tech) {
    switch (tech) {
    case Technology::HN: return "HN";
    case Technology::HP: return "HP";
    case Technology::GB: return "GB";
    }
    return "GB";
}

namespace {

Technology technology_from_string(const std::string& name) {
    if (name == "HN") return Technology::HN;
    if (name == "HP") return Technology::HP;
    if (name == "GB") return Technology::GB;
    throw ValidationError("unknown technology '" + name + "'");
}

Technology technology_of(const esm::TechDecision& decision) {
    if (decision.delta_hn) {
        return Technology::HN;
    }
    if (decision.delta_hp) {
        return Technology::HP;
    }
    return Technology::GB;
}

struct ComboCounts {
    std::size_t hn = 0, hp = 0, gb = 0;
};

ComboCounts count_by_combo(std::span<const double> genome,
                           const clustering::Aggregation& aggregation) {
    ComboCounts counts;
    for (std::size_t i = 0; i < aggregation.combos.size(); ++i) {
        const auto d = esm::round_decisions(genome[3 * i], genome[3 * i + 1], genome[3 * i + 2]);
        const std::size_t n = std::size_t(aggregation.combos[i].count);
        switch (technology_of(d)) {
        case Technology::HN: counts.hn += n; break;
        case Technology::HP: counts.hp += n; break;
        case Technology::GB: counts.gb += n; break;
        }
    }
    return counts;
}

} // namespace

std::vector<BuildingAssignment> decompress(std::span<const double> genome,
                                           const clustering::Aggregation& aggregation) {
    if (genome.size() != 3 * aggregation.combos.size()) {
        throw ArgumentError("decompress: genome length does not match the aggregation");
    }
    std::vector<BuildingAssignment> combo_assignment(aggregation.combos.size());
    for (std::size_t i = 0; i < aggregation.combos.size(); ++i) {
        const auto d = esm::round_decisions(genome[3 * i], genome[3 * i + 1], genome[3 * i + 2]);
        combo_assignment[i] = {technology_of(d), d.q_pv};
    }
    std::vector<BuildingAssignment> out(aggregation.combo_of_building.size());
    for (std::size_t b = 0; b < out.size(); ++b) {
        out[b] = combo_assignment[aggregation.combo_of_building[b]];
    }
    return out;
}

namespace {

SolutionSelection make_selection(const std::string& filter, std::size_t index,
                                 const optimizer::ArchiveEntry& entry,
                                 const clustering::Aggregation& aggregation) {
    const ComboCounts counts = count_by_combo(entry.genome, aggregation);
    SolutionSelection s;
    s.filter = filter;
    s.config_id = entry.config_id;
    s.archive_index = index;
    s.n_hn = counts.hn;
    s.n_hp = counts.hp;
    s.n_gb = counts.gb;
    s.kpis = {entry.objectives[0], entry.objectives[1], entry.objectives[2]};
    return s;
}

bool better_selection(const optimizer::ArchiveEntry& a, const optimizer::ArchiveEntry& b) {
    // minimal invest, tie -> lower emissions, tie -> lower config id
    if (a.objectives[1] != b.objectives[1]) {
        return a.objectives[1] < b.objectives[1];
    }
    if (a.objectives[2] != b.objectives[2]) {
        return a.objectives[2] < b.objectives[2];
    }
    return a.config_id < b.config_id;
}

} // namespace

std::optional<SolutionSelection> select_low_invest_under_cost_cap(
    const std::vector<optimizer::ArchiveEntry>& archive,
    const clustering::Aggregation& aggregation, double cap_eur_per_pers) {
    const optimizer::ArchiveEntry* best = nullptr;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < archive.size(); ++i) {
        if (archive[i].objectives[0] >= cap_eur_per_pers) {
            continue;
        }
        if (!best || better_selection(archive[i], *best)) {
            best = &archive[i];
            best_index = i;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return make_selection("energy_costs_under_" + csv::format_double(cap_eur_per_pers), best_index,
                          *best, aggregation);
}

std::optional<SolutionSelection> select_min_shares(
    const std::vector<optimizer::ArchiveEntry>& archive,
    const clustering::Aggregation& aggregation, double min_share) {
    const double total = double(aggregation.category.size());
    const optimizer::ArchiveEntry* best = nullptr;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < archive.size(); ++i) {
        const ComboCounts counts = count_by_combo(archive[i].genome, aggregation);
        if (double(counts.hn) / total < min_share || double(counts.hp) / total < min_share) {
            continue;
        }
        if (!best || better_selection(archive[i], *best)) {
            best = &archive[i];
            best_index = i;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return make_selection("min_share_" + csv::format_double(min_share), best_index, *best,
                          aggregation);
}

std::vector<TechnologyShares> technology_share_triangle(
    const std::vector<optimizer::ArchiveEntry>& archive,
    const clustering::Aggregation& aggregation) {
    const double total = double(aggregation.category.size());
    std::vector<TechnologyShares> shares;
    shares.reserve(archive.size());
    for (const auto& entry : archive) {
        const ComboCounts counts = count_by_combo(entry.genome, aggregation);
        shares.push_back({double(counts.gb) / total, double(counts.hp) / total,
                          double(counts.hn) / total});
    }
    return shares;
}

std::vector<ConsistencyRow> consistency(const std::vector<std::vector<BuildingAssignment>>& runs) {
    if (runs.empty()) {
        throw ArgumentError("consistency: need at least one assignment");
    }
    const std::size_t n = runs.front().size();
    for (const auto& run : runs) {
        if (run.size() != n) {
            throw ArgumentError("consistency: assignments cover different building counts");
        }
    }
    std::vector<ConsistencyRow> rows;
    for (const Technology tech : {Technology::GB, Technology::HP, Technology::HN}) {
        std::size_t all_agree = 0;
        double baseline = 1.0;
        for (const auto& run : runs) {
            std::size_t count = 0;
            for (const auto& a : run) {
                count += a.technology == tech;
            }
            baseline *= double(count) / double(n);
        }
        for (std::size_t b = 0; b < n; ++b) {
            bool agree = true;
            for (const auto& run : runs) {
                agree = agree && run[b].technology == tech;
            }
            all_agree += agree;
        }
        rows.push_back({tech, double(all_agree) / double(n), baseline});
    }
    return rows;
}

void export_assignment_geojson(const geodata::Dataset& dataset,
                               const std::vector<BuildingAssignment>& assignments,
                               const std::filesystem::path& path) {
    if (dataset.buildings.size() != assignments.size()) {
        throw ArgumentError("export_assignment_geojson: assignment count mismatch");
    }
    nlohmann::json doc;
    doc["type"] = "FeatureCollection";
    auto& features = doc["features"] = nlohmann::json::array();
    for (std::size_t i = 0; i < dataset.buildings.size(); ++i) {
        const auto& b = dataset.buildings[i];
        nlohmann::json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"}, {"coordinates", {b.x_m, b.y_m}}};
        f["properties"] = {{"id", b.id},
                           {"technology", to_string(assignments[i].technology)},
                           {"pv_fraction", assignments[i].pv_fraction}};
        features.push_back(std::move(f));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << doc.dump(1) << '\n';
}

std::vector<BuildingAssignment> load_assignment_geojson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    nlohmann::json doc;
    in >> doc;
    std::vector<BuildingAssignment> out;
    for (const auto& f : doc.value("features", nlohmann::json::array())) {
        const auto& props = f.at("properties");
        out.push_back({technology_from_string(props.at("technology").get<std::string>()),
                       props.at("pv_fraction").get<double>()});
    }
    return out;
}

void export_shares_csv(const std::vector<optimizer::ArchiveEntry>& archive,
                       const std::vector<TechnologyShares>& shares,
                       const std::filesystem::path& path) {
    if (archive.size() != shares.size()) {
        throw ArgumentError("export_shares_csv: size mismatch");
    }
    std::vector<std::string> lines{"config_id,share_gb,share_hp,share_hn"};
    for (std::size_t i = 0; i < archive.size(); ++i) {
        lines.push_back(std::to_string(archive[i].config_id) + ',' +
                        csv::format_double(shares[i].gb) + ',' + csv::format_double(shares[i].hp) +
                        ',' + csv::format_double(shares[i].hn));
    }
    csv::write_lines(path, lines);
}

void export_consistency_csv(const std::vector<ConsistencyRow>& rows,
                            const std::filesystem::path& path) {
    std::vector<std::string> lines{"technology,consistent_fraction,random_baseline"};
    for (const auto& row : rows) {
        lines.push_back(to_string(row.technology) + ',' +
                        csv::format_double(row.consistent_fraction) + ',' +
                        csv::format_double(row.random_baseline));
    }
    csv::write_lines(path, lines);
}

void export_archive_csv(const std::vector<optimizer::ArchiveEntry>& archive,
                        const clustering::Aggregation& aggregation,
                        const std::filesystem::path& path) {
    std::string header = "config_id";
    for (const auto& combo : aggregation.combos) {
        const std::string tag = std::to_string(combo.category) + '_' + std::to_string(combo.group);
        header += ",q_hp_" + tag + ",q_hn_" + tag + ",q_pv_" + tag;
    }
    header += ",energy_costs_2025_eur_per_pers,invest_eur_per_pers_a,emissions_t_per_pers";
    std::vector<std::string> lines{header};
    for (const auto& entry : archive) {
        std::string line = std::to_string(entry.config_id);
        for (const double gene : entry.genome) {
            line += ',' + csv::format_double(gene);
        }
        for (const double objective : entry.objectives) {
            line += ',' + csv::format_double(objective);
        }
        lines.push_back(std::move(line));
    }
    csv::write_lines(path, lines);
}

std::vector<optimizer::ArchiveEntry> load_archive_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read_table(path);
    const std::string hint = path.filename().string();
    if (table.header.size() < 4 || table.header.front() != "config_id") {
        throw SchemaError(hint + ": not an archive file");
    }
    const std::size_t genome_length = table.header.size() - 4;
    std::vector<optimizer::ArchiveEntry> archive;
    for (const auto& row : table.rows) {
        optimizer::ArchiveEntry entry;
        entry.config_id = std::uint64_t(csv::parse_long(row[0], hint + " config_id"));
        entry.genome.reserve(genome_length);
        for (std::size_t g = 0; g < genome_length; ++g) {
            entry.genome.push_back(csv::parse_double(row[1 + g], hint + " genome"));
        }
        for (std::size_t m = 0; m < 3; ++m) {
            entry.objectives[m] =
                csv::parse_double(row[1 + genome_length + m], hint + " objectives");
        }
        archive.push_back(std::move(entry));
    }
    return archive;
}

void export_selection_csv(const std::vector<SolutionSelection>& selections,
                          const std::filesystem::path& path) {
    std::vector<std::string> lines{
        "filter,config_id,n_hn,n_hp,n_gb,"
        "energy_costs_2025_eur_per_pers,invest_eur_per_pers_a,emissions_t_per_pers"};
    for (const auto& s : selections) {
        lines.push_back(s.filter + ',' + std::to_string(s.config_id) + ',' +
                        std::to_string(s.n_hn) + ',' + std::to_string(s.n_hp) + ',' +
                        std::to_string(s.n_gb) + ',' +
                        csv::format_double(s.kpis.energy_costs_2025_eur_per_pers) + ',' +
                        csv::format_double(s.kpis.invest_eur_per_pers_a) + ',' +
                        csv::format_double(s.kpis.emissions_t_per_pers));
    }
    csv::write_lines(path, lines);
}

} // namespace heatplan::analysis
