#include "adaudit/voterdata.hpp"

#include <fstream>
#include <unordered_set>

#include "adaudit/csv.hpp"
#include "adaudit/errors.hpp"

namespace adaudit::voter {

const char* race_name(Race r) {
    switch (r) {
        case Race::Black: return "black";
        case Race::White: return "white";
        default: return "other";
    }
}

std::optional<Race> race_from_name(const std::string& name) {
    if (name == "black") return Race::Black;
    if (name == "white") return Race::White;
    if (name == "other") return Race::Other;
    return std::nullopt;
}

bool DmaGroup::disjoint_with(const DmaGroup& other) const {
    for (const auto& name : dma_names) {
        if (other.dma_names.count(name)) return false;
    }
    return true;
}

std::uint64_t DatasetSummary::count(const std::string& group_id, Race race) const {
    auto it = counts.find(group_id);
    if (it == counts.end()) return 0;
    return it->second[static_cast<std::size_t>(race)];
}

std::uint64_t DatasetSummary::total() const {
    std::uint64_t sum = 0;
    for (const auto& [_, arr] : counts) sum += arr[0] + arr[1] + arr[2];
    return sum;
}

void VoterSchema::validate() const {
    if (id_column.empty()) throw ConfigError("voter schema: id column not mapped");
    if (race_column.empty()) throw ConfigError("voter schema: race column not mapped");
    if (state_column.empty()) throw ConfigError("voter schema: state column not mapped");
    if (dma_column.empty() && county_column.empty()) {
        throw ConfigError("voter schema: need a dma column or a county column with dma_lookup");
    }
    if (!county_column.empty() && dma_lookup.empty()) {
        throw ConfigError("voter schema: county column requires a dma_lookup table");
    }
}

void DatasetBuilder::add(std::string record_id, Race race, const std::string& dma,
                         const std::string& state, std::string contact_key) {
    if (dma.empty()) throw ValidationError("individual " + record_id + ": empty dma");
    if (state.empty()) throw ValidationError("individual " + record_id + ": empty state");
    Individual ind;
    ind.record_id = std::move(record_id);
    ind.contact_key = contact_key.empty() ? ind.record_id : std::move(contact_key);
    ind.dma_id = intern(ds_.dma_names_, dma_ids_, dma);
    ind.state_id = intern(ds_.state_names_, state_ids_, state);
    ind.race = race;
    ds_.individuals_.push_back(std::move(ind));
}

VoterDataset DatasetBuilder::build() {
    std::unordered_set<std::string_view> seen;
    seen.reserve(ds_.individuals_.size() * 2);
    for (const auto& ind : ds_.individuals_) {
        if (!seen.insert(ind.record_id).second) {
            throw ValidationError("duplicate record_id: " + ind.record_id);
        }
    }
    return std::move(ds_);
}

std::uint32_t DatasetBuilder::intern(std::vector<std::string>& names,
                                     std::unordered_map<std::string, std::uint32_t>& ids,
                                     const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(names.size());
    names.push_back(name);
    ids.emplace(name, id);
    return id;
}

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else quoted = false;
            } else cur += c;
        } else if (c == '"') quoted = true;
        else if (c == ',') { fields.push_back(std::move(cur)); cur.clear(); }
        else cur += c;
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

IngestResult ingest_voter_file(const std::string& path, const VoterSchema& schema) {
    schema.validate();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open voter file " + path);

    std::string line;
    if (!std::getline(in, line)) throw IoError("voter file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = parse_csv_line(line);

    auto col = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    auto require = [&](const std::string& name) -> std::size_t {
        const int idx = col(name);
        if (idx < 0) throw ConfigError("voter file missing mapped column: " + name);
        return static_cast<std::size_t>(idx);
    };

    const std::size_t id_idx = require(schema.id_column);
    const std::size_t race_idx = require(schema.race_column);
    const std::size_t state_idx = require(schema.state_column);
    const bool direct_dma = !schema.dma_column.empty();
    const std::size_t region_idx = require(direct_dma ? schema.dma_column : schema.county_column);
    int contact_idx = -1;
    if (!schema.contact_key_column.empty()) {
        contact_idx = static_cast<int>(require(schema.contact_key_column));
    }

    DatasetBuilder builder;
    std::uint64_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = parse_csv_line(line);
        if (fields.size() < header.size()) {
            throw ValidationError(path + ": short row after " + std::to_string(rows) + " rows");
        }
        Race race = Race::Other;
        if (auto it = schema.race_codes.find(fields[race_idx]); it != schema.race_codes.end()) {
            race = it->second;
        }
        std::string dma;
        if (direct_dma) {
            dma = fields[region_idx];
        } else {
            auto it = schema.dma_lookup.find(fields[region_idx]);
            if (it == schema.dma_lookup.end()) {
                throw ConfigError("county not in dma_lookup: " + fields[region_idx]);
            }
            dma = it->second;
        }
        builder.add(std::move(fields[id_idx]), race, dma, fields[state_idx],
                    contact_idx >= 0 ? std::move(fields[contact_idx]) : std::string{});
        ++rows;
    }
    return IngestResult{builder.build(), rows};
}

DatasetSummary summarize(const VoterDataset& dataset, const std::vector<DmaGroup>& groups,
                         bool by_state) {
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].dma_names.empty()) {
            throw ValidationError("group " + groups[i].group_id + " has no regions");
        }
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            if (!groups[i].disjoint_with(groups[j])) {
                throw ValidationError("groups overlap: " + groups[i].group_id + " and " +
                                      groups[j].group_id);
            }
        }
    }
    DatasetSummary summary;
    for (const auto& g : groups) summary.counts[g.group_id] = {0, 0, 0};
    for (const auto& ind : dataset.individuals()) {
        const std::string& region = by_state ? dataset.state_of(ind) : dataset.dma_of(ind);
        for (const auto& g : groups) {
            if (g.contains(region)) {
                summary.counts[g.group_id][static_cast<std::size_t>(ind.race)]++;
                break;  // groups are disjoint
            }
        }
    }
    return summary;
}

void write_normalized(const VoterDataset& dataset, const std::string& path) {
    csv::Writer w(path);
    w.row({"record_id", "race", "dma", "state", "contact_key"});
    for (const auto& ind : dataset.individuals()) {
        w.row({ind.record_id, race_name(ind.race), dataset.dma_of(ind), dataset.state_of(ind),
               ind.contact_key});
    }
    w.close();
}

VoterDataset load_normalized(const std::string& path) {
    VoterSchema schema;
    schema.id_column = "record_id";
    schema.race_column = "race";
    schema.dma_column = "dma";
    schema.state_column = "state";
    schema.contact_key_column = "contact_key";
    schema.race_codes = {{"black", Race::Black}, {"white", Race::White}, {"other", Race::Other}};
    return ingest_voter_file(path, schema).dataset;
}

void write_summary_csv(const DatasetSummary& summary, const std::string& path) {
    csv::Writer w(path);
    w.row({"group_id", "race", "count"});
    for (const auto& [group, arr] : summary.counts) {
        for (Race r : {Race::Black, Race::White, Race::Other}) {
            w.row({group, race_name(r), std::to_string(arr[static_cast<std::size_t>(r)])});
        }
    }
    w.close();
}

}  // namespace adaudit::voter
