#include "adaudit/audience.hpp"

#include <fstream>

#include "adaudit/csv.hpp"
#include "adaudit/errors.hpp"
#include "adaudit/rng.hpp"

#include <nlohmann/json.hpp>

namespace adaudit::audience {

using voter::DmaGroup;
using voter::Race;
using voter::VoterDataset;

const char* region_key_name(RegionKey k) {
    return k == RegionKey::Dma ? "dma" : "state";
}

RegionKey region_key_from_name(const std::string& name) {
    if (name == "dma") return RegionKey::Dma;
    if (name == "state") return RegionKey::State;
    throw ConfigError("unknown region key: " + name);
}

std::map<std::string, Race> AudiencePartition::region_race_map() const {
    std::map<std::string, Race> out;
    for (const auto& m : members) {
        auto [it, inserted] = out.emplace(m.region, m.race);
        if (!inserted && it->second != m.race) {
            throw IntegrityError("region maps to two races: " + m.region);
        }
    }
    return out;
}

void AudiencePartition::check_invariants() const {
    if (!black_group.disjoint_with(white_group)) {
        throw IntegrityError(name + ": race groups overlap");
    }
    std::uint64_t black = 0, white = 0;
    for (const auto& m : members) {
        switch (m.race) {
            case Race::Black:
                if (!black_group.contains(m.region)) {
                    throw IntegrityError(name + ": black member in region " + m.region);
                }
                ++black;
                break;
            case Race::White:
                if (!white_group.contains(m.region)) {
                    throw IntegrityError(name + ": white member in region " + m.region);
                }
                ++white;
                break;
            default:
                throw IntegrityError(name + ": member with race=other");
        }
    }
    if (black != per_race_size || white != per_race_size) {
        throw IntegrityError(name + ": per-race sizes unequal");
    }
    region_race_map();  // throws if not a function
}

namespace {

const std::string& region_of(const VoterDataset& ds, const voter::Individual& ind, RegionKey key) {
    return key == RegionKey::Dma ? ds.dma_of(ind) : ds.state_of(ind);
}

std::vector<std::size_t> eligible_indices(const VoterDataset& ds, Race race, const DmaGroup& group,
                                          RegionKey key) {
    std::vector<std::size_t> idx;
    const auto& all = ds.individuals();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].race == race && group.contains(region_of(ds, all[i], key))) {
            idx.push_back(i);
        }
    }
    return idx;
}

Member make_member(const VoterDataset& ds, std::size_t i, RegionKey key) {
    const auto& ind = ds.individuals()[i];
    return Member{ind.record_id, ind.contact_key, region_of(ds, ind, key), ind.race};
}

void require_capacity(std::size_t have, std::uint64_t need, Race race, const DmaGroup& group) {
    if (have < need) {
        throw CapacityError(std::string("need ") + std::to_string(need) + " eligible " +
                            voter::race_name(race) + " individuals in group " + group.group_id +
                            ", have " + std::to_string(have));
    }
}

}  // namespace

AudiencePartition build_partition(const VoterDataset& dataset, const DmaGroup& black_group,
                                  const DmaGroup& white_group, std::uint64_t per_race_size,
                                  std::uint64_t seed, const std::string& name, RegionKey key) {
    if (per_race_size == 0) throw ValidationError("per_race_size must be positive");
    if (!black_group.disjoint_with(white_group)) {
        throw ValidationError("race groups must be disjoint");
    }
    auto black_pool = eligible_indices(dataset, Race::Black, black_group, key);
    auto white_pool = eligible_indices(dataset, Race::White, white_group, key);
    require_capacity(black_pool.size(), per_race_size, Race::Black, black_group);
    require_capacity(white_pool.size(), per_race_size, Race::White, white_group);

    Rng rng(seed);
    AudiencePartition p;
    p.name = name;
    p.region_key = key;
    p.black_group = black_group;
    p.white_group = white_group;
    p.per_race_size = per_race_size;
    p.seed = seed;
    p.members.reserve(2 * per_race_size);
    for (std::size_t i : rng.sample_without_replacement(std::move(black_pool), per_race_size)) {
        p.members.push_back(make_member(dataset, i, key));
    }
    for (std::size_t i : rng.sample_without_replacement(std::move(white_pool), per_race_size)) {
        p.members.push_back(make_member(dataset, i, key));
    }
    return p;
}

AudiencePartition flip(const VoterDataset& dataset, const AudiencePartition& partition) {
    // Name-derived stream: flips of sibling partitions draw independently.
    const std::uint64_t flip_seed = Rng::derive(partition.seed, fnv1a64(partition.name));
    auto flipped = build_partition(dataset, partition.white_group, partition.black_group,
                                   partition.per_race_size, flip_seed, partition.name + "f",
                                   partition.region_key);
    flipped.flipped = !partition.flipped;
    return flipped;
}

std::vector<AudiencePartition> disjoint_partitions(const VoterDataset& dataset,
                                                   const DmaGroup& black_group,
                                                   const DmaGroup& white_group,
                                                   std::uint64_t per_race_size, std::uint64_t seed,
                                                   const std::string& name_prefix, std::uint64_t k,
                                                   RegionKey key) {
    if (k == 0) throw ValidationError("k must be positive");
    if (!black_group.disjoint_with(white_group)) {
        throw ValidationError("race groups must be disjoint");
    }
    auto black_pool = eligible_indices(dataset, Race::Black, black_group, key);
    auto white_pool = eligible_indices(dataset, Race::White, white_group, key);
    require_capacity(black_pool.size(), k * per_race_size, Race::Black, black_group);
    require_capacity(white_pool.size(), k * per_race_size, Race::White, white_group);

    Rng rng(seed);
    black_pool = rng.sample_without_replacement(std::move(black_pool), k * per_race_size);
    white_pool = rng.sample_without_replacement(std::move(white_pool), k * per_race_size);

    std::vector<AudiencePartition> out;
    out.reserve(k);
    for (std::uint64_t part = 0; part < k; ++part) {
        AudiencePartition p;
        p.name = name_prefix + "-" + std::to_string(part + 1);
        p.region_key = key;
        p.black_group = black_group;
        p.white_group = white_group;
        p.per_race_size = per_race_size;
        p.seed = seed;
        p.members.reserve(2 * per_race_size);
        for (std::uint64_t j = 0; j < per_race_size; ++j) {
            p.members.push_back(make_member(dataset, black_pool[part * per_race_size + j], key));
        }
        for (std::uint64_t j = 0; j < per_race_size; ++j) {
            p.members.push_back(make_member(dataset, white_pool[part * per_race_size + j], key));
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_manifest_csv(const AudiencePartition& partition, const std::string& path) {
    csv::Writer w(path);
    w.row({"contact_key", "region"});
    for (const auto& m : partition.members) {
        w.row({m.contact_key, m.region});
    }
    w.close();
}

void write_sidecar_json(const AudiencePartition& partition, const std::string& path) {
    nlohmann::json j;
    j["name"] = partition.name;
    j["region_key"] = region_key_name(partition.region_key);
    j["black_group"] = {{"group_id", partition.black_group.group_id},
                        {"names", partition.black_group.dma_names}};
    j["white_group"] = {{"group_id", partition.white_group.group_id},
                        {"names", partition.white_group.dma_names}};
    j["per_race_size"] = partition.per_race_size;
    j["flipped"] = partition.flipped;
    j["seed"] = partition.seed;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
}

AudiencePartition load_partition(const std::string& manifest_path,
                                 const std::string& sidecar_path) {
    std::ifstream in(sidecar_path);
    if (!in) throw MissingArtifactError("missing audience sidecar: " + sidecar_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(sidecar_path + ": " + e.what());
    }

    AudiencePartition p;
    p.name = j.at("name").get<std::string>();
    p.region_key = region_key_from_name(j.at("region_key").get<std::string>());
    p.black_group.group_id = j.at("black_group").at("group_id").get<std::string>();
    for (const auto& n : j.at("black_group").at("names")) {
        p.black_group.dma_names.insert(n.get<std::string>());
    }
    p.white_group.group_id = j.at("white_group").at("group_id").get<std::string>();
    for (const auto& n : j.at("white_group").at("names")) {
        p.white_group.dma_names.insert(n.get<std::string>());
    }
    p.per_race_size = j.at("per_race_size").get<std::uint64_t>();
    p.flipped = j.at("flipped").get<bool>();
    p.seed = j.at("seed").get<std::uint64_t>();

    auto table = csv::read_file(manifest_path);
    const auto ck = table.require_column("contact_key");
    const auto rg = table.require_column("region");
    p.members.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        Member m;
        m.contact_key = row[ck];
        m.record_id = row[ck];
        m.region = row[rg];
        if (p.black_group.contains(m.region)) m.race = Race::Black;
        else if (p.white_group.contains(m.region)) m.race = Race::White;
        else throw IntegrityError(p.name + ": manifest region outside both groups: " + m.region);
        p.members.push_back(std::move(m));
    }
    p.check_invariants();
    return p;
}

}  // namespace adaudit::audience
