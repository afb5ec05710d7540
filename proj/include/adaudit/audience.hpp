#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adaudit/voterdata.hpp"

namespace adaudit::audience {

// Region attribute used to key the race inference: DMA groups for the main
// design, whole states for the state-proxy variant.
enum class RegionKey : std::uint8_t { Dma, State };

const char* region_key_name(RegionKey k);
RegionKey region_key_from_name(const std::string& name);

// A sampled audience member. Self-contained: region is resolved at build
// time so partitions outlive the source dataset.
struct Member {
    std::string record_id;
    std::string contact_key;
    std::string region;
    voter::Race race = voter::Race::Other;
};

// An audience in which region membership uniquely determines race: Black
// members come only from black_group regions, White members only from
// white_group regions, in equal numbers.
struct AudiencePartition {
    std::string name;
    RegionKey region_key = RegionKey::Dma;
    voter::DmaGroup black_group;
    voter::DmaGroup white_group;
    std::vector<Member> members;
    std::uint64_t per_race_size = 0;
    bool flipped = false;
    std::uint64_t seed = 0;

    // Region -> race over member regions. Raises IntegrityError if any
    // region would map to both races.
    std::map<std::string, voter::Race> region_race_map() const;
    // Full-invariant check; raises IntegrityError on breach.
    void check_invariants() const;
};

// Uniform sample without replacement of per_race_size Black individuals from
// black_group and per_race_size White individuals from white_group.
// Deterministic for a given seed. Individuals with race Other are never
// eligible.
AudiencePartition build_partition(const voter::VoterDataset& dataset,
                                  const voter::DmaGroup& black_group,
                                  const voter::DmaGroup& white_group,
                                  std::uint64_t per_race_size, std::uint64_t seed,
                                  const std::string& name, RegionKey key = RegionKey::Dma);

// Fresh sample with the race/group assignment reversed; name gains an "f".
AudiencePartition flip(const voter::VoterDataset& dataset, const AudiencePartition& partition);

// k partitions with identical parameters and pairwise-disjoint members,
// named <prefix>-1 .. <prefix>-k.
std::vector<AudiencePartition> disjoint_partitions(const voter::VoterDataset& dataset,
                                                   const voter::DmaGroup& black_group,
                                                   const voter::DmaGroup& white_group,
                                                   std::uint64_t per_race_size, std::uint64_t seed,
                                                   const std::string& name_prefix, std::uint64_t k,
                                                   RegionKey key = RegionKey::Dma);

// Platform-upload view: (contact_key, region) rows, deliberately race-free.
void write_manifest_csv(const AudiencePartition& partition, const std::string& path);
// Everything else (groups, seed, sizes) goes in a JSON sidecar.
void write_sidecar_json(const AudiencePartition& partition, const std::string& path);

// Rebuild a partition from its manifest + sidecar. Race is recovered from
// region membership, which the construction makes well-defined.
AudiencePartition load_partition(const std::string& manifest_path, const std::string& sidecar_path);

}  // namespace adaudit::audience
