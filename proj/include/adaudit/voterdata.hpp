#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace adaudit::voter {

enum class Race : std::uint8_t { Black = 0, White = 1, Other = 2 };

const char* race_name(Race r);
std::optional<Race> race_from_name(const std::string& name);

// One voter-roll record. Region names are interned in the owning dataset;
// contact_key is an opaque matching surrogate, never real PII.
struct Individual {
    std::string record_id;
    std::string contact_key;
    std::uint32_t dma_id = 0;
    std::uint32_t state_id = 0;
    Race race = Race::Other;
};

// A named group of region identifiers (DMA names, or state codes when a
// state-keyed audience is being built).
struct DmaGroup {
    std::string group_id;
    std::set<std::string> dma_names;

    bool contains(const std::string& region) const { return dma_names.count(region) > 0; }
    bool disjoint_with(const DmaGroup& other) const;
};

struct DatasetSummary {
    // group_id -> counts indexed by Race
    std::map<std::string, std::array<std::uint64_t, 3>> counts;

    std::uint64_t count(const std::string& group_id, Race race) const;
    std::uint64_t total() const;
};

// Column mapping for a raw voter extract. Region comes either from a direct
// DMA column or from a county column routed through a county->DMA table.
struct VoterSchema {
    std::string id_column;
    std::string race_column;
    std::string state_column;
    std::string dma_column;                                 // either this...
    std::string county_column;                              // ...or this + lookup
    std::string contact_key_column;                         // optional; defaults to id
    std::unordered_map<std::string, Race> race_codes;       // e.g. "B" -> Black
    std::unordered_map<std::string, std::string> dma_lookup;  // county -> DMA

    void validate() const;
};

class VoterDataset {
public:
    const std::vector<Individual>& individuals() const { return individuals_; }
    std::size_t size() const { return individuals_.size(); }

    const std::string& dma_name(std::uint32_t id) const { return dma_names_[id]; }
    const std::string& state_name(std::uint32_t id) const { return state_names_[id]; }

    const std::string& dma_of(const Individual& ind) const { return dma_names_[ind.dma_id]; }
    const std::string& state_of(const Individual& ind) const { return state_names_[ind.state_id]; }

private:
    friend class DatasetBuilder;
    std::vector<Individual> individuals_;
    std::vector<std::string> dma_names_;
    std::vector<std::string> state_names_;
};

// Single-writer construction; the finished dataset is immutable.
class DatasetBuilder {
public:
    void add(std::string record_id, Race race, const std::string& dma,
             const std::string& state, std::string contact_key = "");
    // Enforces record_id uniqueness, then freezes the dataset.
    VoterDataset build();

private:
    std::uint32_t intern(std::vector<std::string>& names,
                         std::unordered_map<std::string, std::uint32_t>& ids,
                         const std::string& name);
    VoterDataset ds_;
    std::unordered_map<std::string, std::uint32_t> dma_ids_;
    std::unordered_map<std::string, std::uint32_t> state_ids_;
};

struct IngestResult {
    VoterDataset dataset;
    std::uint64_t rows_ingested = 0;
};

// Streaming CSV ingest. Rows with race codes missing from the schema map are
// kept with race = Other.
IngestResult ingest_voter_file(const std::string& path, const VoterSchema& schema);

// Per-(group, race) counts. Groups must be pairwise disjoint; individuals in
// no group are excluded.
DatasetSummary summarize(const VoterDataset& dataset, const std::vector<DmaGroup>& groups,
                         bool by_state = false);

// Normalized-store round trip: the ingest artifact other stages consume.
void write_normalized(const VoterDataset& dataset, const std::string& path);
VoterDataset load_normalized(const std::string& path);

void write_summary_csv(const DatasetSummary& summary, const std::string& path);

}  // namespace adaudit::voter
