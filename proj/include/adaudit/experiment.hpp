#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adaudit/audience.hpp"
#include "adaudit/catalog.hpp"
#include "adaudit/csv.hpp"

namespace adaudit::experiment {

enum class CreativeKind : std::uint8_t { Neutral, Realistic };
enum class ImageRaceTag : std::uint8_t { None, PerceivedBlack, PerceivedWhite };
enum class Objective : std::uint8_t { Traffic };

const char* creative_kind_name(CreativeKind k);
CreativeKind creative_kind_from_name(const std::string& name);
const char* image_race_tag_name(ImageRaceTag t);

struct AdCreative {
    std::string school_name;
    CreativeKind kind = CreativeKind::Neutral;
    std::string headline;
    std::string image_id;
    ImageRaceTag image_race_tag = ImageRaceTag::None;
    std::string destination_url;

    void validate() const;  // neutral creatives carry no perceived-race tag
};

struct CampaignSpec {
    std::string campaign_id;
    AdCreative creative;
    std::shared_ptr<const audience::AudiencePartition> audience;
    Objective objective = Objective::Traffic;
    double budget_usd = 50.0;
    std::uint32_t duration_hours = 24;
    bool special_ad_category = false;  // education ads are not a special category
    std::string geo_limit = "US";

    void validate() const;
};

// Two campaigns launched together, identical in everything but creative and
// destination. campaign_a advertises the skewed school; the one-sided test
// direction is fixed by this assignment.
struct PairedExperiment {
    std::string experiment_id;
    CampaignSpec campaign_a;  // skewed school
    CampaignSpec campaign_b;  // public school
    std::int64_t launch_time_epoch_s = 0;  // wall clock, sidecar metadata only
};

// Every shared-parameter mismatch between the paired campaigns. Empty means
// the pairing controls confounders as intended. Violations are data; callers
// decide whether to refuse.
std::vector<std::string> validate_pairing(const PairedExperiment& exp);

struct DeliverySnapshot {
    std::string campaign_id;
    double hour = 0.0;  // simulated hours since launch
    std::map<std::string, std::uint64_t> unique_impressions_by_region;
    std::uint64_t total_reach = 0;
    bool terminal = false;
    std::vector<std::string> integrity_warnings;

    std::uint64_t region_sum() const;
};

enum class ApprovalState : std::uint8_t { Approved, Pending, Denied };

// The pluggable delivery platform. Implementations: the biased-delivery
// simulator, a dry-run external client, and a replay client over recorded
// snapshot logs.
class PlatformClient {
public:
    virtual ~PlatformClient() = default;
    virtual std::string name() const = 0;
    virtual ApprovalState approval(const CampaignSpec& campaign) = 0;
    // Activate both campaigns of an experiment.
    virtual void begin(const PairedExperiment& exp) = 0;
    // Delivery state of one campaign at a simulated hour mark.
    virtual DeliverySnapshot fetch(const PairedExperiment& exp, const std::string& campaign_id,
                                   double hour) = 0;
};

struct RunHandle {
    PairedExperiment exp;
    PlatformClient* client = nullptr;
    bool active = false;
};

// Refuses to launch while any pairing violation exists or either campaign is
// not approved; the refusal names the offending campaign.
RunHandle launch(const PairedExperiment& exp, PlatformClient& client);

// Append-only per-experiment delivery log.
class SnapshotLog {
public:
    explicit SnapshotLog(const std::string& path);
    void append(const DeliverySnapshot& snap);
    void close();
    static std::vector<DeliverySnapshot> read(const std::string& path);
    // Latest terminal snapshot per campaign id.
    static std::map<std::string, DeliverySnapshot> terminal_by_campaign(
        const std::vector<DeliverySnapshot>& series);

private:
    std::unique_ptr<csv::Writer> writer_;
};

// Fetch both campaigns' snapshots every interval_hours of simulated time
// until the campaign duration elapses, marking the last fetch terminal.
// Transient fetch failures are retried; counts that move backwards get an
// integrity warning attached to the offending snapshot. Snapshots are
// appended to `log` when given.
std::vector<DeliverySnapshot> poll(RunHandle& run, double interval_hours = 1.0,
                                   SnapshotLog* log = nullptr);

}  // namespace adaudit::experiment
