#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaudit/experiment.hpp"
#include "adaudit/simulator.hpp"

namespace adaudit::clients {

// Full-behavior client backed by the delivery simulator.
class SimulatorClient : public experiment::PlatformClient {
public:
    explicit SimulatorClient(sim::SimConfig cfg) : cfg_(std::move(cfg)) {}

    std::string name() const override { return "simulator"; }
    experiment::ApprovalState approval(const experiment::CampaignSpec&) override {
        return experiment::ApprovalState::Approved;
    }
    void begin(const experiment::PairedExperiment& exp) override;
    experiment::DeliverySnapshot fetch(const experiment::PairedExperiment& exp,
                                       const std::string& campaign_id, double hour) override;

private:
    sim::SimConfig cfg_;
    std::optional<sim::SimRun> run_;
    std::string campaign_a_id_;
};

// Builds and serializes the platform requests without any network side
// effects. Approval states and optional canned snapshots come from fixtures.
class DryRunClient : public experiment::PlatformClient {
public:
    DryRunClient(std::string out_dir,
                 std::map<std::string, experiment::ApprovalState> approvals = {},
                 std::string fixture_snapshot_log = "");

    std::string name() const override { return "dry-run"; }
    experiment::ApprovalState approval(const experiment::CampaignSpec& campaign) override;
    void begin(const experiment::PairedExperiment& exp) override;
    experiment::DeliverySnapshot fetch(const experiment::PairedExperiment& exp,
                                       const std::string& campaign_id, double hour) override;

    const std::vector<std::string>& written_requests() const { return written_; }

private:
    std::string out_dir_;
    std::map<std::string, experiment::ApprovalState> approvals_;
    std::vector<experiment::DeliverySnapshot> fixture_;
    std::vector<std::string> written_;
};

// Feeds a recorded snapshot log back into analysis.
class ReplayClient : public experiment::PlatformClient {
public:
    explicit ReplayClient(const std::string& snapshot_log_path);

    std::string name() const override { return "replay"; }
    experiment::ApprovalState approval(const experiment::CampaignSpec&) override {
        return experiment::ApprovalState::Approved;
    }
    void begin(const experiment::PairedExperiment&) override {}
    experiment::DeliverySnapshot fetch(const experiment::PairedExperiment& exp,
                                       const std::string& campaign_id, double hour) override;

    // Terminal snapshot for a campaign; throws MissingArtifactError if the
    // log has none.
    experiment::DeliverySnapshot terminal(const std::string& campaign_id) const;
    const std::vector<experiment::DeliverySnapshot>& series() const { return series_; }

private:
    std::vector<experiment::DeliverySnapshot> series_;
    std::string path_;
};

}  // namespace adaudit::clients
