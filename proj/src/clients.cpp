#include "adaudit/clients.hpp"

#include <filesystem>
#include <fstream>

#include "adaudit/errors.hpp"

#include <nlohmann/json.hpp>

namespace adaudit::clients {

namespace fs = std::filesystem;
using experiment::ApprovalState;
using experiment::DeliverySnapshot;
using experiment::PairedExperiment;

void SimulatorClient::begin(const PairedExperiment& exp) {
    run_ = sim::simulate_run(exp, cfg_, cfg_.seed);
    campaign_a_id_ = exp.campaign_a.campaign_id;
}

DeliverySnapshot SimulatorClient::fetch(const PairedExperiment& exp,
                                        const std::string& campaign_id, double hour) {
    if (!run_) throw PlatformError("simulator: no active run", false);
    const bool is_a = campaign_id == campaign_a_id_;
    if (!is_a && campaign_id != exp.campaign_b.campaign_id) {
        throw PlatformError("simulator: unknown campaign " + campaign_id, false);
    }
    return sim::snapshot_at(*run_, is_a, campaign_id, hour, false);
}

DryRunClient::DryRunClient(std::string out_dir,
                           std::map<std::string, ApprovalState> approvals,
                           std::string fixture_snapshot_log)
    : out_dir_(std::move(out_dir)), approvals_(std::move(approvals)) {
    fs::create_directories(out_dir_);
    if (!fixture_snapshot_log.empty()) {
        fixture_ = experiment::SnapshotLog::read(fixture_snapshot_log);
    }
}

ApprovalState DryRunClient::approval(const experiment::CampaignSpec& campaign) {
    auto it = approvals_.find(campaign.campaign_id);
    return it == approvals_.end() ? ApprovalState::Approved : it->second;
}

namespace {

nlohmann::json campaign_request(const experiment::CampaignSpec& c) {
    nlohmann::json j;
    j["campaign_id"] = c.campaign_id;
    j["objective"] = "traffic";
    j["budget_usd"] = c.budget_usd;
    j["duration_hours"] = c.duration_hours;
    j["special_ad_category"] = c.special_ad_category;
    j["geo_limit"] = c.geo_limit;
    j["creative"] = {{"school", c.creative.school_name},
                     {"kind", experiment::creative_kind_name(c.creative.kind)},
                     {"headline", c.creative.headline},
                     {"image_id", c.creative.image_id},
                     {"image_race_tag", experiment::image_race_tag_name(c.creative.image_race_tag)},
                     {"destination_url", c.creative.destination_url}};
    j["custom_audience"] = {{"name", c.audience->name},
                            {"size", c.audience->members.size()},
                            {"upload", c.audience->name + ".csv"}};
    return j;
}

}  // namespace

void DryRunClient::begin(const PairedExperiment& exp) {
    nlohmann::json j;
    j["experiment_id"] = exp.experiment_id;
    j["campaigns"] = {campaign_request(exp.campaign_a), campaign_request(exp.campaign_b)};
    const std::string path = (fs::path(out_dir_) / (exp.experiment_id + ".json")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    written_.push_back(path);
}

DeliverySnapshot DryRunClient::fetch(const PairedExperiment&, const std::string& campaign_id,
                                     double hour) {
    const DeliverySnapshot* best = nullptr;
    for (const auto& s : fixture_) {
        if (s.campaign_id == campaign_id && s.hour <= hour && (!best || s.hour >= best->hour)) {
            best = &s;
        }
    }
    DeliverySnapshot out;
    if (best) out = *best;
    out.campaign_id = campaign_id;
    out.hour = hour;
    out.terminal = false;
    out.total_reach = out.region_sum();
    return out;
}

ReplayClient::ReplayClient(const std::string& snapshot_log_path) : path_(snapshot_log_path) {
    if (!fs::exists(snapshot_log_path)) {
        throw MissingArtifactError("missing snapshot log: " + snapshot_log_path);
    }
    series_ = experiment::SnapshotLog::read(snapshot_log_path);
    if (series_.empty()) {
        throw MissingArtifactError("snapshot log is empty: " + snapshot_log_path);
    }
}

DeliverySnapshot ReplayClient::fetch(const PairedExperiment&, const std::string& campaign_id,
                                     double hour) {
    const DeliverySnapshot* best = nullptr;
    for (const auto& s : series_) {
        if (s.campaign_id == campaign_id && s.hour <= hour && (!best || s.hour >= best->hour)) {
            best = &s;
        }
    }
    if (!best) {
        DeliverySnapshot empty;
        empty.campaign_id = campaign_id;
        empty.hour = hour;
        return empty;
    }
    return *best;
}

DeliverySnapshot ReplayClient::terminal(const std::string& campaign_id) const {
    const DeliverySnapshot* found = nullptr;
    for (const auto& s : series_) {
        if (s.campaign_id == campaign_id && s.terminal) found = &s;
    }
    if (!found) {
        throw MissingArtifactError("no terminal snapshot for " + campaign_id + " in " + path_);
    }
    return *found;
}

}  // namespace adaudit::clients
