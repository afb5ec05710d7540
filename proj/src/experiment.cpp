#include "adaudit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "adaudit/errors.hpp"
#include "adaudit/log.hpp"

namespace adaudit::experiment {

const char* creative_kind_name(CreativeKind k) {
    return k == CreativeKind::Neutral ? "neutral" : "realistic";
}

CreativeKind creative_kind_from_name(const std::string& name) {
    if (name == "neutral") return CreativeKind::Neutral;
    if (name == "realistic") return CreativeKind::Realistic;
    throw ConfigError("unknown creative kind: " + name);
}

const char* image_race_tag_name(ImageRaceTag t) {
    switch (t) {
        case ImageRaceTag::None: return "none";
        case ImageRaceTag::PerceivedBlack: return "perceived_black";
        default: return "perceived_white";
    }
}

void AdCreative::validate() const {
    if (school_name.empty()) throw ValidationError("creative without school");
    if (kind == CreativeKind::Neutral && image_race_tag != ImageRaceTag::None) {
        throw ValidationError(school_name + ": neutral creative with a perceived-race tag");
    }
}

void CampaignSpec::validate() const {
    creative.validate();
    if (objective != Objective::Traffic) throw ValidationError(campaign_id + ": objective must be Traffic");
    if (special_ad_category) {
        throw ValidationError(campaign_id + ": education ads are not a special ad category");
    }
    if (geo_limit != "US") throw ValidationError(campaign_id + ": geo limit must be US");
    if (budget_usd <= 0.0) throw ValidationError(campaign_id + ": budget must be positive");
    if (duration_hours == 0) throw ValidationError(campaign_id + ": duration must be positive");
    if (!audience) throw ValidationError(campaign_id + ": no audience attached");
}

namespace {

bool same_members(const audience::AudiencePartition& a, const audience::AudiencePartition& b) {
    if (a.members.size() != b.members.size()) return false;
    std::unordered_set<std::string> keys;
    keys.reserve(a.members.size() * 2);
    for (const auto& m : a.members) keys.insert(m.contact_key);
    for (const auto& m : b.members) {
        if (!keys.count(m.contact_key)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::string> validate_pairing(const PairedExperiment& exp) {
    std::vector<std::string> violations;
    const auto& a = exp.campaign_a;
    const auto& b = exp.campaign_b;
    if (a.budget_usd != b.budget_usd) violations.push_back("budget mismatch");
    if (a.duration_hours != b.duration_hours) violations.push_back("duration mismatch");
    if (a.objective != b.objective) violations.push_back("objective mismatch");
    if (a.special_ad_category != b.special_ad_category) {
        violations.push_back("special ad category mismatch");
    }
    if (a.geo_limit != b.geo_limit) violations.push_back("geo limit mismatch");
    if (!a.audience || !b.audience) {
        violations.push_back("audience missing");
    } else if (a.audience != b.audience &&
               (a.audience->name != b.audience->name || !same_members(*a.audience, *b.audience))) {
        violations.push_back("audience mismatch");
    }
    return violations;
}

std::uint64_t DeliverySnapshot::region_sum() const {
    std::uint64_t sum = 0;
    for (const auto& [_, v] : unique_impressions_by_region) sum += v;
    return sum;
}

RunHandle launch(const PairedExperiment& exp, PlatformClient& client) {
    exp.campaign_a.validate();
    exp.campaign_b.validate();
    auto violations = validate_pairing(exp);
    if (!violations.empty()) {
        std::string msg = exp.experiment_id + ": pairing violations:";
        for (const auto& v : violations) msg += " [" + v + "]";
        throw ValidationError(msg);
    }
    for (const CampaignSpec* c : {&exp.campaign_a, &exp.campaign_b}) {
        const auto state = client.approval(*c);
        if (state == ApprovalState::Pending) {
            throw PlatformError("launch refused: approval pending for " + c->campaign_id, false);
        }
        if (state == ApprovalState::Denied) {
            throw PlatformError("launch refused: approval denied for " + c->campaign_id, false);
        }
    }
    client.begin(exp);
    RunHandle run;
    run.exp = exp;
    run.exp.launch_time_epoch_s =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    run.client = &client;
    run.active = true;
    return run;
}

SnapshotLog::SnapshotLog(const std::string& path) : writer_(std::make_unique<csv::Writer>(path)) {
    writer_->row({"campaign_id", "hour", "region", "unique_impressions", "terminal"});
}

void SnapshotLog::append(const DeliverySnapshot& snap) {
    char hour[32];
    std::snprintf(hour, sizeof(hour), "%.3f", snap.hour);
    if (snap.unique_impressions_by_region.empty()) {
        // Keep a row so degenerate runs still leave a terminal marker.
        writer_->row({snap.campaign_id, hour, "", "0", snap.terminal ? "1" : "0"});
        return;
    }
    for (const auto& [region, count] : snap.unique_impressions_by_region) {
        writer_->row({snap.campaign_id, hour, region, std::to_string(count),
                      snap.terminal ? "1" : "0"});
    }
}

void SnapshotLog::close() {
    if (writer_) writer_->close();
    writer_.reset();
}

std::vector<DeliverySnapshot> SnapshotLog::read(const std::string& path) {
    auto t = csv::read_file(path);
    const auto cid = t.require_column("campaign_id");
    const auto hour = t.require_column("hour");
    const auto region = t.require_column("region");
    const auto imp = t.require_column("unique_impressions");
    const auto term = t.require_column("terminal");

    std::vector<DeliverySnapshot> out;
    for (const auto& row : t.rows) {
        const double h = std::stod(row[hour]);
        DeliverySnapshot* snap = nullptr;
        if (!out.empty() && out.back().campaign_id == row[cid] && out.back().hour == h) {
            snap = &out.back();
        } else {
            out.emplace_back();
            snap = &out.back();
            snap->campaign_id = row[cid];
            snap->hour = h;
        }
        snap->terminal = row[term] == "1";
        if (!row[region].empty()) {
            snap->unique_impressions_by_region[row[region]] =
                static_cast<std::uint64_t>(std::stoull(row[imp]));
        }
        snap->total_reach = snap->region_sum();
    }
    return out;
}

std::map<std::string, DeliverySnapshot> SnapshotLog::terminal_by_campaign(
    const std::vector<DeliverySnapshot>& series) {
    std::map<std::string, DeliverySnapshot> out;
    for (const auto& s : series) {
        if (s.terminal) out[s.campaign_id] = s;
    }
    return out;
}

namespace {

DeliverySnapshot fetch_with_retry(RunHandle& run, const std::string& campaign_id, double hour) {
    constexpr int kMaxAttempts = 3;
    for (int attempt = 1;; ++attempt) {
        try {
            return run.client->fetch(run.exp, campaign_id, hour);
        } catch (const PlatformError& e) {
            if (!e.retryable || attempt >= kMaxAttempts) throw;
            log::warn(std::string("fetch retry after transient failure: ") + e.what());
        }
    }
}

}  // namespace

std::vector<DeliverySnapshot> poll(RunHandle& run, double interval_hours, SnapshotLog* log_out) {
    if (!run.client) throw ValidationError("poll: run has no client");
    if (interval_hours <= 0.0) throw ValidationError("poll: interval must be positive");

    const double duration = run.exp.campaign_a.duration_hours;
    std::vector<DeliverySnapshot> series;
    std::map<std::string, std::map<std::string, std::uint64_t>> last_counts;

    for (double hour = interval_hours;; hour += interval_hours) {
        const bool final_tick = hour >= duration;
        const double at = final_tick ? duration : hour;
        for (const auto* c : {&run.exp.campaign_a, &run.exp.campaign_b}) {
            auto snap = fetch_with_retry(run, c->campaign_id, at);
            snap.terminal = final_tick;
            auto& prev = last_counts[c->campaign_id];
            for (const auto& [region, count] : snap.unique_impressions_by_region) {
                auto it = prev.find(region);
                if (it != prev.end() && count < it->second) {
                    snap.integrity_warnings.push_back(
                        region + ": unique impressions decreased from " +
                        std::to_string(it->second) + " to " + std::to_string(count));
                }
                prev[region] = count;
            }
            if (log_out) log_out->append(snap);
            series.push_back(std::move(snap));
        }
        if (final_tick) break;
    }
    run.active = false;
    return series;
}

}  // namespace adaudit::experiment
