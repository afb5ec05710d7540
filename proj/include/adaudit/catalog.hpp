#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adaudit::catalog {

enum class Sector : std::uint8_t { ForProfit, Public, PrivateNonProfit };

const char* sector_name(Sector s);
Sector sector_from_name(const std::string& name);

// One catalog row (College-Scorecard-style). Percentages are 0..100.
struct School {
    std::string name;
    Sector sector = Sector::Public;
    double pct_black = 0.0;
    double pct_white = 0.0;
    double pct_other = 0.0;
    double admit_rate = 0.0;
    std::uint64_t enrollment = 0;
    bool four_year = false;
    bool online_program = false;
    bool active_platform_page = false;
    bool active_advertiser = false;

    // Black-minus-White enrollment share; the pairing sort key.
    double skew_difference() const { return pct_black - pct_white; }
    void validate() const;
};

struct SchoolPair {
    std::string pair_id;
    School skewed_school;  // for-profit, or explicit-mode private school
    School public_school;

    void validate() const;
};

struct ShortlistCriteria {
    bool require_four_year = true;
    bool require_online_program = true;
    std::uint64_t min_enrollment = 5000;
    bool require_active_page = true;
    bool require_active_advertiser = true;
    double admit_rate_floor = 50.0;
    // Schools under the admit floor are kept with a warning instead of
    // dropped; the floor is a soft criterion in the source methodology.
    bool admit_floor_warn_only = false;
};

struct ShortlistResult {
    std::vector<School> for_profit;
    std::vector<School> publics;
    std::vector<std::string> warnings;
};

// Filter the catalog into for-profit and public shortlists. Private
// non-profits never pass (they enter only through the explicit list mode).
ShortlistResult shortlist(const std::vector<School>& schools, const ShortlistCriteria& criteria);

// The sorted-difference pairing: for-profits by descending (Black - White)
// share, publics by descending (White - Black) share, zipped positionally.
// Ties break by name so the output is invariant to input order.
std::vector<SchoolPair> pair_schools(std::vector<School> for_profit, std::vector<School> publics);

// Explicit-selection mode: the caller fixes the skewed-school list and its
// order; publics are taken positionally, no sorting.
std::vector<SchoolPair> pair_schools_explicit(const std::vector<School>& skewed,
                                              const std::vector<School>& publics);

// Enrollment-weighted Black share per sector. A sector with zero total
// enrollment has no defined value.
std::map<Sector, std::optional<double>> defacto_skew(const std::vector<School>& schools);

std::vector<School> load_catalog_csv(const std::string& path);
void write_pairs_csv(const std::vector<SchoolPair>& pairs, const std::string& path);
std::vector<SchoolPair> load_pairs_csv(const std::string& path);

}  // namespace adaudit::catalog
